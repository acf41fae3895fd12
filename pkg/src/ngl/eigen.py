"""Generalized eigenproblem -lap(phi) = lambda q phi on the periodic grid.

In the conformal chart the Laplace-Beltrami eigenvalue equation turns into a
flat equation with the conformal factor as a mass weight, so the discrete
problem is L phi = lambda Q phi with L the 5-point periodic stencil (negated,
positive semidefinite) and Q the diagonal of q samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceError
from .surface import ConformalMetric, GridField, TORUS

_LAMBDA_ZERO_TOL = 1e-6  # below this a computed eigenvalue is the constant mode


@dataclass
class EigenPair:
    """One eigenpair, sup-normalized (max |phi| = 1).

    ``residual`` is the discrete defect ||L phi - lam Q phi||_2 / ||phi||_2
    measured before normalization (the ratio is scale invariant).
    """
    lam: float
    field: GridField
    residual: float

    @property
    def is_constant(self) -> bool:
        return self.lam <= _LAMBDA_ZERO_TOL


@dataclass
class Spectrum:
    pairs: list[EigenPair]
    metric: ConformalMetric
    orthogonality_error: float = 0.0

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def nonconstant(self) -> list[EigenPair]:
        return [p for p in self.pairs if not p.is_constant]


def assemble_operators(metric: ConformalMetric):
    """Sparse (L, Q): 5-point periodic negated Laplacian and diagonal mass.

    Both symmetric; L annihilates constants (zero row sums).
    """
    n = metric.grid_n
    h = metric.spacing
    e = np.ones(n)
    second = sp.diags([2 * e, -e[:-1], -e[:-1]], [0, 1, -1], format="lil")
    second[0, n - 1] = -1.0
    second[n - 1, 0] = -1.0
    second = second.tocsr() / (h * h)
    eye = sp.identity(n, format="csr")
    # index = i*n + j with values[i, j] = f(x_i, y_j)
    lap = sp.kron(second, eye, format="csr") + sp.kron(eye, second, format="csr")
    mass = sp.diags(metric.q.ravel(order="C"), format="csr")
    return lap, mass


def _residuals(lap, mass, lams, vecs):
    out = []
    for k in range(vecs.shape[1]):
        v = vecs[:, k]
        r = lap @ v - lams[k] * (mass @ v)
        out.append(float(np.linalg.norm(r) / np.linalg.norm(v)))
    return out


def _canonical_sign(v):
    idx = int(np.argmax(np.abs(v)))
    return v if v[idx] >= 0 else -v


def solve_spectrum(metric: ConformalMetric, count, tol=1e-8, seed=0,
                   maxiter=None) -> Spectrum:
    """Smallest ``count`` eigenpairs by shift-invert Lanczos.

    Eigenvectors are Q-orthonormal before sup-normalization; every returned
    pair carries a recomputed residual certificate, and the solve errors out
    (with the best residual) if any certificate exceeds ``tol``.
    """
    n = metric.grid_n
    if count > n * n // 4:
        raise ValueError("count exceeds grid_n^2 / 4")
    if tol < 1e-10:
        raise ValueError("tol must be at least 1e-10")
    lap, mass = assemble_operators(metric)
    rng = np.random.Generator(np.random.Philox(key=seed))
    v0 = rng.standard_normal(n * n)
    sigma = -float(metric.q_plus)
    try:
        lams, vecs = spla.eigsh(lap, k=count, M=mass, sigma=sigma,
                                which="LM", v0=v0, maxiter=maxiter)
    except spla.ArpackNoConvergence as exc:
        best = None
        if exc.eigenvalues is not None and len(exc.eigenvalues):
            res = _residuals(lap, mass, exc.eigenvalues, exc.eigenvectors)
            best = min(res)
        raise ConvergenceError("eigensolver did not converge", residual=best) from exc

    order = np.argsort(lams)
    lams = lams[order]
    vecs = vecs[:, order]
    lams = np.where(np.abs(lams) < _LAMBDA_ZERO_TOL, np.abs(lams), lams)

    gram = vecs.T @ (mass @ vecs)
    ortho_err = float(np.max(np.abs(gram - np.eye(count))))
    if ortho_err > 1e-8:
        vecs = _mass_gram_schmidt(vecs, mass)
        gram = vecs.T @ (mass @ vecs)
        ortho_err = float(np.max(np.abs(gram - np.eye(count))))

    residuals = _residuals(lap, mass, lams, vecs)
    worst = max(residuals)
    if worst > tol:
        raise ConvergenceError(
            f"residual {worst:.3e} exceeds tolerance {tol:.3e}", residual=worst)

    pairs = []
    for k in range(count):
        v = _canonical_sign(vecs[:, k])
        v = v / np.max(np.abs(v))
        pairs.append(EigenPair(lam=float(lams[k]),
                               field=GridField(v.reshape(n, n), domain=TORUS),
                               residual=residuals[k]))
    return Spectrum(pairs=pairs, metric=metric, orthogonality_error=ortho_err)


def _mass_gram_schmidt(vecs, mass):
    out = vecs.copy()
    for k in range(out.shape[1]):
        v = out[:, k]
        for j in range(k):
            v = v - (out[:, j] @ (mass @ v)) * out[:, j]
        out[:, k] = v / np.sqrt(v @ (mass @ v))
    return out


def analytic_eigenpair(m, n_wave, phase=0.0, grid_n=256) -> EigenPair:
    """Closed-form flat-torus eigenpair cos(2 pi (m x + n y) + phase).

    The residual is measured honestly by applying the discrete stencil to the
    sampled field, so it reflects the symbol deficit of the 5-point scheme.
    """
    if m == 0 and n_wave == 0:
        field = GridField(np.ones((grid_n, grid_n)), domain=TORUS)
        return EigenPair(lam=0.0, field=field, residual=0.0)
    coords = np.arange(grid_n) / grid_n
    x, y = np.meshgrid(coords, coords, indexing="ij")
    phi = np.cos(2 * np.pi * (m * x + n_wave * y) + phase)
    lam = 4 * np.pi ** 2 * (m * m + n_wave * n_wave)
    h = 1.0 / grid_n
    lap_phi = (4 * phi
               - np.roll(phi, 1, axis=0) - np.roll(phi, -1, axis=0)
               - np.roll(phi, 1, axis=1) - np.roll(phi, -1, axis=1)) / (h * h)
    res = float(np.linalg.norm(lap_phi - lam * phi) / np.linalg.norm(phi))
    sup = np.max(np.abs(phi))
    return EigenPair(lam=float(lam), field=GridField(phi / sup, domain=TORUS),
                     residual=res)


def analytic_spectrum(grid_n, count, include_constant=True) -> Spectrum:
    """First ``count`` flat-torus eigenpairs in closed form.

    Enumerates lattice shells m^2 + n^2 ascending; each representative
    (m, n) with m > 0 or (m = 0, n > 0) contributes a cosine and a sine
    eigenfunction, which reproduces the exact multiplicities.
    """
    bound = 2
    while True:
        # only shells m^2 + n^2 <= bound^2 are complete inside the box
        reps = [(m, n) for m in range(0, bound + 1)
                for n in range(-bound, bound + 1)
                if (m > 0 or (m == 0 and n > 0)) and m * m + n * n <= bound * bound]
        if 2 * len(reps) >= count:
            break
        bound += 1
    reps.sort(key=lambda mn: (mn[0] ** 2 + mn[1] ** 2, mn[0], mn[1]))
    modes = []
    for m, n in reps:
        modes.append((m, n, 0.0))          # cos(2 pi (m x + n y))
        modes.append((m, n, -np.pi / 2))   # sin(2 pi (m x + n y))
    pairs = []
    if include_constant:
        pairs.append(analytic_eigenpair(0, 0, grid_n=grid_n))
    for m, n, phase in modes[:count]:
        pairs.append(analytic_eigenpair(m, n, phase=phase, grid_n=grid_n))
    metric = ConformalMetric(q=np.ones((grid_n, grid_n)), q_minus=1.0,
                             q_plus=1.0, volume=1.0, alpha0=0.2, profile="flat")
    return Spectrum(pairs=pairs, metric=metric, orthogonality_error=0.0)


def counting_function(spectrum: Spectrum, threshold) -> int:
    return sum(1 for p in spectrum.pairs if p.lam <= threshold)


def lattice_count(threshold) -> int:
    """Number of integer pairs (m, n) with 4 pi^2 (m^2 + n^2) <= threshold."""
    bound = int(np.floor(np.sqrt(threshold / (4 * np.pi ** 2)))) + 1
    count = 0
    for m in range(-bound, bound + 1):
        for n in range(-bound, bound + 1):
            if 4 * np.pi ** 2 * (m * m + n * n) <= threshold:
                count += 1
    return count
