"""Experiment orchestration: configs, pipelines, result persistence, plots.

Commands: spectrum, nodal, growth, thm1, localize, tile, rapid, crofton,
harmonic, carleman, all.  Configuration is a versioned JSON document merged
over defaults and validated up front; reruns with the same config and seed
are byte-identical in single-threaded mode (exit codes: 0 success, 2 invalid
configuration, 3 numerical failure).

numpy is imported lazily so that --threads can pin the BLAS thread count
before anything numerical loads.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import os
import sys

from .errors import (ConfigError, ConstraintError, ConvergenceError,
                     InfiniteGrowthError, NglError, ResolutionError)

DEFAULT_CONFIG = {
    "schema_version": 1,
    "metric": {"profile": "flat", "grid_n": 320, "params": {}},
    "eigen": {"count": 20, "tol": 1e-8, "seed": 0, "solver": "auto",
              "maxiter": None},
    "growth": {"k0": 0.5, "sample_grid_m": 64, "k0_sweep": []},
    "localize": {"p": [0.0, 0.0], "eps0": 0.1, "planar_grid_n": 1024,
                 "index": 2},
    "schrodinger": {"a": 0.1, "m_threshold": 10.0, "delta": 1e-4},
    "tiling": {"delta0": None, "k_max": 8, "core_grid_n": 1025},
    "crofton": {"kernel": "disk", "r": 0.05, "samples": 100000, "seed": 0,
                "curve": "segment"},
    "harmonic": {"rho_plus": 0.03125, "rho_minus": None, "r0": 0.25,
                 "n_traces": 100, "max_degree": 10, "seed": 0},
    "carleman": {"a": 0.1, "t_values": [1.0, 5.0, 20.0], "pairs": 60,
                 "seed": 0, "delta": 1e-3, "n_centers": 3},
    "output": {"dir": "out"},
}

COMMANDS = ("spectrum", "nodal", "growth", "thm1", "localize", "tile",
            "rapid", "crofton", "harmonic", "carleman", "all")


def deep_merge(base, override):
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def canonical_hash(cfg) -> str:
    """Hash of the semantic config: key order and the output location are
    presentation details and do not participate."""
    stripped = {k: v for k, v in cfg.items() if k != "output"}
    blob = json.dumps(stripped, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


def load_config(path=None, overrides=None, command=None):
    user = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            user = json.load(f)
    cfg = deep_merge(DEFAULT_CONFIG, user)
    if overrides:
        cfg = deep_merge(cfg, overrides)
    validate_config(cfg, command=command)
    return cfg


def _profile_sup(cfg):
    profile = cfg["metric"]["profile"]
    params = cfg["metric"].get("params", {})
    if profile == "flat":
        return float(params.get("value", 1.0))
    if profile in ("wave", "stripe"):
        return 1.0 + abs(float(params.get("amplitude",
                                          0.2 if profile == "wave" else 0.3)))
    raise ConfigError(f"unknown metric profile {profile!r}")


def _flat_lambda_of_count(count):
    """Eigenvalue of the count-th nonconstant flat-torus mode."""
    shells = []
    bound = 2
    while True:
        vals = sorted(m * m + n * n for m in range(-bound, bound + 1)
                      for n in range(-bound, bound + 1)
                      if (m, n) != (0, 0) and m * m + n * n <= bound * bound)
        if len(vals) >= count:
            shells = vals
            break
        bound += 1
    return 4 * math.pi ** 2 * shells[count - 1]


_GROWTH_COMMANDS = ("growth", "thm1", "all")
_LOCALIZE_COMMANDS = ("localize", "tile", "rapid", "all")


def validate_config(cfg, command=None):
    if cfg.get("schema_version") != 1:
        raise ConfigError("unsupported schema_version")
    grid_n = cfg["metric"]["grid_n"]
    if grid_n < 16:
        raise ConfigError("metric.grid_n must be at least 16")
    eig = cfg["eigen"]
    if eig["count"] < 1 or eig["count"] > grid_n * grid_n // 4:
        raise ConfigError("eigen.count must lie in [1, grid_n^2/4]")
    if eig["tol"] < 1e-10:
        raise ConfigError("eigen.tol must be at least 1e-10")
    k0 = cfg["growth"]["k0"]
    if k0 <= 0:
        raise ConfigError("growth.k0 must be positive")
    q_sup = _profile_sup(cfg)
    if command in _GROWTH_COMMANDS:
        # wavelength disks of the largest configured mode must span >= 10 cells
        lam_max = _flat_lambda_of_count(eig["count"]) * q_sup
        need = 10 * math.sqrt(lam_max * q_sup) / k0
        if grid_n < need:
            raise ConfigError(
                f"grid_n = {grid_n} cannot resolve wavelength disks for "
                f"{eig['count']} modes at k0 = {k0}; need grid_n >= "
                f"{math.ceil(need)}")
    if command in _LOCALIZE_COMMANDS:
        lam_loc = _flat_lambda_of_count(cfg["localize"]["index"]) * q_sup
        q_inf = max(2.0 - q_sup, 0.01)   # profiles here are symmetric about 1
        tau_min = 2.0 * q_inf / 5.0
        need = 10 * math.sqrt(lam_loc) / (tau_min * k0)
        if grid_n < need:
            raise ConfigError(
                f"grid_n = {grid_n} cannot resolve the rescaled patch for "
                f"localize.index = {cfg['localize']['index']}; need grid_n >= "
                f"{math.ceil(need)}")
    delta = cfg["schrodinger"]["delta"]
    if not (0 < delta < 1.0 / 60.0):
        raise ConfigError("schrodinger.delta must lie in (0, 1/60)")
    a = cfg["schrodinger"]["a"]
    if not (0 < a < 1.0 / 3.0):
        raise ConfigError("schrodinger.a must lie in (0, 1/3)")
    if cfg["crofton"]["samples"] < 1:
        raise ConfigError("crofton.samples must be positive")
    if cfg["crofton"]["kernel"] not in ("disk", "circle"):
        raise ConfigError("crofton.kernel must be disk or circle")
    rp = cfg["harmonic"]["rho_plus"]
    if not (0 < rp < 0.5):
        raise ConfigError("harmonic.rho_plus must lie in (0, 1/2)")
    if cfg["carleman"]["pairs"] < 1:
        raise ConfigError("carleman.pairs must be positive")


# --------------------------------------------------------------------------
# records and writers


class ResultRecord:
    """Collected outputs of one command run.

    The wall-clock timestamp lives only on the in-memory object; serialized
    artifacts must be byte-identical across reruns.
    """

    def __init__(self, command, config_hash):
        import time
        self.command = command
        self.config_hash = config_hash
        self.rows = []
        self.constants = {}
        self.artifacts = []
        self.timestamp = time.time()

    def add_artifact(self, path, out_dir):
        self.artifacts.append(os.path.relpath(path, out_dir))

    def to_json(self):
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "constants": self.constants,
            "rows": self.rows,
            "artifacts": sorted(self.artifacts),
        }


def _write_json(obj, path):
    with open(path, "w", encoding="ascii") as f:
        json.dump(obj, f, sort_keys=True, indent=1)
        f.write("\n")


# --------------------------------------------------------------------------
# shared pipeline pieces


def _build_metric(cfg):
    from .surface import make_metric
    return make_metric(cfg["metric"]["profile"], cfg["metric"]["grid_n"],
                       **cfg["metric"].get("params", {}))


def _spectrum_cache_key(cfg):
    return canonical_hash({"metric": cfg["metric"], "eigen": cfg["eigen"]})[:16]


def _get_spectrum(cfg, out_dir, record=None):
    """Solve (or load from cache) the configured spectrum."""
    from .eigen import Spectrum, EigenPair, analytic_spectrum, solve_spectrum
    from .surface import read_gfd, write_gfd

    metric = _build_metric(cfg)
    solver = cfg["eigen"]["solver"]
    if solver == "auto":
        solver = "analytic" if metric.is_flat and metric.q_plus == 1.0 else "iterative"
    cache_dir = os.path.join(out_dir, "spectrum_cache", _spectrum_cache_key(cfg))
    index_path = os.path.join(cache_dir, "index.json")
    count = cfg["eigen"]["count"]
    if os.path.exists(index_path):
        with open(index_path, "r", encoding="ascii") as f:
            index = json.load(f)
        if len(index) >= count + 1:
            pairs = []
            for entry in index[:count + 1]:
                field = read_gfd(os.path.join(cache_dir, entry["file"]))
                pairs.append(EigenPair(lam=entry["lambda"], field=field,
                                       residual=entry["residual"]))
            if record is not None:
                record.constants["spectrum_cache"] = "hit"
            return metric, Spectrum(pairs=pairs, metric=metric)
    if solver == "analytic":
        spectrum = analytic_spectrum(metric.grid_n, count)
        spectrum.metric = metric
    else:
        spectrum = solve_spectrum(metric, count + 1, tol=cfg["eigen"]["tol"],
                                  seed=cfg["eigen"]["seed"],
                                  maxiter=cfg["eigen"].get("maxiter"))
    os.makedirs(cache_dir, exist_ok=True)
    index = []
    for k, pair in enumerate(spectrum.pairs[:count + 1]):
        name = f"eig_{k:03d}.gfd"
        write_gfd(pair.field, os.path.join(cache_dir, name))
        index.append({"lambda": pair.lam, "residual": pair.residual,
                      "file": name})
    _write_json(index, index_path)
    if record is not None:
        record.constants["spectrum_cache"] = "miss"
    return metric, spectrum


def _localized_field(cfg, metric, spectrum):
    from .schrodinger import localize
    idx = cfg["localize"]["index"]
    nonconst = spectrum.nonconstant()
    if not (1 <= idx <= len(nonconst)):
        raise ConfigError(f"localize.index must lie in [1, {len(nonconst)}]")
    pair = nonconst[idx - 1]
    return pair, localize(pair, metric, tuple(cfg["localize"]["p"]),
                          k0=cfg["growth"]["k0"], eps0=cfg["localize"]["eps0"],
                          planar_grid_n=cfg["localize"]["planar_grid_n"])


# --------------------------------------------------------------------------
# commands


def cmd_spectrum(cfg, out_dir, record):
    metric, spectrum = _get_spectrum(cfg, out_dir, record)
    for pair in spectrum:
        record.rows.append({"lambda": pair.lam, "residual": pair.residual})
    path = os.path.join(out_dir, "spectrum.json")
    _write_json(record.rows, path)
    record.add_artifact(path, out_dir)


def cmd_nodal(cfg, out_dir, record):
    from .nodal import (extract_nodal_set, nodal_length, singular_points,
                        segments_to_csv, singular_points_to_csv)
    from .svg import nodal_svg
    metric, spectrum = _get_spectrum(cfg, out_dir)
    idx = cfg["localize"]["index"]
    for k, pair in enumerate(spectrum.nonconstant()):
        ns = extract_nodal_set(pair.field)
        e_len, m_len = nodal_length(ns, metric)
        record.rows.append({"lambda": pair.lam, "euclidean_length": e_len,
                            "metric_length": m_len, "segments": len(ns)})
        if k + 1 == idx:
            pts = singular_points(pair.field)
            seg_path = os.path.join(out_dir, "nodal_segments.csv")
            segments_to_csv(ns, seg_path)
            record.add_artifact(seg_path, out_dir)
            pts_path = os.path.join(out_dir, "singular_points.csv")
            singular_points_to_csv(pts, pts_path)
            record.add_artifact(pts_path, out_dir)
            svg_path = os.path.join(out_dir, "nodal.svg")
            nodal_svg(ns, svg_path, singular=pts)
            record.add_artifact(svg_path, out_dir)
    path = os.path.join(out_dir, "nodal_lengths.json")
    _write_json(record.rows, path)
    record.add_artifact(path, out_dir)


def cmd_growth(cfg, out_dir, record):
    from .growth import (average_local_growth, growth_field,
                         growth_samples_to_csv)
    metric, spectrum = _get_spectrum(cfg, out_dir)
    k0 = cfg["growth"]["k0"]
    m = cfg["growth"]["sample_grid_m"]
    idx = cfg["localize"]["index"]
    for k, pair in enumerate(spectrum.nonconstant()):
        samples = growth_field(pair, metric, k0=k0, sample_grid_m=m)
        avg = average_local_growth(samples, metric)
        record.rows.append({"lambda": pair.lam, "A": avg,
                            "beta_max": max(s.beta for s in samples)})
        if k + 1 == idx:
            path = os.path.join(out_dir, "growth_field.csv")
            growth_samples_to_csv(samples, path)
            record.add_artifact(path, out_dir)
    path = os.path.join(out_dir, "growth.json")
    _write_json(record.rows, path)
    record.add_artifact(path, out_dir)


def cmd_thm1(cfg, out_dir, record):
    from .growth import (donnelly_fefferman_constant, quartile_trend_ratio,
                         report_to_csv, verify_length_growth_bound)
    from .svg import scatter_svg
    metric, spectrum = _get_spectrum(cfg, out_dir)
    k0_values = [cfg["growth"]["k0"]] + list(cfg["growth"]["k0_sweep"])
    for i, k0 in enumerate(k0_values):
        rep = verify_length_growth_bound(metric, spectrum, k0=k0,
                                         sample_grid_m=cfg["growth"]["sample_grid_m"],
                                         skip_unresolved=(i > 0))
        suffix = "" if i == 0 else f"_k0_{k0:g}".replace(".", "p")
        csv_path = os.path.join(out_dir, f"thm1_table{suffix}.csv")
        report_to_csv(rep, csv_path)
        record.add_artifact(csv_path, out_dir)
        summary = rep.summary()
        summary["k0"] = k0
        summary["df_constant"] = donnelly_fefferman_constant(rep)
        summary["quartile_trend"] = quartile_trend_ratio(rep)
        record.rows.append(summary)
        if i == 0:
            svg_path = os.path.join(out_dir, "growth_vs_lambda.svg")
            scatter_svg([r.lam for r in rep.rows],
                        [r.average_growth for r in rep.rows], svg_path)
            record.add_artifact(svg_path, out_dir)
    path = os.path.join(out_dir, "thm1_summary.json")
    _write_json(record.rows, path)
    record.add_artifact(path, out_dir)


def cmd_localize(cfg, out_dir, record):
    from .surface import write_gfd
    metric, spectrum = _get_spectrum(cfg, out_dir)
    pair, pf = _localized_field(cfg, metric, spectrum)
    f_path = os.path.join(out_dir, "localized_field.gfd")
    write_gfd(pf.field, f_path)
    record.add_artifact(f_path, out_dir)
    q_path = os.path.join(out_dir, "localized_potential.gfd")
    write_gfd(pf.potential, q_path)
    record.add_artifact(q_path, out_dir)
    record.rows.append({"lambda": pair.lam, "residual": pf.residual,
                        "potential_sup": pf.meta["potential_sup"],
                        "scale": pf.meta["scale"]})
    path = os.path.join(out_dir, "localize.json")
    _write_json(record.rows, path)
    record.add_artifact(path, out_dir)


def cmd_tile(cfg, out_dir, record):
    from .nodal import extract_nodal_set, singular_points
    from .schrodinger import core_field
    from .svg import tiling_svg
    from .tiling import (coverage_check, level_counts, run_tiling,
                         slow_square_budgets, tiling_to_csv, total_bound_report)
    metric, spectrum = _get_spectrum(cfg, out_dir)
    _, pf = _localized_field(cfg, metric, spectrum)
    state = run_tiling(pf, delta0=cfg["tiling"]["delta0"],
                       m_threshold=cfg["schrodinger"]["m_threshold"],
                       a=cfg["schrodinger"]["a"], k_max=cfg["tiling"]["k_max"])
    core = core_field(pf, grid_n=cfg["tiling"]["core_grid_n"])
    ns = extract_nodal_set(core)
    rep = total_bound_report(state, ns)
    budgets = slow_square_budgets(state, ns)
    coverage = coverage_check(state, singular_points(core))
    csv_path = os.path.join(out_dir, "tiling.csv")
    tiling_to_csv(state, csv_path)
    record.add_artifact(csv_path, out_dir)
    svg_path = os.path.join(out_dir, "tiling.svg")
    tiling_svg(state, svg_path, nodal_set=ns)
    record.add_artifact(svg_path, out_dir)
    record.rows = level_counts(state)
    record.constants.update({
        "beta_star": state.beta_star,
        "h1_core_disk": rep.h1_core_disk,
        "total_ratio": rep.ratio,
        "reconstruction_rel_err": rep.reconstruction_rel_err,
        "uncovered_area": float(coverage.uncovered_area),
        "max_slow_budget_ratio": max((b["ratio"] for b in budgets),
                                     default=0.0),
        "capped": state.capped,
    })
    path = os.path.join(out_dir, "tiling_report.json")
    _write_json({"levels": record.rows, "constants": record.constants}, path)
    record.add_artifact(path, out_dir)


def cmd_rapid(cfg, out_dir, record):
    from .schrodinger import count_rapid_disks, rapid_rows_to_csv
    from .svg import disk_config_svg
    metric, spectrum = _get_spectrum(cfg, out_dir)
    _, pf = _localized_field(cfg, metric, spectrum)
    rep = count_rapid_disks(pf, cfg["schrodinger"]["delta"],
                            cfg["schrodinger"]["m_threshold"],
                            a=cfg["schrodinger"]["a"])
    csv_path = os.path.join(out_dir, "rapid_disks.csv")
    rapid_rows_to_csv(rep, csv_path)
    record.add_artifact(csv_path, out_dir)
    svg_path = os.path.join(out_dir, "disk_config.svg")
    disk_config_svg(rep.rows, svg_path, cfg["schrodinger"]["delta"])
    record.add_artifact(svg_path, out_dir)
    record.constants.update({"n_rapid": rep.n_rapid, "n_probes": rep.n_probes,
                             "beta_star": rep.beta_star, "ratio": rep.ratio})
    path = os.path.join(out_dir, "rapid_report.json")
    _write_json(record.constants, path)
    record.add_artifact(path, out_dir)


def cmd_crofton(cfg, out_dir, record):
    from .crofton import (circle_count_length, crofton_consistency,
                          disk_average_length, synthetic_circle,
                          synthetic_segment)
    c = cfg["crofton"]
    curve_kind = c["curve"]
    if curve_kind == "segment":
        curve = synthetic_segment()
    elif curve_kind == "circle":
        curve = synthetic_circle()
    elif curve_kind == "eigenfunction":
        from .nodal import extract_nodal_set
        metric, spectrum = _get_spectrum(cfg, out_dir)
        idx = cfg["localize"]["index"]
        curve = extract_nodal_set(spectrum.nonconstant()[idx - 1].field)
    else:
        raise ConfigError(f"unknown crofton.curve {curve_kind!r}")
    fn = disk_average_length if c["kernel"] == "disk" else circle_count_length
    est = fn(curve, c["r"], c["samples"], seed=c["seed"])
    out = {"value": est.value, "stderr": est.stderr, "samples": est.samples}
    record.constants.update(out)
    if curve_kind == "eigenfunction":
        record.constants["consistency"] = crofton_consistency(
            curve, r=c["r"], samples=c["samples"], seed=c["seed"])
    path = os.path.join(out_dir, "crofton.json")
    _write_json(record.constants, path)
    record.add_artifact(path, out_dir)


def cmd_harmonic(cfg, out_dir, record):
    import numpy as np
    from .harmonic import (CircleTrace, growth_vs_signs_check,
                           robertson_constant, trace_from_function)
    hc = cfg["harmonic"]
    rng = np.random.Generator(np.random.Philox(key=hc["seed"]))
    all_hold = True
    worst = None
    for _ in range(hc["n_traces"]):
        deg = int(rng.integers(1, hc["max_degree"] + 1))
        coef_a = rng.normal(size=deg + 1)
        coef_b = rng.normal(size=deg + 1)
        th = np.arange(512) * (2 * np.pi / 512)
        vals = np.zeros_like(th)
        for k in range(deg + 1):
            vals += coef_a[k] * np.cos(k * th) + coef_b[k] * np.sin(k * th)
        rep = growth_vs_signs_check(CircleTrace(vals), hc["r0"])
        all_hold &= rep.holds
        gap = rep.rhs_log - math.log(max(rep.lhs_ratio, 1e-300))
        if worst is None or gap < worst:
            worst = gap
    for n in range(1, 11):
        tr = trace_from_function(lambda x, y, n=n: np.real((x + 1j * y) ** n))
        rep = growth_vs_signs_check(tr, hc["r0"])
        all_hold &= rep.holds
    record.constants.update({
        "sweep_holds": bool(all_hold),
        "min_log_gap": worst,
        "robertson": [{"p": p, "value": robertson_constant(p).value}
                      for p in range(0, 8)],
    })
    path = os.path.join(out_dir, "harmonic_report.json")
    _write_json(record.constants, path)
    record.add_artifact(path, out_dir)


def cmd_carleman(cfg, out_dir, record):
    import numpy as np
    from .carleman import (build_psi0, build_weight, c1_test_family,
                           carleman_c1_check, check_subharmonic_inequality,
                           random_test_field)
    cc = cfg["carleman"]
    a = cc["a"]
    radial = build_psi0(a)
    centers = [(0.01 * math.cos(t), 0.01 * math.sin(t))
               for t in [2 * math.pi * k / cc["n_centers"]
                         for k in range(cc["n_centers"])]]
    reports = []
    pairs_per = max(1, cc["pairs"] // (2 * len(cc["t_values"])))
    min_margin = math.inf
    k = 0
    for t in cc["t_values"]:
        for cs in ((), tuple(centers)):
            weight = build_weight(cs, cc["delta"], a=a, t=t, radial=radial)
            for _ in range(pairs_per):
                rng = np.random.Generator(np.random.Philox(key=(cc["seed"], k)))
                u = random_test_field(rng, weight=weight)
                rep = check_subharmonic_inequality(u, weight)
                min_margin = min(min_margin, rep.margin / rep.scale)
                k += 1
    reports.append({"inequality": "weighted-dbar-lower-bound",
                    "family_size": k, "min_margin": min_margin,
                    "empirical_constant": None})
    weight = build_weight(centers, cc["delta"], a=a, t=max(1.0, cc["t_values"][0]),
                          radial=radial)
    c10 = math.inf
    n_c1 = max(10, cc["pairs"] // 2)
    rng = np.random.Generator(np.random.Philox(key=(cc["seed"], 10_000)))
    for f in c1_test_family(rng, weight, n_c1):
        rep = carleman_c1_check(f, weight)
        if not rep.degenerate:
            c10 = min(c10, rep.empirical_constant)
    reports.append({"inequality": "carleman-laplacian",
                    "family_size": n_c1, "min_margin": None,
                    "empirical_constant": c10})
    record.rows = reports
    record.constants["ode_residual"] = radial.ode_residual
    path = os.path.join(out_dir, "carleman_report.json")
    _write_json(reports, path)
    record.add_artifact(path, out_dir)


_COMMAND_FNS = {
    "spectrum": cmd_spectrum,
    "nodal": cmd_nodal,
    "growth": cmd_growth,
    "thm1": cmd_thm1,
    "localize": cmd_localize,
    "tile": cmd_tile,
    "rapid": cmd_rapid,
    "crofton": cmd_crofton,
    "harmonic": cmd_harmonic,
    "carleman": cmd_carleman,
}


def emit_plots(record, out_dir):
    """Re-render the figures belonging to a record from its CSV artifacts.

    Deterministic: regenerated files are byte-identical to the ones the
    command wrote.  Returns the list of SVG paths produced.
    """
    import numpy as np
    from .nodal import NodalSet
    from .svg import nodal_svg, scatter_svg
    produced = []
    artifacts = set(record.artifacts if hasattr(record, "artifacts")
                    else record.get("artifacts", []))
    for name in sorted(artifacts):
        path = os.path.join(out_dir, name)
        if name.endswith("thm1_table.csv"):
            rows = [line.split(",") for line
                    in open(path, encoding="ascii").read().splitlines()[1:]]
            svg_path = os.path.join(out_dir, "growth_vs_lambda.svg")
            scatter_svg([float(r[0]) for r in rows],
                        [float(r[1]) for r in rows], svg_path)
            produced.append(svg_path)
        elif name.endswith("nodal_segments.csv"):
            rows = [line.split(",") for line
                    in open(path, encoding="ascii").read().splitlines()[1:]]
            seg = (np.array([[float(v) for v in r] for r in rows])
                   if rows else np.empty((0, 4)))
            singular = []
            pts_path = os.path.join(out_dir, "singular_points.csv")
            if "singular_points.csv" in artifacts and os.path.exists(pts_path):
                singular = [tuple(float(v) for v in line.split(","))
                            for line in open(pts_path, encoding="ascii")
                            .read().splitlines()[1:]]
            svg_path = os.path.join(out_dir, "nodal.svg")
            nodal_svg(NodalSet(seg), svg_path, singular=singular)
            produced.append(svg_path)
    return produced


def run(command, cfg, out_dir=None) -> ResultRecord:
    """Execute one command; returns the record after writing its artifacts."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if out_dir is None:
        out_dir = cfg["output"]["dir"]
    os.makedirs(out_dir, exist_ok=True)
    record = ResultRecord(command, canonical_hash(cfg))
    if command == "all":
        for sub in COMMANDS[:-1]:
            sub_record = ResultRecord(sub, record.config_hash)
            _COMMAND_FNS[sub](cfg, out_dir, sub_record)
            record.rows.append({sub: sub_record.to_json()})
        record_path = os.path.join(out_dir, "record.json")
        _write_json(record.to_json(), record_path)
        return record
    _COMMAND_FNS[command](cfg, out_dir, record)
    record_path = os.path.join(out_dir, f"record_{command}.json")
    _write_json(record.to_json(), record_path)
    return record


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ngl",
        description="nodal-set and growth-exponent laboratory")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="path to a JSON config")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override every per-module seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="BLAS/OpenMP thread cap (set before numpy loads)")
    parser.add_argument("--kernel", choices=("disk", "circle"), default=None)
    parser.add_argument("--r", type=float, default=None,
                        help="crofton probe radius")
    parser.add_argument("--samples", type=int, default=None,
                        help="crofton sample count")
    args = parser.parse_args(argv)

    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    overrides = {}
    if args.seed is not None:
        overrides = {"eigen": {"seed": args.seed},
                     "crofton": {"seed": args.seed},
                     "harmonic": {"seed": args.seed},
                     "carleman": {"seed": args.seed}}
    for key in ("kernel", "r", "samples"):
        val = getattr(args, key)
        if val is not None:
            overrides.setdefault("crofton", {})[key] = val
    if args.out is not None:
        overrides.setdefault("output", {})["dir"] = args.out

    try:
        cfg = load_config(args.config, overrides, command=args.command)
        run(args.command, cfg)
    except (ConfigError, ConstraintError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ResolutionError, InfiniteGrowthError,
            NglError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
