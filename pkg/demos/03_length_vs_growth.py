"""The two-sided comparison between nodal length and average local growth.

For every eigenfunction the table reports H^1(Z), A(lambda), and the two
normalized ratios H^1 / (sqrt(lambda) A) and H^1 / (sqrt(lambda) (A + 1)).
Bounded ratios across the family are the empirical content of the two-sided
length bound; their family constants are recorded, never asserted.
"""

import os

from ngl import (analytic_spectrum, donnelly_fefferman_constant, make_metric,
                 quartile_trend_ratio, verify_length_growth_bound)
from ngl.growth import report_to_csv
from ngl.svg import scatter_svg

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

metric = make_metric("flat", 640)
spectrum = analytic_spectrum(640, 20)
report = verify_length_growth_bound(metric, spectrum, k0=0.5, sample_grid_m=32)

print("lambda        A      H1      lower   upper")
for row in report.rows:
    print(f"{row.lam:8.2f}  {row.average_growth:.4f}  {row.h1_metric:.4f}  "
          f"{row.lower_ratio:.4f}  {row.upper_ratio:.4f}")

summary = report.summary()
print(f"\nfamily of {summary['count']}:")
print(f"  lower ratio in [{summary['lower_min']:.4f}, {summary['lower_max']:.4f}]"
      f"  (spread {summary['lower_spread']:.3f})")
print(f"  upper ratio in [{summary['upper_min']:.4f}, {summary['upper_max']:.4f}]"
      f"  (spread {summary['upper_spread']:.3f})")
print(f"  A(lambda) quartile trend = {quartile_trend_ratio(report):.3f} "
      f"(flat at 1 for a bounded sequence)")
print(f"  max beta_p / sqrt(lambda) = {donnelly_fefferman_constant(report):.4f}")

csv_path = os.path.join(OUT, "length_growth_table.csv")
report_to_csv(report, csv_path)
svg_path = os.path.join(OUT, "growth_vs_lambda.svg")
scatter_svg([r.lam for r in report.rows],
            [r.average_growth for r in report.rows], svg_path)
print(f"\nwrote {csv_path} and {svg_path}")
