"""
When a noisy technology helps
=============================

Misclassifying an element spreads probability mass away from the common
elements. Once the common ones are already known, that extra mass on the
rare ones speeds discovery up.
"""

import numpy as np

from coupon_discovery import (
    KnownSet, effective_pmf, expected_size, make_binomial_prior, symmetric_channel,
)
from coupon_discovery.svg import PlotStyle, emit_svg
from coupon_discovery.table import from_columns

from _out import out_dir

prior = make_binomial_prior(4, 0.2)
T = 50
rs = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]

curves = {}
for r in rs:
    pt = effective_pmf(prior, symmetric_channel(4, r))
    curves[r] = expected_size(pt, KnownSet.of(4, [1, 2]), T).values

print("E[N_10] by crossover probability")
for r in rs:
    print(f"  r={r:.1f}  {curves[r][10]:.4f}")

# past r = (M-1)/M the channel overshoots uniform and the ranking flips
flip = effective_pmf(prior, symmetric_channel(4, 0.9)).weights
print("effective pmf at r=0.9:", np.round(flip, 4))

table = from_columns(["t"] + [f"r={r}" for r in rs], [list(range(T + 1))] + [curves[r].tolist() for r in rs])
d = out_dir()
table.write_csv(d / "noise_effect.csv")
(d / "noise_effect.svg").write_text(emit_svg(table, PlotStyle(title="noise sweep, start {1,2}")))
