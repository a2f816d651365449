"""
Expected size of the known set
==============================

Four elements, a skewed binomial prior, and a slightly noisy technology.
Starting from the two common elements, the closed form and a Monte Carlo
ensemble should sit on top of each other.
"""

import numpy as np

from coupon_discovery import (
    KnownSet, SimulationConfig, effective_pmf, expected_size,
    make_binomial_prior, simulate_ensemble, symmetric_channel,
)
from coupon_discovery.svg import PlotStyle, emit_svg
from coupon_discovery.table import from_columns

from _out import out_dir

prior = make_binomial_prior(4, 0.2)
channel = symmetric_channel(4, 0.1)
start = KnownSet.of(4, [1, 2])
T = 50

# what the technology actually reports
p_tilde = effective_pmf(prior, channel)
print("prior      ", np.round(prior.weights, 4))
print("effective  ", np.round(p_tilde.weights, 4))

exact = expected_size(p_tilde, start, T).values

cfg = SimulationConfig(prior, channel, start, T, n_runs=10_000, master_seed=1)
mc = simulate_ensemble(cfg, workers=4)

z = np.abs(mc.mean_size - exact)[1:] / mc.stderr_size[1:]
print(f"largest deviation: {z.max():.2f} standard errors")

for t in (0, 1, 5, 10, 25, 50):
    print(f"t={t:3d}  exact {exact[t]:.4f}  mc {mc.mean_size[t]:.4f} +- {mc.stderr_size[t]:.4f}")

# starting from the rare elements instead
rare = expected_size(p_tilde, KnownSet.of(4, [3, 4]), T).values

table = from_columns(["t", "from {1,2}", "monte carlo", "from {3,4}"],
                     [list(range(T + 1)), exact.tolist(), mc.mean_size.tolist(), rare.tolist()])
d = out_dir()
table.write_csv(d / "size_curves.csv")
(d / "size_curves.svg").write_text(emit_svg(table, PlotStyle(title="expected known-set size", y_label="E[N_t]")))
print("wrote", d / "size_curves.csv")
