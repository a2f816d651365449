"""
Fitting growth curves
=====================

With a uniform prior and a perfect technology the expected size is exactly a
saturating exponential, so a fit recovers the universe size and the share
that was known at the start. A skewed prior breaks the exact match, and
the two model families can only be compared by their residuals.
"""

import numpy as np

from coupon_discovery import (
    KnownSet, fit_growth, implied_model_parameters, expected_size,
    effective_pmf, make_binomial_prior, make_uniform_prior, symmetric_channel,
)
from coupon_discovery.svg import PlotStyle, emit_svg
from coupon_discovery.table import from_columns

from _out import out_dir

M, T = 10, 100
size = expected_size(make_uniform_prior(M), KnownSet.of(M, range(1, 6)), T).values
series = np.column_stack([np.arange(T + 1), size])

fit = fit_growth(series, "saturating_exponential")
implied = implied_model_parameters(fit)
print(f"saturating exponential: K={fit.K:.6f} A={fit.A:.6f} r0={fit.r0:.6f}")
print(f"  implied M={implied.M_est:.6f}, rho0={implied.rho0_est:.6f}")

# noisy, skewed case: no exact family, compare the two fits by rmse
pt = effective_pmf(make_binomial_prior(20, 0.3), symmetric_channel(20, 0.05))
skew = expected_size(pt, KnownSet.empty(20), 300).values
# t = 0 is an empty set; start the series at the first discovery
s = np.column_stack([np.arange(1, 301), skew[1:]])
fits = {k: fit_growth(s, k) for k in ("logistic", "saturating_exponential")}
for k, f in fits.items():
    print(f"{k:23s} K={f.K:8.4f} A={f.A:8.4f} r0={f.r0:.5f} rmse={f.rmse:.4f}")

t = np.arange(301)
table = from_columns(["t", "expected size", "logistic", "saturating"],
                     [t.tolist(), skew.tolist(), fits["logistic"].predict(t).tolist(),
                      fits["saturating_exponential"].predict(t).tolist()])
d = out_dir()
table.write_csv(d / "growth_fit.csv")
(d / "growth_fit.svg").write_text(emit_svg(table, PlotStyle(title="M=20 binomial, r=0.05")))
