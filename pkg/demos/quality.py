"""
Quality of what gets discovered
===============================

Same process, but every element carries a quality. Two extremes: quality
ranked with the prior, or against it.
"""

import numpy as np

from coupon_discovery import (
    KnownSet, QualityVector, effective_pmf, expected_quality,
    make_binomial_prior, symmetric_channel,
)
from coupon_discovery.svg import PlotStyle, emit_svg
from coupon_discovery.table import from_columns

from _out import out_dir

prior = make_binomial_prior(4, 0.2)
pt = effective_pmf(prior, symmetric_channel(4, 0.1))
start = KnownSet.of(4, [1, 2])
T = 50

cols, names = [list(range(T + 1))], ["t"]
for label, q in (("aligned", QualityVector.aligned(prior)), ("anti_aligned", QualityVector.anti_aligned(prior))):
    curve = expected_quality(pt, q, start, T).values
    q0 = curve[0]
    # share of the initially missing quality found so far
    share = (curve - q0) / (q.total - q0)
    print(f"{label:13s} q={q.q.astype(int)}  Q_0={q0:g}  E[Q_50]={curve[-1]:.4f}  share@10={share[10]:.4f}")
    names += [f"{label} E[Q_t]", f"{label} share"]
    cols += [curve.tolist(), share.tolist()]

# anti-aligned gains more quality in absolute terms; aligned closes a larger share of its own gap
table = from_columns(names, cols)
d = out_dir()
table.write_csv(d / "quality.csv")
(d / "quality.svg").write_text(emit_svg(table, PlotStyle(title="expected quality", columns=names[1::2])))
