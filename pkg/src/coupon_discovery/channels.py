"""Estimate channels and the effective pmf they induce.

An :class:`EstimateChannel` is the row-stochastic misclassification matrix
``R[m, n] = Pr(estimate = n | true = m)``. The distribution of the
technology's estimate, ``p_tilde = p @ R``, is what actually drives the
discovery dynamics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError, ValidationError
from .model import Pmf, UniverseLike, _frozen, as_universe

ROW_SUM_TOL = 1e-9
# sums this close to 1 are left alone so normalisation is idempotent
_EXACT = 1e-15


def _stochastic_rows(matrix, what: str) -> np.ndarray:
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValidationError(f"{what} must be a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        row = int(np.flatnonzero(~np.all(np.isfinite(a), axis=1))[0]) + 1
        raise ValidationError(f"{what} row {row} has non-finite entries")
    rows, cols = np.nonzero(a < 0)
    if rows.size:
        raise ValidationError(
            f"{what} row {rows[0] + 1} has negative entry {float(a[rows[0], cols[0]])!r} in column {cols[0] + 1}")
    sums = a.sum(axis=1)
    off = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
    if off.size:
        i = int(off[0])
        raise ValidationError(f"{what} row {i + 1} sums to {float(sums[i])!r}, expected 1")
    fix = np.abs(sums - 1.0) > _EXACT
    a[fix] /= sums[fix, None]
    return a


@dataclass(frozen=True, eq=False)
class EstimateChannel:
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, matrix) -> "EstimateChannel":
        a = _stochastic_rows(matrix, "channel")
        if a.shape[0] != a.shape[1]:
            raise ValidationError(f"channel matrix must be square, got shape {a.shape}")
        return cls(_frozen(a))

    @classmethod
    def identity(cls, universe: UniverseLike) -> "EstimateChannel":
        return cls(_frozen(np.eye(as_universe(universe).M)))

    @property
    def M(self) -> int:
        return int(self.matrix.shape[0])

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(self.M)))

    def __eq__(self, other):
        if not isinstance(other, EstimateChannel):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())


@dataclass(frozen=True, eq=False)
class ObservationModel:
    """Finite-alphabet likelihood, ``likelihood[m, x] = Pr(x | element m)``."""

    likelihood: np.ndarray

    @classmethod
    def from_matrix(cls, likelihood) -> "ObservationModel":
        return cls(_frozen(_stochastic_rows(likelihood, "likelihood")))

    @property
    def M(self) -> int:
        return int(self.likelihood.shape[0])

    @property
    def alphabet_size(self) -> int:
        return int(self.likelihood.shape[1])


def symmetric_channel(universe: UniverseLike, r: float) -> EstimateChannel:
    """M-ary symmetric channel: ``1 - r`` on the diagonal, ``r / (M - 1)`` elsewhere.

    ``r`` is the total probability of a wrong estimate.
    """
    M = as_universe(universe).M
    if not 0.0 <= r <= 1.0:
        raise ParameterDomainError(f"crossover probability must lie in [0, 1], got {r!r}")
    if M == 1:
        if r != 0:
            raise ParameterDomainError("a 1-element universe admits only r = 0")
        return EstimateChannel.identity(1)
    R = np.full((M, M), r / (M - 1))
    np.fill_diagonal(R, 1.0 - r)
    return EstimateChannel.from_matrix(R)


def explicit_channel(matrix) -> EstimateChannel:
    return EstimateChannel.from_matrix(matrix)


def map_decisions(prior: Pmf, obs: ObservationModel) -> np.ndarray:
    """0-based MAP decision for each observation symbol.

    ``argmax`` returns the first maximiser, which is the smallest-index tie
    rule. All-zero columns therefore decide element 1.
    """
    if prior.M != obs.M:
        raise ValidationError(f"prior has {prior.M} elements but likelihood has {obs.M} rows")
    joint = prior.weights[:, None] * obs.likelihood
    return np.argmax(joint, axis=0)


def map_induced_channel(prior: Pmf, obs: ObservationModel) -> EstimateChannel:
    decide = map_decisions(prior, obs)
    R = np.zeros((obs.M, obs.M))
    for x, n in enumerate(decide):
        R[:, n] += obs.likelihood[:, x]
    return EstimateChannel.from_matrix(R)


def effective_pmf(prior: Pmf, channel: EstimateChannel) -> Pmf:
    if prior.M != channel.M:
        raise ValidationError(f"prior has {prior.M} elements but channel is {channel.M}x{channel.M}")
    return Pmf.from_weights(prior.weights @ channel.matrix)
