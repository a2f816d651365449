"""Closed-form expected discovery curves.

Expected size and quality are evaluated through the product form
``1 - (1 - p_tilde)^t`` per undiscovered element. The equivalent alternating
binomial sums are kept as ``*_alternating`` for cross-validation only. In
binary64 their terms ``C(T, k) p^k`` grow like ``(1 + p)^T`` and cancel, so
they are evaluated in exact rational arithmetic on the float inputs and
rounded once at the end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterDomainError, UnsupportedRangeError, ValidationError
from .model import KnownSet, Pmf, QualityVector, known_set_quality

ALTERNATING_MAX_T = 30
_LOG1P_BELOW = 1e-8


@dataclass(frozen=True, eq=False)
class ExpectationCurve:
    """Expected value at ``t = 0..T``; ``values[0]`` is the initial condition."""

    values: np.ndarray

    @property
    def T(self) -> int:
        return int(self.values.size) - 1

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.values.size)

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, t):
        return self.values[t]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _check_T(T) -> int:
    if isinstance(T, bool) or int(T) != T or T < 0:
        raise ValidationError(f"horizon T must be a nonnegative integer, got {T!r}")
    return int(T)


def _check_dims(p_tilde: Pmf, known: KnownSet, q: QualityVector | None = None) -> None:
    if known.M != p_tilde.M:
        raise ValidationError(f"known set lives in universe of size {known.M}, pmf has {p_tilde.M} entries")
    if q is not None and q.M != p_tilde.M:
        raise ValidationError(f"quality vector has length {q.M}, pmf has {p_tilde.M} entries")


def survival(p: np.ndarray, T: int) -> np.ndarray:
    """``(1 - p)^t`` for ``t = 0..T`` as a ``(T + 1, len(p))`` array."""
    p = np.asarray(p, dtype=np.float64)
    t = np.arange(T + 1, dtype=np.float64)[:, None]
    out = np.power(1.0 - p, t)
    tiny = p < _LOG1P_BELOW
    if np.any(tiny):
        out[:, tiny] = np.exp(t * np.log1p(-p[tiny]))
    return out


def hit_probability(p: np.ndarray, T: int) -> np.ndarray:
    """``1 - (1 - p)^t`` for ``t = 0..T``, accurate when ``t * p`` is small."""
    p = np.asarray(p, dtype=np.float64)
    t = np.arange(T + 1, dtype=np.float64)[:, None]
    sure = p >= 1.0
    with np.errstate(divide="ignore"):
        out = -np.expm1(t * np.log1p(-np.where(sure, 0.0, p)))
    out[:, sure] = (t > 0).astype(np.float64)
    return out


def _discovery_prob(p_tilde: Pmf, known: KnownSet, T: int) -> np.ndarray:
    """Probability each still-unknown element has been hit by time t; 0 for known ones."""
    unknown = ~known.mask()
    hit = np.zeros((T + 1, p_tilde.M))
    hit[:, unknown] = hit_probability(p_tilde.weights[unknown], T)
    return hit


def expected_size(p_tilde: Pmf, initial: KnownSet, T: int) -> ExpectationCurve:
    T = _check_T(T)
    _check_dims(p_tilde, initial)
    hit = _discovery_prob(p_tilde, initial, T)
    return ExpectationCurve(initial.size + hit.sum(axis=1))


def expected_remaining(p_tilde: Pmf, initial: KnownSet, T: int) -> ExpectationCurve:
    """Expected number of still-unknown elements, ``M - E[N_t]``, without cancellation.

    Use this instead of ``M - expected_size(...)`` once the curve is close
    to saturation: the difference underflows to exactly 0 long before the
    remainder itself does.
    """
    T = _check_T(T)
    _check_dims(p_tilde, initial)
    return ExpectationCurve(survival(p_tilde.weights[~initial.mask()], T).sum(axis=1))


def expected_size_alternating(p_tilde: Pmf, initial: KnownSet, T: int) -> float:
    """The alternating binomial sum for ``E[N_T]``, term by term, in exact arithmetic."""
    T = _check_T(T)
    if T > ALTERNATING_MAX_T:
        raise UnsupportedRangeError(
            f"alternating form is only exact for T <= {ALTERNATING_MAX_T}; use expected_size")
    _check_dims(p_tilde, initial)
    pu = [Fraction(float(x)) for x in p_tilde.weights[~initial.mask()]]
    total = sum((-1) ** k * math.comb(T, k) * sum(x**k for x in pu) for k in range(1, T + 1))
    return float(initial.size - total)


def expected_fraction_uniform(M: int, rho0: float, T: int) -> float:
    """Expected known fraction after ``T`` steps, uniform prior, perfect observations."""
    if M < 1:
        raise ParameterDomainError(f"universe size must be >= 1, got {M}")
    if not 0.0 <= rho0 <= 1.0:
        raise ParameterDomainError(f"rho0 must lie in [0, 1], got {rho0!r}")
    T = _check_T(T)
    return 1.0 - (1.0 - rho0) * (1.0 - 1.0 / M) ** T


def remaining_fraction_uniform(M: int, rho0: float, T: int) -> float:
    """``1 - expected_fraction_uniform(M, rho0, T)`` evaluated directly."""
    if M < 1:
        raise ParameterDomainError(f"universe size must be >= 1, got {M}")
    if not 0.0 <= rho0 <= 1.0:
        raise ParameterDomainError(f"rho0 must lie in [0, 1], got {rho0!r}")
    T = _check_T(T)
    return (1.0 - rho0) * (1.0 - 1.0 / M) ** T


def asymptotic_rate(M: int) -> float:
    """Positive exponential decay rate ``-log(1 - 1/M)`` of the undiscovered fraction."""
    if M < 2:
        raise ParameterDomainError(f"asymptotic rate needs M >= 2 (infinite for M = {M})")
    return -math.log1p(-1.0 / M)


def quality_prevalence(p_tilde: Pmf, q: QualityVector, excluded: KnownSet, k: int) -> float:
    """``sum_{theta not in excluded} q_theta * p_tilde_theta^k``."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValidationError(f"order k must be a positive integer, got {k!r}")
    _check_dims(p_tilde, excluded, q)
    unknown = ~excluded.mask()
    return float(np.sum(q.q[unknown] * p_tilde.weights[unknown] ** int(k)))


def expected_quality(p_tilde: Pmf, q: QualityVector, initial: KnownSet, T: int) -> ExpectationCurve:
    T = _check_T(T)
    _check_dims(p_tilde, initial, q)
    hit = _discovery_prob(p_tilde, initial, T)
    return ExpectationCurve(known_set_quality(initial, q) + hit @ q.q)


def expected_quality_alternating(p_tilde: Pmf, q: QualityVector, initial: KnownSet, T: int) -> float:
    """``Q_0 - sum_k (-1)^k C(T, k) D^k``, with ``D^k`` as in :func:`quality_prevalence`."""
    T = _check_T(T)
    if T > ALTERNATING_MAX_T:
        raise UnsupportedRangeError(
            f"alternating form is only exact for T <= {ALTERNATING_MAX_T}; use expected_quality")
    _check_dims(p_tilde, initial, q)
    unknown = ~initial.mask()
    pq = [(Fraction(float(p)), Fraction(float(w))) for p, w in zip(p_tilde.weights[unknown], q.q[unknown])]

    def prevalence(k):
        # exact counterpart of quality_prevalence
        return sum(w * p**k for p, w in pq)

    total = sum((-1) ** k * math.comb(T, k) * prevalence(k) for k in range(1, T + 1))
    q0 = sum(Fraction(float(w)) for w in q.q[~unknown])
    return float(q0 - total)
