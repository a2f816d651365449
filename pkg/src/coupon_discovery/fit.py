"""Growth-curve fitting for discovery trajectories.

Two model families are supported::

    logistic                 D(t) = K / (1 + A exp(-r0 t))
    saturating_exponential   D(t) = K (1 - A exp(-r0 t))

The saturating exponential is exactly the expected-fraction curve of the
uniform, noiseless discovery model with ``K = M``, ``A = 1 - rho0`` and
``r0 = -log(1 - 1/M)``, which :func:`implied_model_parameters` inverts.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateSeriesError,
    DomainError,
    InsufficientDataError,
    UnsupportedModelError,
    ValidationError,
)

LOGISTIC = "logistic"
SATURATING_EXPONENTIAL = "saturating_exponential"
MODEL_KINDS = (LOGISTIC, SATURATING_EXPONENTIAL)

MAX_ITERATIONS = 200
PARAM_RTOL = 1e-10
GRAD_TOL = 1e-12
MIN_POINTS = 4
# log(1 - v/K) is only resolvable to about eps / residual
RESOLVABLE_RESIDUAL = math.sqrt(np.finfo(float).eps)


@dataclass(frozen=True)
class GrowthFit:
    model_kind: str
    K: float
    A: float
    r0: float
    rmse: float
    converged: bool
    iterations: int

    def predict(self, t) -> np.ndarray:
        return growth_curve(self.model_kind, np.asarray(t, dtype=np.float64), (self.K, self.A, self.r0))

    def as_dict(self) -> dict:
        return asdict(self)


class ImpliedParameters(NamedTuple):
    M_est: float
    rho0_est: float
    clamped: bool = False


def _check_kind(model_kind: str) -> str:
    if model_kind not in MODEL_KINDS:
        raise UnsupportedModelError(f"unknown model kind {model_kind!r}; expected one of {MODEL_KINDS}")
    return model_kind


def growth_curve(model_kind: str, t: np.ndarray, params) -> np.ndarray:
    K, A, r0 = params
    e = np.exp(-r0 * t)
    if _check_kind(model_kind) == LOGISTIC:
        return K / (1.0 + A * e)
    return K * (1.0 - A * e)


def growth_jacobian(model_kind: str, t: np.ndarray, params) -> np.ndarray:
    """Columns are the partials with respect to ``K``, ``A`` and ``r0``."""
    K, A, r0 = params
    e = np.exp(-r0 * t)
    if _check_kind(model_kind) == LOGISTIC:
        d = 1.0 + A * e
        return np.column_stack([1.0 / d, -K * e / d**2, K * A * t * e / d**2])
    return np.column_stack([1.0 - A * e, -K * e, K * A * t * e])


def _as_series(series) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(series, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValidationError(f"series must be a sequence of (t, value) pairs, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("series contains non-finite entries")
    order = np.argsort(a[:, 0], kind="stable")
    return a[order, 0], a[order, 1]


def log_linear_rate_estimate(series: Sequence[Tuple[float, float]], capacity: float,
                             min_residual: float = RESOLVABLE_RESIDUAL) -> float:
    """Negated OLS slope of ``log(1 - value / capacity)`` against ``t``.

    Points whose residual ``1 - value / capacity`` is positive but below
    ``min_residual`` carry only rounding noise in the log and are left out of
    the regression. A non-positive residual is an error.
    """
    t, v = _as_series(series)
    if capacity <= 0:
        raise DomainError(f"capacity must be positive, got {capacity!r}")
    resid = 1.0 - v / capacity
    bad = t[resid <= 0]
    if bad.size:
        raise DomainError(
            f"residual 1 - value/capacity is non-positive at t = {bad.tolist()}; "
            "series must stay strictly below capacity")
    keep = resid >= min_residual
    if np.unique(t[keep]).size < 2:
        raise InsufficientDataError("need at least two distinct time points with a resolvable residual")
    tk, y = t[keep], np.log(resid[keep])
    tc = tk - tk.mean()
    return -float(np.dot(tc, y - y.mean()) / np.dot(tc, tc))


def _initial_guess(kind: str, t: np.ndarray, v: np.ndarray, capacity_hint: Optional[float]):
    K0 = float(capacity_hint) if capacity_hint else 1.02 * float(v.max())
    span = float(t[-1] - t[0])
    try:
        r0 = log_linear_rate_estimate(np.column_stack([t, v]), K0)
    except (DomainError, InsufficientDataError):
        r0 = float("nan")
    if not (np.isfinite(r0) and r0 > 0):
        r0 = 1.0 / span
    e0 = math.exp(r0 * t[0])
    if kind == LOGISTIC:
        A0 = (K0 / v[0] - 1.0) * e0 if v[0] > 0 else 1.0
    else:
        A0 = (1.0 - v[0] / K0) * e0
    if not (np.isfinite(A0) and A0 > 0):
        A0 = 1.0
    return np.array([K0, A0, r0])


def fit_growth(series: Sequence[Tuple[float, float]], model_kind: str = LOGISTIC,
               capacity_hint: Optional[float] = None) -> GrowthFit:
    """Unweighted least-squares fit of ``(K, A, r0)``.

    Damped Gauss-Newton (Levenberg-Marquardt scaling) from a deterministic
    start; a step that raises the residual or leaves the positive orthant is
    halved before the damping is increased.
    """
    kind = _check_kind(model_kind)
    t, v = _as_series(series)
    if np.unique(t).size < MIN_POINTS:
        raise InsufficientDataError(f"need at least {MIN_POINTS} distinct time points, got {np.unique(t).size}")
    if np.all(v == v[0]):
        raise DegenerateSeriesError("all values are equal; there is no growth to fit")
    if np.any(v <= 0):
        warnings.warn("series has non-positive values", RuntimeWarning, stacklevel=2)
    if np.any(np.diff(v) < 0):
        warnings.warn("series is not nondecreasing; fitting anyway", RuntimeWarning, stacklevel=2)

    x = _initial_guess(kind, t, v, capacity_hint)

    def residual(params):
        return growth_curve(kind, t, params) - v

    res = residual(x)
    cost = float(res @ res)
    lam = 1e-3
    converged = False
    it = 0
    while it < MAX_ITERATIONS:
        it += 1
        J = growth_jacobian(kind, t, x)
        grad = J.T @ res
        if np.linalg.norm(grad) < GRAD_TOL:
            converged = True
            break
        scale = np.sqrt(np.maximum(np.sum(J * J, axis=0), np.finfo(float).tiny))
        aug = np.vstack([J, math.sqrt(lam) * np.diag(scale)])
        rhs = np.concatenate([-res, np.zeros(3)])
        step = np.linalg.lstsq(aug, rhs, rcond=None)[0]

        accepted = False
        frac = 1.0
        for _ in range(40):
            trial = x + frac * step
            if np.all(trial > 0):
                r_trial = residual(trial)
                c_trial = float(r_trial @ r_trial)
                if c_trial <= cost:
                    accepted = True
                    break
            frac *= 0.5
        if not accepted:
            lam *= 10.0
            if lam > 1e16:
                break
            continue

        delta = trial - x
        x, res, cost = trial, r_trial, c_trial
        lam = max(lam * 0.1, 1e-12)
        if np.max(np.abs(delta) / np.abs(x)) < PARAM_RTOL:
            converged = True
            break

    rmse = math.sqrt(cost / t.size)
    return GrowthFit(kind, float(x[0]), float(x[1]), float(x[2]), rmse, converged, it)


def implied_model_parameters(fit: GrowthFit) -> ImpliedParameters:
    """Universe size and initially known fraction implied by a saturating-exponential fit.

    ``A > 1`` would mean a negative known fraction; ``rho0_est`` is then
    clamped to 0 and ``clamped`` is set.
    """
    if fit.model_kind != SATURATING_EXPONENTIAL:
        raise UnsupportedModelError(
            f"implied parameters are defined only for {SATURATING_EXPONENTIAL} fits, got {fit.model_kind}")
    if not fit.converged:
        raise ValidationError("implied parameters need a converged fit")
    if not fit.r0 > 0:
        raise DomainError(f"growth rate must be positive, got {fit.r0!r}")
    M_est = -1.0 / math.expm1(-fit.r0)
    rho0 = 1.0 - fit.A
    if rho0 < 0:
        return ImpliedParameters(M_est, 0.0, True)
    return ImpliedParameters(M_est, rho0, False)
