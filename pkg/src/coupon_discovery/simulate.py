"""Seeded Monte Carlo simulation of technology-aided discovery.

Each step draws the true element from the prior, pushes it through the
estimate channel, and adds the *estimate* to the known set if it is new.

Stream derivation
-----------------
Run ``i`` of an ensemble with master seed ``s`` uses
``numpy.random.Generator(PCG64(SeedSequence(s, spawn_key=(i,))))``.
``SeedSequence`` hashes ``(s, i)`` with a fixed, documented mixing function,
so adding runs never perturbs existing ones and the schedule of workers
cannot change any draw. Every step consumes exactly two uniforms from that
stream, ``u[t, 0]`` for the true element and ``u[t, 1]`` for the estimate,
whether or not the channel is the identity.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import EstimateChannel
from .errors import ValidationError
from .model import KnownSet, Pmf, QualityVector, known_set_quality

# runs per vectorised block; fixed so that block boundaries never depend on
# the number of workers
BLOCK_RUNS = 512
_MAX_BLOCK_CELLS = 1 << 23


@dataclass(frozen=True)
class SimulationConfig:
    prior: Pmf
    channel: EstimateChannel
    initial: KnownSet
    T: int
    n_runs: int = 500
    master_seed: int = 0
    quality: Optional[QualityVector] = None

    def __post_init__(self):
        M = self.prior.M
        if self.channel.M != M:
            raise ValidationError(f"channel is {self.channel.M}x{self.channel.M}, prior has {M} entries")
        if self.initial.M != M:
            raise ValidationError(f"initial set lives in universe of size {self.initial.M}, prior has {M} entries")
        if self.quality is not None and self.quality.M != M:
            raise ValidationError(f"quality vector has length {self.quality.M}, prior has {M} entries")
        if isinstance(self.T, bool) or int(self.T) != self.T or self.T < 0:
            raise ValidationError(f"horizon T must be a nonnegative integer, got {self.T!r}")
        if isinstance(self.n_runs, bool) or int(self.n_runs) != self.n_runs or self.n_runs < 1:
            raise ValidationError(f"n_runs must be a positive integer, got {self.n_runs!r}")
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed < 2**64:
            raise ValidationError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")

    @property
    def M(self) -> int:
        return self.prior.M


@dataclass(frozen=True, eq=False)
class Trajectory:
    sizes: np.ndarray
    qualities: Optional[np.ndarray]
    run_index: int

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        same_q = (self.qualities is None and other.qualities is None) or (
            self.qualities is not None and other.qualities is not None
            and np.array_equal(self.qualities, other.qualities))
        return self.run_index == other.run_index and np.array_equal(self.sizes, other.sizes) and same_q


@dataclass(frozen=True, eq=False)
class TrajectoryStats:
    mean_size: np.ndarray
    stderr_size: np.ndarray
    n_runs: int
    mean_quality: Optional[np.ndarray] = None
    stderr_quality: Optional[np.ndarray] = None

    @property
    def T(self) -> int:
        return int(self.mean_size.size) - 1


def run_generator(master_seed: int, run_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(run_index),))
    return np.random.Generator(np.random.PCG64(ss))


def _run_uniforms(master_seed: int, run_index: int, T: int) -> np.ndarray:
    return run_generator(master_seed, run_index).random((T, 2))


def _last_positive(weights: np.ndarray) -> np.ndarray:
    """Position of the last positive entry along the last axis."""
    pos = weights > 0
    return weights.shape[-1] - 1 - np.argmax(pos[..., ::-1], axis=-1)


def sample_categorical(weights: Pmf, random_draw: float) -> int:
    """Inverse-CDF draw: smallest 1-based index whose cumulative weight exceeds ``random_draw``.

    When rounding leaves the final cumulative weight just below the draw,
    the last element with positive weight is returned.
    """
    w = weights.weights if isinstance(weights, Pmf) else np.asarray(weights, dtype=np.float64)
    cdf = np.cumsum(w)
    i = int(np.searchsorted(cdf, random_draw, side="right"))
    if i >= w.size:
        i = int(_last_positive(w))
    return i + 1


def simulate_run(config: SimulationConfig, run_index: int) -> Trajectory:
    if not 0 <= run_index < config.n_runs:
        raise ValidationError(f"run_index {run_index} outside 0..{config.n_runs - 1}")
    u = _run_uniforms(config.master_seed, run_index, config.T)
    rows = config.channel.matrix
    known = set(config.initial.members)
    sizes = np.empty(config.T + 1, dtype=np.int64)
    sizes[0] = len(known)
    q = config.quality
    quals = None
    if q is not None:
        quals = np.empty(config.T + 1)
        quals[0] = known_set_quality(config.initial, q)
    for t in range(1, config.T + 1):
        theta = sample_categorical(config.prior, u[t - 1, 0])
        estimate = sample_categorical(rows[theta - 1], u[t - 1, 1])
        gain = 0.0
        if estimate not in known:
            known.add(estimate)
            if q is not None:
                gain = q.q[estimate - 1]
        sizes[t] = len(known)
        if quals is not None:
            quals[t] = quals[t - 1] + gain
    return Trajectory(sizes, quals, run_index)


def _simulate_block(config: SimulationConfig, start: int, stop: int):
    """Vectorised runs ``start..stop-1``; identical draws to :func:`simulate_run`."""
    n, T, M = stop - start, config.T, config.M
    u = np.empty((n, T, 2))
    for j in range(n):
        u[j] = _run_uniforms(config.master_seed, start + j, T)

    prior_w = config.prior.weights
    prior_cdf = np.cumsum(prior_w)
    theta = np.searchsorted(prior_cdf, u[..., 0], side="right")
    theta = np.where(theta >= M, _last_positive(prior_w), theta)

    rows = config.channel.matrix
    row_cdf = np.cumsum(rows, axis=1)
    row_last = _last_positive(rows)
    est = np.empty((n, T), dtype=np.intp)
    # chunk over time so the (runs, steps, M) comparison stays bounded
    step = max(1, _MAX_BLOCK_CELLS // max(1, n * M))
    for a in range(0, T, step):
        b = min(T, a + step)
        th = theta[:, a:b]
        idx = np.sum(row_cdf[th] <= u[:, a:b, 1][..., None], axis=-1)
        est[:, a:b] = np.where(idx >= M, row_last[th], idx)

    known = np.tile(config.initial.mask(), (n, 1))
    sizes = np.empty((n, T + 1), dtype=np.int64)
    sizes[:, 0] = config.initial.size
    q = config.quality
    quals = None
    if q is not None:
        quals = np.empty((n, T + 1))
        quals[:, 0] = known_set_quality(config.initial, q)
    runs = np.arange(n)
    for t in range(1, T + 1):
        e = est[:, t - 1]
        new = ~known[runs, e]
        known[runs, e] = True
        sizes[:, t] = sizes[:, t - 1] + new
        if quals is not None:
            quals[:, t] = quals[:, t - 1] + np.where(new, q.q[e], 0.0)
    return sizes, quals


def simulate_trajectories(config: SimulationConfig, workers: int = 1):
    """All ``n_runs`` trajectories as ``(sizes, qualities)`` arrays ordered by run index."""
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    bounds = [(s, min(config.n_runs, s + BLOCK_RUNS)) for s in range(0, config.n_runs, BLOCK_RUNS)]
    if workers == 1 or len(bounds) == 1:
        parts = [_simulate_block(config, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _simulate_block(config, *ab), bounds))
    sizes = np.concatenate([p[0] for p in parts])
    quals = None if config.quality is None else np.concatenate([p[1] for p in parts])
    return sizes, quals


def _mean_stderr(x: np.ndarray):
    n = x.shape[0]
    mean = x.mean(axis=0)
    if n == 1:
        return mean, np.zeros_like(mean, dtype=np.float64)
    return mean, x.std(axis=0, ddof=1) / np.sqrt(n)


def simulate_ensemble(config: SimulationConfig, workers: int = 1) -> TrajectoryStats:
    """Per-step mean and standard error over ``config.n_runs`` runs.

    The reduction runs over the full run-ordered array, so the result is the
    same for any ``workers``.
    """
    sizes, quals = simulate_trajectories(config, workers)
    mean_size, se_size = _mean_stderr(sizes.astype(np.float64))
    mean_q = se_q = None
    if quals is not None:
        mean_q, se_q = _mean_stderr(quals)
    return TrajectoryStats(mean_size, se_size, config.n_runs, mean_q, se_q)
