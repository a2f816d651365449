"""Core domain types: universes, probability vectors, quality vectors and
known sets.

Elements are identified by 1-based indices ``1..M``. Arrays held by these
types are 0-based internally (element ``m`` lives at position ``m - 1``) and
are marked read-only so the objects can be shared freely.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Union

import numpy as np

from .errors import ParameterDomainError, ValidationError

RAW_SUM_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Universe:
    M: int

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M:
            raise ValidationError(f"universe size must be an integer, got {self.M!r}")
        if self.M < 1:
            raise ValidationError(f"universe size must be >= 1, got {self.M}")
        object.__setattr__(self, "M", int(self.M))

    @property
    def elements(self) -> range:
        return range(1, self.M + 1)


UniverseLike = Union[Universe, int]


def as_universe(universe: UniverseLike) -> Universe:
    return universe if isinstance(universe, Universe) else Universe(universe)


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability vector over ``1..M``.

    Construct through :meth:`from_weights` (or the ``make_*_prior`` helpers);
    the raw sum is checked against 1 with tolerance 1e-9 and then the
    residual floating error is divided out.
    """

    weights: np.ndarray

    @classmethod
    def from_weights(cls, weights: Iterable[float]) -> "Pmf":
        w = np.asarray(list(weights) if not isinstance(weights, np.ndarray) else weights,
                       dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError(f"pmf must be a non-empty vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            bad = int(np.flatnonzero(~np.isfinite(w))[0]) + 1
            raise ValidationError(f"pmf entry at index {bad} is not finite")
        neg = np.flatnonzero(w < 0)
        if neg.size:
            i = int(neg[0])
            raise ValidationError(f"negative pmf entry {float(w[i])!r} at index {i + 1}")
        total = float(w.sum())
        if abs(total - 1.0) > RAW_SUM_TOL:
            raise ValidationError(
                f"pmf weights sum to {total!r} (deviation {total - 1.0:+.3g} exceeds {RAW_SUM_TOL})")
        # already-normalised input is kept bit-for-bit
        return cls(_frozen(w if abs(total - 1.0) <= 1e-15 else w / total))

    @property
    def M(self) -> int:
        return int(self.weights.size)

    def __len__(self) -> int:
        return self.M

    def __getitem__(self, element: int) -> float:
        """Probability of 1-based ``element``."""
        if not 1 <= element <= self.M:
            raise IndexError(f"element {element} outside 1..{self.M}")
        return float(self.weights[element - 1])

    def __eq__(self, other):
        if not isinstance(other, Pmf):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self) -> str:
        return f"Pmf({np.array2string(self.weights, precision=6, separator=', ')})"

    def ranking(self) -> np.ndarray:
        """0-based positions ordered from most to least probable (stable on ties)."""
        return np.argsort(-self.weights, kind="stable")


@dataclass(frozen=True, eq=False)
class QualityVector:
    q: np.ndarray

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "QualityVector":
        q = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                       dtype=np.float64)
        if q.ndim != 1 or q.size == 0:
            raise ValidationError(f"quality vector must be a non-empty vector, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValidationError("quality vector has non-finite entries")
        neg = np.flatnonzero(q < 0)
        if neg.size:
            i = int(neg[0])
            raise ValidationError(f"negative quality {float(q[i])!r} at index {i + 1}")
        return cls(_frozen(q))

    @classmethod
    def ones(cls, M: int) -> "QualityVector":
        return cls(_frozen(np.ones(M)))

    @classmethod
    def aligned(cls, prior: Pmf) -> "QualityVector":
        """Qualities ``M, ..., 1`` assigned from most to least probable element."""
        q = np.empty(prior.M)
        q[prior.ranking()] = np.arange(prior.M, 0, -1)
        return cls(_frozen(q))

    @classmethod
    def anti_aligned(cls, prior: Pmf) -> "QualityVector":
        """Qualities ``1, ..., M`` assigned from most to least probable element."""
        q = np.empty(prior.M)
        q[prior.ranking()] = np.arange(1, prior.M + 1)
        return cls(_frozen(q))

    @property
    def M(self) -> int:
        return int(self.q.size)

    @property
    def total(self) -> float:
        return float(self.q.sum())

    def __len__(self) -> int:
        return self.M

    def __eq__(self, other):
        if not isinstance(other, QualityVector):
            return NotImplemented
        return np.array_equal(self.q, other.q)

    def __hash__(self):
        return hash(self.q.tobytes())


@dataclass(frozen=True)
class KnownSet:
    """The explorer's known elements, a subset of ``1..M``."""

    members: frozenset
    M: int

    def __post_init__(self):
        members = frozenset(int(m) for m in self.members)
        M = as_universe(self.M).M
        bad = sorted(m for m in members if not 1 <= m <= M)
        if bad:
            raise ValidationError(f"known-set members {bad} outside 1..{M}")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "M", M)

    @classmethod
    def of(cls, universe: UniverseLike, members: Iterable[int] = ()) -> "KnownSet":
        return cls(frozenset(members), as_universe(universe).M)

    @classmethod
    def empty(cls, universe: UniverseLike) -> "KnownSet":
        return cls.of(universe)

    @classmethod
    def full(cls, universe: UniverseLike) -> "KnownSet":
        u = as_universe(universe)
        return cls.of(u, u.elements)

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, element) -> bool:
        return element in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def with_element(self, element: int) -> "KnownSet":
        return KnownSet(self.members | {element}, self.M)

    def mask(self) -> np.ndarray:
        """Boolean membership mask over 0-based positions."""
        m = np.zeros(self.M, dtype=bool)
        if self.members:
            m[np.fromiter(self.members, dtype=np.intp) - 1] = True
        return m

    def quality(self, q: QualityVector) -> float:
        return known_set_quality(self, q)


def make_uniform_prior(universe: UniverseLike) -> Pmf:
    M = as_universe(universe).M
    return Pmf(_frozen(np.full(M, 1.0 / M)))


def make_binomial_prior(universe: UniverseLike, p: float) -> Pmf:
    """Binomial-shaped prior ``C(M-1, m-1) p^(m-1) (1-p)^(M-m)`` on ``m = 1..M``."""
    M = as_universe(universe).M
    if not 0.0 <= p <= 1.0:
        raise ParameterDomainError(f"binomial parameter p must lie in [0, 1], got {p!r}")
    n = M - 1
    return Pmf.from_weights([comb(n, k) * p**k * (1.0 - p) ** (n - k) for k in range(M)])


def make_explicit_prior(weights: Iterable[float]) -> Pmf:
    return Pmf.from_weights(weights)


def known_set_quality(known: KnownSet, q: QualityVector) -> float:
    if q.M != known.M:
        raise ValidationError(f"quality vector has length {q.M}, known set lives in universe of size {known.M}")
    # sorted order keeps the floating sum reproducible across processes
    return float(sum(q.q[m - 1] for m in sorted(known.members)))
