"""Domain types shared by all modules: datasets, parameters, entity sets, intervals.

Entities are referred to by dense integer indices ``0..n-1`` everywhere inside
the library; the original (string) identifiers live on the dataset and are only
used at the I/O boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


class DataError(Exception):
    """Base class for all errors caused by invalid input data."""


class NonMonotonicTime(DataError):
    def __init__(self, time_index: int):
        self.time_index = time_index
        super().__init__(f"times must be strictly increasing (violated at index {time_index})")


class RaggedTrajectory(DataError):
    def __init__(self, entity: int, expected: int, got: int):
        self.entity = entity
        super().__init__(f"entity {entity} has {got} positions, expected {expected}")


class NonFiniteCoordinate(DataError):
    def __init__(self, entity: int, time_index: int):
        self.entity = entity
        self.time_index = time_index
        super().__init__(f"non-finite coordinate for entity {entity} at time index {time_index}")


class TimeOutOfRange(DataError):
    def __init__(self, t: float, t0: float, t_end: float):
        self.t = t
        super().__init__(f"time {t} outside observation window [{t0}, {t_end}]")


class InvalidParameter(DataError):
    pass


class Dataset:
    """Synchronised trajectories: n entities with a 2D position at each of tau+1 times.

    ``positions`` may be anything convertible to an ``(n, tau+1, 2)`` float array;
    a ragged per-entity list is accepted at construction and rejected by
    :func:`validate`.
    """

    def __init__(self, entity_ids: Sequence[str], times: Sequence[float], positions) -> None:
        self.entity_ids = [str(e) for e in entity_ids]
        self.times = np.asarray(times, dtype=float)
        try:
            arr = np.asarray(positions, dtype=float)
        except (ValueError, TypeError):
            arr = None
        if arr is not None and arr.ndim == 3 and arr.shape[2] == 2:
            self.positions = arr
            self._ragged = None
        else:
            # keep the raw per-entity sequences; validate() reports the culprit
            self.positions = None
            self._ragged = [np.asarray(p, dtype=float).reshape(-1, 2) for p in positions]

    @property
    def n(self) -> int:
        return len(self.entity_ids)

    @property
    def tau(self) -> int:
        """Number of trajectory edges (= number of timestamps minus one)."""
        return len(self.times) - 1

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def index_of(self, entity_id: str) -> int:
        return self.entity_ids.index(entity_id)

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, tau={self.tau}, window=[{self.t0}, {self.t_end}])"


def validate(dataset: Dataset) -> None:
    """Check all Dataset invariants, raising on the first violation.

    Raises NonMonotonicTime, RaggedTrajectory, NonFiniteCoordinate or
    InvalidParameter; returns None when the dataset is well formed.
    """
    if dataset.n < 1:
        raise InvalidParameter("dataset needs at least one entity")
    if len(dataset.times) < 2:
        raise InvalidParameter("dataset needs at least two timestamps (tau >= 1)")
    times = dataset.times
    if not np.all(np.isfinite(times)):
        raise NonMonotonicTime(int(np.argmin(np.isfinite(times))))
    diffs = np.diff(times)
    bad = np.nonzero(diffs <= 0)[0]
    if bad.size:
        raise NonMonotonicTime(int(bad[0]) + 1)
    expected = len(times)
    if dataset.positions is None:
        for e, traj in enumerate(dataset._ragged):
            if len(traj) != expected:
                raise RaggedTrajectory(e, expected, len(traj))
        # ragged list that happens to be rectangular: normalise it
        dataset.positions = np.stack(dataset._ragged)
        dataset._ragged = None
    if dataset.positions.shape[0] != dataset.n:
        raise RaggedTrajectory(dataset.positions.shape[0], dataset.n, dataset.positions.shape[0])
    if dataset.positions.shape[1] != expected:
        raise RaggedTrajectory(0, expected, dataset.positions.shape[1])
    finite = np.isfinite(dataset.positions).all(axis=2)
    if not finite.all():
        e, i = np.argwhere(~finite)[0]
        raise NonFiniteCoordinate(int(e), int(i))


def position_at(dataset: Dataset, entity: int, t: float) -> np.ndarray:
    """Position of ``entity`` at time ``t``, linearly interpolated along its edges.

    Exact sample values are returned at the timestamps themselves.
    """
    times = dataset.times
    if t < times[0] or t > times[-1]:
        raise TimeOutOfRange(t, float(times[0]), float(times[-1]))
    i = int(np.searchsorted(times, t, side="right")) - 1
    if i >= len(times) - 1:
        i = len(times) - 2
    if t == times[i]:
        return dataset.positions[entity, i].copy()
    t_a, t_b = times[i], times[i + 1]
    s = (t - t_a) / (t_b - t_a)
    p = dataset.positions[entity]
    return p[i] + s * (p[i + 1] - p[i])


@dataclass(frozen=True)
class Params:
    """Grouping parameters: spatial radius, minimum size, duration, robustness window."""

    eps: float
    m: int = 1
    delta: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("eps", "delta", "alpha"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidParameter(f"{name} must be finite and non-negative, got {v}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InvalidParameter(f"m must be an integer >= 1, got {self.m}")


@dataclass(frozen=True)
class Interval:
    """Closed time interval [start, end] with start <= end."""

    start: float
    end: float

    def __post_init__(self):
        if not (np.isfinite(self.start) and np.isfinite(self.end)):
            raise InvalidParameter("interval endpoints must be finite")
        if self.start > self.end:
            raise InvalidParameter(f"interval start {self.start} > end {self.end}")

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, t: float) -> bool:
        return self.start <= t <= self.end

    def intersection(self, other: "Interval") -> "Interval | None":
        lo = max(self.start, other.start)
        hi = min(self.end, other.end)
        return Interval(lo, hi) if lo <= hi else None


class EntitySet:
    """Immutable subset of the n entities, stored as a bitmask.

    Set operations are exact; iteration yields entity indices in ascending
    order. Instances of differing capacity never compare equal and cannot be
    combined.
    """

    __slots__ = ("mask", "capacity")

    def __init__(self, capacity: int, mask: int = 0):
        object.__setattr__(self, "capacity", capacity)
        object.__setattr__(self, "mask", mask & ((1 << capacity) - 1))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("EntitySet is immutable")

    @classmethod
    def empty(cls, capacity: int) -> "EntitySet":
        return cls(capacity, 0)

    @classmethod
    def full(cls, capacity: int) -> "EntitySet":
        return cls(capacity, (1 << capacity) - 1)

    @classmethod
    def of(cls, capacity: int, indices: Iterable[int]) -> "EntitySet":
        mask = 0
        for i in indices:
            if not 0 <= i < capacity:
                raise IndexError(f"entity index {i} out of range 0..{capacity - 1}")
            mask |= 1 << i
        return cls(capacity, mask)

    def _check(self, other: "EntitySet") -> None:
        if self.capacity != other.capacity:
            raise ValueError("EntitySet capacity mismatch")

    def __or__(self, other: "EntitySet") -> "EntitySet":
        self._check(other)
        return EntitySet(self.capacity, self.mask | other.mask)

    def __and__(self, other: "EntitySet") -> "EntitySet":
        self._check(other)
        return EntitySet(self.capacity, self.mask & other.mask)

    def __sub__(self, other: "EntitySet") -> "EntitySet":
        self._check(other)
        return EntitySet(self.capacity, self.mask & ~other.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __contains__(self, i: int) -> bool:
        return bool((self.mask >> i) & 1)

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def issubset(self, other: "EntitySet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "EntitySet") -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    def min_index(self) -> int:
        if not self.mask:
            raise ValueError("empty EntitySet has no minimum")
        return (self.mask & -self.mask).bit_length() - 1

    def indices(self) -> tuple[int, ...]:
        return tuple(self)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EntitySet)
            and self.capacity == other.capacity
            and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.capacity, self.mask))

    def __repr__(self) -> str:
        return f"EntitySet({{{', '.join(map(str, self))}}})"
