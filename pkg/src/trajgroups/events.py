"""Connect/disconnect events: times at which a pair's distance crosses 2*eps.

Within one trajectory edge the relative motion of a pair is linear, so the
squared distance is a quadratic in time; events are its threshold crossings.
The closed overlap convention (distance <= 2*eps counts as connected) is used
throughout, and a per-pair state machine keeps each pair's event sequence
alternating and consistent with its state at t0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .model import Dataset

#: tolerance (time units) for snapping roots to interval boundaries
TIME_TOLERANCE = 1e-9


class EventKind(IntEnum):
    # Disconnect sorts before Connect at equal (time, a, b)
    DISCONNECT = 0
    CONNECT = 1


@dataclass(frozen=True, order=True)
class PairEvent:
    time: float
    a: int
    b: int
    kind: EventKind


def _interval_candidates(
    dx0: float, dy0: float, vx: float, vy: float,
    t_a: float, t_b: float, thr: float, first: bool,
) -> list[tuple[float, EventKind]]:
    """Threshold crossings of one pair within one trajectory edge.

    Relative offset at the interval start is (dx0, dy0), relative velocity
    (vx, vy) per time unit. Roots are snapped to the interval boundaries
    within TIME_TOLERANCE and attributed to the earlier interval: only
    (t_a, t_b] is accepted, plus t_a itself on the very first interval.
    """
    qa = vx * vx + vy * vy
    qb = 2.0 * (dx0 * vx + dy0 * vy)
    qc = dx0 * dx0 + dy0 * dy0 - thr
    out: list[tuple[float, EventKind]] = []

    def emit(s: float, kind: EventKind) -> None:
        t = t_a + s
        if abs(t - t_a) <= TIME_TOLERANCE:
            t = t_a
        elif abs(t - t_b) <= TIME_TOLERANCE:
            t = t_b
        if t_a < t <= t_b or (first and t == t_a):
            out.append((t, kind))

    if qa == 0.0:
        if qb == 0.0:
            if qc == 0.0:
                # sliding contact exactly at the threshold for the whole edge
                emit(0.0, EventKind.CONNECT)
                emit(t_b - t_a, EventKind.DISCONNECT)
            return out
        s = -qc / qb
        emit(s, EventKind.CONNECT if qb < 0 else EventKind.DISCONNECT)
        return out

    disc = qb * qb - 4.0 * qa * qc
    if disc <= 0.0:
        return out  # no strict crossing (tangencies dropped)
    sq = math.sqrt(disc)
    q = -(qb + math.copysign(sq, qb)) / 2.0 if qb != 0.0 else sq / 2.0
    r1 = q / qa
    r2 = qc / q
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    emit(lo, EventKind.CONNECT)
    emit(hi, EventKind.DISCONNECT)
    return out


def _filter_pair_sequence(
    candidates: list[tuple[float, EventKind]], connected_at_start: bool
) -> list[tuple[float, EventKind]]:
    """Enforce alternation against the initial state and cancel zero-length blips."""
    state = connected_at_start
    seq: list[tuple[float, EventKind]] = []
    for t, kind in candidates:
        if (kind == EventKind.CONNECT) == state:
            continue  # redundant (duplicate boundary root or sliding re-entry)
        seq.append((t, kind))
        state = kind == EventKind.CONNECT
    cleaned: list[tuple[float, EventKind]] = []
    for t, kind in seq:
        if cleaned and cleaned[-1][0] == t and cleaned[-1][1] != kind:
            cleaned.pop()  # grazing touch or sliding boundary: cancels out
        else:
            cleaned.append((t, kind))
    return cleaned


def _edge_vectors(dataset: Dataset, a: int, b: int, i: int):
    times = dataset.times
    pos = dataset.positions
    t_a, t_b = float(times[i]), float(times[i + 1])
    dt = t_b - t_a
    dx0 = pos[a, i, 0] - pos[b, i, 0]
    dy0 = pos[a, i, 1] - pos[b, i, 1]
    vx = ((pos[a, i + 1, 0] - pos[b, i + 1, 0]) - dx0) / dt
    vy = ((pos[a, i + 1, 1] - pos[b, i + 1, 1]) - dy0) / dt
    return dx0, dy0, vx, vy, t_a, t_b


def _connected_at_t0(dataset: Dataset, a: int, b: int, thr: float) -> bool:
    d = dataset.positions[a, 0] - dataset.positions[b, 0]
    return float(d @ d) <= thr


def pair_events(dataset: Dataset, a: int, b: int, eps: float) -> list[PairEvent]:
    """All connect/disconnect events for one pair, sorted by time."""
    if a == b:
        raise ValueError("pair_events needs two distinct entities")
    if a > b:
        a, b = b, a
    thr = (2.0 * eps) ** 2
    candidates: list[tuple[float, EventKind]] = []
    for i in range(dataset.tau):
        dx0, dy0, vx, vy, t_a, t_b = _edge_vectors(dataset, a, b, i)
        candidates.extend(
            _interval_candidates(float(dx0), float(dy0), float(vx), float(vy),
                                 t_a, t_b, thr, first=(i == 0))
        )
    filtered = _filter_pair_sequence(candidates, _connected_at_t0(dataset, a, b, thr))
    return [PairEvent(t, a, b, kind) for t, kind in filtered]


def all_events(dataset: Dataset, eps: float) -> list[PairEvent]:
    """Events over all pairs, sorted by (time, a, b, kind).

    A vectorised scan flags the (pair, edge) cells whose squared-distance
    quadratic can reach the threshold; only those cells go through the exact
    scalar root extraction, so the result is identical to concatenating
    pair_events over all pairs.
    """
    n = dataset.n
    if n < 2:
        return []
    thr = (2.0 * eps) ** 2
    times = dataset.times
    pos = dataset.positions
    ia, ib = np.triu_indices(n, k=1)

    d0_all = pos[ia, 0, :] - pos[ib, 0, :]
    connected0 = (d0_all * d0_all).sum(axis=1) <= thr

    per_pair: dict[int, list[tuple[float, EventKind]]] = {}
    for i in range(dataset.tau):
        t_a, t_b = float(times[i]), float(times[i + 1])
        dt = t_b - t_a
        d0 = pos[ia, i, :] - pos[ib, i, :]
        d1 = pos[ia, i + 1, :] - pos[ib, i + 1, :]
        v = (d1 - d0) / dt
        qa = v[:, 0] * v[:, 0] + v[:, 1] * v[:, 1]
        qb = 2.0 * (d0[:, 0] * v[:, 0] + d0[:, 1] * v[:, 1])
        qc = d0[:, 0] * d0[:, 0] + d0[:, 1] * d0[:, 1] - thr
        # scan a window widened by the snap tolerance so boundary roots that
        # the scalar path would snap inward are never filtered out
        s_lo = -TIME_TOLERANCE
        s_hi = dt + TIME_TOLERANCE
        f_lo = qa * s_lo * s_lo + qb * s_lo + qc
        f_hi = qa * s_hi * s_hi + qb * s_hi + qc
        fmin = np.minimum(f_lo, f_hi)
        fmax = np.maximum(f_lo, f_hi)
        s_star = np.where(qa > 0, -qb / (2.0 * np.maximum(qa, 1e-300)), s_lo - 1.0)
        interior = (s_star > s_lo) & (s_star < s_hi)
        f_star = qc - np.where(qa > 0, qb * qb / (4.0 * np.maximum(qa, 1e-300)), 0.0)
        fmin = np.where(interior, np.minimum(fmin, f_star), fmin)
        hot = np.nonzero((fmin <= 0.0) & (fmax >= 0.0))[0]
        first = i == 0
        for k in hot:
            cands = _interval_candidates(
                float(d0[k, 0]), float(d0[k, 1]), float(v[k, 0]), float(v[k, 1]),
                t_a, t_b, thr, first=first,
            )
            if cands:
                per_pair.setdefault(int(k), []).extend(cands)

    events: list[PairEvent] = []
    for k, cands in per_pair.items():
        a, b = int(ia[k]), int(ib[k])
        for t, kind in _filter_pair_sequence(cands, bool(connected0[k])):
            events.append(PairEvent(t, a, b, kind))
    events.sort()
    return events


def initial_adjacency(dataset: Dataset, eps: float) -> set[tuple[int, int]]:
    """Pairs directly connected at t0 (distance <= 2*eps, closed)."""
    n = dataset.n
    if n < 2:
        return set()
    thr = (2.0 * eps) ** 2
    ia, ib = np.triu_indices(n, k=1)
    d = dataset.positions[ia, 0, :] - dataset.positions[ib, 0, :]
    hit = (d * d).sum(axis=1) <= thr
    return {(int(a), int(b)) for a, b in zip(ia[hit], ib[hit])}
