"""Brute-force reference implementations used for property testing.

Everything here is deliberately independent of the sweep-based pipeline: its
own interpolation, its own root finding (via numpy polynomial roots), its own
union-find. Exponential enumeration limits it to small instances.
"""

from __future__ import annotations

import numpy as np

from .model import DataError, Dataset, EntitySet, Interval, TimeOutOfRange


class TooManyEntities(DataError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"brute-force enumeration supports n <= {limit}, got {n}")


_BRUTE_LIMIT = 12


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        r = x
        while self.parent[r] != r:
            r = self.parent[r]
        while self.parent[x] != r:
            self.parent[x], x = r, self.parent[x]
        return r

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _interp_all(dataset: Dataset, t: float) -> np.ndarray:
    times = dataset.times
    if t < times[0] or t > times[-1]:
        raise TimeOutOfRange(t, float(times[0]), float(times[-1]))
    i = int(np.searchsorted(times, t, side="right")) - 1
    i = min(i, len(times) - 2)
    if t == times[i]:
        return dataset.positions[:, i, :]
    s = (t - times[i]) / (times[i + 1] - times[i])
    return dataset.positions[:, i, :] * (1.0 - s) + dataset.positions[:, i + 1, :] * s


def _partition_from_adjacency(adj: np.ndarray) -> list[tuple[int, ...]]:
    n = adj.shape[0]
    uf = _UnionFind(n)
    for a in range(n):
        for b in range(a + 1, n):
            if adj[a, b]:
                uf.union(a, b)
    blocks: dict[int, list[int]] = {}
    for x in range(n):
        blocks.setdefault(uf.find(x), []).append(x)
    return sorted(tuple(sorted(b)) for b in blocks.values())


def components_at(dataset: Dataset, eps: float, t: float) -> list[tuple[int, ...]]:
    """Partition of the entities into spatial proximity components at time t.

    Two entities are directly connected iff their distance is <= 2*eps
    (closed condition); components are the transitive closure. Blocks are
    returned sorted, each block an ascending tuple of entity indices.
    """
    pos = _interp_all(dataset, t)
    d = pos[:, None, :] - pos[None, :, :]
    dist_sq = (d * d).sum(axis=2)
    return _partition_from_adjacency(dist_sq <= (2.0 * eps) ** 2)


def _pair_root_times(dataset: Dataset, eps: float) -> list[float]:
    """All times where some pair's distance equals 2*eps, by per-edge quadratics."""
    thr = (2.0 * eps) ** 2
    times = dataset.times
    pos = dataset.positions
    n = dataset.n
    out: list[float] = []
    for i in range(len(times) - 1):
        dt = times[i + 1] - times[i]
        for a in range(n):
            for b in range(a + 1, n):
                d0 = pos[a, i] - pos[b, i]
                d1 = pos[a, i + 1] - pos[b, i + 1]
                v = (d1 - d0) / dt
                # squared distance minus threshold as a polynomial in local s
                coeffs = [v @ v, 2.0 * (d0 @ v), d0 @ d0 - thr]
                if abs(coeffs[0]) == 0.0 and abs(coeffs[1]) == 0.0:
                    continue
                roots = np.roots(coeffs)
                for r in roots:
                    if abs(r.imag) < 1e-12 and -1e-12 <= r.real <= dt + 1e-12:
                        out.append(float(times[i] + min(max(r.real, 0.0), dt)))
    return out


def _timeline(dataset: Dataset, eps: float) -> list[tuple[float, float]]:
    """Alternating zero-length instants and open cells covering [t0, t_end].

    Returned as (left, right) pairs; instants have left == right and sit at
    every candidate connectivity-change time plus both window endpoints.
    """
    cuts = {dataset.t0, dataset.t_end}
    cuts.update(_pair_root_times(dataset, eps))
    cut_list = sorted(cuts)
    # merge near-duplicate cuts from floating point noise
    merged = [cut_list[0]]
    for c in cut_list[1:]:
        if c - merged[-1] > 1e-11:
            merged.append(c)
    segments: list[tuple[float, float]] = []
    for i, c in enumerate(merged):
        segments.append((c, c))
        if i + 1 < len(merged):
            segments.append((c, merged[i + 1]))
    return segments


def brute_maximal_groups(
    dataset: Dataset, eps: float, m: int = 1, delta: float = 0.0
) -> list[tuple[EntitySet, Interval]]:
    """Enumerate all maximal groups by exhaustive subset-and-interval search.

    A subset qualifies on an interval iff it stays inside one proximity
    component throughout; records covered by another record (superset group on
    a superset interval) are discarded. Only feasible for small n.
    """
    n = dataset.n
    if n > _BRUTE_LIMIT:
        raise TooManyEntities(n, _BRUTE_LIMIT)
    segments = _timeline(dataset, eps)
    # per segment, the bitmask of the component that contains each entity
    seg_block_masks: list[list[int]] = []
    for left, right in segments:
        t = left if left == right else 0.5 * (left + right)
        blocks = components_at(dataset, eps, t)
        by_entity = [0] * n
        for block in blocks:
            bm = 0
            for x in block:
                bm |= 1 << x
            for x in block:
                by_entity[x] = bm
        seg_block_masks.append(by_entity)

    candidates: list[tuple[int, float, float]] = []
    for g in range(1, 1 << n):
        low = (g & -g).bit_length() - 1
        run_start: float | None = None
        run_end: float | None = None
        for (left, right), by_entity in zip(segments, seg_block_masks):
            inside = (by_entity[low] & g) == g
            if inside:
                if run_start is None:
                    run_start = left
                run_end = right
            else:
                if run_start is not None:
                    candidates.append((g, run_start, run_end))
                    run_start = None
        if run_start is not None:
            candidates.append((g, run_start, run_end))

    kept = [
        (g, s, e)
        for (g, s, e) in candidates
        if g.bit_count() >= m and (e - s) >= delta
    ]
    results: list[tuple[EntitySet, Interval]] = []
    for g, s, e in kept:
        covered = False
        for h, hs, he in kept:
            if h != g and (g & h) == g and hs <= s and e <= he:
                covered = True
                break
        if not covered:
            results.append((EntitySet(n, g), Interval(s, e)))
    results.sort(key=lambda r: (r[1].start, r[1].end, r[0].indices()))
    return results


def alpha_components_at(
    dataset: Dataset, eps: float, alpha: float, t: float
) -> list[tuple[int, ...]]:
    """Partition into alpha-relaxed components at time t.

    A pair is linked iff its minimum distance anywhere in the window
    [t - alpha/2, t + alpha/2] (clamped to the observation window) is
    <= 2*eps, evaluated exactly on each trajectory edge.
    """
    times = dataset.times
    if t < times[0] or t > times[-1]:
        raise TimeOutOfRange(t, float(times[0]), float(times[-1]))
    lo = max(float(times[0]), t - alpha / 2.0)
    hi = min(float(times[-1]), t + alpha / 2.0)
    thr = (2.0 * eps) ** 2
    n = dataset.n
    pos = dataset.positions
    adj = np.zeros((n, n), dtype=bool)
    for i in range(len(times) - 1):
        a_t, b_t = float(times[i]), float(times[i + 1])
        s_lo = max(lo, a_t)
        s_hi = min(hi, b_t)
        if s_lo > s_hi:
            continue
        dt = b_t - a_t
        for a in range(n):
            for b in range(a + 1, n):
                if adj[a, b]:
                    continue
                d0 = pos[a, i] - pos[b, i]
                d1 = pos[a, i + 1] - pos[b, i + 1]
                v = (d1 - d0) / dt
                qa = v @ v
                qb = 2.0 * (d0 @ v)
                qc = d0 @ d0
                best = np.inf
                for s in (s_lo - a_t, s_hi - a_t):
                    best = min(best, qa * s * s + qb * s + qc)
                if qa > 0:
                    s_star = -qb / (2.0 * qa)
                    if s_lo - a_t < s_star < s_hi - a_t:
                        best = min(best, qa * s_star * s_star + qb * s_star + qc)
                if best <= thr:
                    adj[a, b] = adj[b, a] = True
    return _partition_from_adjacency(adj)
