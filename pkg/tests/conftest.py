"""Shared fixtures: paper-style scenarios and random instance makers."""

from __future__ import annotations

import numpy as np
import pytest

from trajgroups import Dataset


def make_dataset(columns, times=None):
    """Build a dataset from per-entity lists of positions.

    ``columns`` maps entity id to either a list of (x, y) pairs or a list of
    x floats (then y = 0).
    """
    ids = list(columns)
    series = []
    for e in ids:
        pts = columns[e]
        pts = [(p, 0.0) if np.isscalar(p) else tuple(p) for p in pts]
        series.append(pts)
    if times is None:
        times = np.arange(len(series[0]), dtype=float)
    return Dataset(ids, times, series)


def random_walk_dataset(rng, n=None, tau=None, box=4.0, step=1.2):
    n = n or int(rng.integers(2, 9))
    tau = tau or int(rng.integers(1, 7))
    start = rng.uniform(0, box, size=(n, 1, 2))
    steps = rng.normal(0, step, size=(n, tau, 2))
    pos = np.concatenate([start, start + np.cumsum(steps, axis=1)], axis=1)
    return Dataset([f"e{i}" for i in range(n)], np.arange(tau + 1, dtype=float), pos)


def groups_as_tuples(groups):
    return sorted((g.entities.mask, g.interval.start, g.interval.end) for g in groups)


def oracle_as_tuples(pairs):
    return sorted((es.mask, iv.start, iv.end) for es, iv in pairs)


def assert_same_groups(got, want, tol=1e-9):
    __tracebackhide__ = True
    assert len(got) == len(want), f"group counts differ: {len(got)} vs {len(want)}"
    for (gm, gs, ge), (wm, ws, we) in zip(got, want):
        assert gm == wm, f"sets differ: {bin(gm)} vs {bin(wm)}"
        assert abs(gs - ws) <= tol and abs(ge - we) <= tol, (
            f"intervals differ for {bin(gm)}: [{gs}, {ge}] vs [{ws}, {we}]"
        )


@pytest.fixture
def fig_four_groups():
    """Three co-moving pairs; the middle pair visits both others, one visit short.

    With eps = 0.5: pairs A = {0,1} at x=0, C = {4,5} at x=10, B = {2,3}
    sliding against A on [1, 3] and against C on [4, 5]. For m = 2 and delta
    in (1, 2] exactly four maximal groups exist.
    """
    b_path = [3.0, 1.0, 1.0, 1.0, 9.0, 9.0]
    return make_dataset(
        {
            "x1": [0.0] * 6,
            "x2": [0.0] * 6,
            "x3": b_path,
            "x4": b_path,
            "x5": [10.0] * 6,
            "x6": [10.0] * 6,
        }
    )


@pytest.fixture
def fig_split_groups():
    """Four pairs merge into quads, the quads merge, then a crosswise split.

    Pairs (by index): A = {0,2}, B = {1,3}, C = {4,6}, D = {5,7}. After the
    full merge the left half {0,2,4,6} and right half {1,3,5,7} separate.
    eps = 0.5.
    """
    return make_dataset(
        {
            "x1": [0.0, 0.0, 0.0, 10.0, 4.0, 4.0],
            "x2": [2.0, 2.0, 0.0, 10.0, 16.0, 16.0],
            "x3": [-2.0, 0.0, 0.0, 10.0, 4.0, 4.0],
            "x4": [4.5, 2.0, 0.0, 10.0, 16.0, 16.0],
            "x5": [20.0, 20.0, 20.0, 10.0, 4.0, 4.0],
            "x6": [22.0, 22.0, 20.0, 10.0, 16.0, 16.0],
            "x7": [16.8, 20.0, 20.0, 10.0, 4.0, 4.0],
            "x8": [27.0, 22.0, 20.0, 10.0, 16.0, 16.0],
        }
    )


@pytest.fixture
def detour_dataset():
    """Entity 2 leaves the stationary pair {0, 1} for a gap of 1.6 time units."""
    return make_dataset(
        {
            "a": [0.0] * 5,
            "b": [0.0] * 5,
            "x": [0.5, 0.5, 3.0, 0.5, 0.5],
        }
    )


@pytest.fixture
def passing_dataset():
    """Entity 2 briefly visits the far cluster {3, 4, 5} and returns."""
    return make_dataset(
        {
            "p1": [0.0] * 6,
            "p2": [0.0] * 6,
            "walker": [0.5, 0.5, 9.5, 9.5, 0.5, 0.5],
            "q1": [10.0] * 6,
            "q2": [10.0] * 6,
            "q3": [10.0] * 6,
        }
    )
