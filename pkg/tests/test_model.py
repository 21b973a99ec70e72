import numpy as np
import pytest
from hypothesis import given, strategies as st

from trajgroups import Dataset, EntitySet, Interval, Params, position_at, validate
from trajgroups.model import (
    InvalidParameter,
    NonFiniteCoordinate,
    NonMonotonicTime,
    RaggedTrajectory,
    TimeOutOfRange,
)


class TestValidate:
    def test_minimal_dataset_ok(self):
        ds = Dataset(["a"], [0.0, 1.0], [[(0, 0), (1, 0)]])
        validate(ds)

    def test_non_monotonic_time(self):
        ds = Dataset(["a"], [0.0, 0.0], [[(0, 0), (1, 0)]])
        with pytest.raises(NonMonotonicTime) as exc:
            validate(ds)
        assert exc.value.time_index == 1

    def test_ragged_trajectory(self):
        ds = Dataset(["a", "b"], [0.0, 1.0, 2.0],
                     [[(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 1)]])
        with pytest.raises(RaggedTrajectory) as exc:
            validate(ds)
        assert exc.value.entity == 1

    def test_non_finite_coordinate(self):
        ds = Dataset(["a"], [0.0, 1.0], [[(0, 0), (np.nan, 0)]])
        with pytest.raises(NonFiniteCoordinate) as exc:
            validate(ds)
        assert (exc.value.entity, exc.value.time_index) == (0, 1)

    def test_single_timestamp_rejected(self):
        ds = Dataset(["a"], [0.0], [[(0, 0)]])
        with pytest.raises(InvalidParameter):
            validate(ds)


class TestPositionAt:
    def test_midpoint(self):
        ds = Dataset(["a"], [0.0, 1.0], [[(0, 0), (2, 0)]])
        assert position_at(ds, 0, 0.5) == pytest.approx((1.0, 0.0))

    def test_endpoint_identity(self):
        ds = Dataset(["a"], [0.0, 1.0], [[(0.3, 0.7), (2, 0)]])
        assert tuple(position_at(ds, 0, 0.0)) == (0.3, 0.7)

    def test_two_axis_interpolation(self):
        ds = Dataset(["a"], [0.0, 2.0], [[(0, 0), (4, 4)]])
        assert position_at(ds, 0, 0.5) == pytest.approx((1.0, 1.0))

    def test_out_of_range(self):
        ds = Dataset(["a"], [0.0, 1.0], [[(0, 0), (1, 0)]])
        with pytest.raises(TimeOutOfRange):
            position_at(ds, 0, 1.5)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_affine_within_edge(self, s1, s2):
        ds = Dataset(["a"], [0.0, 1.0], [[(1, 2), (5, -2)]])
        p1 = position_at(ds, 0, s1)
        p2 = position_at(ds, 0, s2)
        mid = position_at(ds, 0, (s1 + s2) / 2)
        assert np.allclose((p1 + p2) / 2, mid, atol=1e-9)


class TestParams:
    def test_valid(self):
        Params(eps=1.0, m=2, delta=0.5, alpha=0.1)

    @pytest.mark.parametrize("kw", [
        {"eps": -1.0}, {"eps": np.nan}, {"eps": 1.0, "m": 0},
        {"eps": 1.0, "delta": -0.1}, {"eps": 1.0, "alpha": np.inf},
    ])
    def test_invalid(self, kw):
        with pytest.raises(InvalidParameter):
            Params(**kw)


class TestInterval:
    def test_order_enforced(self):
        with pytest.raises(InvalidParameter):
            Interval(2.0, 1.0)

    def test_intersection(self):
        assert Interval(0, 2).intersection(Interval(1, 3)) == Interval(1, 2)
        assert Interval(0, 1).intersection(Interval(2, 3)) is None
        assert Interval(0, 1).intersection(Interval(1, 3)) == Interval(1, 1)


subsets = st.sets(st.integers(0, 11))


class TestEntitySet:
    @given(subsets, subsets)
    def test_matches_builtin_sets(self, a, b):
        ea, eb = EntitySet.of(12, a), EntitySet.of(12, b)
        assert set(ea | eb) == a | b
        assert set(ea & eb) == a & b
        assert set(ea - eb) == a - b
        assert ea.issubset(eb) == a.issubset(b)
        assert ea.isdisjoint(eb) == a.isdisjoint(b)
        assert len(ea) == len(a)

    @given(subsets, subsets, subsets)
    def test_distributivity_and_de_morgan(self, a, b, c):
        ea, eb, ec = (EntitySet.of(12, s) for s in (a, b, c))
        assert (ea & (eb | ec)) == ((ea & eb) | (ea & ec))
        full = EntitySet.full(12)
        assert (full - (ea | eb)) == ((full - ea) & (full - eb))

    def test_iteration_ascending(self):
        es = EntitySet.of(8, [5, 1, 7, 0])
        assert list(es) == [0, 1, 5, 7]
        assert es.min_index() == 0

    def test_immutable_and_hashable(self):
        es = EntitySet.of(4, [1])
        with pytest.raises(AttributeError):
            es.mask = 3
        assert hash(EntitySet.of(4, [1])) == hash(es)

    def test_capacity_mismatch(self):
        with pytest.raises(ValueError):
            EntitySet.of(4, [1]) | EntitySet.of(5, [1])
