"""Synthetic generators: determinism, validity, and structural properties."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edibench.core import validate_representation
from edibench.errors import InvalidCase, TooFewRequested
from edibench.synth import (
    BOUNDARY_CASES,
    BoundaryCase,
    SweepSpec,
    _collapse_map,
    _staircase_partitions,
    gen_boundary,
    gen_sweep,
    subsample,
)

FAMILIES = ("nonlinear", "rotation", "noise")


class TestBoundaryCases:
    @pytest.mark.parametrize("code3", BOUNDARY_CASES)
    def test_valid_and_deterministic(self, code3):
        case = BoundaryCase(code3)
        rep = gen_boundary(case, 500, seed=4)
        validate_representation(rep)
        again = gen_boundary(case, 500, seed=4)
        np.testing.assert_array_equal(rep.factors, again.factors)
        np.testing.assert_array_equal(rep.codes, again.codes)
        other = gen_boundary(case, 500, seed=5)
        assert not np.array_equal(rep.factors, other.factors)

    def test_shapes_per_layout(self):
        # split-compactness layouts use 3 codes; the merged-modularity
        # layouts use a third factor
        assert gen_boundary(BoundaryCase("111"), 200, 0).codes.shape[1] == 2
        assert gen_boundary(BoundaryCase("111"), 200, 0).factors.shape[1] == 2
        assert gen_boundary(BoundaryCase("101"), 200, 0).codes.shape[1] == 3
        assert gen_boundary(BoundaryCase("011"), 200, 0).factors.shape[1] == 3
        assert gen_boundary(BoundaryCase("011"), 200, 0).codes.shape[1] == 2

    def test_full_case_is_identity(self):
        rep = gen_boundary(BoundaryCase("111"), 300, seed=1)
        np.testing.assert_array_equal(rep.factors, rep.codes)

    def test_case_validation(self):
        with pytest.raises(InvalidCase):
            BoundaryCase("222")
        with pytest.raises(InvalidCase):
            BoundaryCase("111", categories=3)
        with pytest.raises(InvalidCase):
            BoundaryCase("111", drop_fraction=1.0)

    def test_min_sample_count(self):
        with pytest.raises(InvalidCase):
            gen_boundary(BoundaryCase("111"), 50, 0)


class TestCollapseMap:
    @given(st.integers(5, 30), st.floats(0.15, 0.75))
    @settings(max_examples=60, deadline=None)
    def test_monotone_and_survivor_count(self, categories, drop_fraction):
        import math
        dropped = math.ceil(drop_fraction * categories)
        if categories - dropped < 2:
            return
        for skew in ("heavy", "split"):
            mapping = _collapse_map(categories, drop_fraction, skew)
            # dropped categories land on surviving values, so the distinct
            # count equals the survivor count
            assert len(np.unique(mapping)) == categories - dropped
            # surviving categories keep their identity
            np.testing.assert_array_equal(mapping[dropped:],
                                          np.arange(dropped, categories))
        # the heavy skew is monotone (single collapse target)
        heavy = _collapse_map(categories, drop_fraction, "heavy")
        assert np.all(np.diff(heavy) >= 0)

    def test_too_aggressive_drop_rejected(self):
        with pytest.raises(InvalidCase):
            _collapse_map(10, 0.95, "heavy")


class TestStaircasePartitions:
    @pytest.mark.parametrize("categories", [4, 6, 10, 15, 23])
    def test_singleton_intersections(self, categories):
        rows, cols = _staircase_partitions(categories)
        assert len(rows) == len(cols) == categories
        # knowing both labels pins down the category
        pairs = set(zip(rows.tolist(), cols.tolist()))
        assert len(pairs) == categories

    def test_conjugate_profiles_for_triangular_count(self):
        rows, cols = _staircase_partitions(10)
        row_profile = sorted(np.bincount(rows), reverse=True)
        col_profile = sorted(np.bincount(cols), reverse=True)
        assert row_profile == col_profile == [4, 3, 2, 1]


class TestSweeps:
    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_valid_and_deterministic(self, family, alpha):
        spec = SweepSpec(family, alpha, n=400, seed=2)
        rep = gen_sweep(spec)
        validate_representation(rep)
        assert rep.alpha == alpha
        again = gen_sweep(spec)
        np.testing.assert_array_equal(rep.codes, again.codes)

    def test_zero_alpha_identity(self):
        for family in ("rotation", "noise"):
            rep = gen_sweep(SweepSpec(family, 0.0, n=400, seed=3))
            np.testing.assert_array_equal(rep.codes, rep.factors)
        rep = gen_sweep(SweepSpec("nonlinear", 0.0, n=400, seed=3))
        # warp is identity-like (not exact) at alpha = 0
        np.testing.assert_allclose(rep.codes, rep.factors, atol=1e-4)

    def test_nonlinear_warp_is_monotone(self):
        rep = gen_sweep(SweepSpec("nonlinear", 0.9, n=2000, seed=4))
        order = np.argsort(rep.factors[:, 0])
        assert np.all(np.diff(rep.codes[order, 0]) >= 0)

    def test_rotation_mixes_neighbor(self):
        base = gen_sweep(SweepSpec("rotation", 0.0, n=2000, seed=5))
        mixed = gen_sweep(SweepSpec("rotation", 0.5, n=2000, seed=5))
        # at maximum mixing each code correlates with the next factor almost
        # as strongly as with its own
        own = np.corrcoef(mixed.codes[:, 0], base.factors[:, 0])[0, 1]
        neighbor = np.corrcoef(mixed.codes[:, 0], base.factors[:, 1])[0, 1]
        assert neighbor > 0.6
        assert own >= neighbor  # but never overtakes it

    def test_noise_decorrelates(self):
        clean = gen_sweep(SweepSpec("noise", 0.0, n=2000, seed=6))
        noisy = gen_sweep(SweepSpec("noise", 1.0, n=2000, seed=6))
        corr = abs(np.corrcoef(noisy.codes[:, 0], clean.factors[:, 0])[0, 1])
        assert corr < 0.05

    def test_spec_validation(self):
        with pytest.raises(InvalidCase):
            SweepSpec("spiral", 0.5)
        with pytest.raises(InvalidCase):
            SweepSpec("noise", 1.5)
        with pytest.raises(InvalidCase):
            SweepSpec("rotation", 0.5, k=3, d=4)
        with pytest.raises(InvalidCase):
            SweepSpec("noise", 0.5, n=0)


class TestSubsample:
    def test_deterministic_subset(self):
        rep = gen_sweep(SweepSpec("noise", 0.3, n=500, seed=7))
        sub = subsample(rep, 100, seed=11)
        assert sub.n == 100
        assert sub.factor_kinds == rep.factor_kinds
        assert sub.alpha == rep.alpha
        again = subsample(rep, 100, seed=11)
        np.testing.assert_array_equal(sub.codes, again.codes)
        # rows are drawn from the parent without replacement
        parent_rows = {tuple(r) for r in rep.codes}
        assert all(tuple(r) in parent_rows for r in sub.codes)

    def test_bounds(self):
        rep = gen_sweep(SweepSpec("noise", 0.3, n=500, seed=7))
        with pytest.raises(TooFewRequested):
            subsample(rep, 1, seed=0)
        with pytest.raises(TooFewRequested):
            subsample(rep, 501, seed=0)
