"""Exclusivity-based metric: hand-computed oracles on known layouts."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edibench.core import FactorKind, Representation
from edibench.errors import EmptyInput, ZeroEntropyFactor
from edibench.estimators import EstimatorChoice
from edibench.metrics_edi import (
    ImpactMatrix,
    edi_compactness,
    edi_explicitness,
    edi_modularity,
    edi_report,
    exclusivity,
    impact_intensity,
    joint_mutual_information,
)


class TestExclusivity:
    def test_single_dominant_attribute(self):
        assert exclusivity([1.0, 0.0, 0.0]) == pytest.approx(1.0, abs=1e-12)

    def test_two_equal_attributes_cancel(self):
        assert exclusivity([1.0, 1.0]) == pytest.approx(0.0, abs=1e-12)

    def test_hand_computed_pair(self):
        # max 0.8 minus RMS of the rest ([0.6]) = 0.2
        assert exclusivity([0.8, 0.6]) == pytest.approx(0.2, abs=1e-12)

    def test_hand_computed_triple(self):
        # 0.9 - sqrt((0.3^2 + 0.4^2)/2)
        expected = 0.9 - math.sqrt((0.09 + 0.16) / 2)
        assert exclusivity([0.3, 0.9, 0.4]) == pytest.approx(expected, abs=1e-12)

    def test_single_value_passthrough(self):
        assert exclusivity([0.5]) == pytest.approx(0.5, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            exclusivity([])

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12),
           st.randoms(use_true_random=False))
    @settings(max_examples=80, deadline=None)
    def test_bounded_by_max_and_permutation_invariant(self, values, rnd):
        got = exclusivity(values)
        assert got <= max(values) + 1e-12
        shuffled = list(values)
        rnd.shuffle(shuffled)
        assert exclusivity(shuffled) == pytest.approx(got, abs=1e-9)


def _balanced_factors(n, k, categories):
    """Exactly balanced discrete factor grid (independent, uniform).

    n must be a multiple of categories**k for exact balance.
    """
    assert n % categories ** k == 0
    cols = []
    block = 1
    for _ in range(k):
        pattern = np.repeat(np.arange(categories), block)
        cols.append(np.tile(pattern, n // len(pattern)).astype(float))
        block *= categories
    return np.column_stack(cols)


def _discrete_rep(factors, codes, categories=4, seed=0):
    return Representation(
        factors=np.asarray(factors, dtype=float),
        codes=np.asarray(codes, dtype=float),
        factor_kinds=tuple(FactorKind.discrete(categories)
                           for _ in range(np.asarray(factors).shape[1])),
        seed=seed,
    )


class TestImpactIntensityDiscrete:
    def test_bijection_gives_identity_matrix(self):
        factors = _balanced_factors(160, 2, 4)
        rep = _discrete_rep(factors, factors.copy())
        im = impact_intensity(rep, EstimatorChoice(kind="discrete"))
        np.testing.assert_allclose(im.intensities, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(im.joint_mi, [math.log(4)] * 2, atol=1e-12)
        np.testing.assert_allclose(im.factor_entropy, [math.log(4)] * 2,
                                   atol=1e-12)
        assert not im.uncaptured.any()
        assert edi_modularity(im) == pytest.approx(1.0, abs=1e-12)
        assert edi_compactness(im) == pytest.approx(1.0, abs=1e-12)
        assert edi_explicitness(im) == pytest.approx(1.0, abs=1e-12)

    def test_merged_code_kills_modularity_only(self):
        # one code carrying both factors: rows are [1, 1]
        factors = _balanced_factors(160, 2, 4)
        merged = factors[:, 0] * 4 + factors[:, 1]
        rep = _discrete_rep(factors, merged[:, None])
        im = impact_intensity(rep, EstimatorChoice(kind="discrete"))
        np.testing.assert_allclose(im.intensities, [[1.0, 1.0]], atol=1e-12)
        assert edi_modularity(im) == pytest.approx(0.0, abs=1e-12)
        assert edi_compactness(im) == pytest.approx(1.0, abs=1e-12)
        assert edi_explicitness(im) == pytest.approx(1.0, abs=1e-12)

    def test_duplicated_code_kills_compactness_only(self):
        # two identical codes for one factor: column is [1, 1]
        factors = _balanced_factors(160, 1, 4)
        rep = _discrete_rep(factors, np.column_stack([factors, factors]))
        im = impact_intensity(rep, EstimatorChoice(kind="discrete"))
        np.testing.assert_allclose(im.intensities, [[1.0], [1.0]], atol=1e-12)
        # both codes credit factor 0 with exclusivity 1, capped at 1
        assert edi_modularity(im) == pytest.approx(1.0, abs=1e-12)
        assert edi_compactness(im) == pytest.approx(0.0, abs=1e-12)

    def test_constant_codes_mark_factor_uncaptured(self):
        factors = _balanced_factors(120, 1, 4)
        rep = _discrete_rep(factors, np.zeros((120, 2)))
        im = impact_intensity(rep, EstimatorChoice(kind="discrete"))
        assert im.uncaptured.tolist() == [True]
        np.testing.assert_allclose(im.intensities, 0.0, atol=1e-12)
        assert edi_modularity(im) == pytest.approx(0.0, abs=1e-12)
        assert edi_compactness(im) == pytest.approx(0.0, abs=1e-12)
        assert edi_explicitness(im) == pytest.approx(0.0, abs=1e-12)

    def test_joint_mi_equals_tuple_plugin(self):
        factors = _balanced_factors(160, 2, 4)
        rep = _discrete_rep(factors, factors.copy())
        assert joint_mutual_information(rep, 0) == pytest.approx(
            math.log(4), abs=1e-12)


class TestScoreClipping:
    def test_estimator_overshoot_clipped_to_one(self):
        im = ImpactMatrix(intensities=np.array([[1.05], [0.0]]),
                          joint_mi=np.array([1.0]),
                          factor_entropy=np.array([1.0]),
                          uncaptured=np.array([False]))
        assert edi_compactness(im) == 1.0
        assert edi_modularity(im) == 1.0

    def test_explicitness_ratio_clamped(self):
        im = ImpactMatrix(intensities=np.ones((1, 1)),
                          joint_mi=np.array([1.4]),
                          factor_entropy=np.array([1.0]),
                          uncaptured=np.array([False]))
        assert edi_explicitness(im) == 1.0

    def test_zero_entropy_factor_rejected(self):
        im = ImpactMatrix(intensities=np.ones((1, 1)),
                          joint_mi=np.array([0.5]),
                          factor_entropy=np.array([0.0]),
                          uncaptured=np.array([False]))
        with pytest.raises(ZeroEntropyFactor):
            edi_explicitness(im)


class TestContinuousBackend:
    def test_jittered_bijection_scores_high_with_ksg(self):
        rng = np.random.default_rng(42)
        factors = _balanced_factors(4000, 2, 4)
        codes = factors + rng.random(factors.shape) * 0.1
        rep = Representation(
            factors=factors, codes=codes,
            factor_kinds=(FactorKind.discrete(4), FactorKind.discrete(4)),
            seed=7)
        report = edi_report(rep, EstimatorChoice(kind="ksg"))
        assert report.value("edi", "Modularity") >= 0.9
        assert report.value("edi", "Compactness") >= 0.9
        assert report.value("edi", "Explicitness") >= 0.9

    def test_report_components(self):
        factors = _balanced_factors(160, 2, 4)
        rep = _discrete_rep(factors, factors.copy())
        report = edi_report(rep, EstimatorChoice(kind="discrete"))
        assert {c for _, c, _ in report.entries} == {
            "Modularity", "Compactness", "Explicitness"}
        assert all(m == "edi" for m, _, _ in report.entries)
