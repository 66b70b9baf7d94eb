"""Data model validation and CSV/JSON round-trips."""
import numpy as np
import pytest

from edibench.core import (
    FactorKind,
    MetricReport,
    Representation,
    ResultRow,
    read_representation_csv,
    read_results_csv,
    validate_representation,
    write_representation_csv,
    write_results_csv,
)
from edibench.errors import (
    DimensionMismatch,
    DomainViolation,
    HeaderMismatch,
    MissingKinds,
    NonFinite,
    ParseError,
)


def make_rep(n=50, k=2, d=3, seed=0):
    rng = np.random.default_rng(seed)
    return Representation(
        factors=rng.integers(0, 4, size=(n, k)).astype(float),
        codes=rng.random((n, d)),
        factor_kinds=tuple(FactorKind.discrete(4) for _ in range(k)),
        seed=seed,
    )


class TestFactorKind:
    def test_discrete_needs_two_categories(self):
        with pytest.raises(DomainViolation):
            FactorKind.discrete(1)

    def test_continuous_needs_ordered_range(self):
        with pytest.raises(DomainViolation):
            FactorKind.continuous(1.0, 1.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(DomainViolation):
            FactorKind(kind="fuzzy")

    def test_json_round_trip(self):
        for kind in (FactorKind.discrete(7), FactorKind.continuous(-2.0, 3.5)):
            assert FactorKind.from_json_obj(kind.to_json_obj()) == kind

    def test_malformed_json_obj(self):
        with pytest.raises(MissingKinds):
            FactorKind.from_json_obj({"categories": 3})


class TestRepresentationValidation:
    def test_valid_rep_passes(self):
        validate_representation(make_rep())

    def test_row_count_mismatch(self):
        rep = Representation(factors=np.zeros((5, 1)), codes=np.zeros((4, 1)),
                             factor_kinds=(FactorKind.discrete(2),))
        with pytest.raises(DimensionMismatch):
            validate_representation(rep)

    def test_kinds_arity_mismatch(self):
        rep = Representation(factors=np.zeros((5, 2)), codes=np.zeros((5, 1)),
                             factor_kinds=(FactorKind.discrete(2),))
        with pytest.raises(DimensionMismatch):
            validate_representation(rep)

    def test_nan_rejected(self):
        factors = np.zeros((5, 1))
        factors[2, 0] = np.nan
        rep = Representation(factors=factors, codes=np.zeros((5, 1)),
                             factor_kinds=(FactorKind.discrete(2),))
        with pytest.raises(NonFinite):
            validate_representation(rep)

    def test_discrete_column_out_of_range(self):
        rep = Representation(factors=np.full((5, 1), 9.0), codes=np.zeros((5, 1)),
                             factor_kinds=(FactorKind.discrete(3),))
        with pytest.raises(DomainViolation):
            validate_representation(rep)

    def test_discrete_column_non_integer(self):
        rep = Representation(factors=np.full((5, 1), 0.5), codes=np.zeros((5, 1)),
                             factor_kinds=(FactorKind.discrete(3),))
        with pytest.raises(DomainViolation):
            validate_representation(rep)

    def test_matrices_frozen(self):
        rep = make_rep()
        with pytest.raises(ValueError):
            rep.codes[0, 0] = 1.0


class TestMetricReport:
    def test_duplicate_key_rejected(self):
        with pytest.raises(DomainViolation):
            MetricReport(entries=(("m", "Single", 0.1), ("m", "Single", 0.2)))

    def test_unknown_component_rejected(self):
        with pytest.raises(DomainViolation):
            MetricReport(entries=(("m", "Score", 0.1),))

    def test_non_finite_rejected(self):
        with pytest.raises(NonFinite):
            MetricReport(entries=(("m", "Single", float("nan")),))

    def test_value_lookup(self):
        report = MetricReport(entries=(("m", "Modularity", 0.25),))
        assert report.value("m", "Modularity") == 0.25
        with pytest.raises(KeyError):
            report.value("m", "Single")


class TestRepresentationCsv:
    def test_round_trip(self, tmp_path):
        rep = make_rep(n=30)
        csv_path = tmp_path / "rep.csv"
        kinds_path = tmp_path / "rep.kinds.json"
        write_representation_csv(rep, csv_path, kinds_path)
        back = read_representation_csv(csv_path, kinds_path)
        np.testing.assert_array_equal(back.factors, rep.factors)
        np.testing.assert_allclose(back.codes, rep.codes, rtol=0, atol=1e-12)
        assert back.factor_kinds == rep.factor_kinds

    def test_missing_sidecar(self, tmp_path):
        rep = make_rep()
        csv_path = tmp_path / "rep.csv"
        write_representation_csv(rep, csv_path, tmp_path / "k.json")
        with pytest.raises(MissingKinds):
            read_representation_csv(csv_path, tmp_path / "absent.json")

    def test_bad_header(self, tmp_path):
        csv_path = tmp_path / "rep.csv"
        kinds_path = tmp_path / "rep.kinds.json"
        csv_path.write_text("a,b\n1,2\n")
        kinds_path.write_text('[{"kind": "discrete", "categories": 3}]\n')
        with pytest.raises(HeaderMismatch):
            read_representation_csv(csv_path, kinds_path)

    def test_ragged_row(self, tmp_path):
        csv_path = tmp_path / "rep.csv"
        kinds_path = tmp_path / "rep.kinds.json"
        csv_path.write_text("z0,c0\n1,2\n3\n")
        kinds_path.write_text('[{"kind": "discrete", "categories": 4}]\n')
        with pytest.raises(ParseError):
            read_representation_csv(csv_path, kinds_path)

    def test_empty_file(self, tmp_path):
        csv_path = tmp_path / "rep.csv"
        kinds_path = tmp_path / "rep.kinds.json"
        csv_path.write_text("")
        kinds_path.write_text("[]\n")
        with pytest.raises(ParseError):
            read_representation_csv(csv_path, kinds_path)


class TestResultsCsv:
    def test_round_trip_preserves_12_significant_digits(self, tmp_path):
        rows = [
            ResultRow(experiment="calibrate#111", alpha=0.0, seed=3,
                      rep_index=1, metric="edi", component="Modularity",
                      value=0.123456789012345, elapsed_ms=1.5),
            ResultRow(experiment="rotation", alpha=0.25, seed=0, rep_index=0,
                      metric="mig", component="Single", value=1e-9),
        ]
        path = tmp_path / "r.csv"
        write_results_csv(rows, path)
        back = read_results_csv(path)
        assert back[0].experiment == "calibrate#111"
        assert abs(back[0].value - rows[0].value) < 1e-12
        assert back[1].value == 1e-9

    def test_alpha_out_of_range_rejected(self):
        with pytest.raises(DomainViolation):
            ResultRow(experiment="x", alpha=1.5, seed=0, rep_index=0,
                      metric="m", component="Single", value=0.0)

    def test_header_checked(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("a,b,c\n")
        with pytest.raises(HeaderMismatch):
            read_results_csv(path)
