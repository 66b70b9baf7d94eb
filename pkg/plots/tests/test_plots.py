"""Reader and figure construction for the two CSV inputs."""
import numpy as np
import pytest

from ediplots.errors import EmptyInput, NotSquare, SchemaMismatch
from ediplots.figures import render_agreement, render_sweep
from ediplots.reader import read_agreement, read_results, sweep_series

RESULTS_HEADER = ("experiment,alpha,seed,rep_index,metric,component,value,"
                  "elapsed_ms\n")


def results_csv(tmp_path, rows):
    path = tmp_path / "results.csv"
    path.write_text(RESULTS_HEADER + "".join(rows))
    return path


def agreement_csv(tmp_path, text):
    path = tmp_path / "agreement.csv"
    path.write_text(text)
    return path


class TestReadResults:
    def test_labels_and_grouping(self, tmp_path):
        path = results_csv(tmp_path, [
            "noise,0,0,0,mig,Single,0.2,1.0\n",
            "noise,0,1,0,mig,Single,0.4,1.0\n",
            "noise,0.5,0,0,mig,Single,0.1,1.0\n",
            "noise,0,0,0,dci,Modularity,0.9,1.0\n",
            "noise,0.5,0,0,dci,Modularity,0.7,1.0\n",
        ])
        records = read_results(path)
        assert {r.label for r in records} == {"mig", "dci.Modularity"}
        series = {s.label: s for s in sweep_series(records)}
        mig = series["mig"]
        np.testing.assert_allclose(mig.alphas, [0.0, 0.5])
        np.testing.assert_allclose(mig.means, [0.3, 0.1])
        # two seeds at alpha 0: sample std; single value at 0.5: zero
        np.testing.assert_allclose(mig.stds,
                                   [np.std([0.2, 0.4], ddof=1), 0.0])

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(SchemaMismatch):
            read_results(path)

    def test_ragged_row(self, tmp_path):
        path = results_csv(tmp_path, ["noise,0,0,0,mig,Single,0.2\n"])
        with pytest.raises(SchemaMismatch):
            read_results(path)

    def test_non_numeric_value(self, tmp_path):
        path = results_csv(tmp_path, ["noise,0,0,0,mig,Single,much,1.0\n"])
        with pytest.raises(SchemaMismatch):
            read_results(path)

    def test_header_only(self, tmp_path):
        with pytest.raises(EmptyInput):
            read_results(results_csv(tmp_path, []))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaMismatch):
            read_results(path)


class TestReadAgreement:
    def test_round_shape(self, tmp_path):
        path = agreement_csv(tmp_path,
                             "metric,a,b\na,1,-0.5\nb,-0.5,1\n")
        labels, matrix = read_agreement(path)
        assert labels == ["a", "b"]
        np.testing.assert_allclose(matrix, [[1, -0.5], [-0.5, 1]])

    def test_missing_row(self, tmp_path):
        path = agreement_csv(tmp_path, "metric,a,b\na,1,0\n")
        with pytest.raises(NotSquare):
            read_agreement(path)

    def test_row_label_mismatch(self, tmp_path):
        path = agreement_csv(tmp_path, "metric,a,b\na,1,0\nc,0,1\n")
        with pytest.raises(NotSquare):
            read_agreement(path)

    def test_ragged_matrix_row(self, tmp_path):
        path = agreement_csv(tmp_path, "metric,a,b\na,1\nb,0,1\n")
        with pytest.raises(NotSquare):
            read_agreement(path)

    def test_bad_first_column(self, tmp_path):
        path = agreement_csv(tmp_path, "thing,a\na,1\n")
        with pytest.raises(SchemaMismatch):
            read_agreement(path)

    def test_no_labels(self, tmp_path):
        path = agreement_csv(tmp_path, "metric\n")
        with pytest.raises(EmptyInput):
            read_agreement(path)


class TestFigures:
    def test_sweep_writes_file(self, tmp_path):
        path = results_csv(tmp_path, [
            "noise,0,0,0,mig,Single,0.9,1.0\n",
            "noise,0.5,0,0,mig,Single,0.5,1.0\n",
            "noise,1,0,0,mig,Single,0.1,1.0\n",
        ])
        out = tmp_path / "sweep.png"
        render_sweep(sweep_series(read_results(path)), out)
        assert out.stat().st_size > 0

    def test_sweep_empty_rejected(self, tmp_path):
        with pytest.raises(EmptyInput):
            render_sweep([], tmp_path / "never.png")

    def test_agreement_writes_file(self, tmp_path):
        out = tmp_path / "agreement.png"
        render_agreement(["a", "b"], [[1.0, 0.2], [0.2, 1.0]], out)
        assert out.stat().st_size > 0

    def test_agreement_rejects_non_square(self, tmp_path):
        with pytest.raises(NotSquare):
            render_agreement(["a"], [[1.0, 0.0]], tmp_path / "never.png")
        with pytest.raises(NotSquare):
            render_agreement(["a", "b"], [[1.0]], tmp_path / "never.png")
