"""Render CLI: exit codes and output files."""
import pytest

from ediplots.cli import main

RESULTS = (
    "experiment,alpha,seed,rep_index,metric,component,value,elapsed_ms\n"
    "noise,0,0,0,mig,Single,0.9,1.0\n"
    "noise,0.5,0,0,mig,Single,0.5,1.0\n"
    "noise,1,0,0,mig,Single,0.1,1.0\n"
)
AGREEMENT = "metric,a,b\na,1,-0.4\nb,-0.4,1\n"


def test_render_sweep(tmp_path):
    src = tmp_path / "r.csv"
    src.write_text(RESULTS)
    figs = tmp_path / "figs"
    assert main(["render", "--input", str(src), "--kind", "sweep",
                 "--out", str(figs), "--format", "png"]) == 0
    assert (figs / "r_sweep.png").stat().st_size > 0


def test_render_agreement_svg(tmp_path):
    src = tmp_path / "agreement.csv"
    src.write_text(AGREEMENT)
    figs = tmp_path / "figs"
    assert main(["render", "--input", str(src), "--kind", "agreement",
                 "--out", str(figs), "--format", "svg"]) == 0
    assert (figs / "agreement_agreement.svg").stat().st_size > 0


def test_missing_input_is_usage_error(tmp_path):
    assert main(["render", "--input", str(tmp_path / "nope.csv"),
                 "--kind", "sweep", "--out", str(tmp_path)]) == 1


def test_unknown_kind_is_usage_error(tmp_path):
    src = tmp_path / "r.csv"
    src.write_text(RESULTS)
    assert main(["render", "--input", str(src), "--kind", "pie",
                 "--out", str(tmp_path)]) == 1


def test_schema_mismatch_exit_two(tmp_path):
    src = tmp_path / "r.csv"
    src.write_text("a,b\n1,2\n")
    assert main(["render", "--input", str(src), "--kind", "sweep",
                 "--out", str(tmp_path)]) == 2


def test_wrong_kind_for_file_exit_two(tmp_path):
    src = tmp_path / "agreement.csv"
    src.write_text(AGREEMENT)
    assert main(["render", "--input", str(src), "--kind", "sweep",
                 "--out", str(tmp_path)]) == 2
