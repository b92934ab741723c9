import json
import os

import pytest


def test_simulate_and_detect(tmp_path):
    from program_files.start_script import main

    sample_dir = str(tmp_path / "sample")
    assert main(["simulate", "--ref-length", "5000", "--snps", "20",
                 "--depth", "40", "--proportions", "0.6", "0.4",
                 "--seed", "3", "--out", sample_dir]) == 0
    assert sorted(os.listdir(sample_dir)) == ["miss.log", "reads.sam",
                                              "reference.fasta",
                                              "truth.json"]

    output_dir = str(tmp_path / "detection")
    assert main(["detect", os.path.join(sample_dir, "reads.sam"),
                 os.path.join(sample_dir, "reference.fasta"),
                 "--alpha", "0.01", "--no-depth-filter",
                 "--out", output_dir]) == 0
    with open(os.path.join(output_dir, "report.json")) as report_file:
        report = json.load(report_file)
    assert report["sample_id"] == "sample"
    assert report["alpha"] == 0.01
    assert report["call"] in ("mixed", "pure")


def test_error_line(tmp_path, capsys):
    """ failures are reported as one tab separated line on stderr """
    from program_files.start_script import main

    code = main(["detect", str(tmp_path / "missing.sam"),
                 str(tmp_path / "missing.fasta"),
                 "--out", str(tmp_path / "out")])

    assert code == 1
    line = capsys.readouterr().err.strip().splitlines()[-1]
    assert line.startswith("ERROR\tFileNotFoundError\t")
    assert len(line.split("\t")) == 3


def test_invalid_sample_parameters(tmp_path, capsys):
    """ invalid sample parameters are usage errors """
    from program_files.start_script import main

    with pytest.raises(SystemExit) as error:
        main(["simulate", "--strains", "2", "--proportions", "0.9",
              "--out", str(tmp_path / "sample")])
    assert error.value.code == 2
    assert "proportion" in capsys.readouterr().err
    assert not os.path.exists(str(tmp_path / "sample"))


def test_usage_error():
    from program_files.start_script import main

    with pytest.raises(SystemExit) as error:
        main(["detect"])
    assert error.value.code == 2
    with pytest.raises(SystemExit) as error:
        main(["detect", "a.sam", "b.fasta", "--model", "poisson"])
    assert error.value.code == 2


def test_synthetic_spec(tmp_path):
    """ the flags override the spec file, strains default to even shares """
    from program_files.start_script import build_parser, synthetic_spec

    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"depth": 60, "snps_per_strain": 15}))
    arguments = build_parser().parse_args(
        ["simulate", "--spec", str(path), "--strains", "3", "--depth", "80",
         "--out", "x"])
    spec = synthetic_spec(arguments)

    assert spec.depth == 80
    assert spec.snps_per_strain == 15
    assert spec.n_strains == 3
    assert spec.proportions == pytest.approx([1 / 3] * 3)


def test_evaluate_empty_panel(tmp_path):
    from program_files.start_script import main

    (tmp_path / "panel").mkdir()
    assert main(["evaluate", str(tmp_path / "panel"),
                 "--out", str(tmp_path / "out")]) == 0
    with open(str(tmp_path / "out" / "evaluation.json")) as summary_file:
        assert json.load(summary_file)["n_samples"] == 0
