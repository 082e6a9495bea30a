import json
from unittest import mock

import numpy as np

from src.core.fields import Indicator, Window, read_field, write_field
from src.core.reports import PropertyReport
from src.main import load_spec, main

POWER2 = '{"family": "Power", "params": {"p": 2}}'
PHI_NEG = '{"family": "PowerNeg", "params": {"lam": 1}}'


def test_list_properties(capsys):
    assert main(["list-properties"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("HOLDER_BALL")
    assert "L2_BOUND" in out


def test_check_young_delta2(capsys):
    assert main(["check-young", POWER2, "--condition", "delta2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["delta2"]["holds"] is True


def test_check_young_nabla2_fails_for_linear():
    assert main(["check-young", '{"family": "Power", "params": {"p": 1}}', "--condition", "nabla2"]) == 3


def test_check_young_unknown_family():
    assert main(["check-young", '{"family": "Cosh"}']) == 1


def test_check_young_bad_json():
    assert main(["check-young", "{not json"]) == 1


def test_check_growth_decay(capsys):
    assert main(["check-growth", '{"family": "PowerNeg", "params": {"lam": 2}}', "--check", "decay"]) == 0
    assert json.loads(capsys.readouterr().out)["holds"] is True


def test_check_pairing_cz():
    args = ["check-pairing", "CZ", "--phi", POWER2, "--psi", POWER2, "--vp", PHI_NEG]
    args += ["--psi-g", '{"family": "Constant", "params": {"c": 1}}']
    assert main(args) == 0


def test_check_pairing_missing_growth():
    assert main(["check-pairing", "CZ", "--phi", POWER2, "--psi", POWER2]) == 1


def test_spec_from_file(tmp_path):
    path = tmp_path / "phi.json"
    path.write_text(POWER2)
    assert load_spec(str(path)) == {"family": "Power", "params": {"p": 2}}


def test_apply_scale(tmp_path):
    w = Window(1, 4.0, 16)
    src = tmp_path / "f.bin"
    out = tmp_path / "g.bin"
    write_field(src, Indicator(1.0).sample(w))
    assert main(["apply", str(src), "--op", "scale", "--c", "3", "--out", str(out)]) == 0
    assert np.array_equal(read_field(out).values, 3.0 * read_field(src).values)


def test_apply_missing_field(tmp_path):
    assert main(["apply", str(tmp_path / "nope.bin"), "--op", "identity", "--out", str(tmp_path / "o.bin")]) == 1


def test_norm_of_indicator(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_field(src, Indicator(1.0).sample(Window(1, 4.0, 32)))
    assert main(["norm", str(src), "--phi", POWER2, "--vp", PHI_NEG]) == 0
    assert json.loads(capsys.readouterr().out)["value"] > 0


def test_verify_unknown_property():
    assert main(["verify", "NOPE"]) == 1


def test_verify_grid_independent_property(capsys):
    assert main(["verify", "INVERSE_SANDWICH", "--levels", "64"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "pass"


def test_experiment_writes_reports(tmp_path):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({"name": "exp", "properties": ["INVERSE_SANDWICH"], "window": {"levels": [64]}}))
    out = tmp_path / "out"
    assert main(["--seed", "3", "experiment", str(config), "--out", str(out)]) == 0
    assert (out / "exp.json").exists()
    assert (out / "exp.csv").exists()


def test_experiment_unknown_preset(tmp_path):
    assert main(["experiment", "no-such-preset", "--out", str(tmp_path)]) == 1


def test_experiment_failure_exit_code(tmp_path):
    failed = [PropertyReport("TAIL_CZ", "fail", 9.0, {"N": 64}, {64: 9.0})]
    with mock.patch("src.main.run_experiment", return_value=failed) as run:
        assert main(["experiment", "morrey-bmo", "--out", str(tmp_path)]) == 3
    run.assert_called_once()


def test_experiment_unstable_exit_code(tmp_path):
    unstable = [PropertyReport("COMM_BOUND_CZ", "unstable", 2.0, None, {64: 1.0, 128: 2.0})]
    with mock.patch("src.main.run_experiment", return_value=unstable):
        assert main(["experiment", "morrey-bmo", "--out", str(tmp_path)]) == 2
