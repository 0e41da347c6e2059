import json
import math

import pytest

from asymptotics.connection import special_phases
from main import main


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 else None)


def test_connect(capsys):
    code, payload = run(capsys, ["connect", "--alpha", "0.5", "--phi", "1.0",
                                 "--denominator", "two", "--matching", "identity"])
    assert code == 0
    assert payload["special"] is False
    assert payload["branch_j"] in (2, 3)
    assert payload["A00"] == pytest.approx(math.sqrt(payload["rho2"]))


def test_connect_defaults(capsys):
    code, payload = run(capsys, ["connect", "--alpha", "0.8", "--phi", "1.0"])
    assert code == 0
    assert payload["variant"] == "theorem2/two/identity"
    assert payload["branch_j"] in (2, 3)
    assert payload["A00"] > 0.0

    code, payload = run(capsys, ["connect", "--alpha", "0.8", "--phi", "1.0", "--eps", "0.005"])
    assert code == 0
    assert payload["variant"] == "theorem2/two/averaged"
    assert payload["A00"] == pytest.approx(0.426, abs=3e-3)


def test_averaged_matching_without_eps_exits_with_validation_code(capsys):
    code, _ = run(capsys, ["connect", "--alpha", "0.5", "--phi", "1.0", "--matching", "averaged"])
    assert code == 2


def test_negative_alpha_exits_with_validation_code(capsys):
    code, _ = run(capsys, ["connect", "--alpha", "-1", "--phi", "1.0"])
    assert code == 2


def test_zero_eps_exits_with_validation_code(capsys):
    code, _ = run(capsys, ["figures", "--which", "fig3", "--eps", "0.0"])
    assert code == 2


def test_connect_from_config_file(capsys, tmp_path):
    path = tmp_path / "connect.conf"
    path.write_text("alpha=0.5\nphi=1.0\ndenominator=two\nmatching=identity\n")
    code, payload = run(capsys, ["--config", str(path), "connect", "--phi", "2.0"])
    assert code == 0
    assert payload["phi"] == 2.0
    assert payload["alpha"] == 0.5


def test_negative_rho2_exits_with_validation_code(capsys):
    # arg p = pi/2 makes (1 + |p|^2) / (3 |Im p|) < 1 at alpha = 0.5
    phi = special_phases(0.5)[0] - 0.5 * math.pi
    code, _ = run(capsys, ["connect", "--alpha", "0.5", "--phi", repr(phi), "--denominator", "three"])
    assert code == 2


def test_missing_argument_exits_with_validation_code(capsys):
    code, _ = run(capsys, ["connect", "--alpha", "0.5"])
    assert code == 2


def test_invalid_parameters_exit_with_validation_code(capsys):
    code, _ = run(capsys, ["simulate", "--eps", "-1", "--theta0", "-2", "--theta1", "-1.5",
                           "--phi-re", "0.1", "--out", "unused.csv"])
    assert code == 2


def test_simulate_writes_csv(capsys, tmp_path):
    out = tmp_path / "run.csv"
    code, payload = run(capsys, ["simulate", "--eps", "0.1", "--theta0", "-2", "--theta1", "-1.5",
                                 "--phi-re", "0.1", "--phi-im", "0.0", "--out", str(out)])
    assert code == 0
    assert payload["theta_capture"] is None
    assert out.read_text().splitlines()[0] == "theta,re,im,abs2"


def test_portrait(capsys, tmp_path):
    out = tmp_path / "portrait.csv"
    code, payload = run(capsys, ["portrait", "--T", "0", "--out", str(out)])
    assert code == 0
    assert len(payload["files"]) == 2


def test_painleve(capsys, tmp_path):
    out = tmp_path / "layer.csv"
    code, payload = run(capsys, ["painleve", "--alpha", "0.3", "--phi", "1.0", "--z0", "-20", "--z1", "-15",
                                 "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == "z,v,dv"
