import logging

import pytest

from config.parsers import ParseError, merge_options, parse_choice, parse_config_file, parse_float
from config.settings import ConnectionVariant, RunConfig, worker_count
from core.errors import ConfigError
from core.state import PhaseVariantPre, PreCaptureParams
from utils.log_utils import configure_logging, logger


def test_config_file_keys_are_normalized(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# sweep\nEPS=0.01\nphi-re = 0.02\ntheta0=-2\n")

    values = parse_config_file(str(path))
    assert values == {"eps": "0.01", "phi_re": "0.02", "theta0": "-2"}


def test_missing_config_file(tmp_path):
    with pytest.raises(ParseError):
        parse_config_file(str(tmp_path / "absent.conf"))


def test_parse_error_is_a_config_error():
    assert issubclass(ParseError, ConfigError)
    assert ParseError.exit_code == 2


def test_parse_float():
    assert parse_float({"eps": "0.5"}, "eps") == 0.5
    assert parse_float({}, "eps", 0.1) == 0.1
    with pytest.raises(ParseError):
        parse_float({"eps": "small"}, "eps")


def test_parse_choice():
    assert parse_choice({"which": "FIG2"}, "which", ["fig1", "fig2"]) == "fig2"
    with pytest.raises(ParseError):
        parse_choice({"which": "fig9"}, "which", ["fig1", "fig2"])


def test_flags_override_file_values():
    merged = merge_options({"eps": 0.02, "theta0": None}, {"eps": "0.01", "theta0": "-3"})
    assert merged == {"eps": 0.02, "theta0": "-3"}


def test_worker_count(monkeypatch):
    monkeypatch.setenv("CAPTURE_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("CAPTURE_WORKERS", "0")
    assert worker_count() == 1
    monkeypatch.delenv("CAPTURE_WORKERS")
    assert worker_count() >= 1


def test_run_config_defaults():
    cfg = RunConfig(eps=0.01, theta0=-3.0, theta1=1.6, initial=PreCaptureParams(alpha10=0.5, phi10=1.0))
    assert cfg.pre_variant is PhaseVariantPre.AVERAGED
    assert cfg.connection == ConnectionVariant()
    assert cfg.connection.label == "theorem2/two/averaged"
    assert cfg.fit_window == (0.5, 1.5)


def test_configure_logging(monkeypatch):
    monkeypatch.setenv("CAPTURE_LOG_LEVEL", "debug")
    configure_logging()
    assert logger.level == logging.DEBUG
    configure_logging("WARNING")
    assert logger.level == logging.WARNING
    assert len(logger.handlers) == 1
