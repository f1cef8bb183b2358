import json
import logging
from pathlib import Path

import pytest

from weierkern.cli import render
from weierkern.config import Settings, get_settings
from weierkern.curvefile import load_curve, load_points, parse_complex, parse_point
from weierkern.errors import (
    BranchPointError,
    ConfigError,
    CurveFileError,
    DimensionError,
    NewtonError,
    NonFiniteError,
    ParseError,
    PoleError,
    QuadratureError,
)
from weierkern.logging_setup import LOGGER_NAME, log_error_with_context, setup_logging
from weierkern.models import ComplexModel, InvarianceOut
from weierkern.workers import map_ordered

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload), encoding="utf-8")


def test_settings_from_environment(monkeypatch, tmp_path: Path) -> None:
    monkeypatch.setenv("WEIERKERN_THREADS", "4")
    monkeypatch.setenv("WEIERKERN_LOG_LEVEL", "debug")
    monkeypatch.setenv("WEIERKERN_LOG_DIR", str(tmp_path))

    settings = get_settings()

    assert settings.threads == 4
    assert settings.log_level == "DEBUG"
    assert settings.log_dir == tmp_path


def test_settings_defaults(monkeypatch) -> None:
    for name in ("WEIERKERN_THREADS", "WEIERKERN_LOG_LEVEL", "WEIERKERN_LOG_DIR"):
        monkeypatch.delenv(name, raising=False)

    settings = get_settings()

    assert settings.threads == 1
    assert settings.log_level == "WARNING"
    assert settings.log_dir is None


def test_thread_count_is_clamped() -> None:
    assert Settings(threads=0).threads == 1
    assert Settings(threads=-3).threads == 1


def test_error_payloads_and_exit_codes() -> None:
    assert PoleError("x = y").to_payload() == {"error": {"kind": "pole", "detail": "x = y"}}
    assert PoleError("x = y").exit_code == 3
    assert BranchPointError("J1 = 0").exit_code == 3
    assert DimensionError("bad n").exit_code == 2
    assert NewtonError("stalled").exit_code == 4
    assert QuadratureError("not converged").kind == "quadrature"


def test_parse_error_reports_the_offset() -> None:
    err = ParseError("unexpected '*'", 7)

    assert err.offset == 7
    assert err.detail.endswith("at byte 7")
    assert err.kind == "parse"


def test_setup_logging_writes_files(tmp_path: Path) -> None:
    logger = setup_logging("INFO", tmp_path / "logs")
    logging.getLogger(LOGGER_NAME + ".test").info("hello")
    log_error_with_context(ValueError("boom"), "unit")
    log_error_with_context(PoleError("x = y"), "kernel")
    for handler in logger.handlers:
        handler.flush()

    assert "hello" in (tmp_path / "logs" / "weierkern.log").read_text(encoding="utf-8")
    errors = (tmp_path / "logs" / "errors.log").read_text(encoding="utf-8")
    assert "unit failed [ValueError]: boom" in errors
    assert "kernel failed [pole, exit 3]: x = y" in errors

    setup_logging("WARNING")
    assert len(logging.getLogger(LOGGER_NAME).handlers) == 1


def test_map_ordered_keeps_order() -> None:
    assert map_ordered(lambda v: v * v, range(20), threads=4) == [v * v for v in range(20)]
    assert map_ordered(lambda v: v + 1, [1, 2], threads=1) == [2, 3]


def test_schema_rejects_unknown_keys(tmp_path: Path) -> None:
    path = tmp_path / "extra.json"
    _write_json(path, {"kind": "plane", "f": "x2^2 - x1", "colour": "red"})

    with pytest.raises(CurveFileError):
        load_curve(path)


def test_invalid_json(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text('{"kind": "plane", ', encoding="utf-8")

    with pytest.raises(CurveFileError):
        load_curve(path)


def test_template_file_round_trip() -> None:
    loaded = load_curve(FIXTURES / "fixture.json")

    assert loaded.name == "genus4-fixture"
    assert loaded.curve.genus == 4


def test_points_file(fixture_curve) -> None:
    points = load_points(FIXTURES / "points_lambda1.json", fixture_curve)

    assert len(points) == 4
    assert points[0].x == pytest.approx((-1, -1, 1))


def test_points_file_dimension(tmp_path: Path, parabola) -> None:
    path = tmp_path / "points.json"
    _write_json(path, {"points": [[1, 1, 1]]})

    with pytest.raises(DimensionError):
        load_points(path, parabola.curve)


def test_command_line_numbers() -> None:
    assert parse_complex("1-2i") == complex(1, -2)
    assert parse_complex("0.5,-1") == complex(0.5, -1)
    assert parse_point("2,-2,-1") == (2, -2, -1)
    assert parse_point("1,0,0,1,2,0") == (1, 1j, 2)
    with pytest.raises(ParseError):
        parse_point("1,2")


def test_settings_errors_name_the_variable(monkeypatch) -> None:
    monkeypatch.setenv("WEIERKERN_THREADS", "many")

    with pytest.raises(ConfigError) as excinfo:
        get_settings()
    assert excinfo.value.exit_code == 2
    assert excinfo.value.detail.startswith("WEIERKERN_THREADS")


def test_non_finite_output_is_a_convergence_failure() -> None:
    with pytest.raises(NonFiniteError):
        ComplexModel.of(complex(float("nan"), 0))
    with pytest.raises(NonFiniteError) as excinfo:
        render(InvarianceOut(shift=[], relative_change=float("inf")))
    assert excinfo.value.exit_code == 4
