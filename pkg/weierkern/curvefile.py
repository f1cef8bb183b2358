"""
Curve and point files: JSON validated against the bundled schemas, then
loaded into pydantic models and parsed into curves.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import jsonschema
from pydantic import ValidationError

from .curve import Curve, CurvePoint, HyperellipticCurve, PlaneCurve, SpaceCurve, genus4_template, polish_point
from .errors import CurveFileError, DimensionError, ParseError
from .models import ComplexModel, CurveFile, PointsFile, Scalar
from .polyexpr import DEFAULT_VARIABLES, format_poly, parse, parse_scalar

logger = logging.getLogger(__name__)

SCHEMA_DIR = Path(__file__).resolve().parent / "schemas"


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    with open(SCHEMA_DIR / name, encoding="utf-8") as handle:
        return json.load(handle)


@dataclass
class LoadedCurve:
    curve: Curve
    source: CurveFile
    hyperelliptic: Optional[HyperellipticCurve] = None

    @property
    def name(self) -> Optional[str]:
        return self.source.name


def _read_json(path: Union[str, Path], schema: str) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CurveFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurveFileError(f"{path.name} is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                             offset=exc.pos) from exc
    try:
        jsonschema.validate(data, load_schema(schema))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CurveFileError(f"{path.name}: {exc.message} at {where}") from exc
    return data


def scalar_value(item: Scalar) -> complex:
    """A coordinate or coefficient given as number, {re, im} object or constant expression."""
    if isinstance(item, ComplexModel):
        return item.value()
    if isinstance(item, dict):
        return complex(item["re"], item["im"])
    if isinstance(item, str):
        return parse_scalar(item)
    return complex(item)


def _template_table(template: Dict[str, Scalar]) -> Dict[Tuple[int, int, int], complex]:
    table = {}
    for key, value in template.items():
        i, k, l = (int(part) for part in key.split(","))
        table[(i, k, l)] = scalar_value(value)
    return table


def curve_from_model(model: CurveFile) -> LoadedCurve:
    if model.kind == "hyperelliptic":
        coeffs = [scalar_value(a) for a in model.coefficients]
        h = HyperellipticCurve(coeffs)
        curve = h.plane_curve()
        curve.name = model.name or curve.name
        return LoadedCurve(curve, model, h)
    if model.kind == "plane":
        names = model.variables or list(DEFAULT_VARIABLES[:2])
        if len(names) != 2:
            raise DimensionError("plane curves use two variable names")
        return LoadedCurve(PlaneCurve(parse(model.f, names), model.on_curve_tol, model.name), model)
    names = model.variables or list(DEFAULT_VARIABLES[:3])
    if len(names) != 3:
        raise DimensionError("space curves use three variable names")
    if model.f is not None and model.g is not None:
        curve = SpaceCurve(parse(model.f, names), parse(model.g, names), model.on_curve_tol, model.name)
        if model.template is not None:
            expected = genus4_template(_template_table(model.template))
            if curve.f != expected.f or curve.g != expected.g:
                raise CurveFileError("f and g disagree with the template table")
    else:
        curve = genus4_template(_template_table(model.template), model.on_curve_tol)
        curve.name = model.name or curve.name
    return LoadedCurve(curve, model)


def load_curve(path: Union[str, Path]) -> LoadedCurve:
    data = _read_json(path, "curve_schema.json")
    try:
        model = CurveFile.model_validate(data)
    except ValidationError as exc:
        raise CurveFileError(f"{Path(path).name}: {exc.errors()[0]['msg']}") from exc
    loaded = curve_from_model(model)
    logger.info("loaded %s curve %s from %s", model.kind, model.name or "<unnamed>", path)
    return loaded


def curve_to_model(c: SpaceCurve, name: Optional[str] = None) -> CurveFile:
    return CurveFile(name=name or c.name, kind="space", f=format_poly(c.f), g=format_poly(c.g),
                     on_curve_tol=c.on_curve_tol)


def load_points(path: Union[str, Path], c: Curve) -> List[CurvePoint]:
    """Insertion points from a points file, each Newton-polished onto the curve."""
    data = _read_json(path, "points_schema.json")
    model = PointsFile.model_validate(data)
    points = []
    for index, coords in enumerate(model.points):
        if len(coords) != c.nvars:
            raise DimensionError(f"point {index} has {len(coords)} coordinates, the curve needs {c.nvars}")
        points.append(polish_point(c, [scalar_value(v) for v in coords]))
    return points


# ---- command-line numbers ----

def parse_complex(text: str) -> complex:
    """``re``, ``re,im`` or a constant expression such as ``1-2i``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return parse_scalar(parts[0])
    if len(parts) == 2:
        re_part, im_part = (parse_scalar(p) for p in parts)
        if re_part.imag or im_part.imag:
            raise ParseError(f"{text!r}: re,im pairs take real parts")
        return complex(re_part.real, im_part.real)
    raise ParseError(f"{text!r} is not a complex number")


def parse_point(text: str, nvars: int = 3) -> Tuple[complex, ...]:
    """Comma-separated coordinates, either one expression each or re,im pairs."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == nvars:
        return tuple(parse_scalar(p) for p in parts)
    if len(parts) == 2 * nvars:
        values = [parse_scalar(p) for p in parts]
        if any(v.imag for v in values):
            raise ParseError(f"{text!r}: re,im pairs take real parts")
        return tuple(complex(values[2 * k].real, values[2 * k + 1].real) for k in range(nvars))
    raise ParseError(f"{text!r}: expected {nvars} coordinates or {nvars} re,im pairs")


def point_on_curve(c: Curve, text: str) -> CurvePoint:
    return polish_point(c, parse_point(text, c.nvars))
