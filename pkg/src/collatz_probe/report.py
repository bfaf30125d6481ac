"""Line-oriented ``key=value`` report rendering and a JSON twin."""

from __future__ import annotations

import json
from fractions import Fraction

from .core import render_fraction


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value) if value else "-"
    return str(value)


def kv_line(**fields) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in fields.items())


def _jsonable(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator,
                "decimal": render_fraction(value, 6)}
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def to_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2)
