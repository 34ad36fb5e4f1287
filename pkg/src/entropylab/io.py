"""JSON map descriptions and CSV/JSON output helpers."""

from __future__ import annotations

import csv
import io
import json
import math
import os

from .errors import DescriptionError, EntropyLabError
from .maps import PolynomialMap, StuntedParams, family_member, polynomial_map, stunted
from .numbers import as_fraction, format_number, format_rational

KINDS = ("stunted", "polynomial", "family")


def load_description(source) -> dict:
    """A description from a dict, an inline JSON string or a path to a JSON file."""
    if isinstance(source, dict):
        return source
    text = str(source)
    if not text.lstrip().startswith("{") and os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptionError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise DescriptionError("description must be a JSON object")
    return data


def _require(data, key):
    if key not in data:
        raise DescriptionError(f"{data.get('kind', 'description')!r} needs field {key!r}")
    return data[key]


def parse_map(source):
    """StuntedParams for kind "stunted", PolynomialMap for "polynomial" and "family"."""
    data = load_description(source)
    kind = data.get("kind")
    if kind not in KINDS:
        raise DescriptionError(f"kind must be one of {', '.join(KINDS)}, got {kind!r}")
    try:
        if kind == "stunted":
            d = _require(data, "d")
            if not isinstance(d, int) or isinstance(d, bool):
                raise DescriptionError("d must be an integer")
            zeta = [as_fraction(z) for z in _require(data, "zeta")]
            return stunted(d, zeta, data.get("shape", "+"))
        if kind == "polynomial":
            coeffs = [float(c) for c in _require(data, "coeffs")]
            domain = _require(data, "domain")
            if len(domain) != 2:
                raise DescriptionError("domain must have two endpoints")
            return polynomial_map(coeffs, domain, bool(data.get("anchored", False)))
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise DescriptionError("params must be an object")
        return family_member(_require(data, "name"), params)
    except DescriptionError:
        raise
    except (EntropyLabError, TypeError, ValueError, KeyError) as exc:
        raise DescriptionError(f"{kind} description rejected: {exc}") from exc


def describe(obj) -> dict:
    if isinstance(obj, StuntedParams):
        return {"kind": "stunted", "d": obj.d, "shape": str(obj.geometry.shape),
                "zeta": [format_rational(z) for z in obj.zeta]}
    if isinstance(obj, PolynomialMap):
        return {"kind": "polynomial", "coeffs": list(obj.coefficients),
                "domain": list(obj.domain), "anchored": obj.anchored}
    raise TypeError(f"cannot describe {type(obj).__name__}")


def dumps(value) -> str:
    """JSON text with floats at 17 significant digits and rationals as "p/q"."""
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in value) + "]"
    if isinstance(value, float):
        return format(value, ".17g") if math.isfinite(value) else "null"
    if isinstance(value, (bool, int, str)) or value is None:
        return json.dumps(value)
    return json.dumps(format_number(value))


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if x is None else x if isinstance(x, str) else format_number(x) for x in row])
    return buf.getvalue()
