"""Deterministic JSON reports.

Exact rationals are written as ``"p/q"`` strings and floats with 17
significant digits; keys are sorted, so identical inputs give identical bytes.
Wall-clock timings are printed to the terminal only and never stored.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from ..numkernel import LinearForm, frac_str


def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    s = "%.17g" % x
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def encode(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, Fraction):
        return json.dumps(frac_str(obj))
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, complex):
        return encode({"re": obj.real, "im": obj.imag}, indent)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, LinearForm):
        return encode([frac_str(c) for c in obj.coeffs], indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted((str(k), v) for k, v in obj.items())
        body = ",\n".join(f"{pad}{json.dumps(k)}: {encode(v, indent + 1)}" for k, v in items)
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (bool, int, float, str, Fraction)) or v is None for v in obj):
            return "[" + ", ".join(encode(v, indent + 1) for v in obj) + "]"
        body = ",\n".join(pad + encode(v, indent + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return encode(report) + "\n"


def write_report(path: str, report: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(report))
