"""Exact approximate-fixed-point experiments.

Values cross the boundary as "p/q" strings and come back as
``fractions.Fraction``. Floats are never accepted as inputs.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from . import _core
from ._core import (
    ConfigError,
    DepthExhausted,
    DomainEscape,
    Error,
    HypothesisViolation,
    NotARetraction,
    __version__,
)

Exact = Union[Fraction, int, str]
DeltaPoint = Tuple[int, Fraction, Fraction]

__all__ = [
    "ConfigError",
    "DepthExhausted",
    "DomainEscape",
    "Error",
    "HypothesisViolation",
    "NotARetraction",
    "Report",
    "__version__",
    "cesaro",
    "delta_distance",
    "e1_constants",
    "ex2",
    "kkm",
    "nearest_point_retraction",
    "run",
    "shift_map",
]


def _text(value: Exact) -> str:
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction, int or 'p/q' string")
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return _core.canonical_rational(str(value))


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _point(p: Tuple[int, Exact, Exact]) -> Tuple[int, str, str]:
    n, a, b = p
    return int(n), _text(a), _text(b)


def _unpoint(t: Tuple[int, str, str]) -> DeltaPoint:
    return t[0], _fraction(t[1]), _fraction(t[2])


class Report(dict):
    """A run report. ``csv`` holds the series, when the subcommand has one."""

    csv: str = ""

    @property
    def results(self) -> Dict[str, Any]:
        return self["results"]

    def payload(self) -> str:
        """Serialized report without timing, stable across reruns."""
        return _core.result_payload(json.dumps(self))


def run(config: Mapping[str, Any], seed: Optional[int] = None) -> Report:
    """Runs one experiment described by a config mapping."""
    text, csv = _core.run(json.dumps(dict(config)), seed)
    report = Report(json.loads(text))
    report.csv = csv
    return report


def _config(subcommand: str, **keys: Any) -> Dict[str, Any]:
    out: Dict[str, Any] = {"subcommand": subcommand}
    for key, value in keys.items():
        if value is None:
            continue
        out[key] = _text(value) if isinstance(value, Fraction) else value
    return out


def kkm(map: str, epsilon: Exact = Fraction(1, 10), **options: Any) -> Dict[str, Any]:
    """Epsilon-fixed point of a built-in or plugin map; exact fields as Fractions."""
    r = run(_config("kkm", map=map, epsilon=_text(epsilon), **options)).results
    return {
        "point": {int(i): _fraction(v) for i, v in r["witness"]["point"].items()},
        "residual": _fraction(r["residual"]),
        "epsilon": _fraction(r["epsilon"]),
        "order": r["order"],
        "net_size": r["net_size"],
        "lattice_vertices_scanned": r["lattice_vertices_scanned"],
        "verified": r["verified"],
    }


def cesaro(map: str, start: Optional[str] = None, steps: int = 100,
           **options: Any) -> List[Tuple[int, Fraction]]:
    """Cesaro residuals (k, residual) along the orbit of ``start``."""
    r = run(_config("cesaro", map=map, start=start, steps=steps, **options)).results
    return [(row["k"], _fraction(row["residual"])) for row in r["series"]]


def ex2(steps: int = 10, start: str = "diffuse", support_bound: int = 64,
        **options: Any) -> Dict[str, Any]:
    """Orbit residuals and the no-fixed-point certificate of the measure map."""
    r = run(_config("ex2", steps=steps, start=start, support_bound=support_bound,
                    **options)).results
    return {
        "orbit": [(row["k"], _fraction(row["residual"])) for row in r["orbit_residuals"]],
        "cesaro": [(row["k"], _fraction(row["residual"])) for row in r["cesaro_residuals"]],
        "certificate": r["certificate"],
    }


def delta_distance(p: Tuple[int, Exact, Exact], q: Tuple[int, Exact, Exact]) -> Fraction:
    """l1 distance between two points (n, a, b) of the fan of triangles."""
    return _fraction(_core.delta_distance(_point(p), _point(q)))


def shift_map(p: Tuple[int, Exact, Exact]) -> DeltaPoint:
    return _unpoint(_core.shift_map(_point(p)))


def nearest_point_retraction(x: Mapping[int, Exact]) -> Tuple[DeltaPoint, Fraction]:
    """Nearest point of the fan to a finitely supported x, and its distance."""
    point, distance, _ = _core.nearest_point_retraction(
        {int(i): _text(v) for i, v in x.items()})
    return _unpoint(point), _fraction(distance)


def e1_constants(delta: Exact, M: Exact) -> Dict[str, Any]:
    raw = _core.e1_constants(_text(delta), _text(M))
    return {
        "c": [_fraction(c) for c in raw["c"]],
        "m": _fraction(raw["m"]),
        "chain_bound": _fraction(raw["chain_bound"]),
        "c_sum": _fraction(raw["c_sum"]),
    }
