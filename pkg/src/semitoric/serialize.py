"""Canonical JSON for polygons and semitoric polygons.

Rationals are written as ``"p/q"`` strings and infinities as ``"inf"``/``"-inf"``.
Keys appear in a fixed order and collinear breakpoints are stripped, so
serializing a parsed canonical file reproduces it byte for byte.
"""
from __future__ import annotations

import json
from typing import Any

from .affine import Point2, as_extended, as_rational, format_rational
from .cuts import Cut, InvalidInput, SemitoricPolygon
from .polygon import PiecewiseLinear, Polygon, PolygonError, make_polygon


def chain_to_dict(chain: PiecewiseLinear) -> dict:
    out: dict[str, Any] = {
        "breakpoints": [format_rational(b) for b in chain.breakpoints],
        "values": [format_rational(v) for v in chain.values],
    }
    if chain.left_slope is not None:
        out["left_slope"] = format_rational(chain.left_slope)
    if chain.right_slope is not None:
        out["right_slope"] = format_rational(chain.right_slope)
    return out


def chain_from_dict(data: dict) -> PiecewiseLinear:
    try:
        return PiecewiseLinear(
            tuple(as_rational(b) for b in data["breakpoints"]),
            tuple(as_rational(v) for v in data["values"]),
            left_slope=None if data.get("left_slope") is None else as_rational(data["left_slope"]),
            right_slope=None if data.get("right_slope") is None else as_rational(data["right_slope"]),
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"bad boundary chain: {exc}") from exc


def polygon_to_dict(poly: Polygon) -> dict:
    return {
        "xmin": format_rational(poly.xmin),
        "xmax": format_rational(poly.xmax),
        "bottom": chain_to_dict(poly.bottom),
        "top": chain_to_dict(poly.top),
    }


def semitoric_to_dict(sp: SemitoricPolygon) -> dict:
    out = polygon_to_dict(sp.polygon)
    out["cuts"] = [
        {"x": format_rational(c.x), "y": format_rational(c.y), "k": c.k, "eps": c.eps}
        for c in sp.cuts
    ]
    return out


def semitoric_from_dict(data: dict) -> SemitoricPolygon:
    """Parse a polygon object with an optional ``cuts`` list.

    Raises InvalidInput for malformed data and PolygonError subclasses for
    well-formed data that is not a convex polygon.
    """
    if not isinstance(data, dict):
        raise InvalidInput("expected a JSON object")
    try:
        bottom = chain_from_dict(data["bottom"])
        top = chain_from_dict(data["top"])
    except KeyError as exc:
        raise InvalidInput(f"missing field {exc}") from exc
    xmin = as_extended(data["xmin"]) if "xmin" in data else None
    xmax = as_extended(data["xmax"]) if "xmax" in data else None
    poly = make_polygon(bottom, top, xmin, xmax)
    cuts = []
    for item in data.get("cuts", []):
        try:
            k, eps = item.get("k", 1), item.get("eps", 1)
            if isinstance(k, bool) or not isinstance(k, int) or not isinstance(eps, int):
                raise TypeError("k and eps must be integers")
            cuts.append(Cut(Point2(as_rational(item["x"]), as_rational(item["y"])), k, eps))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InvalidInput(f"bad cut {item!r}: {exc}") from exc
    return SemitoricPolygon(poly, tuple(cuts))


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def dump_semitoric(sp: SemitoricPolygon) -> str:
    return dumps(semitoric_to_dict(sp))


def loads_semitoric(text: str) -> SemitoricPolygon:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"not valid JSON: {exc}") from exc
    return semitoric_from_dict(data)


__all__ = [
    "PolygonError",
    "chain_from_dict",
    "chain_to_dict",
    "dump_semitoric",
    "dumps",
    "loads_semitoric",
    "polygon_to_dict",
    "semitoric_from_dict",
    "semitoric_to_dict",
]
