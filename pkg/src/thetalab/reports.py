"""Deterministic JSON/CSV rendering of results.

Identical inputs must produce byte-identical files: numbers are rendered
through ``mpmath.nstr`` at a fixed digit count, dictionaries keep insertion
order, and no timestamps or machine identifiers are ever emitted.
"""

from __future__ import annotations

import json
import os
from typing import Optional, Sequence

import mpmath
from mpmath import mpf

from .numerics import EstimatedValue, ZeroReport


def fmt(x, digits: int = 17) -> str:
    """Fixed-width deterministic decimal rendering."""
    if isinstance(x, mpf):
        return mpmath.nstr(x, digits, strip_zeros=True)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def ev_payload(ev: EstimatedValue, digits: int) -> dict:
    lo = ev.value - ev.abs_error_bound
    hi = ev.value + ev.abs_error_bound
    return {
        "value": fmt(ev.value, digits),
        "abs_error_bound": fmt(ev.abs_error_bound, 6),
        "lower": fmt(lo, digits),
        "upper": fmt(hi, digits),
    }


def zero_report_payload(rep: ZeroReport, digits: int) -> dict:
    return {
        "interval": [fmt(rep.interval[0], digits), fmt(rep.interval[1], digits)],
        "sign_change_count": rep.sign_change_count,
        "zeros": [
            {
                "bracket": [fmt(z.bracket[0], digits), fmt(z.bracket[1], digits)],
                "refined": fmt(z.refined, digits),
                "simple": z.simple,
            }
            for z in rep.zeros
        ],
    }


def write_json(path: str, payload: dict) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=True)
        fh.write("\n")


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")
