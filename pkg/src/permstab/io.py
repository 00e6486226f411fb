"""Text tuple files and JSON report rendering.

Tuple file layout (LF line endings, no trailing whitespace)::

    permtuple v1 n=<n> m=<m>
    <n space-separated 0-based images>     # one line per generator
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .perm import PermTuple, Permutation

__all__ = [
    "TupleFormatError",
    "format_tuple",
    "parse_tuple",
    "read_tuple",
    "write_tuple",
    "rational_fields",
    "dumps",
    "defect_report_dict",
    "strong_report_dict",
    "rounding_report_dict",
    "oracle_result_dict",
]

FORMAT_TAG = "permtuple"
FORMAT_VERSION = "v1"
_HEADER = re.compile(r"^permtuple v1 n=(\d+) m=(\d+)$")


class TupleFormatError(ValueError):
    pass


def format_tuple(t: PermTuple) -> str:
    lines = [f"{FORMAT_TAG} {FORMAT_VERSION} n={t.degree} m={t.rank}"]
    lines.extend(" ".join(map(str, p.tolist())) for p in t)
    return "\n".join(lines) + "\n"


def parse_tuple(text: str) -> PermTuple:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TupleFormatError("empty tuple file")
    m = _HEADER.match(lines[0])
    if m is None:
        raise TupleFormatError(f"bad header {lines[0]!r}")
    n, rank = int(m.group(1)), int(m.group(2))
    body = lines[1:]
    if len(body) != rank:
        raise TupleFormatError(f"header says m={rank} but file has {len(body)} permutation lines")
    perms = []
    for lineno, line in enumerate(body, start=2):
        try:
            images = [int(tok) for tok in line.split(" ")]
        except ValueError as exc:
            raise TupleFormatError(f"line {lineno}: non-integer image") from exc
        if len(images) != n:
            raise TupleFormatError(f"line {lineno}: expected {n} images, got {len(images)}")
        try:
            perms.append(Permutation(images))
        except ValueError as exc:
            raise TupleFormatError(f"line {lineno}: {exc}") from exc
    if not perms:
        raise TupleFormatError("tuple file has no permutations")
    return PermTuple(perms)


def read_tuple(path: str | Path) -> PermTuple:
    return parse_tuple(Path(path).read_text())


def write_tuple(path: str | Path, t: PermTuple) -> None:
    Path(path).write_bytes(format_tuple(t).encode("ascii"))


def rational_fields(name: str, value: Fraction) -> dict[str, Any]:
    """``{name: "num/den", name_float: float}``; keeps exact values next to a convenience float."""
    value = Fraction(value)
    return {name: f"{value.numerator}/{value.denominator}", f"{name}_float": float(value)}


def dumps(obj: dict[str, Any]) -> str:
    return json.dumps(obj, indent=2)


def defect_report_dict(report, delta: Fraction | None = None) -> dict[str, Any]:
    d: dict[str, Any] = {"kind": "defect"}
    d["per_relator"] = [f"{v.numerator}/{v.denominator}" for v in report.per_relator]
    d.update(rational_fields("max_defect", report.max_defect))
    d["defect_points"] = len(report.defect_points)
    d["is_solution"] = report.is_solution()
    if delta is not None:
        d.update(rational_fields("delta", delta))
        d["is_delta_solution"] = report.is_delta_solution(delta)
    return d


def strong_report_dict(report) -> dict[str, Any]:
    d: dict[str, Any] = {"kind": "strong"}
    d.update(rational_fields("delta", report.delta))
    d["max_length"] = report.max_length
    d["words_checked"] = report.words_checked
    d["passed"] = report.passed
    d["violations"] = [
        {"word": str(w), "in_closure": inside, **rational_fields("distance", dist)}
        for w, inside, dist in report.violations
    ]
    return d


def rounding_report_dict(report) -> dict[str, Any]:
    d: dict[str, Any] = {"kind": "rounding"}
    d["displacement"] = [f"{v.numerator}/{v.denominator}" for v in report.displacement]
    d.update(rational_fields("max_displacement", report.max_displacement))
    d.update(rational_fields("sum_displacement", report.sum_displacement))
    d.update(rational_fields("residual_defect", report.residual_defect))
    d.update(rational_fields("input_defect", report.input_defect))
    d.update(rational_fields("leftover_fraction", report.leftover_fraction))
    d.update(rational_fields("regular_fraction", report.regular_fraction))
    d["displaced_points"] = report.displaced_points
    d["components"] = dict(report.components)
    d["parity_fixes"] = report.parity_fixes
    d["radius"] = report.radius
    d["wall_time"] = round(report.wall_time, 6)
    return d


def oracle_result_dict(result, witness_path: str | None = None) -> dict[str, Any]:
    d: dict[str, Any] = {"kind": "oracle"}
    d.update(rational_fields("optimum", result.optimum))
    d["examined"] = result.examined
    d["witness"] = witness_path
    return d
