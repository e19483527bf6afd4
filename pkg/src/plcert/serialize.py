"""JSON encoding of maps, specs and analysis results.

Rationals are written as strings ``"p/q"`` or ``"p"``; ints are accepted on
input as well.
"""
import hashlib
import json
import re
from fractions import Fraction

from .certify import OrientationSummary, SurjectivityCertificate
from .degree import DegreeEvidence, PreimageSet, RegularValueReport
from .oracle import FanSpec2D, GenSpec1D, OracleReport
from .plfunction import Cell, PLFunction, Selection, ValidationReport
from .polyhedra import Halfspace, HPolyhedron

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class ParseError(ValueError):
    """Malformed input, with the JSON path (and line/column when known)."""

    def __init__(self, message: str, path: str = "", line=None, column=None):
        where = path or "<document>"
        if line is not None:
            where += f" (line {line}, column {column})"
        super().__init__(f"{where}: {message}")
        self.path, self.line, self.column = path, line, column


def q(x: Fraction) -> str:
    return str(x)


def qv(v) -> list:
    return [str(x) for x in v]


def parse_rational(value, path: str = "") -> Fraction:
    if isinstance(value, bool):
        raise ParseError("expected a rational, got a boolean", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if m:
            num, den = int(m.group(1)), int(m.group(2) or 1)
            if den == 0:
                raise ParseError(f"zero denominator in {value!r}", path)
            return Fraction(num, den)
    raise ParseError(f"expected an integer or 'p/q' string, got {value!r}", path)


def _list(value, path):
    if not isinstance(value, list):
        raise ParseError(f"expected a list, got {type(value).__name__}", path)
    return value


def _get(obj, key, path):
    if not isinstance(obj, dict):
        raise ParseError(f"expected an object, got {type(obj).__name__}", path)
    if key not in obj:
        raise ParseError(f"missing field {key!r}", path)
    return obj[key]


def _vector(value, path):
    return tuple(parse_rational(v, f"{path}[{i}]") for i, v in enumerate(_list(value, path)))


def _matrix(value, path):
    return tuple(_vector(row, f"{path}[{i}]") for i, row in enumerate(_list(value, path)))


def halfspace_to_json(h: Halfspace) -> dict:
    return {"normal": qv(h.normal), "offset": q(h.offset)}


def polyhedron_to_json(P: HPolyhedron) -> dict:
    return {"dim": P.dim, "constraints": [halfspace_to_json(h) for h in P.constraints]}


def plfunction_to_json(f: PLFunction) -> dict:
    return {
        "n": f.n,
        "selections": [{"A": [qv(row) for row in s.A], "b": qv(s.b)} for s in f.selections],
        "cells": [{"polyhedron": polyhedron_to_json(c.polyhedron), "selection": c.selection} for c in f.cells],
    }


def halfspace_from_json(obj, path="") -> Halfspace:
    normal = _vector(_get(obj, "normal", path), f"{path}.normal")
    offset = parse_rational(_get(obj, "offset", path), f"{path}.offset")
    try:
        return Halfspace(normal, offset)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def polyhedron_from_json(obj, path="") -> HPolyhedron:
    dim = _get(obj, "dim", path)
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ParseError("dim must be an integer", f"{path}.dim")
    cons = tuple(
        halfspace_from_json(h, f"{path}.constraints[{i}]")
        for i, h in enumerate(_list(_get(obj, "constraints", path), f"{path}.constraints"))
    )
    try:
        return HPolyhedron(dim, cons)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None


def plfunction_from_json(obj) -> PLFunction:
    n = _get(obj, "n", "")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("n must be an integer", "n")
    sels = []
    for i, s in enumerate(_list(_get(obj, "selections", ""), "selections")):
        p = f"selections[{i}]"
        try:
            sels.append(Selection(_matrix(_get(s, "A", p), f"{p}.A"), _vector(_get(s, "b", p), f"{p}.b")))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), p) from None
    cells = []
    for i, c in enumerate(_list(_get(obj, "cells", ""), "cells")):
        p = f"cells[{i}]"
        poly = polyhedron_from_json(_get(c, "polyhedron", p), f"{p}.polyhedron")
        sel = _get(c, "selection", p)
        if not isinstance(sel, int) or isinstance(sel, bool):
            raise ParseError("selection must be an integer index", f"{p}.selection")
        cells.append(Cell(poly, sel))
    try:
        return PLFunction(n, sels, cells)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return "sha256:" + hashlib.sha256(canonical(obj).encode()).hexdigest()


def gen_spec_1d_from_json(obj) -> GenSpec1D:
    try:
        return GenSpec1D(
            _vector(_get(obj, "breakpoints", ""), "breakpoints"),
            _vector(_get(obj, "slopes", ""), "slopes"),
            parse_rational(obj.get("intercept", 0), "intercept"),
        )
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def gen_spec_1d_to_json(spec: GenSpec1D) -> dict:
    return {"breakpoints": qv(spec.breakpoints), "slopes": qv(spec.slopes), "intercept": q(spec.intercept)}


def fan_spec_from_json(obj) -> FanSpec2D:
    rays = []
    for i, r in enumerate(_list(_get(obj, "rays", ""), "rays")):
        r = _list(r, f"rays[{i}]")
        if len(r) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in r):
            raise ParseError("rays are pairs of integers", f"rays[{i}]")
        rays.append(tuple(r))
    mats = tuple(_matrix(M, f"matrices[{i}]") for i, M in enumerate(_list(_get(obj, "matrices", ""), "matrices")))
    return FanSpec2D(tuple(rays), mats, bool(obj.get("capped", False)))


def fan_spec_to_json(spec: FanSpec2D) -> dict:
    return {
        "rays": [list(r) for r in spec.rays],
        "matrices": [[qv(row) for row in M] for M in spec.matrices],
        "capped": spec.capped,
    }


def _orientation(v):
    return f"{v:+d}" if isinstance(v, int) else v


def validation_to_json(r: ValidationReport) -> dict:
    return {
        "ok": r.ok,
        "violations": [
            {
                "kind": v.kind,
                "cells": list(v.cells),
                "witness": qv(v.witness) if v.witness is not None else None,
                "facet": v.facet,
                "detail": v.detail,
            }
            for v in r.violations
        ],
    }


def preimages_to_json(pre: PreimageSet, report: RegularValueReport) -> dict:
    return {
        "target": qv(pre.target),
        "points": [
            {"x": qv(p.x), "cells": list(p.cells), "on_boundary": p.on_boundary, "det_sign": p.det_sign}
            for p in pre.points
        ],
        "singular_hits": list(pre.singular_hits),
        "regular": report.regular,
        "reasons": [
            {"kind": kind, "cell": data} if isinstance(data, int) else {"kind": kind, "point": qv(data)}
            for kind, data in report.reasons
        ],
    }


def degree_to_json(ev: DegreeEvidence) -> dict:
    return {
        "degree": ev.degree,
        "far_value": qv(ev.far_value) if ev.far_value is not None else None,
        "samples": [{"y": qv(y), "count": c, "signed_sum": s} for y, c, s in ev.samples],
    }


def orientation_to_json(o: OrientationSummary) -> dict:
    return {
        "at_infinity": _orientation(o.at_infinity),
        "global": _orientation(o.global_),
        "per_cell": [{"cell": k, "det_sign": s, "bounded": b} for k, s, b in o.per_cell_sign],
    }


def certificate_to_json(c: SurjectivityCertificate) -> dict:
    return {
        "verdict": c.verdict,
        "orientation": orientation_to_json(c.orientation),
        "degree_evidence": degree_to_json(c.degree_evidence) if c.degree_evidence else None,
        "far_value": qv(c.far_value) if c.far_value is not None else None,
        "note": c.note,
    }


def oracle_to_json(r: OracleReport) -> dict:
    return {
        "box": [[q(lo), q(hi)] for lo, hi in r.box],
        "resolution": q(r.resolution),
        "n_targets": r.n_targets,
        "uncovered_targets": [qv(y) for y in r.uncovered_targets],
        "irregular_targets": [qv(y) for y in r.irregular_targets],
        "max_preimage_count": r.max_preimage_count,
        "min_preimage_count": r.min_preimage_count,
        "surjective_on_box": r.surjective_on_box,
    }
