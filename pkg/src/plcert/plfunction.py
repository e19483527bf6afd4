"""Piecewise affine maps given by a polyhedral subdivision plus affine selections."""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from . import lp
from .linalg import (
    ZERO,
    DimensionError,
    Matrix,
    Vector,
    add,
    as_fraction,
    det_sign,
    dot,
    inverse,
    kernel_basis,
    matvec,
)
from .polyhedra import (
    HPolyhedron,
    _positive_multiple,
    contains,
    face_contained_in,
    facet_witnesses,
    is_bounded,
    max_slack,
    same_face,
)

OVERLAP = "overlap"
BAD_FACE = "bad-face"
DISCONTINUITY = "discontinuity"
UNPAIRED_FACET = "unpaired-facet"
EMPTY_CELL = "empty-cell"
LOWER_DIMENSIONAL_CELL = "lower-dimensional-cell"


class NotValidatedError(RuntimeError):
    """An analysis was requested on a function that has not passed validation."""


@dataclass(frozen=True)
class Selection:
    """Affine map ``x -> A x + b``."""

    A: Matrix
    b: Vector

    def __post_init__(self):
        A = tuple(tuple(as_fraction(v) for v in row) for row in self.A)
        b = tuple(as_fraction(v) for v in self.b)
        n = len(b)
        if len(A) != n or any(len(row) != n for row in A):
            raise DimensionError(f"selection needs an {n}x{n} matrix")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.b)

    def __call__(self, x: Vector) -> Vector:
        return add(matvec(self.A, x), self.b)

    @cached_property
    def det_sign(self) -> int:
        return det_sign(self.A)

    @cached_property
    def inverse(self) -> Optional[Matrix]:
        return inverse(self.A)


@dataclass(frozen=True)
class Cell:
    polyhedron: HPolyhedron
    selection: int


@dataclass(frozen=True)
class Finding:
    kind: str
    cells: Tuple[int, ...]
    witness: Optional[Vector] = None
    facet: Optional[int] = None
    detail: str = ""


@dataclass
class ValidationReport:
    violations: List[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


@dataclass(eq=False)
class PLFunction:
    """A piecewise affine map R^n -> R^n.

    ``cells[k]`` is a polyhedron on which the map equals
    ``selections[cells[k].selection]``. Selections may be shared by several
    cells. Analyses require a successful :func:`validate` first.
    """

    n: int
    selections: Tuple[Selection, ...]
    cells: Tuple[Cell, ...]
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        self.selections = tuple(self.selections)
        self.cells = tuple(self.cells)
        if self.n < 1:
            raise DimensionError("ambient dimension must be positive")
        if not self.cells:
            raise ValueError("a subdivision needs at least one cell")
        for s in self.selections:
            if s.n != self.n:
                raise DimensionError(f"selection of dimension {s.n} in an R^{self.n} map")
        for k, c in enumerate(self.cells):
            if c.polyhedron.dim != self.n:
                raise DimensionError(f"cell {k} has dimension {c.polyhedron.dim}, expected {self.n}")
            if not 0 <= c.selection < len(self.selections):
                raise ValueError(f"cell {k} references missing selection {c.selection}")

    @classmethod
    def affine(cls, A, b) -> "PLFunction":
        """One cell covering all of R^n."""
        s = Selection(A, b)
        return cls(s.n, (s,), (Cell(HPolyhedron(s.n), 0),))

    def selection_of(self, cell: int) -> Selection:
        return self.selections[self.cells[cell].selection]

    def polyhedron(self, cell: int) -> HPolyhedron:
        return self.cells[cell].polyhedron

    @cached_property
    def cell_det_signs(self) -> Tuple[int, ...]:
        return tuple(self.selection_of(k).det_sign for k in range(len(self.cells)))

    @cached_property
    def cell_bounded(self) -> Tuple[bool, ...]:
        return tuple(is_bounded(c.polyhedron) for c in self.cells)


def require_validated(f: PLFunction) -> None:
    if not f.validated:
        raise NotValidatedError("run validate() on the function first; it must report ok")


def _separated(P: HPolyhedron, Q: HPolyhedron) -> bool:
    """Cheap sufficient test for disjointness via opposite parallel constraints."""
    for h in P.constraints:
        for g in Q.constraints:
            lam = _positive_multiple(h.normal, tuple(-v for v in g.normal))
            if lam is not None and -g.offset / lam > h.offset:
                return True
    return False


def _tight_on(P: HPolyhedron, I: HPolyhedron, w: Vector) -> Tuple[int, ...]:
    """Constraints of P holding with equality on all of I (w is a point of I)."""
    tight = []
    for k, h in enumerate(P.constraints):
        if dot(h.normal, w) != h.offset:
            continue
        res = lp.minimize(h.normal, I.A, I.b)
        if res.optimum == h.offset:
            tight.append(k)
    return tuple(tight)


def _is_point(P: HPolyhedron, tight: Sequence[int]) -> bool:
    """Do the ``tight`` constraints of P pin down a single point?"""
    return not kernel_basis(tuple(P.constraints[k].normal for k in tight))


def _hull_points(P: HPolyhedron, tight: Sequence[int], w: Vector) -> List[Vector]:
    """w plus w shifted by each basis direction of the face's affine hull."""
    directions = kernel_basis(tuple(P.constraints[k].normal for k in tight))
    return [w] + [add(w, d) for d in directions]


def validate(f: PLFunction) -> ValidationReport:
    """Check that the cells form a polyhedral subdivision of R^n carrying a continuous map.

    Checks run in order: nonempty full-dimensional cells; pairwise interiors
    disjoint and intersections common proper faces; selections agree on the
    affine hull of every common face; every facet matched by exactly one
    facet of another cell, which with the previous checks means the cells
    cover R^n. Cells implicated in a geometric finding are skipped by the
    facet-pairing check. On success ``f.validated`` is set.
    """
    report = ValidationReport()
    findings = report.violations
    good = []
    for k, c in enumerate(f.cells):
        t, x = max_slack(c.polyhedron)
        if t < 0:
            findings.append(Finding(EMPTY_CELL, (k,), detail="cell has no points"))
        elif t == 0:
            findings.append(Finding(LOWER_DIMENSIONAL_CELL, (k,), witness=x, detail="cell has empty interior"))
        else:
            good.append(k)

    implicated = set()
    for k, l in combinations(good, 2):
        P, Q = f.polyhedron(k), f.polyhedron(l)
        if _separated(P, Q):
            continue
        I = P.intersect(Q)
        t, w = max_slack(I)
        if t < 0:
            continue
        if t > 0:
            findings.append(Finding(OVERLAP, (k, l), witness=w, detail="cells share an interior point"))
            implicated.update((k, l))
            continue
        tight_p = _tight_on(P, I, w)
        point_p = _is_point(P, tight_p)
        if point_p:
            # I is the single point w, so every constraint tight at w is tight on I
            tight_q = tuple(j for j, g in enumerate(Q.constraints) if g.slack(w) == 0)
        else:
            tight_q = _tight_on(Q, I, w)
        # a face that is a single point of I lies in the other cell already
        if not (
            (point_p or face_contained_in(P, tight_p, Q))
            and (_is_point(Q, tight_q) or face_contained_in(Q, tight_q, P))
        ):
            findings.append(
                Finding(BAD_FACE, (k, l), witness=w, detail="intersection is not a common face of both cells")
            )
            implicated.update((k, l))
            continue
        sk, sl = f.selection_of(k), f.selection_of(l)
        for x in _hull_points(P, tight_p, w):
            if sk(x) != sl(x):
                findings.append(
                    Finding(
                        DISCONTINUITY,
                        (k, l),
                        witness=x,
                        facet=tight_p[0] if len(tight_p) == 1 else None,
                        detail="selections differ on the affine hull of the common face",
                    )
                )
                break

    for k in good:
        if k in implicated:
            continue
        P = f.polyhedron(k)
        for i, w in facet_witnesses(P):
            h = P.constraints[i]
            partners = []
            for l in good:
                if l == k:
                    continue
                Q = f.polyhedron(l)
                if not contains(Q, w):
                    continue
                for j, g in enumerate(Q.constraints):
                    if dot(g.normal, w) != g.offset:
                        continue
                    if _positive_multiple(h.normal, tuple(-v for v in g.normal)) is None:
                        continue
                    if same_face(P, i, Q, j):
                        partners.append((l, j))
                        break
            if len(partners) != 1:
                findings.append(
                    Finding(
                        UNPAIRED_FACET,
                        (k,) + tuple(l for l, _ in partners),
                        witness=w,
                        facet=i,
                        detail=f"facet matched by {len(partners)} facets of other cells (expected 1)",
                    )
                )

    f.validated = report.ok
    return report


def locate(f: PLFunction, x: Vector) -> List[int]:
    require_validated(f)
    if len(x) != f.n:
        raise DimensionError(f"point of dimension {len(x)} for an R^{f.n} map")
    return [k for k, c in enumerate(f.cells) if contains(c.polyhedron, x)]


def evaluate(f: PLFunction, x: Vector) -> Vector:
    x = tuple(as_fraction(v) for v in x)
    cells = locate(f, x)
    if not cells:
        raise ValueError(f"point {x} lies in no cell")
    value = f.selection_of(cells[0])(x)
    if __debug__:
        for k in cells[1:]:
            assert f.selection_of(k)(x) == value, f"selections disagree at {x}"
    return value


def split_cells(f: PLFunction) -> Tuple[List[int], List[int]]:
    """Indices of bounded cells and of unbounded cells."""
    require_validated(f)
    bounded = [k for k, b in enumerate(f.cell_bounded) if b]
    unbounded = [k for k, b in enumerate(f.cell_bounded) if not b]
    return bounded, unbounded


def bounded_image_radius(f: PLFunction) -> Fraction:
    """Max of the infinity norm of F over the union of bounded cells (0 if none)."""
    bounded, _ = split_cells(f)
    r = ZERO
    for k in bounded:
        P = f.polyhedron(k)
        s = f.selection_of(k)
        for row, bj in zip(s.A, s.b):
            hi = lp.maximize(row, P.A, P.b)
            lo = lp.minimize(row, P.A, P.b)
            r = max(r, abs(hi.optimum + bj), abs(lo.optimum + bj))
    return r
