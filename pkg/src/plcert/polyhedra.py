"""H-representation polyhedra over the rationals.

Every geometric question (membership, full-dimensionality, boundedness,
facets, face identity) is reduced to exact linear programs solved by
:mod:`plcert.lp`.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import List, Optional, Sequence, Tuple

from . import lp
from .linalg import ONE, ZERO, DimensionError, Vector, as_fraction, dot, solve_unique, unit
from .lp import LPResult


class EmptyPolyhedronError(ValueError):
    """A polyhedron that must be nonempty has no points."""


class LowerDimensionalError(ValueError):
    """A polyhedron that must be full-dimensional has empty interior."""


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace ``{x : normal . x <= offset}``."""

    normal: Vector
    offset: Fraction

    def __post_init__(self):
        normal = tuple(as_fraction(v) for v in self.normal)
        if not normal:
            raise DimensionError("halfspace normal must have positive dimension")
        if not any(normal):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", as_fraction(self.offset))

    @property
    def dim(self) -> int:
        return len(self.normal)

    def slack(self, x: Vector) -> Fraction:
        return self.offset - dot(self.normal, x)

    def scaled_copy_of(self, other: "Halfspace") -> bool:
        """True when both describe the same halfspace (positive multiples)."""
        lam = _positive_multiple(self.normal, other.normal)
        return lam is not None and other.offset == lam * self.offset


def _positive_multiple(u: Vector, v: Vector) -> Optional[Fraction]:
    """Return lam > 0 with v = lam * u, or None."""
    k = next(i for i, a in enumerate(u) if a != 0)
    lam = v[k] / u[k]
    if lam <= 0:
        return None
    if any(b != lam * a for a, b in zip(u, v)):
        return None
    return lam


@dataclass(frozen=True)
class HPolyhedron:
    dim: int
    constraints: Tuple[Halfspace, ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("ambient dimension must be positive")
        cons = tuple(self.constraints)
        for h in cons:
            if h.dim != self.dim:
                raise DimensionError(f"constraint of dimension {h.dim} in a polyhedron of dimension {self.dim}")
        object.__setattr__(self, "constraints", cons)

    @classmethod
    def from_inequalities(cls, A: Sequence[Sequence], b: Sequence, dim: Optional[int] = None) -> "HPolyhedron":
        if dim is None:
            if not A:
                raise DimensionError("dimension required when there are no constraints")
            dim = len(A[0])
        return cls(dim, tuple(Halfspace(tuple(a), o) for a, o in zip(A, b)))

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence) -> "HPolyhedron":
        n = len(lower)
        cons = []
        for j in range(n):
            e = unit(n, j)
            cons.append(Halfspace(e, as_fraction(upper[j])))
            cons.append(Halfspace(tuple(-v for v in e), -as_fraction(lower[j])))
        return cls(n, tuple(cons))

    @property
    def A(self) -> Tuple[Vector, ...]:
        return tuple(h.normal for h in self.constraints)

    @property
    def b(self) -> Tuple[Fraction, ...]:
        return tuple(h.offset for h in self.constraints)

    def __len__(self):
        return len(self.constraints)

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if other.dim != self.dim:
            raise DimensionError("cannot intersect polyhedra of different dimension")
        return HPolyhedron(self.dim, self.constraints + other.constraints)


def _check_dim(P: HPolyhedron, x: Sequence) -> None:
    if len(x) != P.dim:
        raise DimensionError(f"point of dimension {len(x)} for a polyhedron of dimension {P.dim}")


def lp_solve(objective: Sequence, P: HPolyhedron, sense: str = "max") -> LPResult:
    _check_dim(P, objective)
    c = [as_fraction(v) for v in objective]
    if sense == "max":
        return lp.maximize(c, P.A, P.b)
    if sense == "min":
        return lp.minimize(c, P.A, P.b)
    raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")


def contains(P: HPolyhedron, x: Vector) -> bool:
    _check_dim(P, x)
    return all(dot(h.normal, x) <= h.offset for h in P.constraints)


def tight_constraints(P: HPolyhedron, x: Vector) -> Tuple[int, ...]:
    """Indices of constraints holding with equality at ``x``."""
    _check_dim(P, x)
    return tuple(k for k, h in enumerate(P.constraints) if dot(h.normal, x) == h.offset)


def max_slack(P: HPolyhedron, equalities: Sequence[Halfspace] = ()) -> Tuple[Fraction, Vector]:
    """Maximise a uniform slack ``t <= 1`` over ``P`` (optionally within hyperplanes).

    The program is ``max t  s.t.  a_k x + t <= o_k``, always feasible because
    ``t`` may go negative. The sign of the optimum classifies ``P``:
    negative means empty, zero means nonempty without interior (relative to
    the equality constraints), positive means a point with strict slack.
    """
    n = P.dim
    A_ub = [tuple(h.normal) + (ONE,) for h in P.constraints]
    b_ub = [h.offset for h in P.constraints]
    A_ub.append((ZERO,) * n + (ONE,))
    b_ub.append(ONE)
    A_eq = [tuple(h.normal) + (ZERO,) for h in equalities]
    b_eq = [h.offset for h in equalities]
    res = lp.maximize((ZERO,) * n + (ONE,), A_ub, b_ub, A_eq, b_eq)
    if res.status != lp.OPTIMAL:
        # only reachable through inconsistent equalities
        return Fraction(-1), None
    return res.optimum, res.witness[:n]


@lru_cache(maxsize=8192)
def interior_point(P: HPolyhedron) -> Optional[Vector]:
    """A point satisfying every constraint strictly, or None if P has no interior."""
    t, x = max_slack(P)
    return x if t > 0 else None


def is_empty(P: HPolyhedron) -> bool:
    return max_slack(P)[0] < 0


def recession_cone(P: HPolyhedron) -> HPolyhedron:
    return HPolyhedron(P.dim, tuple(Halfspace(h.normal, ZERO) for h in P.constraints))


@lru_cache(maxsize=8192)
def recession_direction(P: HPolyhedron) -> Optional[Vector]:
    """A nonzero direction of the recession cone, or None if the cone is {0}."""
    n = P.dim
    cone = recession_cone(P).intersect(HPolyhedron.box([-1] * n, [1] * n))
    for j in range(n):
        for sign in (1, -1):
            e = tuple(Fraction(sign) if i == j else ZERO for i in range(n))
            res = lp_solve(e, cone)
            if res.optimum > 0:
                return res.witness
    return None


@lru_cache(maxsize=8192)
def is_bounded(P: HPolyhedron) -> bool:
    if is_empty(P):
        raise EmptyPolyhedronError("boundedness of an empty polyhedron is undefined here")
    return recession_direction(P) is None


@lru_cache(maxsize=8192)
def facet_witnesses(P: HPolyhedron) -> Tuple[Tuple[int, Vector], ...]:
    """One ``(constraint index, relative-interior point)`` per facet of ``P``.

    Constraint ``k`` defines a facet when the hyperplane ``a_k x = o_k`` meets
    ``P`` in a set with positive slack on every constraint that is not a
    positive multiple of ``k``. Among duplicated constraints only the first
    index is reported.
    """
    if interior_point(P) is None:
        raise LowerDimensionalError("facets are only computed for full-dimensional polyhedra")
    cons = P.constraints
    out = []
    for k, h in enumerate(cons):
        if any(cons[j].scaled_copy_of(h) for j in range(k)):
            continue
        others = HPolyhedron(P.dim, tuple(g for j, g in enumerate(cons) if j != k and not h.scaled_copy_of(g)))
        t, w = max_slack(others, (h,))
        if t > 0:
            out.append((k, w))
    return tuple(out)


def _multiple(u: Vector, v: Vector) -> Optional[Fraction]:
    """Return lam != 0 with v = lam * u, or None."""
    lam = _positive_multiple(u, v)
    if lam is None:
        lam = _positive_multiple(u, tuple(-x for x in v))
        lam = -lam if lam is not None else None
    return lam


def _restates(h: Halfspace, A_ub, b_ub, A_eq, b_eq) -> bool:
    """Is h a weakening of a single row of the system?"""
    for a, b in zip(A_ub, b_ub):
        lam = _positive_multiple(a, h.normal)
        if lam is not None and h.offset >= lam * b:
            return True
    for a, b in zip(A_eq, b_eq):
        lam = _multiple(a, h.normal)
        if lam is not None and h.offset >= lam * b:
            return True
    return False


def _implies(A_ub, b_ub, A_eq, b_eq, target: Sequence[Halfspace], target_eq: Sequence[Halfspace]) -> bool:
    """Does the system (A_ub, b_ub, A_eq, b_eq) imply every target inequality/equality?"""
    target = [h for h in target if not _restates(h, A_ub, b_ub, A_eq, b_eq)]
    target_eq = [h for h in target_eq if not any(
        (lam := _multiple(a, h.normal)) is not None and h.offset == lam * b for a, b in zip(A_eq, b_eq))]
    for h in target:
        res = lp.maximize(h.normal, A_ub, b_ub, A_eq, b_eq)
        if res.status == lp.INFEASIBLE:
            return True
        if res.status == lp.UNBOUNDED or res.optimum > h.offset:
            return False
    for h in target_eq:
        hi = lp.maximize(h.normal, A_ub, b_ub, A_eq, b_eq)
        if hi.status == lp.INFEASIBLE:
            return True
        if hi.status == lp.UNBOUNDED or hi.optimum != h.offset:
            return False
        lo = lp.minimize(h.normal, A_ub, b_ub, A_eq, b_eq)
        if lo.status == lp.UNBOUNDED or lo.optimum != h.offset:
            return False
    return True


def face_system(P: HPolyhedron, tight: Sequence[int]):
    """Constraint system of the face of ``P`` with ``tight`` constraints at equality."""
    tight = set(tight)
    A_ub = [h.normal for k, h in enumerate(P.constraints) if k not in tight]
    b_ub = [h.offset for k, h in enumerate(P.constraints) if k not in tight]
    A_eq = [P.constraints[k].normal for k in sorted(tight)]
    b_eq = [P.constraints[k].offset for k in sorted(tight)]
    return A_ub, b_ub, A_eq, b_eq


def face_contained_in(P: HPolyhedron, tight: Sequence[int], Q: HPolyhedron, q_tight: Sequence[int] = ()) -> bool:
    """Is the face of P (``tight`` at equality) inside the face of Q (``q_tight``)?"""
    q_tight = set(q_tight)
    ineqs = [h for k, h in enumerate(Q.constraints) if k not in q_tight]
    eqs = [Q.constraints[k] for k in sorted(q_tight)]
    return _implies(*face_system(P, tight), ineqs, eqs)


def same_face(P: HPolyhedron, i: int, Q: HPolyhedron, j: int) -> bool:
    """True iff facet ``i`` of ``P`` and facet ``j`` of ``Q`` are the same point set."""
    if P.dim != Q.dim:
        raise DimensionError("polyhedra of different dimension")
    if not (0 <= i < len(P) and 0 <= j < len(Q)):
        raise IndexError("facet index out of range")
    return face_contained_in(P, (i,), Q, (j,)) and face_contained_in(Q, (j,), P, (i,))


def _ccw_key(center: Vector):
    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def cmp(p, q):
        u = (p[0] - center[0], p[1] - center[1])
        v = (q[0] - center[0], q[1] - center[1])
        hu, hv = half(u), half(v)
        if hu != hv:
            return hu - hv
        cross = u[0] * v[1] - u[1] * v[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return cmp_to_key(cmp)


def polygon_vertices(P: HPolyhedron) -> List[Vector]:
    """Vertices of a bounded planar polyhedron in counter-clockwise order."""
    if P.dim != 2:
        raise DimensionError("polygon_vertices needs a planar polyhedron")
    cons = P.constraints
    pts = set()
    for a in range(len(cons)):
        for b in range(a + 1, len(cons)):
            x = solve_unique((cons[a].normal, cons[b].normal), (cons[a].offset, cons[b].offset))
            if x is not None and contains(P, x):
                pts.add(x)
    if not pts:
        return []
    center = (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))
    return sorted(pts, key=_ccw_key(center))
