"""Preimages, regular values and the mapping degree of a piecewise affine map."""
import random
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import List, Optional, Tuple, Union

from . import lp
from .linalg import (
    DimensionError,
    Vector,
    add,
    affine_solution_set,
    as_fraction,
    dot,
    matvec,
    norm_inf,
    scale,
    sub,
)
from .plfunction import PLFunction, bounded_image_radius, require_validated, split_cells
from .polyhedra import interior_point, recession_direction

SINGULAR_CELL_HIT = "singular-cell-hit"
BOUNDARY_PREIMAGE = "boundary-preimage"

RandomState = Union[None, int, random.Random]


class IrregularValueError(ValueError):
    def __init__(self, report: "RegularValueReport"):
        super().__init__(f"{_fmt(report.y)} is not a regular value: {[r[0] for r in report.reasons]}")
        self.report = report


class SingularAtInfinityError(ValueError):
    def __init__(self, cell: int):
        super().__init__(f"unbounded cell {cell} carries a selection with singular linear part")
        self.cell = cell


class NotCoherentError(ValueError):
    """The selections do not all share one nonzero determinant sign."""


class SamplingExhaustedError(RuntimeError):
    """No regular value was found within the retry budget."""


class DegreeMismatchError(AssertionError):
    """Two regular values gave different signed preimage sums."""


def check_random_state(seed: RandomState) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(0 if seed is None else seed)


def _fmt(v) -> str:
    return "(" + ", ".join(str(a) for a in v) + ")"


@dataclass(frozen=True)
class PreimagePoint:
    x: Vector
    cells: Tuple[int, ...]
    on_boundary: bool
    det_sign: int

    @property
    def cell(self) -> int:
        return self.cells[0]


@dataclass(frozen=True)
class PreimageSet:
    target: Vector
    points: Tuple[PreimagePoint, ...]
    singular_hits: Tuple[int, ...]

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class RegularValueReport:
    y: Vector
    regular: bool
    reasons: Tuple[Tuple[str, object], ...] = ()


@dataclass(frozen=True)
class DegreeEvidence:
    degree: int
    # (regular value, preimage count, signed sum); the far value comes first
    samples: Tuple[Tuple[Vector, int, int], ...]
    far_value: Optional[Vector] = None


def _as_target(f: PLFunction, y) -> Vector:
    y = tuple(as_fraction(v) for v in y)
    if len(y) != f.n:
        raise DimensionError(f"target of dimension {len(y)} for an R^{f.n} map")
    return y


def preimages(f: PLFunction, y) -> PreimageSet:
    """All solutions of F(x) = y, cell by cell.

    Invertible cells contribute at most one point each; points found in
    several cells are merged and flagged as boundary points. A singular cell
    whose solution set meets the cell is listed in ``singular_hits``.
    """
    require_validated(f)
    y = _as_target(f, y)
    found = {}
    order = []
    hits = []
    for k, cell in enumerate(f.cells):
        s = f.selection_of(k)
        P = cell.polyhedron
        rhs = sub(y, s.b)
        inv = s.inverse
        if inv is not None:
            x = matvec(inv, rhs)
            boundary = False
            inside = True
            for h in P.constraints:
                v = dot(h.normal, x)
                if v > h.offset:
                    inside = False
                    break
                if v == h.offset:
                    boundary = True
            if not inside:
                continue
            if x in found:
                cells, _ = found[x]
                found[x] = (cells + (k,), True)
            else:
                found[x] = ((k,), boundary)
                order.append(x)
        else:
            sol = affine_solution_set(s.A, rhs)
            if sol is None:
                continue
            p, kernel = sol
            A_ub = [tuple(dot(h.normal, d) for d in kernel) for h in P.constraints]
            b_ub = [h.offset - dot(h.normal, p) for h in P.constraints]
            if lp.feasible_point(len(kernel), A_ub, b_ub) is not None:
                hits.append(k)
    points = tuple(
        PreimagePoint(x, found[x][0], found[x][1], f.cell_det_signs[found[x][0][0]]) for x in order
    )
    return PreimageSet(y, points, tuple(hits))


def _classify(pre: PreimageSet) -> RegularValueReport:
    reasons = [(SINGULAR_CELL_HIT, k) for k in pre.singular_hits]
    reasons += [(BOUNDARY_PREIMAGE, p.x) for p in pre.points if p.on_boundary]
    return RegularValueReport(pre.target, not reasons, tuple(reasons))


def classify_regular(f: PLFunction, y) -> RegularValueReport:
    """Regular iff no singular cell maps onto y and no preimage sits on a cell boundary."""
    return _classify(preimages(f, y))


def signed_sum(pre: PreimageSet) -> int:
    return sum(p.det_sign for p in pre.points)


def local_degree(f: PLFunction, y) -> int:
    pre = preimages(f, y)
    report = _classify(pre)
    if not report.regular:
        raise IrregularValueError(report)
    return signed_sum(pre)


def _sample(f, rng, radius, max_tries, center=None) -> Tuple[Vector, PreimageSet]:
    radius = as_fraction(radius)
    if center is None:
        center = (Fraction(0),) * f.n
    q = 4
    for _ in range(max_tries):
        m = floor(radius * q)
        y = tuple(c + Fraction(rng.randint(-m, m), q) for c in center)
        pre = preimages(f, y)
        if _classify(pre).regular:
            return y, pre
        q *= 2
    raise SamplingExhaustedError(
        f"no regular value found in {max_tries} tries within radius {radius} of {_fmt(center)}"
    )


def sample_regular_value(
    f: PLFunction, seed: RandomState = 0, radius=10, max_tries: int = 64, center=None
) -> Vector:
    """Rejection-sample a regular value from the sup-norm ball of ``radius``.

    Candidates are drawn from the grid with spacing ``1/q`` where ``q``
    starts at 4 and doubles after every rejection.
    """
    return _sample(f, check_random_state(seed), radius, max_tries, center)[0]


def check_nonsingular_at_infinity(f: PLFunction) -> None:
    _, unbounded = split_cells(f)
    for k in unbounded:
        if f.cell_det_signs[k] == 0:
            raise SingularAtInfinityError(k)


def is_nonsingular_at_infinity(f: PLFunction) -> bool:
    try:
        check_nonsingular_at_infinity(f)
    except SingularAtInfinityError:
        return False
    return True


def far_regular_value(f: PLFunction, seed: RandomState = 0, max_tries: int = 64) -> Tuple[Vector, RegularValueReport]:
    """A regular value in the image whose preimages all lie in unbounded cells.

    Let r bound |F| over the bounded cells. Walking from an interior point of
    an unbounded cell along a recession direction d, the invertible
    selection pushes |F| past r; points of the cell near that far point are
    then sampled until their image is a regular value.
    """
    check_nonsingular_at_infinity(f)
    rng = check_random_state(seed)
    r = bounded_image_radius(f)
    _, unbounded = split_cells(f)
    k = unbounded[0]
    P = f.polyhedron(k)
    s = f.selection_of(k)
    x0 = interior_point(P)
    d = recession_direction(P)
    t = (r + norm_inf(s(x0)) + 2) / norm_inf(matvec(s.A, d))
    xc = add(x0, scale(t, d))

    y = None
    eps = Fraction(1)
    q = 4
    for _ in range(max_tries):
        m = floor(eps * q)
        x = tuple(c + Fraction(rng.randint(-m, m), q) for c in xc)
        if all(dot(h.normal, x) < h.offset for h in P.constraints):
            cand = s(x)
            if norm_inf(cand) > r:
                pre = preimages(f, cand)
                if _classify(pre).regular:
                    y = cand
                    break
        else:
            eps /= 2
        q *= 2
    if y is None:
        raise SamplingExhaustedError("no regular far value found near the chosen unbounded cell")

    report = _classify(pre)
    assert norm_inf(y) > r
    assert pre.points, "far value was built in the image"
    assert all(not f.cell_bounded[p.cell] for p in pre.points), "far value has a preimage in a bounded cell"
    return y, report


def global_degree(f: PLFunction, trials: int = 50, seed: RandomState = 0, radius=None) -> DegreeEvidence:
    """Degree of a map that is nonsingular at infinity, with invariance evidence.

    The local degree is computed at the far regular value and at ``trials``
    further regular values sampled from the sup-norm ball of ``radius``
    (default: just beyond the far value). All must agree.
    """
    rng = check_random_state(seed)
    y_far, _ = far_regular_value(f, rng)
    pre = preimages(f, y_far)
    degree = signed_sum(pre)
    samples = [(y_far, len(pre), degree)]
    if radius is None:
        radius = norm_inf(y_far) + 1
    for _ in range(trials):
        y, pre = _sample(f, rng, radius, 64)
        total = signed_sum(pre)
        samples.append((y, len(pre), total))
        if total != degree:
            raise DegreeMismatchError(
                f"signed preimage sum {total} at {_fmt(y)} differs from {degree} at {_fmt(y_far)}"
            )
    return DegreeEvidence(degree, tuple(samples), y_far)


def coherent_sign(f: PLFunction) -> Optional[int]:
    """Common nonzero determinant sign of all cells, or None."""
    signs = set(f.cell_det_signs)
    if len(signs) == 1 and 0 not in signs:
        return signs.pop()
    return None


def preimage_count_profile(f: PLFunction, trials: int = 50, seed: RandomState = 0) -> List[Tuple[Vector, int]]:
    require_validated(f)
    if coherent_sign(f) is None:
        raise NotCoherentError("preimage counts are only constant for coherently oriented maps")
    evidence = global_degree(f, trials, seed)
    profile = [(y, count) for y, count, _ in evidence.samples]
    bad = [(y, c) for y, c in profile if c != abs(evidence.degree)]
    if bad:
        raise DegreeMismatchError(f"{_fmt(bad[0][0])} has {bad[0][1]} preimages, expected {abs(evidence.degree)}")
    return profile
