"""Instance generators and exact grid oracles for small dimensions."""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple

from .degree import RandomState, _classify, check_random_state, preimages
from .linalg import ONE, ZERO, Vector, as_fraction, identity, matmul, inverse, solve_unique
from .plfunction import Cell, PLFunction, Selection, evaluate, require_validated, split_cells, validate
from .polyhedra import Halfspace, HPolyhedron, polygon_vertices

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenSpec1D:
    """Continuous 1D piecewise affine map.

    ``intercept`` is the value at the first breakpoint (at 0 when there are
    no breakpoints); piece k has slope ``slopes[k]``.
    """

    breakpoints: Tuple[Fraction, ...]
    slopes: Tuple[Fraction, ...]
    intercept: Fraction = ZERO

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(as_fraction(v) for v in self.breakpoints))
        object.__setattr__(self, "slopes", tuple(as_fraction(v) for v in self.slopes))
        object.__setattr__(self, "intercept", as_fraction(self.intercept))
        if len(self.slopes) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more slope than breakpoints")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")


@dataclass(frozen=True)
class FanSpec2D:
    """Conewise linear map of the plane.

    Sector k is the cone spanned by ``rays[k]`` and ``rays[k+1]`` (cyclic)
    and carries ``matrices[k]``. With ``capped`` each sector is cut by the
    segment joining its two ray vectors into a triangle and an unbounded
    remainder carrying the same matrix.
    """

    rays: Tuple[Tuple[int, int], ...]
    matrices: Tuple
    capped: bool = False

    def __post_init__(self):
        rays = tuple((int(r[0]), int(r[1])) for r in self.rays)
        mats = tuple(tuple(tuple(as_fraction(v) for v in row) for row in M) for M in self.matrices)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "matrices", mats)


@dataclass
class OracleReport:
    box: Tuple[Tuple[Fraction, Fraction], ...]
    resolution: Fraction
    n_targets: int = 0
    uncovered_targets: List[Vector] = field(default_factory=list)
    irregular_targets: List[Vector] = field(default_factory=list)
    max_preimage_count: Optional[int] = None
    min_preimage_count: Optional[int] = None

    @property
    def surjective_on_box(self) -> bool:
        return not self.uncovered_targets


def _interval(lo=None, hi=None) -> HPolyhedron:
    A, b = [], []
    if hi is not None:
        A.append((ONE,))
        b.append(hi)
    if lo is not None:
        A.append((-ONE,))
        b.append(-lo)
    return HPolyhedron.from_inequalities(A, b, dim=1)


def _checked(f: PLFunction) -> PLFunction:
    report = validate(f)
    if not report.ok:
        raise ValueError(f"generated function failed validation: {report.violations[0]}")
    return f


def gen_1d(spec: GenSpec1D) -> PLFunction:
    bps, slopes = spec.breakpoints, spec.slopes
    if not bps:
        return _checked(PLFunction.affine(((slopes[0],),), (spec.intercept,)))
    values = [spec.intercept]
    for k in range(1, len(bps)):
        values.append(values[-1] + slopes[k] * (bps[k] - bps[k - 1]))
    sels = [Selection(((slopes[0],),), (values[0] - slopes[0] * bps[0],))]
    cells = [Cell(_interval(hi=bps[0]), 0)]
    for k in range(1, len(bps)):
        sels.append(Selection(((slopes[k],),), (values[k - 1] - slopes[k] * bps[k - 1],)))
        cells.append(Cell(_interval(bps[k - 1], bps[k]), k))
    sels.append(Selection(((slopes[-1],),), (values[-1] - slopes[-1] * bps[-1],)))
    cells.append(Cell(_interval(lo=bps[-1]), len(bps)))
    return _checked(PLFunction(1, sels, cells))


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _upper(v) -> bool:
    return v[1] > 0 or (v[1] == 0 and v[0] > 0)


def _winding(vectors) -> int:
    """Number of counter-clockwise turns of a cyclic sequence with ccw steps below pi."""
    m = len(vectors)
    return sum(1 for k in range(m) if not _upper(vectors[k]) and _upper(vectors[(k + 1) % m]))


def gen_fan_2d(spec: FanSpec2D) -> PLFunction:
    rays, mats = spec.rays, spec.matrices
    m = len(rays)
    if m < 3 or len(mats) != m:
        raise ValueError("a fan needs at least three rays and one matrix per sector")
    for k in range(m):
        if rays[k] == (0, 0):
            raise ValueError("rays must be nonzero")
        if _cross(rays[k], rays[(k + 1) % m]) <= 0:
            raise ValueError(f"sector {k} is degenerate: consecutive rays must turn counter-clockwise by less than pi")
    if _winding(rays) != 1:
        raise ValueError("rays must go around the origin exactly once")
    for k in range(m):
        r = rays[(k + 1) % m]
        a = tuple(sum(row[j] * r[j] for j in range(2)) for row in mats[k])
        b = tuple(sum(row[j] * r[j] for j in range(2)) for row in mats[(k + 1) % m])
        if a != b:
            raise ValueError(f"matrices of sectors {k} and {(k + 1) % m} disagree on their shared ray")

    sels = [Selection(M, (ZERO, ZERO)) for M in mats]
    bounded, unbounded = [], []
    for k in range(m):
        r, s = rays[k], rays[(k + 1) % m]
        cone = [
            Halfspace((as_fraction(r[1]), as_fraction(-r[0])), ZERO),
            Halfspace((as_fraction(-s[1]), as_fraction(s[0])), ZERO),
        ]
        if not spec.capped:
            unbounded.append(Cell(HPolyhedron(2, tuple(cone)), k))
            continue
        ell = solve_unique(((r[0], r[1]), (s[0], s[1])), (ONE, ONE))
        ell = tuple(as_fraction(v) for v in ell)
        bounded.append(Cell(HPolyhedron(2, tuple(cone) + (Halfspace(ell, ONE),)), k))
        unbounded.append(Cell(HPolyhedron(2, tuple(cone) + (Halfspace(tuple(-v for v in ell), -ONE),)), k))
    return _checked(PLFunction(2, sels, bounded + unbounded))


def sector_matrix(r, s, u, v):
    """Linear map sending ray vectors r, s to u, v."""
    R = ((as_fraction(r[0]), as_fraction(s[0])), (as_fraction(r[1]), as_fraction(s[1])))
    U = ((as_fraction(u[0]), as_fraction(v[0])), (as_fraction(u[1]), as_fraction(v[1])))
    return matmul(U, inverse(R))


def fan_from_images(rays, images, capped: bool = False) -> FanSpec2D:
    """Fan spec whose sector maps send each ray to the corresponding image vector."""
    m = len(rays)
    mats = tuple(sector_matrix(rays[k], rays[(k + 1) % m], images[k], images[(k + 1) % m]) for k in range(m))
    return FanSpec2D(tuple(rays), mats, capped)


EIGHT_RAYS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
AXES = ((1, 0), (0, 1), (-1, 0), (0, -1))


def folding_map_spec(capped: bool = False) -> FanSpec2D:
    """The 8-sector angle-doubling map: ray k goes to axis direction k mod 4."""
    return fan_from_images(EIGHT_RAYS, [AXES[k % 4] for k in range(8)], capped)


def _primitive_directions(bound: int = 3):
    from math import gcd

    return [
        (a, b)
        for a in range(-bound, bound + 1)
        for b in range(-bound, bound + 1)
        if (a, b) != (0, 0) and gcd(abs(a), abs(b)) == 1
    ]


def _sorted_ccw(vectors):
    from functools import cmp_to_key

    def cmp(u, v):
        hu, hv = 0 if _upper(u) else 1, 0 if _upper(v) else 1
        if hu != hv:
            return hu - hv
        c = _cross(u, v)
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(vectors, key=cmp_to_key(cmp))


def random_rays(rng, count: int, bound: int = 3):
    """``count`` distinct integer directions in ccw order with every gap below pi."""
    dirs = _primitive_directions(bound)
    while True:
        rays = _sorted_ccw(rng.sample(dirs, count))
        if all(_cross(rays[k], rays[(k + 1) % count]) > 0 for k in range(count)):
            return tuple(rays)


def random_fan_spec(
    seed: RandomState = 0, n_rays: Optional[int] = None, degree: int = 1, orientation: int = 1,
    mixed: bool = False, capped: bool = False,
) -> FanSpec2D:
    """Random conewise linear map.

    Coherent maps send the rays to a cyclic sequence of image directions
    going ``degree`` times around the origin (reflected when
    ``orientation`` is -1). With ``mixed`` the image vectors are random with
    determinant signs of both kinds.
    """
    rng = check_random_state(seed)
    if mixed:
        m = n_rays or rng.randint(3, 8)
        rays = random_rays(rng, m)
        while True:
            images = [(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(m)]
            crosses = [_cross(images[k], images[(k + 1) % m]) for k in range(m)]
            if all(crosses) and min(crosses) < 0 < max(crosses):
                return fan_from_images(rays, images, capped)
    if n_rays is None:
        per_turn = rng.randint(3, 6 if degree == 1 else 4)
        n_rays = per_turn * degree
    if n_rays % degree:
        raise ValueError("n_rays must be a multiple of degree")
    rays = random_rays(rng, n_rays)
    base = random_rays(rng, n_rays // degree)
    images = []
    for k in range(n_rays):
        d = base[k % len(base)]
        c = rng.randint(1, 3)
        images.append((c * d[0], c * d[1]) if orientation > 0 else (c * d[0], -c * d[1]))
    return fan_from_images(rays, images, capped)


def random_spec_1d(
    seed: RandomState = 0, max_breakpoints: int = 20, span: int = 10, zero_end_prob: float = 0.1
) -> GenSpec1D:
    """Random zigzag with breakpoints and breakpoint values inside [-span, span]."""
    rng = check_random_state(seed)
    p = rng.randint(1, max_breakpoints)
    bps = sorted(set(Fraction(rng.randint(-4 * span, 4 * span), 4) for _ in range(p)))
    values = [Fraction(rng.randint(-2 * span, 2 * span), 2) for _ in bps]
    inner = [(values[k + 1] - values[k]) / (bps[k + 1] - bps[k]) for k in range(len(bps) - 1)]

    def end_slope():
        if rng.random() < zero_end_prob:
            return ZERO
        return Fraction(rng.choice((-1, 1)) * rng.randint(1, 12), rng.randint(1, 4))

    return GenSpec1D(tuple(bps), (end_slope(),) + tuple(inner) + (end_slope(),), values[0])


def _breakpoints(f: PLFunction) -> List[Fraction]:
    return sorted({h.offset / h.normal[0] for c in f.cells for h in c.polyhedron.constraints})


def perturb_bounded(f: PLFunction, seed: RandomState = 0) -> PLFunction:
    """Change F on its bounded cells only, keeping every unbounded cell and selection.

    In 1D a bounded interval is split at its midpoint and the values at all
    interior breakpoints are redrawn. In 2D a bounded cell is starred from
    its centroid and the centroid's image is displaced.
    """
    require_validated(f)
    if f.n > 2:
        raise ValueError("perturb_bounded supports n <= 2")
    rng = check_random_state(seed)
    bounded, unbounded = split_cells(f)
    if not bounded:
        logger.info("no bounded cell to perturb; returning the function unchanged")
        return f
    if f.n == 1:
        return _perturb_1d(f, rng, bounded, unbounded)
    return _perturb_2d(f, rng, bounded)


def _perturb_1d(f, rng, bounded, unbounded):
    k = rng.choice(bounded)
    ends = [h.offset / h.normal[0] for h in f.polyhedron(k).constraints]
    mid = (min(ends) + max(ends)) / 2
    bps = sorted(_breakpoints(f) + [mid])
    values = [evaluate(f, (x,))[0] for x in bps]
    spread = max(abs(v) for v in values) + 2
    for i in range(1, len(bps) - 1):
        values[i] = Fraction(rng.randint(-4 * int(spread), 4 * int(spread)), 4)
    left = right = None
    for u in unbounded:
        h = f.polyhedron(u).constraints[0]
        slope = f.selection_of(u).A[0][0]
        if h.normal[0] > 0:
            left = slope
        else:
            right = slope
    inner = [(values[i + 1] - values[i]) / (bps[i + 1] - bps[i]) for i in range(len(bps) - 1)]
    return gen_1d(GenSpec1D(tuple(bps), (left,) + tuple(inner) + (right,), values[0]))


def _triangle(p, q, r) -> HPolyhedron:
    cons = []
    for a, b in ((p, q), (q, r), (r, p)):
        e = (b[0] - a[0], b[1] - a[1])
        cons.append(Halfspace((e[1], -e[0]), e[1] * a[0] - e[0] * a[1]))
    return HPolyhedron(2, tuple(cons))


def _affine_through(points, values) -> Selection:
    """Affine map of the plane taking three points to three values."""
    M = tuple((p[0], p[1], ONE) for p in points)
    rows = []
    offsets = []
    for j in range(2):
        coef = solve_unique(M, tuple(v[j] for v in values))
        rows.append((coef[0], coef[1]))
        offsets.append(coef[2])
    return Selection(tuple(rows), tuple(offsets))


def _perturb_2d(f, rng, bounded):
    k = rng.choice(bounded)
    verts = polygon_vertices(f.polyhedron(k))
    c = (sum(v[0] for v in verts) / len(verts), sum(v[1] for v in verts) / len(verts))
    old = f.selection_of(k)
    fc = old(c)
    while True:
        delta = (Fraction(rng.randint(-8, 8), 4), Fraction(rng.randint(-8, 8), 4))
        if delta != (ZERO, ZERO):
            break
    new_c = (fc[0] + delta[0], fc[1] + delta[1])
    sels = list(f.selections)
    cells = [cell for i, cell in enumerate(f.cells) if i != k]
    for i in range(len(verts)):
        p, q = verts[i], verts[(i + 1) % len(verts)]
        sels.append(_affine_through((c, p, q), (new_c, old(p), old(q))))
        cells.append(Cell(_triangle(c, p, q), len(sels) - 1))
    return _checked(PLFunction(2, sels, cells))


def _grid_axis(lo: Fraction, hi: Fraction, step: Fraction):
    out = []
    x = lo
    while x <= hi:
        out.append(x)
        x += step
    return out


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PLCERT_THREADS", "1")))
    except ValueError:
        return 1


def _oracle_chunk(args):
    f, targets = args
    out = []
    for y in targets:
        pre = preimages(f, y)
        out.append((y, len(pre.points), bool(pre.singular_hits), _classify(pre).regular))
    return out


def grid_surjectivity_oracle(f: PLFunction, box: Sequence[Tuple], resolution) -> OracleReport:
    """Exact preimage check at every grid point of ``box`` with spacing ``resolution``."""
    require_validated(f)
    resolution = as_fraction(resolution)
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    box = tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in box)
    if len(box) != f.n:
        raise ValueError(f"box has {len(box)} intervals for an R^{f.n} map")
    targets = list(product(*(_grid_axis(lo, hi, resolution) for lo, hi in box)))
    workers = min(_worker_count(), max(1, len(targets) // 64))
    if workers > 1:
        chunks = [targets[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            rows = [r for part in pool.map(_oracle_chunk, [(f, c) for c in chunks]) for r in part]
        rows.sort(key=lambda r: r[0])
    else:
        rows = _oracle_chunk((f, targets))

    report = OracleReport(box, resolution, len(targets))
    counts = []
    for y, count, hit, regular in rows:
        if count == 0 and not hit:
            report.uncovered_targets.append(y)
        if regular:
            counts.append(count)
        else:
            report.irregular_targets.append(y)
    if counts:
        report.max_preimage_count = max(counts)
        report.min_preimage_count = min(counts)
    return report


def compose_linear(f: PLFunction, M, side: str = "after") -> PLFunction:
    """``M o F`` (side='after') or ``F o M`` (side='before') for an invertible matrix M."""
    M = tuple(tuple(as_fraction(v) for v in row) for row in M)
    if side == "after":
        sels = [Selection(matmul(M, s.A), tuple(sum(M[i][j] * s.b[j] for j in range(f.n)) for i in range(f.n)))
                for s in f.selections]
        return _checked(PLFunction(f.n, sels, f.cells))
    Minv = inverse(M)
    if Minv is None:
        raise ValueError("M must be invertible")
    # x in M^{-1} P  <=>  M x in P  <=>  (a M) x <= o
    cells = []
    for c in f.cells:
        cons = tuple(
            Halfspace(tuple(sum(h.normal[i] * M[i][j] for i in range(f.n)) for j in range(f.n)), h.offset)
            for h in c.polyhedron.constraints
        )
        cells.append(Cell(HPolyhedron(f.n, cons), c.selection))
    sels = [Selection(matmul(s.A, M), s.b) for s in f.selections]
    return _checked(PLFunction(f.n, sels, cells))


DIAGONALS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


def capped_box_identity(scale=1) -> PLFunction:
    """``scale * x`` with [-1,1]^2 cut into four triangles and four unbounded cells around it."""
    M = tuple(tuple(as_fraction(scale) if i == j else ZERO for j in range(2)) for i in range(2))
    return gen_fan_2d(FanSpec2D(DIAGONALS, (M,) * 4, capped=True))


def identity_map(n: int) -> PLFunction:
    return _checked(PLFunction.affine(identity(n), (ZERO,) * n))


def orthant_map(signs: Sequence[int]) -> PLFunction:
    """``x -> (s_1 |x_1|, ...)``-style map on the 2^n orthants.

    Coordinate j is mapped to ``x_j`` when ``signs[j] == 1`` and to
    ``|x_j|`` when ``signs[j] == 0``.
    """
    n = len(signs)
    sels, cells = [], []
    for pattern in product((1, -1), repeat=n):
        A = tuple(
            tuple(
                (ONE if (signs[i] == 1 or pattern[i] == 1) else -ONE) if i == j else ZERO for j in range(n)
            )
            for i in range(n)
        )
        sels.append(Selection(A, (ZERO,) * n))
        cons = tuple(
            Halfspace(tuple(Fraction(-pattern[i]) if i == j else ZERO for j in range(n)), ZERO) for i in range(n)
        )
        cells.append(Cell(HPolyhedron(n, cons), len(sels) - 1))
    return _checked(PLFunction(n, sels, cells))
