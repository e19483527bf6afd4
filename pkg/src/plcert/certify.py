"""Orientation analysis and surjectivity / homeomorphism certificates."""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .degree import (
    DegreeEvidence,
    RandomState,
    check_random_state,
    coherent_sign,
    global_degree,
    preimages,
    _classify,
    _sample,
    signed_sum,
)
from .linalg import Vector, add, kernel_basis, matvec, scale, sub
from .plfunction import PLFunction, evaluate, require_validated, split_cells
from .polyhedra import _positive_multiple, contains, facet_witnesses, interior_point

MIXED = "mixed"
SINGULAR = "singular"

CERTIFIED_SURJECTIVE = "certified_surjective"
NOT_CERTIFIED = "not_certified"
CERTIFIED_NOT_SURJECTIVE = "certified_not_surjective"

SURJECTIVE = "surjective"
NOT_SURJECTIVE = "not_surjective"

HOMEOMORPHISM = "homeomorphism"
NOT_INJECTIVE = "not_injective"
NOT_COHERENT = "not_coherent"
UNDETERMINED = "undetermined"

Orientation = Union[int, str]


@dataclass(frozen=True)
class OrientationSummary:
    per_cell_sign: Tuple[Tuple[int, int, bool], ...]  # (cell, det sign, bounded)
    at_infinity: Orientation
    global_: Orientation

    @property
    def coherent_at_infinity(self) -> bool:
        return self.at_infinity in (1, -1)

    @property
    def coherent(self) -> bool:
        return self.global_ in (1, -1)


@dataclass(frozen=True)
class SurjectivityCertificate:
    verdict: str
    orientation: OrientationSummary
    degree_evidence: Optional[DegreeEvidence] = None
    far_value: Optional[Vector] = None
    note: str = ""

    def verify(self, f: PLFunction) -> bool:
        """Re-check the evidence of a positive verdict by exact substitution."""
        if self.verdict != CERTIFIED_SURJECTIVE:
            return True
        if not self.orientation.coherent_at_infinity or self.far_value is None:
            return False
        ev = self.degree_evidence
        if ev is None or ev.degree == 0:
            return False
        pre = preimages(f, self.far_value)
        if not _classify(pre).regular or not pre.points:
            return False
        if any(f.cell_bounded[p.cell] for p in pre.points):
            return False
        if any(evaluate(f, p.x) != self.far_value for p in pre.points):
            return False
        return signed_sum(pre) == ev.degree


def _aggregate(signs) -> Orientation:
    signs = set(signs)
    if 0 in signs:
        return SINGULAR
    if len(signs) == 1:
        return signs.pop()
    return MIXED


def orientation_summary(f: PLFunction) -> OrientationSummary:
    require_validated(f)
    signs = f.cell_det_signs
    bounded = f.cell_bounded
    per_cell = tuple((k, signs[k], bounded[k]) for k in range(len(f.cells)))
    _, unbounded = split_cells(f)
    return OrientationSummary(per_cell, _aggregate(signs[k] for k in unbounded), _aggregate(signs))


def classify_1d(f: PLFunction) -> str:
    """Surjectivity of a map R -> R from the slopes on its two rays."""
    require_validated(f)
    if f.n != 1:
        raise ValueError(f"classify_1d needs a map R -> R, got n = {f.n}")
    _, unbounded = split_cells(f)
    slopes = [f.selection_of(k).A[0][0] for k in unbounded]
    if len(slopes) == 1:
        return SURJECTIVE if slopes[0] != 0 else NOT_SURJECTIVE
    if len(slopes) != 2:
        raise ValueError(f"a subdivision of R has one cell or two rays, found {len(slopes)} unbounded cells")
    return SURJECTIVE if slopes[0] * slopes[1] > 0 else NOT_SURJECTIVE


def certify_surjective(f: PLFunction, trials: int = 50, seed: RandomState = 0) -> SurjectivityCertificate:
    """Certify surjectivity from coherent orientation on the unbounded cells.

    With a common nonzero determinant sign at infinity, every regular value
    far out has preimages only in unbounded cells, all counted with the same
    sign, so the global degree is nonzero and F is onto. Otherwise nothing is
    claimed for n >= 2; in one dimension the two end slopes decide exactly.
    """
    summary = orientation_summary(f)
    if summary.coherent_at_infinity:
        evidence = global_degree(f, trials, seed)
        assert evidence.degree != 0, "coherent orientation at infinity forces a nonzero degree"
        cert = SurjectivityCertificate(
            CERTIFIED_SURJECTIVE,
            summary,
            evidence,
            evidence.far_value,
            f"unbounded cells share determinant sign {summary.at_infinity:+d}; degree {evidence.degree}",
        )
        assert cert.verify(f)
        return cert
    if f.n == 1:
        if classify_1d(f) == NOT_SURJECTIVE:
            return SurjectivityCertificate(
                CERTIFIED_NOT_SURJECTIVE,
                summary,
                note="in one dimension surjectivity holds iff both end slopes are nonzero with equal sign",
            )
    return SurjectivityCertificate(
        NOT_CERTIFIED,
        summary,
        note=f"orientation at infinity is {summary.at_infinity}; "
        "this does not imply the map fails to be surjective",
    )


def _strictly_inside(P, x) -> bool:
    return all(h.slack(x) > 0 for h in P.constraints)


def _singular_collision(f: PLFunction, budget: int):
    for k, sign in enumerate(f.cell_det_signs):
        if sign != 0:
            continue
        P = f.polyhedron(k)
        x = interior_point(P)
        d = kernel_basis(f.selection_of(k).A)[0]
        step = Fraction(1)
        for _ in range(budget):
            x2 = add(x, scale(step, d))
            if contains(P, x2):
                return x, x2
            step /= 2
    return None


def _fold_collision(f: PLFunction, budget: int):
    """Two points near a facet shared by cells of opposite orientation with equal image."""
    signs = f.cell_det_signs
    for k in range(len(f.cells)):
        if signs[k] == 0:
            continue
        P = f.polyhedron(k)
        sk = f.selection_of(k)
        for i, w in facet_witnesses(P):
            normal = P.constraints[i].normal
            for l in range(len(f.cells)):
                if l == k or signs[l] != -signs[k] or not contains(f.polyhedron(l), w):
                    continue
                Q = f.polyhedron(l)
                if not any(
                    g.slack(w) == 0 and _positive_multiple(normal, tuple(-v for v in g.normal)) is not None
                    for g in Q.constraints
                ):
                    continue
                sl = f.selection_of(l)
                eps = Fraction(1)
                for _ in range(budget):
                    x1 = sub(w, scale(eps, normal))
                    if _strictly_inside(P, x1):
                        x2 = matvec(sl.inverse, sub(sk(x1), sl.b))
                        if _strictly_inside(Q, x2):
                            return x1, x2
                    eps /= 2
    return None


def injectivity_falsifier(f: PLFunction, budget: int = 64, seed: RandomState = 0) -> Optional[Tuple[Vector, Vector]]:
    """Search for x1 != x2 with F(x1) == F(x2); None means nothing was found, not injectivity.

    Only runs when the map is not coherently oriented. Singular cells give
    collisions along a kernel direction; cells of opposite orientation across
    a common facet fold onto the same side of its image, which gives a
    collision close to the facet. Random regular values with two or more
    preimages are the fallback.
    """
    summary = orientation_summary(f)
    if summary.coherent:
        return None
    found = _singular_collision(f, budget) or _fold_collision(f, budget)
    if found is None:
        rng = check_random_state(seed)
        for _ in range(budget):
            _, pre = _sample(f, rng, 10, 64)
            if len(pre.points) >= 2:
                found = pre.points[0].x, pre.points[1].x
                break
    if found is not None:
        x1, x2 = found
        assert x1 != x2 and evaluate(f, x1) == evaluate(f, x2)
    return found


def classify_homeomorphism(f: PLFunction, trials: int = 50, seed: RandomState = 0) -> str:
    """homeomorphism iff coherently oriented with degree +1 or -1.

    Degree -1 is accepted as an orientation-reversing bijection.
    """
    require_validated(f)
    if coherent_sign(f) is None:
        return NOT_COHERENT
    degree = global_degree(f, trials, seed).degree
    if abs(degree) == 1:
        return HOMEOMORPHISM
    if abs(degree) >= 2:
        return NOT_INJECTIVE
    return UNDETERMINED
