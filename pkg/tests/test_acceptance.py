"""Acceptance gate: ten criteria, one pass/fail line each.

Run with ``pytest -m acceptance -s`` to see the lines as they are produced;
they are also repeated in the terminal summary.

Every test in this module runs under exact-substitution checks (criterion
10): each LP result and each preimage set produced anywhere in the library
is re-verified when it is created.
"""
from fractions import Fraction as F

import pytest

import plcert.certify
import plcert.degree
import plcert.oracle
from conftest import ACCEPTANCE_LINES, interval, one_d, ray_left, ray_right
from plcert import lp, polyhedra
from plcert.certify import (
    CERTIFIED_SURJECTIVE,
    HOMEOMORPHISM,
    NOT_INJECTIVE,
    SURJECTIVE,
    certify_surjective,
    classify_1d,
    classify_homeomorphism,
    injectivity_falsifier,
)
from plcert.degree import (
    SingularAtInfinityError,
    check_nonsingular_at_infinity,
    far_regular_value,
    global_degree,
    local_degree,
    preimage_count_profile,
    preimages,
    sample_regular_value,
)
from plcert.linalg import dot, norm_inf
from plcert.oracle import (
    GenSpec1D,
    capped_box_identity,
    compose_linear,
    folding_map_spec,
    gen_1d,
    gen_fan_2d,
    grid_surjectivity_oracle,
    identity_map,
    orthant_map,
    perturb_bounded,
    random_fan_spec,
    random_spec_1d,
)
from plcert.plfunction import (
    DISCONTINUITY,
    EMPTY_CELL,
    LOWER_DIMENSIONAL_CELL,
    OVERLAP,
    UNPAIRED_FACET,
    Cell,
    PLFunction,
    Selection,
    bounded_image_radius,
    evaluate,
    validate,
)
from plcert.polyhedra import HPolyhedron, contains, interior_point, is_empty

pytestmark = pytest.mark.acceptance


# criterion 10 machinery --------------------------------------------------


class ExactnessLedger:
    def __init__(self):
        self.lp_checks = 0
        self.preimage_checks = 0
        self.collision_checks = 0
        self.failures = []

    def fail(self, what):
        self.failures.append(what)

    @property
    def total(self):
        return self.lp_checks + self.preimage_checks + self.collision_checks


LEDGER = ExactnessLedger()


def _check_lp(res, c, A_ub, b_ub, A_eq, b_eq):
    if res.status == lp.OPTIMAL:
        x = res.witness
        ok = all(dot(a, x) <= b for a, b in zip(A_ub, b_ub)) and all(dot(a, x) == b for a, b in zip(A_eq, b_eq))
        ok = ok and dot(c, x) == res.optimum
    elif res.status == lp.UNBOUNDED:
        r = res.witness
        ok = all(dot(a, r) <= 0 for a in A_ub) and all(dot(a, r) == 0 for a in A_eq) and dot(c, r) > 0
    else:
        return
    LEDGER.lp_checks += 1
    if not ok:
        LEDGER.fail(("lp", res))


def _check_preimages(f, y, pre):
    y = pre.target
    for p in pre.points:
        LEDGER.preimage_checks += 1
        ok = all(contains(f.polyhedron(k), p.x) and f.selection_of(k)(p.x) == y for k in p.cells)
        if not ok or evaluate(f, p.x) != y:
            LEDGER.fail(("preimage", y, p.x))


def check_collision(f, found):
    x1, x2 = found
    LEDGER.collision_checks += 1
    ok = x1 != x2 and evaluate(f, x1) == evaluate(f, x2)
    if not ok:
        LEDGER.fail(("collision", x1, x2))
    return ok


@pytest.fixture(autouse=True, scope="module")
def exact_substitution():
    mp = pytest.MonkeyPatch()
    real_max = lp.maximize
    real_pre = plcert.degree.preimages

    def maximize(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
        res = real_max(c, A_ub, b_ub, A_eq, b_eq)
        _check_lp(res, [F(v) for v in c], A_ub, b_ub, A_eq, b_eq)
        return res

    def checked_preimages(f, y):
        pre = real_pre(f, y)
        _check_preimages(f, y, pre)
        return pre

    mp.setattr(lp, "maximize", maximize)
    for mod in (plcert.degree, plcert.certify, plcert.oracle):
        mp.setattr(mod, "preimages", checked_preimages)
    mp.delenv("PLCERT_THREADS", raising=False)  # worker processes would bypass the wrappers
    for cached in (polyhedra.interior_point, polyhedra.recession_direction, polyhedra.is_bounded,
                   polyhedra.facet_witnesses):
        cached.cache_clear()
    yield
    mp.undo()


def record(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# corpora -------------------------------------------------------------------


def corpus():
    """(name, map) pairs covering every generator family used by the library."""
    out = [("abs", gen_1d(GenSpec1D([0], [-1, 1], 0))), ("fold8", gen_fan_2d(folding_map_spec())),
           ("fold8-capped", gen_fan_2d(folding_map_spec(capped=True))), ("box", capped_box_identity(2))]
    for s in range(20):
        out.append((f"1d-{s}", gen_1d(random_spec_1d(s, zero_end_prob=0))))
    for s in range(12):
        out.append((f"fan-{s}", gen_fan_2d(random_fan_spec(s, degree=1 + s % 3, orientation=(-1) ** s))))
    for s in range(6):
        f = gen_fan_2d(random_fan_spec(100 + s, degree=1 + s % 2, capped=True))
        out.append((f"capped-{s}", f))
        out.append((f"perturbed-{s}", perturb_bounded(f, s)))
    for s in range(6):
        out.append((f"mixed-{s}", gen_fan_2d(random_fan_spec(200 + s, mixed=True, capped=s % 2 == 1))))
    for signs in ((1, 1, 1), (0, 1, 1), (0, 0, 1), (1, 0, 0)):
        out.append((f"orthant-{signs}", orthant_map(signs)))
    return out


def nonsingular_corpus():
    out = []
    for name, f in corpus():
        try:
            check_nonsingular_at_infinity(f)
        except SingularAtInfinityError:
            continue
        out.append((name, f))
    return out


# criteria -------------------------------------------------------------------


def test_criterion_01_one_dimensional_iff():
    # Breakpoint values of the generator lie in [-10, 10], so a map that is
    # not onto misses one end of [-50, 50] and the box verdict is the truth.
    box = [(F(-50), F(50))]
    disagree = []
    for seed in range(200):
        f = gen_1d(random_spec_1d(seed, max_breakpoints=20))
        report = grid_surjectivity_oracle(f, box, F(1, 4))
        if (classify_1d(f) == SURJECTIVE) != report.surjective_on_box:
            disagree.append(seed)
    record(1, "1D iff criterion vs grid oracle", not disagree, f"200 instances, {len(disagree)} disagreements {disagree}")


def test_criterion_02_degree_invariance():
    mismatches, checked = [], 0
    for name, f in nonsingular_corpus():
        y_far, _ = far_regular_value(f, seed=1)
        d = local_degree(f, y_far)
        radius = max(F(10), norm_inf(y_far) + 1)
        for s in range(50):
            y = sample_regular_value(f, seed=s, radius=radius)
            checked += 1
            if local_degree(f, y) != d:
                mismatches.append((name, y))
    record(2, "degree is the same at every regular value", not mismatches,
           f"{len(nonsingular_corpus())} instances, {checked} sampled values plus far values, {len(mismatches)} mismatches")


def test_criterion_03_far_regular_value():
    failures, n = [], 0
    for name, f in nonsingular_corpus():
        n += 1
        y, report = far_regular_value(f, seed=3)
        pre = preimages(f, y)
        ok = report.regular and pre.points and norm_inf(y) > bounded_image_radius(f)
        ok = ok and all(not f.cell_bounded[k] for p in pre.points for k in p.cells)
        if not ok:
            failures.append(name)
    record(3, "far regular value postconditions", not failures, f"{n} instances, {len(failures)} failures {failures}")


def coherent_instances():
    out = []
    for s in range(100):
        kind = s % 4
        spec = random_fan_spec(300 + s, degree=1 + s % 3, orientation=1 if s % 5 else -1, capped=kind >= 2)
        f = gen_fan_2d(spec)
        if kind == 3:
            f = perturb_bounded(f, s)
        out.append(f)
    return out


def test_criterion_04_coherent_maps_are_onto():
    bad = []
    for i, f in enumerate(coherent_instances()):
        cert = certify_surjective(f, trials=20, seed=i)
        report = grid_surjectivity_oracle(f, [(-4, 4)] * 2, F(1, 2))
        if cert.verdict != CERTIFIED_SURJECTIVE or not cert.verify(f) or report.uncovered_targets:
            bad.append(i)
    record(4, "coherent at infinity => certified and grid-covered", not bad,
           f"100 instances, grid [-4,4]^2 step 1/2, {len(bad)} failures {bad}")


def test_criterion_05_bounded_behaviour_is_irrelevant():
    changes = []
    for s in range(100):
        if s % 2:
            # at least two breakpoints, so there is a bounded interval to change
            f = gen_1d(next(spec for t in range(400 + s, 10**6, 100)
                            if len((spec := random_spec_1d(t, max_breakpoints=10)).breakpoints) >= 2))
        else:
            f = gen_fan_2d(random_fan_spec(400 + s, degree=1 + s % 3, orientation=(-1) ** (s // 2), capped=True))
        g = perturb_bounded(f, s)
        assert g is not f
        vf, vg = certify_surjective(f, 10, s), certify_surjective(g, 10, s)
        df = vf.degree_evidence.degree if vf.degree_evidence else None
        dg = vg.degree_evidence.degree if vg.degree_evidence else None
        if f.n == 1:
            try:
                df, dg = global_degree(f, 10, s).degree, global_degree(g, 10, s).degree
            except SingularAtInfinityError:
                pass
        if vf.verdict != vg.verdict or df != dg:
            changes.append(s)
    record(5, "perturbing bounded cells keeps verdict and degree", not changes, f"100 instances, {len(changes)} changes {changes}")


def test_criterion_06_equal_preimage_counts():
    fold = gen_fan_2d(folding_map_spec())
    counts = set()
    for s in range(100):
        y = sample_regular_value(fold, seed=s, radius=10)
        counts.add((len(preimages(fold, y)), local_degree(fold, y)))
    degree = global_degree(fold, 20).degree
    mono = set()
    for s in range(30):
        spec = random_spec_1d(500 + s, max_breakpoints=12)
        sign = 1 if s % 2 else -1
        spec = GenSpec1D(spec.breakpoints, [sign * (abs(a) + 1) for a in spec.slopes], spec.intercept)
        mono |= {c for _, c in preimage_count_profile(gen_1d(spec), trials=20, seed=s)}
    ok = counts == {(2, 2)} and degree == 2 and mono == {1}
    record(6, "constant preimage counts", ok,
           f"fold: 100 values, (count, degree) pairs {sorted(counts)}, degree {degree}; monotone 1D counts {sorted(mono)}")


def test_criterion_07_falsifier_on_mixed_maps():
    found, bad = 0, 0
    for s in range(50):
        f = gen_fan_2d(random_fan_spec(600 + s, mixed=True, capped=s % 2 == 1))
        hit = injectivity_falsifier(f, budget=64, seed=s)
        if hit is not None:
            found += 1
            bad += not check_collision(f, hit)
    record(7, "falsifier on mixed orientation", found >= 48 and bad == 0,
           f"{found}/50 collisions found (need >= 48), {bad} failed verification")


def test_criterion_08_homeomorphisms():
    like_identity = [identity_map(1), identity_map(2), identity_map(3), capped_box_identity(),
                     compose_linear(identity_map(2), [[0, 1], [1, 0]]), gen_1d(GenSpec1D([0, 1], [2, F(1, 3), 5], 0))]
    for s in range(10):
        like_identity.append(gen_fan_2d(random_fan_spec(700 + s, degree=1, orientation=(-1) ** s, capped=s % 2 == 1)))
    wrong = []
    for i, f in enumerate(like_identity):
        verdict = classify_homeomorphism(f, 20, i)
        counts = {c for _, c in preimage_count_profile(f, trials=20, seed=i)}
        if verdict != HOMEOMORPHISM or counts != {1}:
            wrong.append(i)
    fold_verdict = classify_homeomorphism(gen_fan_2d(folding_map_spec()))
    record(8, "homeomorphism classification", not wrong and fold_verdict == NOT_INJECTIVE,
           f"{len(like_identity)} degree +-1 maps, {len(wrong)} misclassified; fold8 -> {fold_verdict}")


def _fixtures():
    quad = lambda sx, sy: HPolyhedron.from_inequalities([[-sx, 0], [0, -sy]], [0, 0])  # noqa: E731
    ident = Selection([[1, 0], [0, 1]], [0, 0])
    return {
        OVERLAP: PLFunction(2, [ident], [Cell(HPolyhedron.from_inequalities([[1, 0]], [1]), 0),
                                         Cell(HPolyhedron.from_inequalities([[-1, 0]], [0]), 0)]),
        UNPAIRED_FACET: one_d([(ray_left(0), 0), (ray_right(1), 1)], [(-1, 0), (1, 0)]),
        DISCONTINUITY: one_d([(ray_left(0), 0), (ray_right(0), 1)], [(-1, 0), (1, 1)]),
        EMPTY_CELL: one_d([(ray_left(0), 0), (ray_right(0), 1), (interval(2, 1), 0)], [(-1, 0), (1, 0)]),
        LOWER_DIMENSIONAL_CELL: PLFunction(2, [ident], [Cell(quad(sx, sy), 0) for sx in (1, -1) for sy in (1, -1)]
                                           + [Cell(HPolyhedron.from_inequalities([[0, 1], [0, -1]], [0, 0]), 0)]),
    }


def _witness_ok(kind, f, v):
    P = [f.polyhedron(k) for k in v.cells]
    if kind == OVERLAP:
        return all(h.slack(v.witness) > 0 for Q in P for h in Q.constraints)
    if kind == UNPAIRED_FACET:
        (Q,) = P
        h = Q.constraints[v.facet]
        beyond = tuple(x + F(1, 1000) * a for x, a in zip(v.witness, h.normal))
        return h.slack(v.witness) == 0 and contains(Q, v.witness) and not any(
            contains(f.polyhedron(k), beyond) for k in range(len(f.cells)))
    if kind == DISCONTINUITY:
        a, b = (f.selection_of(k)(v.witness) for k in v.cells)
        return all(contains(Q, v.witness) for Q in P) and a != b
    if kind == EMPTY_CELL:
        return all(is_empty(Q) for Q in P)
    if kind == LOWER_DIMENSIONAL_CELL:
        return all(contains(Q, v.witness) and interior_point(Q) is None for Q in P)
    return False


def test_criterion_09_validation_fixtures():
    bad = []
    for kind, f in _fixtures().items():
        report = validate(f)
        if report.kinds() != {kind} or not all(_witness_ok(kind, f, v) for v in report.violations) or f.validated:
            bad.append(kind)
    record(9, "validation fixtures", not bad, f"{len(_fixtures())} fixtures, wrong finding or witness for {bad}")


def test_criterion_10_exact_substitution():
    if LEDGER.total == 0:
        # run on its own: exercise the other suites first
        for name, test in sorted(globals().items()):
            if name.startswith("test_criterion_0"):
                test()
    record(10, "exact re-verification", not LEDGER.failures and LEDGER.total > 0,
           f"{LEDGER.lp_checks} LP results, {LEDGER.preimage_checks} preimage points, "
           f"{LEDGER.collision_checks} collisions checked; {len(LEDGER.failures)} failures")
