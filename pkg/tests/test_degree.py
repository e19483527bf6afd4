import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import interval, one_d, ray_left, ray_right
from plcert.degree import (
    BOUNDARY_PREIMAGE,
    SINGULAR_CELL_HIT,
    IrregularValueError,
    NotCoherentError,
    SingularAtInfinityError,
    classify_regular,
    far_regular_value,
    global_degree,
    local_degree,
    preimage_count_profile,
    preimages,
    sample_regular_value,
)
from plcert.linalg import norm_inf
from plcert.oracle import (
    GenSpec1D,
    compose_linear,
    gen_1d,
    gen_fan_2d,
    identity_map,
    random_fan_spec,
    random_spec_1d,
)
from plcert.plfunction import bounded_image_radius, evaluate, validate

# Sector matrices of the 8-sector fold, written out by hand: sector k maps
# ray k to axis k mod 4 and ray k+1 to axis k+1 mod 4.
FOLD_TABLE = [
    ((1, 0), (1, 1), (1, 0), (0, 1)),
    ((1, 1), (0, 1), (0, 1), (-1, 0)),
    ((0, 1), (-1, 1), (-1, 0), (0, -1)),
    ((-1, 1), (-1, 0), (0, -1), (1, 0)),
    ((-1, 0), (-1, -1), (1, 0), (0, 1)),
    ((-1, -1), (0, -1), (0, 1), (-1, 0)),
    ((0, -1), (1, -1), (-1, 0), (0, -1)),
    ((1, -1), (1, 0), (0, -1), (1, 0)),
]


def fold_on_circle(theta):
    """Float evaluation of the fold on the unit-direction theta via barycentric sector coordinates."""
    d = (math.cos(theta), math.sin(theta))
    for r, s, u, v in FOLD_TABLE:
        det = r[0] * s[1] - r[1] * s[0]
        a = (d[0] * s[1] - d[1] * s[0]) / det
        b = (r[0] * d[1] - r[1] * d[0]) / det
        if a >= -1e-12 and b >= -1e-12:
            return (a * u[0] + b * v[0], a * u[1] + b * v[1])
    raise AssertionError("direction in no sector")


def angular_preimage_count(y, steps=20000):
    """Count directions whose image points along y (the fold is positively homogeneous)."""
    count = 0
    prev = None
    for i in range(steps + 1):
        w = fold_on_circle(2 * math.pi * i / steps)
        cross = w[0] * float(y[1]) - w[1] * float(y[0])
        along = w[0] * float(y[0]) + w[1] * float(y[1]) > 0
        if prev is not None and along and (cross == 0 or (cross > 0) != (prev > 0)):
            count += 1
        prev = cross
    return count


def test_preimage_examples(abs_map):
    pre = preimages(abs_map, (4,))
    assert sorted((p.x, p.det_sign) for p in pre.points) == [((-4,), -1), ((4,), 1)]
    assert len(preimages(abs_map, (-1,))) == 0


def test_fold_preimages_match_angular_oracle(fold8):
    y = sample_regular_value(fold8, seed=3, radius=5)
    assert angular_preimage_count(y) == 2
    pre = preimages(fold8, y)
    assert len(pre) == 2 and {p.det_sign for p in pre.points} == {1}
    for p in pre.points:
        assert evaluate(fold8, p.x) == y


def test_classify_regular_examples(abs_map):
    assert classify_regular(abs_map, (4,)).regular
    rep = classify_regular(abs_map, (0,))
    assert not rep.regular and rep.reasons[0][0] == BOUNDARY_PREIMAGE
    # x -> 0 on a middle cell: its solution set covers the whole cell
    f = one_d([(ray_left(0), 0), (interval(0, 1), 1), (ray_right(1), 2)], [(1, 0), (0, 0), (1, -1)])
    assert validate(f).ok
    rep = classify_regular(f, (0,))
    assert not rep.regular and (SINGULAR_CELL_HIT, 1) in rep.reasons


def test_singular_hyperplane_hit():
    from plcert.plfunction import Cell, PLFunction, Selection
    from plcert.polyhedra import HPolyhedron

    # (x1, x2) -> (x1, 0) for x2 <= 0 and (x1, x2) for x2 >= 0
    f = PLFunction(
        2,
        [Selection([[1, 0], [0, 0]], [0, 0]), Selection([[1, 0], [0, 1]], [0, 0])],
        [Cell(HPolyhedron.from_inequalities([[0, 1]], [0]), 0), Cell(HPolyhedron.from_inequalities([[0, -1]], [0]), 1)],
    )
    assert validate(f).ok
    rep = classify_regular(f, (3, 0))
    assert not rep.regular and (SINGULAR_CELL_HIT, 0) in rep.reasons
    assert classify_regular(f, (3, 1)).regular


def test_local_degree_examples(abs_map, fold8):
    assert local_degree(abs_map, (4,)) == 0
    assert local_degree(identity_map(2), (F(5, 3), -7)) == 1
    y = sample_regular_value(fold8, seed=11, radius=3)
    assert local_degree(fold8, y) == angular_preimage_count(y) == 2
    with pytest.raises(IrregularValueError) as err:
        local_degree(abs_map, (0,))
    assert not err.value.report.regular


def test_sample_regular_value_examples(abs_map, half_fold):
    ident = identity_map(2)
    assert sample_regular_value(ident, seed=5) == sample_regular_value(ident, seed=5)
    for seed in range(10):
        y = sample_regular_value(abs_map, seed=seed, radius=10)
        assert y != (0,) and classify_regular(abs_map, y).regular
    # image of the half fold is x1 >= 0; a value with x1 < 0 is regular with no preimages
    y = sample_regular_value(half_fold, seed=1, radius=F(1, 2), center=(-5, 0))
    assert y[0] < 0 and len(preimages(half_fold, y)) == 0 and local_degree(half_fold, y) == 0


def test_far_regular_value_examples(fold8):
    y, rep = far_regular_value(identity_map(2))
    assert rep.regular
    zig = gen_1d(GenSpec1D([0, 1], [1, -1, 1], 0))
    # breakpoint images 0 and 1, so the bounded part maps onto [0, 1]
    assert bounded_image_radius(zig) == 1
    y, rep = far_regular_value(zig)
    assert abs(y[0]) > 1 and rep.regular
    pre = preimages(zig, y)
    assert len(pre) == 1 and not zig.cell_bounded[pre.points[0].cell]
    y, rep = far_regular_value(fold8)
    assert rep.regular and angular_preimage_count(y) == 2


def test_far_value_requires_nonsingular_at_infinity():
    f = gen_1d(GenSpec1D([0], [1, 0], 0))
    with pytest.raises(SingularAtInfinityError) as err:
        far_regular_value(f)
    assert err.value.cell == 1


def test_global_degree_examples(abs_map, fold8):
    ev = global_degree(identity_map(2), trials=10)
    assert ev.degree == 1 and all(c == 1 and s == 1 for _, c, s in ev.samples)
    ev = global_degree(abs_map, trials=10)
    assert ev.degree == 0 and all(s == 0 for _, _, s in ev.samples)
    assert global_degree(fold8, trials=10).degree == 2


def test_preimage_count_profile(fold8, abs_map):
    assert {c for _, c in preimage_count_profile(identity_map(2), trials=5)} == {1}
    assert {c for _, c in preimage_count_profile(fold8, trials=10)} == {2}
    inc = gen_1d(GenSpec1D([0, 1, 3], [2, F(1, 3), 5, 1], 0))
    assert {c for _, c in preimage_count_profile(inc, trials=10)} == {1}
    with pytest.raises(NotCoherentError):
        preimage_count_profile(abs_map)


def test_degree_is_deterministic(fold8):
    assert global_degree(fold8, 5, seed=9) == global_degree(fold8, 5, seed=9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_preimage_soundness_and_1d_completeness(seed):
    f = gen_1d(random_spec_1d(seed, max_breakpoints=8))
    y = (F(seed % 41 - 20, 3),)
    pre = preimages(f, y)
    for p in pre.points:
        assert evaluate(f, p.x) == y
    # completeness oracle: scan every cell interval endpoint pair for a sign change of F - y
    bps = sorted({h.offset / h.normal[0] for c in f.cells for h in c.polyhedron.constraints})
    knots = [bps[0] - 1000] + bps + [bps[-1] + 1000]
    roots = set()
    for a, b in zip(knots, knots[1:]):
        fa, fb = evaluate(f, (a,))[0] - y[0], evaluate(f, (b,))[0] - y[0]
        if fa == 0:
            roots.add(a)
        if fb == 0:
            roots.add(b)
        if fa * fb < 0:
            roots.add(a + (b - a) * fa / (fa - fb))
    if not pre.singular_hits:
        assert roots == {p.x[0] for p in pre.points}


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10_000))
def test_degree_invariance_over_many_values(seed):
    f = gen_fan_2d(random_fan_spec(seed, capped=True, degree=1 + seed % 2))
    ev = global_degree(f, trials=50, seed=seed)
    assert len({s for _, _, s in ev.samples}) == 1
    assert ev.degree == 1 + seed % 2


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_swapping_outputs_negates_degree(seed):
    f = gen_fan_2d(random_fan_spec(seed, mixed=seed % 3 == 0))
    g = compose_linear(f, [[0, 1], [1, 0]], side="after")
    assert global_degree(g, 10, seed).degree == -global_degree(f, 10, seed).degree


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_empty_preimage_has_degree_zero(seed):
    f = gen_1d(random_spec_1d(seed, max_breakpoints=6))
    y = sample_regular_value(f, seed, radius=200)
    if not preimages(f, y).points:
        assert local_degree(f, y) == 0


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_coherent_counts_constant(seed):
    f = gen_fan_2d(random_fan_spec(seed, degree=1 + seed % 3, orientation=1 if seed % 2 else -1))
    profile = preimage_count_profile(f, trials=20, seed=seed)
    assert {c for _, c in profile} == {1 + seed % 3}
    assert norm_inf(profile[0][0]) > 0
