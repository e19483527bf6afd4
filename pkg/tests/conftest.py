from fractions import Fraction as F

import pytest

from plcert.oracle import GenSpec1D, folding_map_spec, gen_1d, gen_fan_2d, identity_map, orthant_map
from plcert.plfunction import Cell, PLFunction, Selection
from plcert.polyhedra import HPolyhedron

ACCEPTANCE_LINES = []


def ray_left(hi):
    return HPolyhedron.from_inequalities([[1]], [hi])


def ray_right(lo):
    return HPolyhedron.from_inequalities([[-1]], [-lo])


def interval(lo, hi):
    return HPolyhedron.from_inequalities([[1], [-1]], [hi, -lo])


def one_d(cells, selections):
    """Unvalidated 1D map from (polyhedron, selection index) pairs and (slope, intercept) pairs."""
    sels = [Selection([[a]], [b]) for a, b in selections]
    return PLFunction(1, sels, [Cell(P, s) for P, s in cells])


@pytest.fixture
def abs_map():
    return gen_1d(GenSpec1D([0], [-1, 1], 0))


@pytest.fixture
def identity2():
    return identity_map(2)


@pytest.fixture
def fold8():
    return gen_fan_2d(folding_map_spec())


@pytest.fixture
def half_fold():
    """(x1, x2) -> (|x1|, x2) on two halfplanes."""
    return _half_fold()


def _half_fold():
    from plcert.plfunction import validate

    f = PLFunction(
        2,
        [Selection([[-1, 0], [0, 1]], [0, 0]), Selection([[1, 0], [0, 1]], [0, 0])],
        [
            Cell(HPolyhedron.from_inequalities([[1, 0]], [0]), 0),
            Cell(HPolyhedron.from_inequalities([[-1, 0]], [0]), 1),
        ],
    )
    assert validate(f).ok
    return f


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
