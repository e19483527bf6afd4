"""Exact two-phase primal simplex over the rationals.

Problems have the form::

    maximize  c . x
    subject to A_ub x <= b_ub,  A_eq x = b_eq,  x free

Free variables are split as ``x = x+ - x-``. Pivoting follows Bland's rule,
so the method terminates on degenerate problems without any tolerance.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .linalg import ZERO, DimensionError, Vector, dot

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LPResult:
    """Outcome of a linear program.

    ``witness`` is the optimal point when ``status == "optimal"`` and an
    improving ray of the feasible region when ``status == "unbounded"``.
    """

    status: str
    optimum: Optional[Fraction] = None
    witness: Optional[Vector] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _pivot(T, rhs, basis, r, j):
    piv = T[r][j]
    row = [v / piv for v in T[r]]
    T[r] = row
    rhs[r] = rhs[r] / piv
    for i in range(len(T)):
        if i == r:
            continue
        f = T[i][j]
        if f:
            T[i] = [a - f * b if b else a for a, b in zip(T[i], row)]
            rhs[i] -= f * rhs[r]
    basis[r] = j


def _run(T, rhs, basis, cost):
    """Bland-rule simplex iterations. Returns (status, entering column)."""
    m = len(T)
    ncols = len(cost)
    while True:
        cb = [cost[b] for b in basis]
        basic = set(basis)
        enter = None
        for j in range(ncols):
            if j in basic:
                continue
            r = cost[j]
            for i in range(m):
                a = T[i][j]
                if a and cb[i]:
                    r -= cb[i] * a
            if r > 0:
                enter = j
                break
        if enter is None:
            return OPTIMAL, None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                key = (rhs[i] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return UNBOUNDED, enter
        _pivot(T, rhs, basis, best[1], enter)


def maximize(
    c: Sequence[Fraction],
    A_ub: Sequence[Sequence[Fraction]] = (),
    b_ub: Sequence[Fraction] = (),
    A_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> LPResult:
    n = len(c)
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise DimensionError("constraint rows and right-hand sides differ in length")
    if any(len(a) != n for a in A_ub) or any(len(a) != n for a in A_eq):
        raise DimensionError(f"constraint rows must have length {n}")

    m_ub = len(A_ub)
    n_struct = 2 * n + m_ub
    T: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    needs_art = []
    for i, (a, b) in enumerate(zip(A_ub, b_ub)):
        row = list(a) + [-v for v in a] + [ZERO] * m_ub
        row[2 * n + i] = Fraction(1)
        b = Fraction(b)
        if b < 0:
            row = [-v for v in row]
            b = -b
            needs_art.append(True)
        else:
            needs_art.append(False)
        T.append(row)
        rhs.append(b)
    for a, b in zip(A_eq, b_eq):
        row = list(a) + [-v for v in a] + [ZERO] * m_ub
        b = Fraction(b)
        if b < 0:
            row = [-v for v in row]
            b = -b
        T.append(row)
        rhs.append(b)
        needs_art.append(True)

    art_rows = [i for i, need in enumerate(needs_art) if need]
    n_art = len(art_rows)
    basis = []
    art_col = {}
    for k, i in enumerate(art_rows):
        art_col[i] = n_struct + k
    for i, row in enumerate(T):
        row.extend([ZERO] * n_art)
        if i in art_col:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            basis.append(2 * n + i)

    if n_art:
        cost1 = [ZERO] * n_struct + [Fraction(-1)] * n_art
        _run(T, rhs, basis, cost1)
        infeas = sum((rhs[i] for i, b in enumerate(basis) if b >= n_struct), ZERO)
        if infeas > 0:
            return LPResult(INFEASIBLE)
        keep = []
        for i in range(len(T)):
            if basis[i] >= n_struct:
                j = next((j for j in range(n_struct) if T[i][j] != 0), None)
                if j is None:
                    continue  # redundant equality row
                _pivot(T, rhs, basis, i, j)
            keep.append(i)
        T = [T[i][:n_struct] for i in keep]
        rhs = [rhs[i] for i in keep]
        basis = [basis[i] for i in keep]

    c = [Fraction(v) for v in c]
    cost2 = c + [-v for v in c] + [ZERO] * m_ub
    status, enter = _run(T, rhs, basis, cost2)
    if status == UNBOUNDED:
        dz = [ZERO] * n_struct
        dz[enter] = Fraction(1)
        for i, b in enumerate(basis):
            dz[b] = -T[i][enter]
        ray = tuple(dz[k] - dz[n + k] for k in range(n))
        if __debug__:
            assert dot(c, ray) > 0
            assert all(dot(a, ray) <= 0 for a in A_ub)
            assert all(dot(a, ray) == 0 for a in A_eq)
        return LPResult(UNBOUNDED, None, ray)
    z = [ZERO] * n_struct
    for i, b in enumerate(basis):
        z[b] = rhs[i]
    x = tuple(z[k] - z[n + k] for k in range(n))
    if __debug__:
        assert all(dot(a, x) <= b for a, b in zip(A_ub, b_ub))
        assert all(dot(a, x) == b for a, b in zip(A_eq, b_eq))
    return LPResult(OPTIMAL, dot(c, x), x)


def minimize(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()) -> LPResult:
    res = maximize([-Fraction(v) for v in c], A_ub, b_ub, A_eq, b_eq)
    if res.status == OPTIMAL:
        return LPResult(OPTIMAL, -res.optimum, res.witness)
    return res


def feasible_point(n: int, A_ub=(), b_ub=(), A_eq=(), b_eq=()) -> Optional[Vector]:
    res = maximize([ZERO] * n, A_ub, b_ub, A_eq, b_eq)
    return res.witness if res.status == OPTIMAL else None
