"""Exact two-phase feasibility via the simplex method with Bland's rule."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def feasible_point(
    A_eq: Sequence[Sequence], b_eq: Sequence, A_ub: Sequence[Sequence], b_ub: Sequence, nvars: int
) -> list[Fraction] | None:
    """Find free ``x`` with ``A_eq x = b_eq`` and ``A_ub x <= b_ub``.

    Returns ``None`` when the system is infeasible.  Phase one minimizes the
    sum of artificial variables over the standard form
    ``x = x+ - x-``, ``A_ub x + s = b_ub``.
    """
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    n_ub = len(A_ub)
    # columns: x+ (nvars), x- (nvars), slacks (n_ub), artificials (one per row)
    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        r = [Fraction(x) for x in a] + [Fraction(-x) for x in a] + [Fraction(int(j == k)) for j in range(n_ub)]
        rows.append(r)
        rhs.append(Fraction(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([Fraction(x) for x in a] + [Fraction(-x) for x in a] + [Fraction(0)] * n_ub)
        rhs.append(Fraction(b))
    m = len(rows)
    if m == 0:
        return [Fraction(0)] * nvars
    base_cols = 2 * nvars + n_ub
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
        rows[i] += [Fraction(int(j == i)) for j in range(m)]
    ncols = base_cols + m
    basis = [base_cols + i for i in range(m)]
    # phase-one objective row: reduced costs of minimizing sum of artificials
    cost = [Fraction(0)] * ncols
    for j in range(base_cols):
        cost[j] = -sum((rows[i][j] for i in range(m)), Fraction(0))
    obj = -sum(rhs, Fraction(0))

    while True:
        enter = next((j for j in range(ncols) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            break  # unbounded direction; cannot happen for phase one
        piv = rows[leave][enter]
        prow = [x / piv for x in rows[leave]]
        prhs = rhs[leave] / piv
        rows[leave], rhs[leave] = prow, prhs
        nz = [j for j, x in enumerate(prow) if x]
        for i in range(m):
            if i != leave:
                f = rows[i][enter]
                if f:
                    r = rows[i]
                    for j in nz:
                        r[j] -= f * prow[j]
                    rhs[i] -= f * prhs
        f = cost[enter]
        for j in nz:
            cost[j] -= f * prow[j]
        obj -= f * prhs
        basis[leave] = enter

    if obj != 0:
        return None
    values = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        values[b] = rhs[i]
    return [values[j] - values[nvars + j] for j in range(nvars)]
