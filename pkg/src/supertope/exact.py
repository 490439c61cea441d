"""Exact integer and rational linear algebra.

Matrices are plain lists of rows.  Entries may be ``int`` or
``fractions.Fraction``; results are always exact.  Integer inputs go through
fraction-free (Bareiss) elimination, rational inputs through ordinary
Gauss-Jordan elimination over ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import InputError

Matrix = Sequence[Sequence]


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, bool):
        raise InputError(f"boolean is not a rational number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    # numpy integer scalars and the like
    try:
        as_int = int(x)
    except (TypeError, ValueError):
        raise InputError(f"not an exact number: {x!r}") from None
    if as_int != x:
        raise InputError(f"non-integral float {x!r}; pass a Fraction or a 'p/q' string")
    return Fraction(as_int)


def rat_matrix(M: Matrix) -> list[list[Fraction]]:
    rows = [[to_fraction(x) for x in row] for row in M]
    if not rows or not rows[0]:
        raise InputError("matrix must be nonempty")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("ragged matrix")
    return rows


def _is_integral(rows) -> bool:
    return all(x.denominator == 1 for r in rows for x in r)


def _clear_row_denominators(rows: list[list[Fraction]]) -> list[list[int]]:
    # row scaling preserves rank and nullspace
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def _bareiss_echelon(A: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix (modified in place)."""
    m, n = len(A), len(A[0])
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
        pr = A[r]
        piv = pr[c]
        for i in range(r + 1, m):
            row = A[i]
            a = row[c]
            if a == 0:
                if piv != prev:
                    for j in range(c + 1, n):
                        row[j] = row[j] * piv // prev
                continue
            for j in range(c + 1, n):
                row[j] = (row[j] * piv - a * pr[j]) // prev
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return A, pivots


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    A = [r[:] for r in rows]
    m, n = len(A), len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _canonical_basis(vectors: list[list[Fraction]]) -> list[list[Fraction]]:
    # RREF of a spanning set is unique: leading entry 1, ordered by leading position
    if not vectors:
        return []
    basis, _ = _rref(vectors)
    return basis


def rank_nullspace(M: Matrix) -> tuple[int, list[list[Fraction]]]:
    """Rank and canonical nullspace basis of ``M`` (right kernel, ``M v = 0``).

    The basis is the reduced row echelon form of the kernel: each row has
    leading coefficient 1 and rows are ordered by the position of that
    coefficient.  This makes the basis unique for a given kernel.
    """
    rows = rat_matrix(M)
    ncols = len(rows[0])
    A = _clear_row_denominators(rows)
    E, pivots = _bareiss_echelon(A)
    rank = len(pivots)
    free = [c for c in range(ncols) if c not in set(pivots)]
    if not free:
        return rank, []
    # back-substitution on the fraction-free echelon rows
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i in range(rank - 1, -1, -1):
            pc = pivots[i]
            row = E[i]
            s = sum((row[j] * v[j] for j in range(pc + 1, ncols) if row[j] and v[j]), Fraction(0))
            v[pc] = -s / row[pc]
        basis.append(v)
    return rank, _canonical_basis(basis)


def rank(M: Matrix) -> int:
    return rank_nullspace(M)[0]


def det_exact(M: Matrix) -> Fraction:
    rows = rat_matrix(M)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError(f"determinant of a non-square {n}x{len(rows[0])} matrix")
    if _is_integral(rows):
        return Fraction(bareiss_det([[int(x) for x in r] for r in rows]))
    A = [r[:] for r in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


def bareiss_det(M: Sequence[Sequence[int]]) -> int:
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def matmul(A: Matrix, B: Matrix) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def transpose(A: Matrix) -> list[list]:
    return [list(c) for c in zip(*A)]


def is_symmetric(S: Matrix) -> bool:
    n = len(S)
    return all(len(r) == n for r in S) and all(S[i][j] == S[j][i] for i in range(n) for j in range(i))


def ldlt(S: Matrix, order: Sequence[int] | None = None) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Exact LDL^T of ``S`` with rows/columns taken in ``order``.

    Returns ``(D, L)`` with ``L`` unit lower triangular in the permuted
    indexing.  Stops at the first non-positive pivot; the pivot list then has
    fewer than ``n`` entries and ends with that pivot.
    """
    n = len(S)
    order = list(range(n)) if order is None else list(order)
    A = [[to_fraction(S[order[i]][order[j]]) for j in range(n)] for i in range(n)]
    D: list[Fraction] = []
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        d = A[k][k]
        D.append(d)
        if d <= 0:
            break
        for i in range(k + 1, n):
            L[i][k] = A[i][k] / d
        for i in range(k + 1, n):
            lik = L[i][k]
            if lik:
                for j in range(k + 1, i + 1):
                    A[i][j] -= lik * A[k][j]
                    A[j][i] = A[i][j]
    return D, L


def ldlt_pd_check(S: Matrix) -> tuple[bool, list[Fraction]]:
    rows = rat_matrix(S)
    if len(rows) != len(rows[0]):
        raise InputError("positive-definiteness check needs a square matrix")
    if not is_symmetric(rows):
        raise InputError("positive-definiteness check needs a symmetric matrix")
    D, _ = ldlt(rows)
    return len(D) == len(rows) and all(d > 0 for d in D), D


def pivoted_ldlt(S: Matrix) -> tuple[list[int], list[Fraction], list[list[Fraction]]]:
    """LDL^T with greedy diagonal pivoting: at each step the largest remaining
    Schur-complement diagonal entry is eliminated next.  Ties go to the lower
    original index.  ``S`` must be positive definite."""
    n = len(S)
    A = [[to_fraction(x) for x in r] for r in S]
    remaining = list(range(n))
    order: list[int] = []
    D: list[Fraction] = []
    # L columns in original indexing, filled as we go
    cols: list[dict[int, Fraction]] = []
    for _ in range(n):
        k = max(remaining, key=lambda i: (A[i][i], -i))
        d = A[k][k]
        if d <= 0:
            raise InputError("matrix is not positive definite")
        remaining.remove(k)
        col = {i: A[i][k] / d for i in remaining}
        for i in remaining:
            if col[i]:
                for j in remaining:
                    A[i][j] -= col[i] * A[k][j]
        order.append(k)
        D.append(d)
        cols.append(col)
    L = [[Fraction(0)] * n for _ in range(n)]
    pos = {v: p for p, v in enumerate(order)}
    for p, col in enumerate(cols):
        L[p][p] = Fraction(1)
        for i, v in col.items():
            L[pos[i]][p] = v
    return order, D, L


def solve(A: Matrix, b: Sequence) -> list[Fraction]:
    """Solve the square nonsingular system ``A x = b`` exactly."""
    rows = rat_matrix(A)
    n = len(rows)
    aug = [r + [to_fraction(v)] for r, v in zip(rows, b)]
    red, pivots = _rref(aug)
    if pivots != list(range(n)):
        raise InputError("singular system")
    return [red[i][n] for i in range(n)]


def inverse(A: Matrix) -> list[list[Fraction]]:
    rows = rat_matrix(A)
    n = len(rows)
    aug = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = _rref(aug)
    if pivots != list(range(n)):
        raise InputError("singular matrix")
    return [r[n:] for r in red]


# ---------------------------------------------------------------- lattices


@dataclass(frozen=True)
class SubLattice:
    """Integer row lattice with its Hermite normal form.

    ``hnf`` rows form a basis; row ``i`` has its leading (pivot) entry at
    ``pivots[i]``, pivots are positive and entries above each pivot lie in
    ``[0, pivot)``.
    """

    ambient_dim: int
    generators: tuple[tuple[int, ...], ...]
    hnf: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.hnf)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    @property
    def determinant(self) -> int:
        """Covolume of a full-rank lattice, i.e. its index in Z^n."""
        if not self.is_full_rank:
            raise InputError("determinant of a rank-deficient lattice")
        out = 1
        for i, p in enumerate(self.pivots):
            out *= self.hnf[i][p]
        return out


def _hnf_rows(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    A = [r[:] for r in rows if any(r)]
    out: list[list[int]] = []
    pivots: list[int] = []
    for c in range(ncols):
        nz = [r for r in A if r[c] != 0]
        if not nz:
            continue
        rest = [r for r in A if r[c] == 0]
        # Euclid on column c among the rows that are nonzero there
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[c]))
            p = nz[0]
            nxt = [p]
            for r in nz[1:]:
                q = r[c] // p[c]
                r = [x - q * y for x, y in zip(r, p)]
                if r[c] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            nz = nxt
        p = nz[0]
        if p[c] < 0:
            p = [-x for x in p]
        for i, (prow, pc) in enumerate(zip(out, pivots)):
            q = prow[c] // p[c]
            if q:
                out[i] = [x - q * y for x, y in zip(prow, p)]
        out.append(p)
        pivots.append(c)
        A = rest
    return out, pivots


def hnf_basis(generators: Matrix) -> SubLattice:
    gens = []
    for r in generators:
        row = [to_fraction(x) for x in r]
        if any(x.denominator != 1 for x in row):
            raise InputError("lattice generators must be integer vectors")
        gens.append(tuple(int(x) for x in row))
    if not gens:
        raise InputError("no generators")
    dim = len(gens[0])
    if any(len(g) != dim for g in gens):
        raise InputError("generators have different lengths")
    if not any(any(g) for g in gens):
        raise InputError("all generators are zero")
    H, pivots = _hnf_rows([list(g) for g in gens], dim)
    # final reduction pass: entries above each pivot into [0, pivot)
    for k in range(len(H)):
        c = pivots[k]
        for i in range(k):
            q = H[i][c] // H[k][c]
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[k])]
    return SubLattice(dim, tuple(gens), tuple(tuple(r) for r in H), tuple(pivots))


def member_of_lattice(L: SubLattice, v: Sequence) -> bool:
    vec = [to_fraction(x) for x in v]
    if len(vec) != L.ambient_dim:
        raise InputError(f"vector has {len(vec)} coordinates, lattice lives in dimension {L.ambient_dim}")
    if any(x.denominator != 1 for x in vec):
        return False
    rem = [int(x) for x in vec]
    for row, c in zip(L.hnf, L.pivots):
        if any(rem[:c]):
            return False
        q, r = divmod(rem[c], row[c])
        if r:
            return False
        if q:
            rem = [x - q * y for x, y in zip(rem, row)]
    return not any(rem)


def fmt_rational(x) -> str:
    return str(to_fraction(x))
