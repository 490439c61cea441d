"""Exact lattice-point enumeration inside ellipsoids.

Everything here is Fincke-Pohst over an exact LDL^T factorization.  Interval
endpoints ``u +- sqrt(s)`` are resolved with ``math.isqrt`` plus exact
comparisons, so no floating point ever enters a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, isqrt
from typing import Callable, Sequence

from ._validation import check_lattice_points
from .errors import BudgetExceeded, InputError, NotCircumscribed, NotPositiveDefinite
from .exact import SubLattice, inverse, ldlt_pd_check, matmul, pivoted_ldlt, to_fraction, transpose
from .families import LatticePolytope
from .quadric import CircumscribedQuadric, InhomQuadric, evaluate

DEFAULT_NODE_BUDGET = 10**9


def _floor_sqrt(s: Fraction) -> int:
    # floor(sqrt(s)) == isqrt(floor(s)) for s >= 0
    return isqrt(s.numerator // s.denominator)


def integer_interval(u: Fraction, s: Fraction) -> tuple[int, int] | None:
    """Integers ``x`` with ``(x - u)^2 <= s``, as an inclusive range."""
    if s < 0:
        return None
    r = _floor_sqrt(s)
    fu = floor(u)
    hi = fu + r + 1
    while hi > u and (hi - u) ** 2 > s:
        hi -= 1
    lo = fu - r
    while lo < u and (u - lo) ** 2 > s:
        lo += 1
    if lo > hi:
        return None
    return lo, hi


def _completed_square(q: InhomQuadric) -> tuple[list[Fraction], Fraction]:
    """Center ``z`` and radius ``R`` with ``f(x) = (x-z)^T Q (x-z) - R``."""
    z = q.center()
    R = sum((z[i] * q.Q[i][j] * z[j] for i in range(q.dim) for j in range(q.dim)), Fraction(0)) - q.c
    return z, R


class _Search:
    """Depth-first Fincke-Pohst walk over ``(x-z)^T Q (x-z) <= R``.

    ``visit(x, norm)`` is called for every lattice point in the region and
    may return a smaller radius to tighten the rest of the search.
    """

    def __init__(self, Q, center: Sequence[Fraction], budget: int):
        self.n = len(Q)
        self.order, self.D, self.L = pivoted_ldlt(Q)
        self.center = [to_fraction(center[k]) for k in self.order]
        self.budget = budget
        self.nodes = 0

    def run(self, R: Fraction, visit: Callable[[tuple[int, ...], Fraction], Fraction | None]):
        n = self.n
        self.R = to_fraction(R)
        y = [Fraction(0)] * n
        xs = [0] * n

        def rec(p: int, used: Fraction):
            t = sum((self.L[i][p] * y[i] for i in range(p + 1, n) if y[i]), Fraction(0))
            rng = integer_interval(self.center[p] - t, (self.R - used) / self.D[p])
            if rng is None:
                return
            lo, hi = rng
            for x in range(lo, hi + 1):
                yp = x - self.center[p]
                part = used + self.D[p] * (yp + t) ** 2
                if part > self.R:
                    continue
                self.nodes += 1
                if self.nodes > self.budget:
                    raise BudgetExceeded(f"enumeration exceeded its node budget of {self.budget}")
                y[p] = yp
                xs[p] = x
                if p == 0:
                    point = [0] * n
                    for pos, k in enumerate(self.order):
                        point[k] = xs[pos]
                    new_r = visit(tuple(point), part)
                    if new_r is not None and new_r < self.R:
                        self.R = new_r
                else:
                    rec(p - 1, part)
            y[p] = Fraction(0)

        if self.R >= 0:
            rec(n - 1, Fraction(0))


@dataclass(frozen=True)
class EnumerationResult:
    zero_set: tuple[tuple[int, ...], ...]
    negative_set: tuple[tuple[int, ...], ...]
    node_count: int
    elimination_order: tuple[int, ...]
    complete: bool = True

    def to_dict(self) -> dict:
        return {
            "zero_set": [list(v) for v in self.zero_set],
            "negative_set": [list(v) for v in self.negative_set],
            "zero_count": len(self.zero_set),
            "negative_count": len(self.negative_set),
            "node_count": self.node_count,
            "elimination_order": list(self.elimination_order),
            "complete": self.complete,
        }


def enumerate_nonpositive(q: InhomQuadric, node_budget: int = DEFAULT_NODE_BUDGET) -> EnumerationResult:
    """All integer points with ``q(z) <= 0``, split into ``= 0`` and ``< 0``.

    On budget exhaustion ``BudgetExceeded.partial`` holds an incomplete
    result.
    """
    if not q.is_ellipsoidal():
        raise NotPositiveDefinite("quadratic part is not positive definite; the region is unbounded")
    z, R = _completed_square(q)
    search = _Search(q.Q, z, node_budget)
    zero, neg = [], []

    def visit(x, norm):
        (zero if norm == R else neg).append(x)

    try:
        search.run(R, visit)
    except BudgetExceeded as exc:
        exc.partial = EnumerationResult(
            tuple(sorted(zero)), tuple(sorted(neg)), search.nodes, tuple(search.order), complete=False
        )
        raise
    return EnumerationResult(tuple(sorted(zero)), tuple(sorted(neg)), search.nodes, tuple(search.order))


def coordinate_bounds(q: InhomQuadric) -> list[tuple[int, int]] | None:
    """Exact per-coordinate integer bounds of ``{x : q(x) <= 0}``.

    Uses ``|x_i - z_i|^2 <= R (Q^-1)_ii``.  ``None`` when the region has no
    real points.
    """
    if not q.is_ellipsoidal():
        raise NotPositiveDefinite("quadratic part is not positive definite")
    z, R = _completed_square(q)
    if R < 0:
        return None
    Qi = inverse(q.Q)
    out = []
    for i in range(q.dim):
        rng = integer_interval(z[i], R * Qi[i][i])
        if rng is None:
            return None
        out.append(rng)
    return out


# ------------------------------------------------------------ Delaunay verdict


@dataclass(frozen=True)
class DelaunayVerdict:
    is_delaunay: bool
    on_quadric_matches_vertices: bool
    interior_count: int
    on_quadric_count: int
    witness: tuple[int, ...] | None
    enumeration: EnumerationResult

    def to_dict(self) -> dict:
        return {
            "is_delaunay": self.is_delaunay,
            "matches_vertices": self.on_quadric_matches_vertices,
            "interior_count": self.interior_count,
            "on_quadric_count": self.on_quadric_count,
            "witness": list(self.witness) if self.witness is not None else None,
            "node_count": self.enumeration.node_count,
            "elimination_order": list(self.enumeration.elimination_order),
        }


def check_delaunay(P: LatticePolytope, q: InhomQuadric, node_budget: int = DEFAULT_NODE_BUDGET) -> DelaunayVerdict:
    """Decide whether ``q`` is an empty ellipsoid circumscribing ``P``.

    The witness is the deepest interior point (smallest ``q`` value, lex
    first on ties), or failing that the first extra point on the quadric.
    """
    if q.dim != P.dim:
        raise InputError(f"quadric has dimension {q.dim}, polytope {P.dim}")
    for v in P.vertices:
        val = evaluate(q, v)
        if val != 0:
            raise NotCircumscribed(v, val)
    if not q.is_ellipsoidal():
        raise NotPositiveDefinite("circumscribed quadric is not an ellipsoid")
    res = enumerate_nonpositive(q, node_budget)
    verts = set(P.vertices)
    matches = set(res.zero_set) == verts
    witness = None
    if res.negative_set:
        witness = min(res.negative_set, key=lambda v: (evaluate(q, v), v))
    elif not matches:
        witness = next(v for v in res.zero_set if v not in verts)
    return DelaunayVerdict(
        is_delaunay=matches and not res.negative_set,
        on_quadric_matches_vertices=matches,
        interior_count=len(res.negative_set),
        on_quadric_count=len(res.zero_set),
        witness=witness,
        enumeration=res,
    )


# ------------------------------------------------------------ minimal vectors


def _quadratic_value(Q, v) -> Fraction:
    n = len(v)
    return sum((v[i] * Q[i][j] * v[j] for i in range(n) if v[i] for j in range(n) if v[j]), Fraction(0))


def _require_pd(Q) -> list[list[Fraction]]:
    rows = [[to_fraction(x) for x in r] for r in Q]
    ok, _ = ldlt_pd_check(rows)
    if not ok:
        raise NotPositiveDefinite("form is not positive definite")
    return rows


def parity_class_minima(Q, cls: Sequence[int], node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Minimal ``v^T Q v`` over ``v = cls (mod 2)``, with all minimizers.

    For the zero class the zero vector is excluded.  Writing ``v = c + 2w``
    turns this into a search for ``w`` near ``-c/2``, radius tightened as
    better vectors appear.
    """
    Q = _require_pd(Q)
    n = len(Q)
    if len(cls) != n:
        raise InputError(f"class has {len(cls)} entries, form has dimension {n}")
    c = [int(x) % 2 for x in cls]
    if any(c):
        seed_v = tuple(c)
    else:
        i = min(range(n), key=lambda k: (Q[k][k], k))
        seed_v = tuple(2 * int(k == i) for k in range(n))
    best = [_quadratic_value(Q, seed_v)]
    found: list[tuple[int, ...]] = []
    search = _Search(Q, [Fraction(-x, 2) for x in c], node_budget)

    def visit(w, norm):
        v = tuple(ci + 2 * wi for ci, wi in zip(c, w))
        if not any(v):
            return None
        val = 4 * norm
        if val < best[0]:
            best[0] = val
            found.clear()
        if val == best[0]:
            found.append(v)
        return best[0] / 4

    search.run(best[0] / 4, visit)
    return best[0], sorted(found)


def lattice_minimal_vectors(L: SubLattice, Q, node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Nonzero vectors of ``L`` with minimal ``v^T Q v``.

    The search runs on coefficient vectors over the HNF basis, seeded with
    the norm of the first HNF row.
    """
    if not L.is_full_rank:
        raise InputError(f"lattice has rank {L.rank} in dimension {L.ambient_dim}; need full rank")
    Q = _require_pd(Q)
    if len(Q) != L.ambient_dim:
        raise InputError("form and lattice dimensions differ")
    B = [list(r) for r in L.hnf]
    G = matmul(matmul(B, Q), transpose(B))
    best = [_quadratic_value(Q, B[0])]
    found: list[tuple[int, ...]] = []
    search = _Search(G, [Fraction(0)] * len(B), node_budget)

    def visit(coef, norm):
        if not any(coef):
            return None
        if norm < best[0]:
            best[0] = norm
            found.clear()
        if norm == best[0]:
            found.append(tuple(sum(a * row[j] for a, row in zip(coef, B)) for j in range(len(B))))
        return best[0]

    search.run(best[0], visit)
    return best[0], sorted(found)


# ------------------------------------------------------------ estimator


class DelaunayVerifier(CircumscribedQuadric):
    """Fit the circumscribed quadric of a lattice point set and decide
    whether it is an empty ellipsoid.

    Parameters
    ----------
    node_budget : int, default=10**9
        Enumeration node cap; exceeding it raises ``BudgetExceeded``.
    require_perfect : bool, default=False

    Attributes
    ----------
    verdict_ : DelaunayVerdict or None
        ``None`` when the fitted quadric is not an ellipsoid.
    is_delaunay_ : bool
    """

    def __init__(self, node_budget=DEFAULT_NODE_BUDGET, require_perfect=False):
        super().__init__(require_perfect=require_perfect)
        self.node_budget = node_budget

    def fit(self, X, y=None):
        super().fit(X)
        P = LatticePolytope.from_points(check_lattice_points(X))
        q = self.quadric_
        if q is None or not q.is_ellipsoidal():
            self.verdict_ = None
            self.is_delaunay_ = False
            return self
        self.verdict_ = check_delaunay(P, q, self.node_budget)
        self.is_delaunay_ = self.verdict_.is_delaunay
        return self
