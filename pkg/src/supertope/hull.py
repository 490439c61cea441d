"""Skeleton graphs, strongly regular checks, simplex volumes and the
equilateral-triangle census."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ._validation import check_lattice_points
from .errors import BudgetExceeded, InputError, NotPositiveDefinite
from .exact import bareiss_det, fmt_rational, ldlt_pd_check
from .families import LatticePolytope
from .lp import feasible_point

DEFAULT_SIMPLEX_BUDGET = 10**7


# ------------------------------------------------------------ skeleton


@dataclass(frozen=True)
class EdgeCertificate:
    """Functional ``w`` with ``w.v_i = w.v_j = beta`` and ``w.v_k < beta``
    for every other vertex."""

    w: tuple[Fraction, ...]
    beta: Fraction


@dataclass(frozen=True)
class SkeletonGraph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    certificates: tuple[EdgeCertificate, ...]

    @property
    def degree_sequence(self) -> tuple[int, ...]:
        deg = [0] * self.vertex_count
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return tuple(deg)

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.vertex_count)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def to_dict(self) -> dict:
        srg = srg_check(self)
        return {
            "v": self.vertex_count,
            "edge_count": len(self.edges),
            "edges": [list(e) for e in self.edges],
            "degrees": sorted(set(self.degree_sequence)),
            "srg": list(srg) if srg is not None else None,
        }


def _dot(w, v) -> Fraction:
    return sum((a * b for a, b in zip(w, v) if b), Fraction(0))


def verify_certificate(vertices: Sequence[Sequence[int]], i: int, j: int, cert: EdgeCertificate) -> bool:
    if _dot(cert.w, vertices[i]) != cert.beta or _dot(cert.w, vertices[j]) != cert.beta:
        return False
    return all(_dot(cert.w, v) < cert.beta for k, v in enumerate(vertices) if k not in (i, j))


def _edge_lp(V, i, j) -> EdgeCertificate | None:
    n = len(V[0])
    vi, vj = V[i], V[j]
    A_eq = [[a - b for a, b in zip(vi, vj)]]
    A_ub = [[a - b for a, b in zip(V[k], vi)] for k in range(len(V)) if k not in (i, j)]
    w = feasible_point(A_eq, [0], A_ub, [-1] * len(A_ub), n)
    if w is None:
        return None
    return EdgeCertificate(tuple(w), _dot(w, vi))


def skeleton(P: LatticePolytope | Sequence[Sequence[int]], tangent_form=None) -> SkeletonGraph:
    """Certified 1-skeleton of the convex hull of the vertex set.

    ``{i, j}`` is an edge iff some functional is maximized over the vertices
    exactly at ``v_i`` and ``v_j``.  Shortcuts, both exact: when
    ``tangent_form`` (an ``InhomQuadric`` through all vertices) is given, the
    tangent functional at the chord midpoint is tried first; a pair whose
    midpoint is also the midpoint of another vertex pair is rejected at once.
    Everything else goes to the exact LP.
    """
    if not isinstance(P, LatticePolytope):
        P = LatticePolytope.from_points(check_lattice_points(P))
    V = P.vertices
    if P.affine_rank != P.dim:
        raise InputError(f"vertices span an affine space of dimension {P.affine_rank}, not {P.dim}")
    mids: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    for i, j in combinations(range(len(V)), 2):
        mids.setdefault(tuple(a + b for a, b in zip(V[i], V[j])), []).append((i, j))
    center = None
    if tangent_form is not None:
        if not tangent_form.is_ellipsoidal():
            raise NotPositiveDefinite("tangent shortcut needs an ellipsoid")
        center = tangent_form.center()
    edges, certs = [], []
    for i, j in combinations(range(len(V)), 2):
        s = tuple(a + b for a, b in zip(V[i], V[j]))
        if len(mids[s]) > 1:
            continue
        cert = None
        if center is not None:
            d = [Fraction(x, 2) - z for x, z in zip(s, center)]
            w = tuple(sum((tangent_form.Q[r][c] * d[c] for c in range(P.dim)), Fraction(0)) for r in range(P.dim))
            cand = EdgeCertificate(w, _dot(w, V[i]))
            if verify_certificate(V, i, j, cand):
                cert = cand
        if cert is None:
            cert = _edge_lp(V, i, j)
        if cert is not None:
            edges.append((i, j))
            certs.append(cert)
    return SkeletonGraph(len(V), tuple(edges), tuple(certs))


def srg_check(G: SkeletonGraph) -> tuple[int, int, int, int] | None:
    v = G.vertex_count
    if v == 0:
        return None
    adj = G.adjacency()
    degs = {len(a) for a in adj}
    if len(degs) != 1:
        return None
    k = degs.pop()
    lam = mu = None
    for i, j in combinations(range(v), 2):
        c = len(adj[i] & adj[j])
        if j in adj[i]:
            if lam is None:
                lam = c
            elif c != lam:
                return None
        else:
            if mu is None:
                mu = c
            elif c != mu:
                return None
    lam = 0 if lam is None else lam
    mu = 0 if mu is None else mu
    if k * (k - lam - 1) != (v - k - 1) * mu:
        raise AssertionError("strongly regular identity violated")
    return v, k, lam, mu


# ------------------------------------------------------------ volumes


def relative_volume(simplex: Sequence[Sequence[int]]) -> int:
    pts = check_lattice_points(simplex)
    n = len(pts[0])
    if len(pts) != n + 1:
        raise InputError(f"a simplex in Z^{n} needs {n + 1} vertices, got {len(pts)}")
    v0 = pts[0]
    return abs(bareiss_det([[a - b for a, b in zip(v, v0)] for v in pts[1:]]))


@dataclass(frozen=True)
class SimplexHit:
    vertex_indices: tuple[int, ...]
    rel_volume: int

    def to_dict(self) -> dict:
        return {"indices": list(self.vertex_indices), "volume": self.rel_volume}


@dataclass(frozen=True)
class SimplexSearchResult:
    target: int
    hits: tuple[SimplexHit, ...]
    node_count: int
    complete: bool

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "found": len(self.hits),
            "complete": self.complete,
            "node_count": self.node_count,
            "hits": [h.to_dict() for h in self.hits],
        }


def search_simplices(
    P: LatticePolytope, target: int, node_budget: int = DEFAULT_SIMPLEX_BUDGET, max_hits: int | None = None
) -> SimplexSearchResult:
    """All vertex subsets of size ``dim + 1`` spanning a simplex of relative
    volume ``target``, in lex order of index tuples.

    The walk keeps an incremental fraction-free (Bareiss) echelon form of
    the edge vectors: an affinely dependent prefix is pruned as soon as its
    reduced row vanishes, and the last pivot of a full set is the
    determinant.  ``max_hits`` stops early with ``complete=False``.
    Exceeding ``node_budget`` raises ``BudgetExceeded`` carrying the partial
    result.
    """
    if target < 1:
        raise InputError("target volume must be at least 1")
    V = P.vertices
    n = P.dim
    m = len(V)
    hits: list[SimplexHit] = []
    nodes = 0
    chosen: list[int] = []

    class _Stop(Exception):
        pass

    def extend(rows, pivots, prev, start):
        nonlocal nodes
        depth = len(rows)
        v0 = V[chosen[0]]
        for k in range(start, m - (n - depth) + 1):
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceeded(
                    f"simplex search exceeded its node budget of {node_budget}",
                    SimplexSearchResult(target, tuple(hits), nodes - 1, False),
                )
            v = [a - b for a, b in zip(V[k], v0)]
            d_prev = 1
            for r, p in zip(rows, pivots):
                rp = r[p]
                vp = v[p]
                v = [(rp * x - vp * y) // d_prev for x, y in zip(v, r)]
                d_prev = rp
            p = next((c for c in range(n) if v[c] and c not in pivots), None)
            if p is None:
                continue
            chosen.append(k)
            if depth + 1 == n:
                if abs(v[p]) == target:
                    hits.append(SimplexHit(tuple(chosen), target))
                    if max_hits is not None and len(hits) >= max_hits:
                        raise _Stop
            else:
                extend(rows + [v], pivots + [p], v[p], k + 1)
            chosen.pop()

    complete = True
    try:
        for i0 in range(m - n):
            nodes += 1
            chosen[:] = [i0]
            extend([], [], 1, i0 + 1)
    except _Stop:
        complete = False
    return SimplexSearchResult(target, tuple(hits), nodes, complete)


# ------------------------------------------------------------ triangles


@dataclass(frozen=True)
class TriangleCensus:
    norm_histogram: dict[Fraction, int]
    equilateral: dict[Fraction, int]

    @property
    def max_norm(self) -> Fraction:
        return max(self.norm_histogram)

    def to_dict(self) -> dict:
        return {
            "norm_histogram": {fmt_rational(k): v for k, v in sorted(self.norm_histogram.items())},
            "equilateral": {fmt_rational(k): v for k, v in sorted(self.equilateral.items())},
            "max_norm": fmt_rational(self.max_norm),
            "equilateral_at_max_norm": self.equilateral.get(self.max_norm, 0),
        }


def triangle_census(P: LatticePolytope, Q, s=None) -> TriangleCensus:
    """Histogram of ``Q``-norms of vertex differences and, per norm value
    (or only ``s``), the number of vertex triples pairwise at that norm."""
    Qr = [[Fraction(x) for x in r] for r in (Q.Q if hasattr(Q, "Q") else Q)]
    if not ldlt_pd_check(Qr)[0]:
        raise NotPositiveDefinite("census needs a positive definite form")
    V = P.vertices
    n = P.dim
    norms = {}
    for i, j in combinations(range(len(V)), 2):
        d = [a - b for a, b in zip(V[i], V[j])]
        norms[(i, j)] = sum((d[r] * Qr[r][c] * d[c] for r in range(n) if d[r] for c in range(n) if d[c]), Fraction(0))
    hist = Counter(norms.values())
    wanted = sorted(hist) if s is None else [Fraction(s)]
    eq = {}
    for val in wanted:
        adj: dict[int, set[int]] = {}
        for (i, j), x in norms.items():
            if x == val:
                adj.setdefault(i, set()).add(j)
                adj.setdefault(j, set()).add(i)
        count = 0
        for (i, j), x in norms.items():
            if x == val:
                count += sum(1 for k in adj[i] & adj[j] if k > j)
        eq[val] = count
    return TriangleCensus(dict(sorted(hist.items())), eq)
