"""Doubling construction, diagonal lattice and Gram-structure tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .enumeration import DEFAULT_NODE_BUDGET, check_delaunay
from .errors import DuplicateVertex, InputError, NotCentrallySymmetric
from .exact import SubLattice, fmt_rational, hnf_basis, member_of_lattice, rank
from .families import LatticePolytope, PolytopeConfig
from .quadric import fit_quadric_space


def minimal_vertex_count(n: int) -> int:
    return n * (n + 1) // 2 + n


def build_upsilon(config: PolytopeConfig, n: int, enforce_count: bool = True) -> LatticePolytope:
    P = config.build(n)
    if enforce_count and len(P) != minimal_vertex_count(n):
        raise InputError(f"config {config.name!r} gives {len(P)} vertices at n = {n}, expected {minimal_vertex_count(n)}")
    return P


# ------------------------------------------------------------ doubling


def default_apexes(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return (1,) * n + (n - 3,), (-1,) * n + (-(n - 4),)


@dataclass(frozen=True)
class DoubledPolytope:
    base: LatticePolytope
    vertices: tuple[tuple[int, ...], ...]
    apexes: tuple[tuple[int, ...], tuple[int, ...]]
    pairing: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def center(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * self.base.dim + (Fraction(1, 2),)

    def as_polytope(self) -> LatticePolytope:
        return LatticePolytope(self.dim, self.vertices)

    def section(self, height: int) -> LatticePolytope | None:
        """Vertices with last coordinate ``height``, last coordinate dropped."""
        pts = [v[:-1] for v in self.vertices if v[-1] == height]
        return LatticePolytope(self.base.dim, tuple(sorted(pts))) if pts else None

    def to_dict(self) -> dict:
        return {
            "n": self.base.dim,
            "vertex_count": len(self.vertices),
            "apexes": [list(a) for a in self.apexes],
            "center": [fmt_rational(x) for x in self.center],
            "vertices": [list(v) for v in self.vertices],
        }


def double_to_C(P: LatticePolytope, apexes: Sequence[Sequence[int]] | None = None) -> DoubledPolytope:
    """Two copies of ``P`` in ``Z^(n+1)`` (one lifted to height 1, one
    negated at height 0) plus an antipodal pair of apexes."""
    if not P.vertices:
        raise InputError("empty polytope")
    n = P.dim
    a1, a2 = default_apexes(n) if apexes is None else (tuple(apexes[0]), tuple(apexes[1]))
    if len(a1) != n + 1 or len(a2) != n + 1:
        raise InputError(f"apexes must have {n + 1} coordinates")
    pts = [v + (1,) for v in P.vertices] + [tuple(-x for x in v) + (0,) for v in P.vertices] + [a1, a2]
    seen = set()
    for v in pts:
        if v in seen:
            raise DuplicateVertex(v)
        seen.add(v)
    verts = tuple(sorted(pts))
    index = {v: i for i, v in enumerate(verts)}
    pairing = []
    for v in verts:
        w = tuple(-x for x in v[:-1]) + (1 - v[-1],)
        if w not in index:
            raise NotCentrallySymmetric(v)
        pairing.append(index[w])
    C = DoubledPolytope(P, verts, (a1, a2), tuple(pairing))
    if C.section(1) != P:
        raise InputError("section at height 1 does not reproduce the base polytope")
    return C


@dataclass(frozen=True)
class ApexCandidate:
    apexes: tuple[tuple[int, ...], tuple[int, ...]]
    fit_dimension: int
    is_pd: bool
    is_delaunay: bool | None


def find_apexes(P: LatticePolytope, bound: int = 6, check_empty: bool = True, node_budget: int = DEFAULT_NODE_BUDGET) -> list[ApexCandidate]:
    """Apex pairs ``[s^(n-1), t; h]`` (``s = +-1``, ``|t|, |h| <= bound``)
    whose doubled polytope has a unique circumscribed ellipsoid.

    The partner apex is the antipode through ``[0^n; 1/2]``.  Each pair is
    reported once, with the apex of larger last coordinate first.
    """
    n = P.dim
    found = {}
    for s in (1, -1):
        for t in range(-bound, bound + 1):
            for h in range(-bound, bound + 1):
                a = (s,) * (n - 1) + (t, h)
                b = tuple(-x for x in a[:-1]) + (1 - h,)
                pair = (a, b) if (a[-1], a) > (b[-1], b) else (b, a)
                if pair in found:
                    continue
                try:
                    C = double_to_C(P, pair)
                except (DuplicateVertex, InputError):
                    continue
                space = fit_quadric_space(C.as_polytope())
                if space.dimension != 1:
                    continue
                q = space.quadric
                pd = q.is_ellipsoidal()
                emp = None
                if pd and check_empty:
                    emp = check_delaunay(C.as_polytope(), q, node_budget).is_delaunay
                found[pair] = ApexCandidate(pair, space.dimension, pd, emp)
    return [found[k] for k in sorted(found)]


# ------------------------------------------------------------ diagonals


def _lex_positive(v: tuple[int, ...]) -> tuple[int, ...]:
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def diagonal_of(v: Sequence[int]) -> tuple[int, ...]:
    return tuple(2 * x for x in v[:-1]) + (2 * v[-1] - 1,)


@dataclass(frozen=True)
class DiagonalLattice:
    diagonals: tuple[tuple[int, ...], ...]
    lattice: SubLattice
    contains_2Z: bool
    contains_2Z_hnf: bool

    @property
    def index(self) -> int | None:
        """``[Z^d : Lambda]`` when the lattice has full rank."""
        return self.lattice.determinant if self.lattice.is_full_rank else None

    def to_dict(self) -> dict:
        return {
            "diagonals": [list(d) for d in self.diagonals],
            "hnf": [list(r) for r in self.lattice.hnf],
            "rank": self.lattice.rank,
            "index": self.index,
            "contains_2Z": self.contains_2Z,
        }


def diagonal_lattice(C: DoubledPolytope) -> DiagonalLattice:
    diags = sorted({_lex_positive(diagonal_of(v)) for v in C.vertices})
    lat = hnf_basis(diags)
    d = C.dim
    twos = [tuple(2 * int(i == j) for j in range(d)) for i in range(d)]
    by_membership = all(member_of_lattice(lat, t) for t in twos)
    by_hnf = hnf_basis(diags + twos).hnf == lat.hnf
    return DiagonalLattice(tuple(diags), lat, by_membership, by_hnf)


# ------------------------------------------------------------ Gram structure


def closed_form_alpha(n: int) -> Fraction:
    if n < 6:
        raise InputError(f"alpha formula needs n >= 6, got {n}")
    return Fraction(1 + comb(n - 4, 2), 8 * (n - 5))


def default_gram_basis(C: DoubledPolytope) -> list[tuple[int, ...]]:
    """Diagonals through the lifted zero vertex, the lifted unit vertices
    ``e_i`` (``i < n``) and the first apex."""
    n = C.base.dim
    verts = set(C.vertices)
    picks = [(0,) * n + (1,)]
    for i in range(n - 1):
        picks.append(tuple(int(j == i) for j in range(n)) + (1,))
    picks.append(C.apexes[0])
    for v in picks:
        if v not in verts:
            raise InputError(f"default basis needs vertex {v}, which is missing")
    return [diagonal_of(v) for v in picks]


@dataclass(frozen=True)
class GramStructure:
    basis_vectors: tuple[tuple[int, ...], ...]
    form: tuple[tuple[Fraction, ...], ...]
    gram: tuple[tuple[Fraction, ...], ...]
    is_sigma_I_alpha_J: bool
    sigma: Fraction | None
    alpha: Fraction | None
    closed_form_alpha: Fraction
    admissible_scale: str

    @property
    def strict_match(self) -> bool:
        return self.is_sigma_I_alpha_J and self.sigma == 1 and self.alpha == self.closed_form_alpha

    @property
    def proportional_match(self) -> bool:
        return self.is_sigma_I_alpha_J and self.alpha == self.closed_form_alpha

    def to_dict(self) -> dict:
        opt = lambda x: None if x is None else fmt_rational(x)  # noqa: E731
        return {
            "basis": [list(b) for b in self.basis_vectors],
            "gram": [[fmt_rational(x) for x in r] for r in self.gram],
            "is_sigma_I_alpha_J": self.is_sigma_I_alpha_J,
            "sigma": opt(self.sigma),
            "alpha": opt(self.alpha),
            "closed_form_alpha": fmt_rational(self.closed_form_alpha),
            "strict_match": self.strict_match,
            "proportional_match": self.proportional_match,
            "admissible_scale": self.admissible_scale,
        }


def _two_value(G) -> tuple[bool, Fraction | None, Fraction | None]:
    k = len(G)
    diag = {G[i][i] for i in range(k)}
    off = {G[i][j] for i in range(k) for j in range(k) if i != j}
    if len(diag) != 1 or len(off) > 1:
        return False, None, None
    a = diag.pop()
    b = off.pop() if off else Fraction(0)
    if a == b:
        return False, None, None
    return True, a - b, b / (a - b)


def _scale_for_shape(GQ, G1) -> str:
    """Scales ``lam > 0`` for which ``lam*GQ + G1`` has one diagonal and
    one off-diagonal value: "none", "any" or the exact value."""
    k = len(GQ)
    eqs = []
    for i in range(1, k):
        eqs.append((GQ[i][i] - GQ[0][0], G1[0][0] - G1[i][i]))
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    i0, j0 = pairs[0]
    for i, j in pairs[1:]:
        eqs.append((GQ[i][j] - GQ[i0][j0], G1[i0][j0] - G1[i][j]))
    lam = None
    for a, b in eqs:
        if a == 0:
            if b != 0:
                return "none"
            continue
        v = b / a
        if lam is not None and v != lam:
            return "none"
        lam = v
    if lam is None:
        return "any"
    return fmt_rational(lam) if lam > 0 else "none"


def gram_structure(Q, basis: Sequence[Sequence[int]], n: int | None = None) -> GramStructure:
    """Gram matrix of ``basis`` under ``Q (+) x_(n+1)^2`` when ``Q`` is
    ``n x n``, or under ``Q`` itself when it already acts on ``Z^(n+1)``."""
    Qr = [[Fraction(x) for x in r] for r in Q]
    vecs = [tuple(int(x) for x in b) for b in basis]
    d = len(vecs[0]) if vecs else 0
    extend = len(Qr) == d - 1
    if not extend and len(Qr) != d:
        raise InputError(f"form of size {len(Qr)} does not fit basis vectors of length {d}")
    if any(len(b) != d for b in vecs):
        raise InputError("basis vectors have different lengths")
    if len(vecs) != d or rank(vecs) != d:
        raise InputError(f"need {d} linearly independent basis vectors")
    m = len(Qr)
    GQ = [[sum((u[i] * Qr[i][j] * w[j] for i in range(m) if u[i] for j in range(m) if w[j]), Fraction(0)) for w in vecs] for u in vecs]
    if extend:
        G1 = [[Fraction(u[-1] * w[-1]) for w in vecs] for u in vecs]
        scale = _scale_for_shape(GQ, G1)
    else:
        G1 = [[Fraction(0)] * d for _ in vecs]
        scale = "not-applicable"
    G = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(GQ, G1))
    ok, sigma, alpha = _two_value(G)
    return GramStructure(tuple(vecs), tuple(map(tuple, Qr)), G, ok, sigma, alpha, closed_form_alpha(n if n is not None else d - 1), scale)


def lovasz_bound(n: int) -> Fraction:
    if n < 1:
        raise InputError("n must be positive")
    return Fraction(factorial(n) * 2**n, comb(2 * n, n))
