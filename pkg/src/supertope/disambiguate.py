"""Exhaustive search over readings of the six-family vertex table.

Every candidate keeps the six prefix patterns

    [0^(n-1)], [1,0^(n-2)] (twice), [1,1,0^(n-3)], [0,1^(n-2)], [1^(n-1)]

and varies the last coordinate ``u`` (``|u| <= T``) of each family, plus an
optional global sign per family.  The zero vector is fixed.

Screening is exact.  A family with ``k`` ones, sign ``s`` and last
coordinate ``u`` constrains a quadric only through its
S_(n-1)-isotypic parts:

* trivial part, unknowns (d, m, e, b, a, l):
  ``k d + k(k-1) m + 2ksu e + u^2 b + ks a + u l = 0``;
* standard part (multiplicity n-2), for ``1 <= k <= n-2``:
  ``delta + 2(k-1) nu + 2su eps + s alpha = 0``;
* the remaining part of the mixed terms is killed by the ``k = 2`` family.

So the fit dimension is ``sym_nullity + (n-2) * (4 - rank V)``, where ``V``
is the 4x4 standard-part matrix.  Survivors of the screen and of a pattern
test on ``{-1,0,1}^(n-1) x Z`` are verified in full.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterator

from .construct import minimal_vertex_count
from .enumeration import DEFAULT_NODE_BUDGET, check_delaunay
from .errors import BudgetExceeded, InputError
from .exact import fmt_rational
from .families import PolytopeConfig, parse_config
from .hull import skeleton, srg_check
from .quadric import fit_quadric_space, symmetric_coefficients

PREFIXES = ("0^{n-1}", "1,0^{n-2}", "1,0^{n-2}", "1^2,0^{n-3}", "0,1^{n-2}", "1^{n-1}")
MULTS = ("1", "n-1", "n-1", "(n-1)*(n-2)/2", "n-1", "1")


def family_weights(n: int) -> tuple[int, ...]:
    """Number of ones in the first ``n-1`` coordinates, per family."""
    return (0, 1, 1, 2, n - 2, n - 1)


# A reading assigns (sign, last coordinate) to each family.
Reading = tuple[tuple[int, int], ...]


def reading_text(n: int, reading: Reading, name: str = "") -> str:
    lines = [f"name: {name or 'reading'}", f"min_n: {n}", "mode: all-permutations"]
    for pre, mult, (s, u) in zip(PREFIXES, MULTS, reading):
        t = u if s > 0 else -u
        lines.append(f"{'-' if s < 0 else ''}[{pre};{t}] x {mult}")
    return "\n".join(lines) + "\n"


def reading_config(n: int, reading: Reading, name: str = "") -> PolytopeConfig:
    return parse_config(reading_text(n, reading, name))


def _sym_row(k, s, u):
    return (k, k * (k - 1), 2 * k * s * u, u * u, k * s, u)


def _std_row(k, s, u):
    return (1, 2 * (k - 1), 2 * s * u, s)


def _int_kernel(rows: list[tuple[int, ...]], ncols: int) -> list[list[int]] | None:
    """Integer basis of the rational kernel, or ``None`` if ``rows`` is
    rank deficient."""
    from .exact import rank_nullspace

    rk, basis = rank_nullspace(rows)
    if rk != len(rows):
        return None
    out = []
    from math import lcm

    for v in basis:
        den = 1
        for x in v:
            den = lcm(den, x.denominator)
        out.append([int(x * den) for x in v])
    return out


def _det3(M):
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def _cofactors(rows3):
    """Signed cofactors so that det([rows3; r]) = sum(cof * r)."""
    out = []
    for j in range(4):
        minor = [[r[c] for c in range(4) if c != j] for r in rows3]
        out.append((-1) ** (3 + j) * _det3(minor))
    return out


def symmetric_screen(n: int, reading: Reading) -> tuple[int, ...] | None:
    """Coefficients ``(d, m, e, b, a, l)`` of the unique quadric of a
    reading, scaled to integers with ``d - m > 0``, or ``None`` unless the
    fit dimension is exactly one."""
    ks = family_weights(n)
    std = [_std_row(k, s, u) for k, (s, u) in zip(ks[1:5], reading[1:5])]
    if _det4(std) == 0:
        return None
    sym = [_sym_row(k, s, u) for k, (s, u) in zip(ks[1:], reading[1:])]
    ker = _int_kernel(sym, 6)
    if ker is None or len(ker) != 1:
        return None
    return _orient(tuple(ker[0]))


def _det4(M):
    return sum(c * x for c, x in zip(_cofactors(M[:3]), M[3]))


def _orient(v):
    d, m = v[0], v[1]
    return tuple(-x for x in v) if d - m < 0 else v


def _pd(n, v) -> bool:
    d, m, e, b = v[:4]
    return d - m > 0 and d + (n - 2) * m > 0 and b * (d + (n - 2) * m) - (n - 1) * e * e > 0


def _pattern_empty(n: int, v, vertex_patterns: set) -> bool:
    """No non-vertex point of ``{-1,0,1}^(n-1) x Z`` on or inside the quadric."""
    d, m, e, b, a, l = v
    for p in range(n):
        for q in range(n - p):
            S, D = p + q, p - q
            K = d * S + m * (D * D - S) + a * D
            B = 2 * e * D + l
            disc = B * B - 4 * b * K
            if disc < 0:
                continue
            r = isqrt(disc)
            lo = -((r + B) // (2 * b))  # ceil((-r - B) / 2b)
            hi = (r - B) // (2 * b)
            for u in range(lo, hi + 1):
                val = K + B * u + b * u * u
                if val <= 0 and (p, q, u) not in vertex_patterns:
                    return False
    return True


def _vertex_patterns(n, reading):
    out = set()
    for k, (s, u) in zip(family_weights(n), reading):
        out.add((k, 0, u) if s > 0 else (0, k, u))
    return out


def _choices(T: int, negation: bool):
    signs = (1, -1) if negation else (1,)
    return [(s, u) for s in signs for u in range(-T, T + 1)]


@dataclass(frozen=True)
class ScreenStats:
    searched: int
    standard_rank_ok: int
    unique_fit: int
    positive_definite: int
    pattern_empty: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def screen_readings(n: int, T: int, allow_negation: bool = False) -> tuple[list[tuple[Reading, tuple[int, ...]]], ScreenStats]:
    """Readings with a unique PD quadric and no interior pattern points."""
    if n < 5:
        raise InputError("reading search needs n >= 5")
    ks = family_weights(n)
    opts = _choices(T, allow_negation)
    zero = (1, 0)
    searched = rank_ok = unique = pd = empty = 0
    out = []
    nopt = len(opts)
    for i1 in range(nopt):
        for i2 in range(i1 + 1, nopt):
            f1, f2 = opts[i1], opts[i2]
            for f3 in opts:
                std3 = [_std_row(ks[1], *f1), _std_row(ks[2], *f2), _std_row(ks[3], *f3)]
                cof = _cofactors(std3)
                ker3 = _int_kernel([_sym_row(ks[1], *f1), _sym_row(ks[2], *f2), _sym_row(ks[3], *f3)], 6)
                for f4 in opts:
                    searched += nopt
                    if sum(c * x for c, x in zip(cof, _std_row(ks[4], *f4))) == 0:
                        continue
                    rank_ok += nopt
                    if ker3 is None or len(ker3) != 3:
                        continue
                    r4 = _sym_row(ks[4], *f4)
                    c = [sum(a * b for a, b in zip(r4, kv)) for kv in ker3]
                    if c[0]:
                        combos = ((c[1], -c[0], 0), (c[2], 0, -c[0]))
                    elif c[1]:
                        combos = ((1, 0, 0), (0, c[2], -c[1]))
                    elif c[2]:
                        combos = ((1, 0, 0), (0, 1, 0))
                    else:
                        continue
                    n1 = [sum(w * kv[j] for w, kv in zip(combos[0], ker3)) for j in range(6)]
                    n2 = [sum(w * kv[j] for w, kv in zip(combos[1], ker3)) for j in range(6)]
                    for f5 in opts:
                        r5 = _sym_row(ks[5], *f5)
                        s1 = sum(a * b for a, b in zip(r5, n1))
                        s2 = sum(a * b for a, b in zip(r5, n2))
                        if s1 == 0 and s2 == 0:
                            continue
                        unique += 1
                        v = _orient(tuple(s2 * x - s1 * y for x, y in zip(n1, n2)))
                        if not _pd(n, v):
                            continue
                        pd += 1
                        reading = (zero, f1, f2, f3, f4, f5)
                        if not _pattern_empty(n, v, _vertex_patterns(n, reading)):
                            continue
                        empty += 1
                        out.append((reading, v))
    out.sort()
    return out, ScreenStats(searched, rank_ok, unique, pd, empty)


@dataclass(frozen=True)
class VerificationSummary:
    reading: Reading
    config_text: str
    vertex_count: int
    fit_dimension: int
    is_pd: bool
    coefficients: dict | None
    interior_count: int | None
    on_quadric_count: int | None
    is_delaunay: bool | None
    srg: tuple[int, int, int, int] | None
    complete: bool

    @property
    def admissible(self) -> bool:
        return bool(self.is_delaunay) and self.fit_dimension == 1 and self.is_pd

    def to_dict(self) -> dict:
        return {
            "reading": [list(f) for f in self.reading],
            "config": self.config_text,
            "vertex_count": self.vertex_count,
            "fit_dimension": self.fit_dimension,
            "is_pd": self.is_pd,
            "coefficients": self.coefficients,
            "interior_count": self.interior_count,
            "on_quadric_count": self.on_quadric_count,
            "is_delaunay": self.is_delaunay,
            "srg": list(self.srg) if self.srg is not None else None,
            "complete": self.complete,
        }


def verify_reading(n: int, reading: Reading, node_budget: int = DEFAULT_NODE_BUDGET, with_skeleton: bool = True) -> VerificationSummary:
    """Full verification, independent of the screen."""
    text = reading_text(n, reading)
    P = parse_config(text).build(n)
    space = fit_quadric_space(P)
    q = space.quadric
    pd = space.is_perfect
    coeffs = None
    interior = on = emp = srg = None
    complete = True
    if q is not None:
        sc = symmetric_coefficients(q.primitive_integral())
        coeffs = {k: fmt_rational(v) for k, v in sc.items()} if sc else None
    if pd:
        try:
            verdict = check_delaunay(P, q, node_budget)
            interior, on, emp = verdict.interior_count, verdict.on_quadric_count, verdict.is_delaunay
        except BudgetExceeded:
            complete = False
        if emp and with_skeleton:
            srg = srg_check(skeleton(P, q))
    return VerificationSummary(reading, text, len(P), space.dimension, pd, coeffs, interior, on, emp, srg, complete)


@dataclass(frozen=True)
class DisambiguationResult:
    n: int
    T: int
    allow_negation: bool
    stats: ScreenStats
    admissible: tuple[VerificationSummary, ...]
    rejected_after_screen: tuple[VerificationSummary, ...]

    @property
    def complete(self) -> bool:
        return all(s.complete for s in self.admissible + self.rejected_after_screen)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t_range": self.T,
            "allow_negation": self.allow_negation,
            "expected_vertex_count": minimal_vertex_count(self.n),
            "screen": self.stats.to_dict(),
            "complete": self.complete,
            "admissible_count": len(self.admissible),
            "admissible": [s.to_dict() for s in self.admissible],
            "rejected_after_screen": [s.to_dict() for s in self.rejected_after_screen],
        }


def disambiguate_families(
    n: int, T: int | None = None, allow_negation: bool = False, node_budget: int = DEFAULT_NODE_BUDGET
) -> DisambiguationResult:
    T = n if T is None else T
    survivors, stats = screen_readings(n, T, allow_negation)
    good, bad = [], []
    for reading, _ in survivors:
        s = verify_reading(n, reading, node_budget)
        (good if s.admissible else bad).append(s)
    return DisambiguationResult(n, T, allow_negation, stats, tuple(good), tuple(bad))


def iter_readings(n: int, T: int, allow_negation: bool = False) -> Iterator[Reading]:
    """Every reading in the search space, in screen order."""
    opts = _choices(T, allow_negation)
    for i1 in range(len(opts)):
        for i2 in range(i1 + 1, len(opts)):
            for f3 in opts:
                for f4 in opts:
                    for f5 in opts:
                        yield ((1, 0), opts[i1], opts[i2], f3, f4, f5)
