"""Inhomogeneous quadratic forms and circumscribed-quadric fitting.

A quadric is ``f(x) = x^T Q x + L.x + c`` with exact rational coefficients.
Fitting works on the moment (Veronese) row of each point,

    (x_i x_j for i <= j in lex order, x_1 .. x_n, 1),

so a quadric through a point set is a kernel vector of the stacked rows.  The
coefficient of ``x_i x_j`` (``i < j``) in that vector is ``2 Q_ij``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_object_array, check_lattice_points, check_rational_vector
from .errors import InputError
from .exact import fmt_rational, inverse, ldlt_pd_check, matmul, rank_nullspace, to_fraction, transpose
from .families import LatticePolytope, PolytopeConfig, format_family


@dataclass(frozen=True)
class InhomQuadric:
    dim: int
    Q: tuple[tuple[Fraction, ...], ...]
    L: tuple[Fraction, ...]
    c: Fraction = Fraction(0)

    def __post_init__(self):
        Q = tuple(tuple(to_fraction(x) for x in r) for r in self.Q)
        L = tuple(to_fraction(x) for x in self.L)
        if len(Q) != self.dim or any(len(r) != self.dim for r in Q) or len(L) != self.dim:
            raise InputError("quadric coefficient shapes do not match its dimension")
        if any(Q[i][j] != Q[j][i] for i in range(self.dim) for j in range(i)):
            raise InputError("quadratic part must be symmetric")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "c", to_fraction(self.c))

    # -- construction
    @classmethod
    def from_coefficients(cls, coeffs: Sequence, dim: int) -> "InhomQuadric":
        """Build from a vector in moment-row order."""
        coeffs = [to_fraction(x) for x in coeffs]
        if len(coeffs) != moment_length(dim):
            raise InputError(f"expected {moment_length(dim)} coefficients for dimension {dim}")
        Q = [[Fraction(0)] * dim for _ in range(dim)]
        k = 0
        for i in range(dim):
            for j in range(i, dim):
                if i == j:
                    Q[i][i] = coeffs[k]
                else:
                    Q[i][j] = Q[j][i] = coeffs[k] / 2
                k += 1
        return cls(dim, tuple(map(tuple, Q)), tuple(coeffs[k:k + dim]), coeffs[k + dim])

    def coefficients(self) -> list[Fraction]:
        out = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                out.append(self.Q[i][i] if i == j else 2 * self.Q[i][j])
        return out + list(self.L) + [self.c]

    # -- evaluation
    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    def polar(self, x, y) -> Fraction:
        """Bilinear form ``x^T Q y`` of the quadratic part."""
        return sum((xi * self.Q[i][j] * y[j] for i, xi in enumerate(x) if xi for j in range(self.dim) if y[j]), Fraction(0))

    # -- algebra
    def scaled(self, k) -> "InhomQuadric":
        k = to_fraction(k)
        return InhomQuadric(self.dim, tuple(tuple(k * x for x in r) for r in self.Q), tuple(k * x for x in self.L), k * self.c)

    def __add__(self, other: "InhomQuadric") -> "InhomQuadric":
        return InhomQuadric(
            self.dim,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.Q, other.Q)),
            tuple(a + b for a, b in zip(self.L, other.L)),
            self.c + other.c,
        )

    def transformed(self, U) -> "InhomQuadric":
        """Quadric ``g`` with ``g(U x) = f(x)``, for invertible ``U``."""
        Ui = inverse(U)
        Uit = transpose(Ui)
        Q = matmul(matmul(Uit, [list(r) for r in self.Q]), Ui)
        L = [sum(a * b for a, b in zip(row, self.L)) for row in Uit]
        return InhomQuadric(self.dim, tuple(map(tuple, Q)), tuple(L), self.c)

    def is_ellipsoidal(self) -> bool:
        return ldlt_pd_check(self.Q)[0]

    def center(self) -> list[Fraction]:
        """Point where the gradient vanishes, ``-Q^{-1} L / 2``."""
        Qi = inverse(self.Q)
        return [-sum(a * b for a, b in zip(row, self.L)) / 2 for row in Qi]

    def normalized(self) -> "InhomQuadric":
        """Scale so the first nonzero coefficient in moment order is 1."""
        lead = next((x for x in self.coefficients() if x), None)
        return self if lead is None or lead == 1 else self.scaled(1 / lead)

    def primitive_integral(self) -> "InhomQuadric":
        """Positive multiple with coprime integer moment coefficients."""
        from math import gcd, lcm

        co = self.normalized().coefficients()
        den = 1
        for x in co:
            den = lcm(den, x.denominator)
        ints = [int(x * den) for x in co]
        g = 0
        for x in ints:
            g = gcd(g, x)
        return self.normalized().scaled(Fraction(den, g or 1))

    # -- serialization
    def to_dict(self) -> dict:
        return {
            "n": self.dim,
            "Q": [[fmt_rational(x) for x in r] for r in self.Q],
            "L": [fmt_rational(x) for x in self.L],
            "c": fmt_rational(self.c),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InhomQuadric":
        try:
            return cls(int(data["n"]), tuple(tuple(r) for r in data["Q"]), tuple(data["L"]), data["c"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"malformed quadric document: {exc}") from exc


def primitive_matrix(Q) -> list[list[Fraction]]:
    """Positive multiple of ``Q`` with coprime integer entries and a
    positive first nonzero diagonal entry."""
    from math import gcd, lcm

    rows = [[to_fraction(x) for x in r] for r in Q]
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, x.denominator)
    g = 0
    for r in rows:
        for x in r:
            g = gcd(g, int(x * den))
    if g == 0:
        return rows
    lead = next((rows[i][i] for i in range(len(rows)) if rows[i][i]), Fraction(1))
    k = Fraction(den, g) * (1 if lead > 0 else -1)
    return [[k * x for x in r] for r in rows]


def moment_length(dim: int) -> int:
    return dim * (dim + 1) // 2 + dim + 1


def moment_row(v: Sequence) -> list:
    n = len(v)
    row = [v[i] * v[j] for i in range(n) for j in range(i, n)]
    return row + list(v) + [1]


def evaluate(q: InhomQuadric, x) -> Fraction:
    xs = check_rational_vector(x)
    if len(xs) != q.dim:
        raise InputError(f"point has {len(xs)} coordinates, quadric has dimension {q.dim}")
    total = q.c
    for i, xi in enumerate(xs):
        if not xi:
            continue
        row = q.Q[i]
        total += xi * (row[i] * xi + 2 * sum((row[j] * xs[j] for j in range(i + 1, q.dim) if xs[j]), Fraction(0)))
        total += q.L[i] * xi
    return total


def read_quadric(path) -> InhomQuadric:
    try:
        with open(path, encoding="utf-8") as fh:
            return InhomQuadric.from_dict(json.load(fh))
    except OSError as exc:
        raise InputError(f"cannot read quadric file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"quadric file {path} is not valid JSON: {exc}") from exc


# ------------------------------------------------------------ fitting


@dataclass(frozen=True)
class QuadricSpace:
    """All quadrics through a point set, as a canonical basis."""

    dim: int
    basis: tuple[InhomQuadric, ...]
    point_count: int
    rank: int

    @property
    def dim_ambient(self) -> int:
        return moment_length(self.dim)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def is_perfect(self) -> bool:
        return self.dimension == 1 and self.basis[0].is_ellipsoidal()

    @property
    def quadric(self) -> InhomQuadric | None:
        """The unique quadric (up to scale) when the space is one-dimensional."""
        return self.basis[0] if self.dimension == 1 else None

    def representative(self) -> InhomQuadric | None:
        """Quadric used for verification: the unique one, otherwise the sum
        of the canonical basis; ``None`` for an empty space."""
        if not self.basis:
            return None
        q = self.basis[0]
        for b in self.basis[1:]:
            q = q + b
        return q.normalized()


def fit_quadric_space(P) -> QuadricSpace:
    pts = P.vertices if isinstance(P, LatticePolytope) else check_lattice_points(P)
    dim = len(pts[0])
    rows = [moment_row(v) for v in pts]
    rk, kernel = rank_nullspace(rows)
    basis = tuple(InhomQuadric.from_coefficients(v, dim) for v in kernel)
    return QuadricSpace(dim, basis, len(pts), rk)


# ------------------------------------------------------------ printed form


def theorem_coefficients(n: int) -> dict[str, int]:
    """Coefficient formulas of the supertope quadric as printed."""
    if n < 6:
        raise InputError(f"the series starts at n = 6, got n = {n}")
    return {
        "q_ii": 2 - 5 * n + n * n,
        "q_ij": 12 - 7 * n + n * n,
        "q_in": 4 - 5 * n + n * n,
        "q_nn": -2 - 3 * n + n * n,
        "l_i": -2 + 5 * n - n * n,
        "l_n": 6 + 5 * n - n * n,
    }


def symmetric_form(n: int, q_ii, q_ij, q_in, q_nn, l_i, l_n, c=0) -> InhomQuadric:
    """Quadric invariant under permutations of the first ``n-1`` coordinates."""
    Q = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i < n - 1 and j < n - 1:
                Q[i][j] = to_fraction(q_ii if i == j else q_ij)
            elif i == j:
                Q[i][j] = to_fraction(q_nn)
            else:
                Q[i][j] = to_fraction(q_in)
    L = [to_fraction(l_i)] * (n - 1) + [to_fraction(l_n)]
    return InhomQuadric(n, tuple(map(tuple, Q)), tuple(L), c)


def closed_form(n: int) -> InhomQuadric:
    t = theorem_coefficients(n)
    return symmetric_form(n, t["q_ii"], t["q_ij"], t["q_in"], t["q_nn"], t["l_i"], t["l_n"])


def symmetric_coefficients(q: InhomQuadric) -> dict[str, Fraction] | None:
    """Read (q_ii, q_ij, q_in, q_nn, l_i, l_n, c) off a quadric of the
    symmetric shape, or ``None`` when it is not of that shape."""
    n = q.dim
    if n < 3:
        return None
    vals = {
        "q_ii": q.Q[0][0],
        "q_ij": q.Q[0][1],
        "q_in": q.Q[0][n - 1],
        "q_nn": q.Q[n - 1][n - 1],
        "l_i": q.L[0],
        "l_n": q.L[n - 1],
        "c": q.c,
    }
    if symmetric_form(n, *[vals[k] for k in ("q_ii", "q_ij", "q_in", "q_nn", "l_i", "l_n", "c")]) != q:
        return None
    return vals


def proportional(a: InhomQuadric, b: InhomQuadric) -> bool:
    return a.dim == b.dim and a.normalized() == b.normalized()


@dataclass(frozen=True)
class AuditReport:
    n: int
    coefficients: dict[str, int]
    family_labels: tuple[str, ...]
    family_max_residual: tuple[Fraction, ...]
    residuals: tuple[tuple[tuple[int, ...], Fraction], ...]
    witness: tuple[int, ...] | None
    witness_residual: Fraction | None
    symbol_map: dict[str, str] = field(
        default_factory=lambda: {"d": "q_ii", "m": "q_ij", "e": "q_in", "b": "q_nn", "l_n": "l_n"}
    )

    @property
    def verdict(self) -> str:
        return "exact-match" if self.witness is None else "mismatch"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "coefficients": dict(self.coefficients),
            "symbol_map": dict(self.symbol_map),
            "verdict": self.verdict,
            "families": [
                {"family": lab, "max_abs_residual": fmt_rational(r)}
                for lab, r in zip(self.family_labels, self.family_max_residual)
            ],
            "witness": list(self.witness) if self.witness is not None else None,
            "witness_residual": fmt_rational(self.witness_residual) if self.witness_residual is not None else None,
            "residuals": [{"vertex": list(v), "value": fmt_rational(r)} for v, r in self.residuals],
        }


def audit_theorem(n: int, P: LatticePolytope, config: PolytopeConfig | None = None) -> AuditReport:
    """Evaluate the printed supertope quadric on every vertex of ``P``.

    Nothing is corrected here; the report only records residuals.
    """
    if P.dim != n:
        raise InputError(f"polytope has dimension {P.dim}, audit requested for n = {n}")
    form = closed_form(n)
    if P.family_of is not None:
        labels_idx = list(P.family_of)
        nfam = max(labels_idx) + 1
        if config is not None:
            labels = tuple(format_family(f) for f in config.families)
        else:
            labels = tuple(f"family {i}" for i in range(nfam))
    else:
        labels_idx = [0] * len(P.vertices)
        labels = ("all vertices",)
    maxima = [Fraction(0)] * len(labels)
    table = []
    witness = None
    witness_val = None
    # recomputed from scratch on every call
    for v, fam in zip(P.vertices, labels_idx):
        r = evaluate(form, v)
        table.append((v, r))
        maxima[fam] = max(maxima[fam], abs(r))
        if r != 0 and witness is None:
            witness, witness_val = v, r
    return AuditReport(n, theorem_coefficients(n), labels, tuple(maxima), tuple(table), witness, witness_val)


# ------------------------------------------------------------ estimator


class CircumscribedQuadric(BaseEstimator):
    """Fit the space of quadrics passing through a set of lattice points.

    Parameters
    ----------
    require_perfect : bool, default=False
        Raise ``InputError`` from ``fit`` unless the fitted space is
        one-dimensional with a positive definite quadratic part.

    Attributes
    ----------
    space_ : QuadricSpace
    quadric_ : InhomQuadric or None
        Unique quadric for a perfect fit, otherwise the sum of the basis.
    is_perfect_ : bool
    n_features_in_ : int
    """

    def __init__(self, require_perfect=False):
        self.require_perfect = require_perfect

    def fit(self, X, y=None):
        pts = check_lattice_points(X)
        self.n_features_in_ = len(pts[0])
        self.space_ = fit_quadric_space(pts)
        self.is_perfect_ = self.space_.is_perfect
        if self.require_perfect and not self.is_perfect_:
            raise InputError(
                f"point set is not perfect: quadric space has dimension {self.space_.dimension}"
            )
        self.quadric_ = self.space_.representative()
        return self

    def decision_function(self, X):
        """Exact values ``f(x)`` as an object array of ``Fraction``."""
        check_is_fitted(self, "space_")
        if self.quadric_ is None:
            raise InputError("no quadric passes through the fitted points")
        pts = check_lattice_points(X, dim=self.n_features_in_)
        return as_object_array([evaluate(self.quadric_, p) for p in pts])

    def predict(self, X):
        """-1 inside, 0 on, +1 outside the fitted quadric."""
        vals = self.decision_function(X)
        return np.array([(v > 0) - (v < 0) for v in vals], dtype=int)
