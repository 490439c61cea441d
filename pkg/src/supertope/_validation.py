"""Input validation shared by the estimators and the functional API."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import InputError
from .exact import to_fraction


def check_lattice_points(X, *, dim: int | None = None, min_points: int = 1) -> list[tuple[int, ...]]:
    """Return ``X`` as a list of integer tuples.

    Accepts nested sequences or arrays.  Float entries are accepted only when
    integral; anything else raises ``InputError``.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise InputError(f"expected a 2-d array of points, got shape {X.shape}")
        rows = X.tolist()
    else:
        rows = [list(r) for r in X]
    if len(rows) < min_points:
        raise InputError(f"need at least {min_points} point(s), got {len(rows)}")
    pts = []
    for r in rows:
        vec = []
        for x in r:
            q = to_fraction(x)
            if q.denominator != 1:
                raise InputError(f"lattice point has a non-integer coordinate {q}")
            vec.append(int(q))
        pts.append(tuple(vec))
    d = len(pts[0]) if pts else dim
    if dim is not None and d != dim:
        raise InputError(f"points have {d} coordinates, expected {dim}")
    if any(len(p) != d for p in pts):
        raise InputError("points have inconsistent dimensions")
    if d == 0:
        raise InputError("points must have at least one coordinate")
    return pts


def check_rational_vector(x, dim: int | None = None) -> list[Fraction]:
    vec = [to_fraction(v) for v in (x.tolist() if isinstance(x, np.ndarray) else x)]
    if dim is not None and len(vec) != dim:
        raise InputError(f"vector has {len(vec)} coordinates, expected {dim}")
    return vec


def check_symmetric_matrix(S) -> list[list[Fraction]]:
    rows = [[to_fraction(v) for v in r] for r in (S.tolist() if isinstance(S, np.ndarray) else S)]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise InputError("expected a nonempty square matrix")
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(i)):
        raise InputError("matrix is not symmetric")
    return rows


def as_object_array(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    out[:] = list(values)
    return out
