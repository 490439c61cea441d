import random
from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from conftest import CUBE, UNIT_SQUARE, apply, random_unimodular

from supertope.errors import BudgetExceeded, InputError
from supertope.families import LatticePolytope
from supertope.hull import (
    SkeletonGraph,
    relative_volume,
    search_simplices,
    skeleton,
    srg_check,
    triangle_census,
    verify_certificate,
)
from supertope.lp import feasible_point
from supertope.quadric import primitive_matrix

OCTAHEDRON = LatticePolytope.from_points([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
PENTAGON = LatticePolytope.from_points([(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)])


def cofactor_det(M):
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))


def cycle_graph(k):
    return SkeletonGraph(k, tuple(sorted(tuple(sorted((i, (i + 1) % k))) for i in range(k))), ())


def strict_hull_2d(points):
    """Andrew's monotone chain, collinear points dropped; counter-clockwise."""
    pts = sorted(set(points))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def test_small_skeletons():
    G = skeleton(UNIT_SQUARE)
    assert len(G.edges) == 4 and G.degree_sequence == (2, 2, 2, 2)
    assert srg_check(G) == (4, 2, 0, 2)
    T = skeleton([(0, 0), (1, 0), (0, 1)])
    assert T.edges == ((0, 1), (0, 2), (1, 2))
    C = skeleton(CUBE)
    assert len(C.edges) == 12 and set(C.degree_sequence) == {3}
    for i, j in C.edges:
        # cube edges join vertices differing in one coordinate
        assert sum(a != b for a, b in zip(CUBE.vertices[i], CUBE.vertices[j])) == 1
    O = skeleton(OCTAHEDRON)
    assert len(O.edges) == 12 and srg_check(O) == (6, 4, 2, 4)


def test_certificates_verify():
    for P in (UNIT_SQUARE, CUBE, OCTAHEDRON, PENTAGON):
        G = skeleton(P)
        assert len(G.certificates) == len(G.edges)
        for (i, j), cert in zip(G.edges, G.certificates):
            assert verify_certificate(P.vertices, i, j, cert)


def test_skeleton_rejects_flat_input():
    with pytest.raises(InputError):
        skeleton([(0, 0), (1, 1), (2, 2)])


def test_skeleton_against_2d_hull():
    rng = random.Random(5)
    for _ in range(25):
        pts = [(rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(12)]
        hull = strict_hull_2d(pts)
        if len(hull) < 3:
            continue
        P = LatticePolytope.from_points(hull)
        idx = {v: i for i, v in enumerate(P.vertices)}
        expected = {tuple(sorted((idx[hull[k]], idx[hull[(k + 1) % len(hull)]]))) for k in range(len(hull))}
        assert set(skeleton(P).edges) == expected


def test_srg_examples():
    assert srg_check(cycle_graph(5)) == (5, 2, 0, 1)
    assert srg_check(cycle_graph(4)) == (4, 2, 0, 2)
    assert srg_check(cycle_graph(6)) is None
    assert srg_check(skeleton(PENTAGON)) == (5, 2, 0, 1)
    path = SkeletonGraph(3, ((0, 1), (1, 2)), ())
    assert srg_check(path) is None


def test_srg_identity_on_returned_parameters(upsilon6, upsilon6_form):
    graphs = [cycle_graph(4), cycle_graph(5), skeleton(OCTAHEDRON), skeleton(upsilon6, upsilon6_form)]
    for G in graphs:
        v, k, lam, mu = srg_check(G)
        assert k * (k - lam - 1) == (v - k - 1) * mu


def test_upsilon6_skeleton(upsilon6, upsilon6_form):
    G = skeleton(upsilon6, upsilon6_form)
    assert len(G.edges) == 216
    assert srg_check(G) == (27, 16, 10, 8)
    for (i, j), cert in zip(G.edges, G.certificates):
        assert verify_certificate(upsilon6.vertices, i, j, cert)


def test_relative_volume_examples():
    assert relative_volume([(0, 0), (1, 0), (0, 1)]) == 1
    assert relative_volume([(0, 0), (1, 0), (1, 2)]) == 2
    with pytest.raises(InputError):
        relative_volume([(0, 0), (1, 0)])


def test_relative_volume_against_cofactor():
    rng = random.Random(2026)
    for _ in range(100):
        n = rng.randint(1, 6)
        S = [tuple(rng.randint(-4, 4) for _ in range(n)) for _ in range(n + 1)]
        M = [[a - b for a, b in zip(v, S[0])] for v in S[1:]]
        assert relative_volume(S) == abs(cofactor_det(M))


def test_relative_volume_invariance():
    rng = random.Random(8)
    for _ in range(20):
        n = rng.randint(1, 5)
        S = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(n + 1)]
        vol = relative_volume(S)
        U = random_unimodular(rng, n)
        assert relative_volume([apply(U, v) for v in S]) == vol
        for p in list(permutations(range(n + 1)))[:6]:
            assert relative_volume([S[i] for i in p]) == vol


def test_search_small_cases():
    assert search_simplices(UNIT_SQUARE, 2).hits == ()
    res = search_simplices(UNIT_SQUARE, 1)
    assert len(res.hits) == 4 and res.complete
    with pytest.raises(InputError):
        search_simplices(UNIT_SQUARE, 0)


def test_search_against_brute_force():
    rng = random.Random(17)
    for trial in range(12):
        n = 2 if trial % 2 else 3
        pts = {tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(rng.randint(n + 2, 12))}
        P = LatticePolytope.from_points(pts)
        if P.affine_rank < n:
            continue
        vols = Counter()
        subsets = {}
        for sub in combinations(range(len(P)), n + 1):
            vol = relative_volume([P.vertices[i] for i in sub])
            if vol:
                vols[vol] += 1
                subsets.setdefault(vol, []).append(sub)
        for target, count in vols.items():
            res = search_simplices(P, target, node_budget=10**9)
            assert [h.vertex_indices for h in res.hits] == subsets[target]
        assert search_simplices(P, max(vols) + 1).hits == ()


def test_search_budget():
    with pytest.raises(BudgetExceeded) as exc:
        search_simplices(CUBE, 1, node_budget=5)
    assert not exc.value.partial.complete


def test_upsilon6_contains_volume_three_simplex(upsilon6):
    res = search_simplices(upsilon6, 3, max_hits=1)
    hit = res.hits[0]
    assert relative_volume([upsilon6.vertices[i] for i in hit.vertex_indices]) == 3


def test_census_examples():
    sq = triangle_census(UNIT_SQUARE, [[1, 0], [0, 1]])
    assert sq.equilateral == {1: 0, 2: 0}
    assert sq.norm_histogram == {1: 4, 2: 2}
    tri = triangle_census(LatticePolytope.from_points([(0, 0), (1, 0), (0, 1)]), [[2, 1], [1, 2]])
    assert tri.norm_histogram == {2: 3}
    assert tri.equilateral == {2: 1}
    assert triangle_census(UNIT_SQUARE, [[1, 0], [0, 1]], s=2).equilateral == {2: 0}


def test_upsilon6_census(upsilon6, upsilon6_form):
    Q = primitive_matrix(upsilon6_form.Q)
    c = triangle_census(upsilon6, Q)
    assert sum(c.norm_histogram.values()) == 27 * 26 // 2
    assert len(c.norm_histogram) == 2
    small, big = sorted(c.norm_histogram)
    assert big == 2 * small
    assert c.equilateral[c.max_norm] == 45
    # invariant under permutations of the first n-1 coordinates
    moved = LatticePolytope.from_points([(v[3], v[0], v[4], v[1], v[2], v[5]) for v in upsilon6.vertices])
    assert triangle_census(moved, Q).equilateral == c.equilateral


def test_degree_sequence_unimodular_invariance():
    rng = random.Random(21)
    for P in (CUBE, OCTAHEDRON, PENTAGON, UNIT_SQUARE):
        base = sorted(skeleton(P).degree_sequence)
        for _ in range(3):
            U = random_unimodular(rng, P.dim)
            moved = LatticePolytope.from_points([apply(U, v) for v in P.vertices])
            assert sorted(skeleton(moved).degree_sequence) == base


def test_feasible_point():
    x = feasible_point([[1, 1]], [2], [[1, -1]], [0], 2)
    assert x is not None and x[0] + x[1] == 2 and x[0] - x[1] <= 0
    assert feasible_point([], [], [[1], [-1]], [1, -2], 1) is None
    assert feasible_point([[1, 0], [1, 0]], [1, 2], [], [], 2) is None
    assert feasible_point([], [], [], [], 3) == [Fraction(0)] * 3
