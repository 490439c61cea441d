from fractions import Fraction
from math import comb, factorial

import pytest

from supertope.construct import (
    build_upsilon,
    default_apexes,
    default_gram_basis,
    diagonal_lattice,
    diagonal_of,
    double_to_C,
    find_apexes,
    gram_structure,
    lovasz_bound,
    minimal_vertex_count,
    closed_form_alpha,
)
from supertope.enumeration import check_delaunay, lattice_minimal_vectors
from supertope.errors import DuplicateVertex, InputError, NotCentrallySymmetric
from supertope.exact import hnf_basis, member_of_lattice
from supertope.families import LatticePolytope, bundled_config, parse_config
from supertope.quadric import fit_quadric_space, primitive_matrix

WORKING_APEX = (1, 1, 1, 1, 1, -2, 2)


@pytest.mark.parametrize("n,count", [(6, 27), (7, 35), (12, 90)])
def test_build_upsilon_counts(n, count):
    assert minimal_vertex_count(n) == count
    assert len(build_upsilon(bundled_config("default"), n)) == count


def test_build_upsilon_enforces_count():
    cfg = parse_config("name: short\nmin_n: 6\n[0^n] x 1\n[1,0^{n-2};0] x n-1\n")
    with pytest.raises(InputError):
        build_upsilon(cfg, 6)
    assert len(build_upsilon(cfg, 6, enforce_count=False)) == 6


def test_default_apexes():
    assert default_apexes(6) == ((1,) * 6 + (3,), (-1,) * 6 + (-2,))
    assert default_apexes(9) == ((1,) * 9 + (6,), (-1,) * 9 + (-5,))


def test_doubling_structure(upsilon6):
    C = double_to_C(upsilon6)
    assert C.dim == 7
    assert len(C.vertices) == 2 * len(upsilon6) + 2 == 56
    assert C.center == (0,) * 6 + (Fraction(1, 2),)
    # central pairing is a fixed-point-free involution
    for i, j in enumerate(C.pairing):
        assert i != j and C.pairing[j] == i
        v, w = C.vertices[i], C.vertices[j]
        assert all(a + b == 2 * c for a, b, c in zip(v, w, C.center))
    assert C.section(1) == upsilon6
    assert {v[:-1] for v in C.vertices if v[-1] == 1} == set(upsilon6.vertices)
    assert set(default_apexes(6)) <= set(C.vertices)


def test_doubling_rejects_bad_apexes(upsilon6):
    with pytest.raises(InputError):
        double_to_C(upsilon6, [(1,) * 6, (-1,) * 6])
    with pytest.raises(DuplicateVertex):
        double_to_C(upsilon6, [(0,) * 6 + (1,), (0,) * 6 + (0,)])
    with pytest.raises(NotCentrallySymmetric):
        double_to_C(upsilon6, [(1,) * 6 + (3,), (1,) * 6 + (-2,)])
    with pytest.raises(InputError):
        double_to_C(LatticePolytope(2, ()))


def test_diagonal_examples():
    assert diagonal_of((0,) * 6 + (1,)) == (0,) * 6 + (1,)
    assert diagonal_of((1,) + (0,) * 5 + (1,)) == (2,) + (0,) * 5 + (1,)
    assert diagonal_of((1,) * 6 + (3,)) == (2,) * 6 + (5,)  # [2^n; 2n-7] at n=6


def test_diagonal_lattice_contains_2Z(upsilon6):
    C = double_to_C(upsilon6)
    D = diagonal_lattice(C)
    assert len(D.diagonals) == 28
    both = {diagonal_of(v) for v in C.vertices}
    for d in D.diagonals:
        assert next(x for x in d if x) > 0
        assert d in both and tuple(-x for x in d) in both
    assert D.lattice.is_full_rank
    assert D.contains_2Z and D.contains_2Z_hnf
    assert D.index == 64
    for i in range(7):
        assert member_of_lattice(D.lattice, tuple(2 * int(i == j) for j in range(7)))


def test_contains_2Z_methods_agree_on_failure():
    # diagonals (0,1), (6,1), (6,9) generate a lattice missing (2,0)
    C = double_to_C(LatticePolytope.from_points([(0,), (3,)]), [(3, 5), (-3, -4)])
    D = diagonal_lattice(C)
    assert not D.contains_2Z and not D.contains_2Z_hnf
    assert not member_of_lattice(hnf_basis(D.diagonals), (2, 0))
    assert D.index == 6


def test_closed_form_alpha():
    assert closed_form_alpha(6) == Fraction(1, 4)
    assert closed_form_alpha(10) == Fraction(2, 5)
    for n in range(6, 15):
        assert closed_form_alpha(n) == Fraction(1 + comb(n - 4, 2), 8 * (n - 5))
    with pytest.raises(InputError):
        closed_form_alpha(5)


def test_gram_detects_sigma_I_alpha_J():
    Q = [[3, 1, 1], [1, 3, 1], [1, 1, 3]]
    basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    g = gram_structure(Q, basis, 6)
    assert g.is_sigma_I_alpha_J
    assert (g.sigma, g.alpha) == (2, Fraction(1, 2))
    assert g.admissible_scale == "not-applicable"
    g2 = gram_structure([[2, 1], [1, 2]], [(1, 0, 0), (0, 1, 0), (0, 0, 1)], 6)
    assert not g2.is_sigma_I_alpha_J
    g3 = gram_structure([[1, 0], [0, 1]], [(1, 0, 0), (0, 1, 0), (0, 0, 1)], 6)
    assert g3.is_sigma_I_alpha_J and g3.alpha == 0 and not g3.proportional_match
    with pytest.raises(InputError):
        gram_structure(Q, [(1, 0, 0), (2, 0, 0), (0, 0, 1)], 6)


def test_gram_under_fitted_form(upsilon6, upsilon6_form):
    C = double_to_C(upsilon6)
    basis = default_gram_basis(C)
    assert basis[0] == (0,) * 6 + (1,)
    assert basis[-1] == (2,) * 6 + (5,)
    g = gram_structure(primitive_matrix(upsilon6_form.Q), basis, 6)
    assert g.closed_form_alpha == Fraction(1, 4)
    assert all(g.gram[i][j] == g.gram[j][i] for i in range(7) for j in range(7))
    # the measured Gram matrix is not of the form sigma(I + alpha J)
    assert not g.is_sigma_I_alpha_J
    assert g.admissible_scale == "none"


def test_lovasz_bound():
    assert lovasz_bound(6) == Fraction(3840, 77)
    assert lovasz_bound(4) == Fraction(192, 35)
    for n in range(1, 12):
        assert lovasz_bound(n) == Fraction(factorial(n) * 2**n, comb(2 * n, n))
    assert 3 <= lovasz_bound(6)


def test_printed_apexes_give_indefinite_form(upsilon6):
    space = fit_quadric_space(double_to_C(upsilon6).as_polytope())
    assert space.dimension == 1
    assert not space.is_perfect


def test_find_apexes(upsilon6):
    cands = [c for c in find_apexes(upsilon6, 3) if c.is_pd]
    assert [c.apexes[0] for c in cands] == [WORKING_APEX]
    assert cands[0].is_delaunay


def test_working_apexes_chain(upsilon6):
    C = double_to_C(upsilon6, [WORKING_APEX, (-1,) * 5 + (2, -1)])
    space = fit_quadric_space(C.as_polytope())
    assert space.is_perfect
    v = check_delaunay(C.as_polytope(), space.quadric)
    assert v.is_delaunay and v.on_quadric_count == 56
    D = diagonal_lattice(C)
    assert D.contains_2Z
    mn, vecs = lattice_minimal_vectors(D.lattice, primitive_matrix(space.quadric.Q))
    diag = set(D.diagonals) | {tuple(-x for x in d) for d in D.diagonals}
    assert set(vecs) == diag and len(vecs) == 56
