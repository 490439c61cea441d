import random
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supertope.errors import DuplicateVertex, FamilySyntaxError, InputError, MultiplicityMismatch, SlotCountError
from supertope.families import (
    BinOp,
    Binom,
    FamilySpec,
    LatticePolytope,
    Neg,
    Num,
    Var,
    bundled_config,
    bundled_config_names,
    evaluate_expr,
    expand_family,
    format_family,
    format_vertex_file,
    load_polytope_config,
    parse_config,
    parse_family,
    parse_vertex_file,
)


def test_parse_examples():
    f = parse_family("[1^2,0^{n-3};-1] x (n-1)(n-2)/2")
    assert [(v, evaluate_expr(r, 6)) for v, r in f.prefix] == [(1, 2), (0, 3)]
    assert evaluate_expr(f.last, 6) == -1
    assert [f.multiplicity_at(n) for n in (6, 7, 8)] == [10, 15, 21]

    f = parse_family("[0^n] x 1")
    assert f.last is None
    assert expand_family(f, 6) == [(0,) * 6]

    with pytest.raises(SlotCountError):
        parse_family("[1,0^{n-1};0] x (n-1)")


def test_syntax_error_position():
    with pytest.raises(FamilySyntaxError) as exc:
        parse_family("[1,0^{n-2};0 x 3")
    assert exc.value.position == 13
    with pytest.raises(FamilySyntaxError) as exc:
        parse_family("[1,,0] x 1")
    assert exc.value.position == 3
    with pytest.raises(FamilySyntaxError):
        parse_family("[1,0] 5")


exprs = st.recursive(
    st.one_of(st.integers(0, 12).map(Num), st.just(Var())),
    lambda sub: st.one_of(
        st.builds(BinOp, st.sampled_from("+-*/"), sub, sub),
        st.builds(Neg, sub),
        st.builds(Binom, sub, sub),
    ),
    max_leaves=6,
)

families = st.builds(
    FamilySpec,
    st.lists(st.tuples(st.integers(-3, 3), exprs), min_size=1, max_size=4).map(tuple),
    st.one_of(st.none(), exprs),
    exprs,
    st.just("all-permutations"),
    st.booleans(),
)


@settings(max_examples=200, deadline=None)
@given(families)
def test_format_parse_round_trip(f):
    try:
        g = parse_family(format_family(f))
    except SlotCountError:
        return  # a structurally impossible family is rejected, not misread
    canonical = format_family(g)
    assert parse_family(canonical) == g
    assert format_family(parse_family(canonical)) == canonical
    for n in (6, 9):
        try:
            a = (f.slot_count(n), f.multiplicity_at(n))
        except (InputError, ZeroDivisionError):
            continue
        assert (g.slot_count(n), g.multiplicity_at(n)) == a


def test_expand_examples():
    f = parse_family("[1,0^{n-2};-1] x n-1")
    e = [tuple(int(i == j) for j in range(5)) + (-1,) for i in range(5)]
    assert expand_family(f, 6) == sorted(e)
    f = parse_family("[1^2,0^{n-3};-1] x (n-1)(n-2)/2")
    vecs = expand_family(f, 6)
    assert len(vecs) == 10
    assert all(sum(v[:5]) == 2 and v[5] == -1 for v in vecs)


def test_cyclic_mode_mismatch():
    f = parse_family("[1^2,0^{n-3};-1] x (n-1)(n-2)/2", mode="cyclic")
    with pytest.raises(MultiplicityMismatch) as exc:
        expand_family(f, 6)
    assert (exc.value.expected, exc.value.actual) == (10, 5)


@pytest.mark.parametrize("n,count", [(6, 27), (7, 35), (8, 44), (9, 54), (10, 65), (11, 77), (12, 90)])
def test_vertex_counts(n, count):
    for name in ("default", "corrected"):
        P = bundled_config(name).build(n)
        assert len(P) == count == n * (n + 1) // 2 + n
        assert list(P.vertices) == sorted(P.vertices)


@pytest.mark.parametrize("n", [6, 7, 8])
def test_permutation_invariance(n):
    P = bundled_config("default").build(n)
    verts = set(P.vertices)
    rng = random.Random(n)
    perms = list(permutations(range(n - 1)))
    for p in rng.sample(perms, 10):
        assert {tuple(v[i] for i in p) + (v[-1],) for v in verts} == verts


def test_build_rejects_small_n_and_overlap():
    with pytest.raises(InputError):
        bundled_config("default").build(5)
    cfg = parse_config("name: clash\n[1,0^{n-2};0] x n-1\n[0^{n-2},1;0] x n-1\n")
    with pytest.raises(DuplicateVertex):
        cfg.build(6)
    with pytest.raises(InputError):
        bundled_config("no-such-config")
    assert {"default", "corrected"} <= set(bundled_config_names())


def test_config_round_trip_and_digest(tmp_path):
    cfg = bundled_config("default")
    again = parse_config(cfg.to_text())
    assert again.families == cfg.families
    assert again.build(7) == cfg.build(7)
    path = tmp_path / "a.cfg"
    path.write_text(cfg.source)
    assert load_polytope_config(path).digest == cfg.digest
    path.write_text(cfg.source + "\n# edited\n")
    assert load_polytope_config(path).digest != cfg.digest


def test_vertex_file_round_trip(upsilon6):
    text = format_vertex_file(upsilon6)
    assert text.splitlines()[0] == "6 27"
    assert parse_vertex_file(text) == upsilon6
    with pytest.raises(InputError):
        parse_vertex_file("2 3\n0 0\n1 0\n")
    with pytest.raises(InputError):
        parse_vertex_file("2 2\n0 0\n0 0\n")


def test_polytope_validation():
    P = LatticePolytope.from_points([(1, 0), (0, 0), (1, 0), (0, 1)])
    assert P.vertices == ((0, 0), (0, 1), (1, 0))
    assert P.affine_rank == 2
    with pytest.raises(InputError):
        LatticePolytope(2, ((1, 0), (0, 0)))
