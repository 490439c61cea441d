import random
from collections import defaultdict

import pytest

from supertope.exact import det_exact, ldlt_pd_check
from supertope.families import LatticePolytope, bundled_config
from supertope.quadric import fit_quadric_space

_criteria: dict[int, str] = {}
_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, text): acceptance criterion number k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    k, text = mark.args
    _criteria[k] = text
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes[k].append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_criteria):
        results = _outcomes.get(k, [])
        ok = bool(results) and all(o == "passed" for _, o in results)
        failed = [name for name, o in results if o != "passed"]
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {_criteria[k]}"
        if failed:
            line += f"  [failing: {', '.join(failed)}]"
        tr.write_line(line)


# ------------------------------------------------------------ helpers


def random_unimodular(rng: random.Random, n: int, bound: int = 2, steps: int = 8):
    """Product of random signed elementary matrices with entries kept
    within ``bound``; unimodular by construction."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            U[i] = [-x for x in U[i]]
            continue
        c = rng.choice((-1, 1))
        row = [a + c * b for a, b in zip(U[i], U[j])]
        if max(abs(x) for x in row) <= bound:
            U[i] = row
    assert abs(det_exact(U)) == 1
    return U


def apply(U, v):
    return tuple(sum(U[i][j] * v[j] for j in range(len(v))) for i in range(len(U)))


def random_pd_integer(rng: random.Random, n: int, bound: int = 5):
    while True:
        S = [[0] * n for _ in range(n)]
        for i in range(n):
            S[i][i] = rng.randint(1, bound)
            for j in range(i):
                S[i][j] = S[j][i] = rng.randint(-bound, bound)
        if ldlt_pd_check(S)[0]:
            return S


UNIT_SQUARE = LatticePolytope.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
CUBE = LatticePolytope.from_points([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])


@pytest.fixture(scope="session")
def upsilon6():
    return bundled_config("corrected").build(6)


@pytest.fixture(scope="session")
def upsilon6_form(upsilon6):
    space = fit_quadric_space(upsilon6)
    assert space.is_perfect
    return space.quadric


@pytest.fixture(scope="session")
def default6():
    return bundled_config("default").build(6)
