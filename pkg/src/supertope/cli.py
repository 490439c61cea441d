"""Command-line interface.

Exit codes: 0 verified, 1 mathematical verdict negative, 2 input error,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

from .construct import (
    build_upsilon,
    default_apexes,
    default_gram_basis,
    diagonal_lattice,
    double_to_C,
    find_apexes,
    gram_structure,
    lovasz_bound,
    minimal_vertex_count,
)
from .disambiguate import disambiguate_families
from .enumeration import DEFAULT_NODE_BUDGET, check_delaunay, lattice_minimal_vectors
from .errors import BudgetExceeded, InputError, NotCircumscribed, NotPositiveDefinite, SupertopeError
from .exact import fmt_rational
from .families import (
    LatticePolytope,
    PolytopeConfig,
    bundled_config,
    format_vertex_file,
    load_polytope_config,
    read_vertex_file,
)
from .hull import DEFAULT_SIMPLEX_BUDGET, search_simplices, skeleton, srg_check, triangle_census
from .quadric import InhomQuadric, audit_theorem, fit_quadric_space, primitive_matrix, read_quadric
from .report import Report, atomic_write, digest_text, dumps

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class _Run:
    def __init__(self, args, command):
        self.args = args
        self.report = Report(command, getattr(args, "n", None))

    @contextmanager
    def stage(self, name):
        t = time.perf_counter()
        try:
            yield
        finally:
            self.report.timings[name] = time.perf_counter() - t


# ------------------------------------------------------------ inputs


def _load_config(spec: str | None) -> PolytopeConfig:
    if spec is None:
        return bundled_config("default")
    if Path(spec).is_file():
        return load_polytope_config(spec)
    return bundled_config(spec)


def _polytope(run: _Run) -> LatticePolytope:
    """Vertex set from ``--in`` or built from ``--config`` at ``--n``."""
    args = run.args
    if getattr(args, "infile", None):
        P = read_vertex_file(args.infile)
        run.report.inputs["input_digest"] = digest_text(Path(args.infile).read_text(encoding="utf-8"))
        if run.report.n is None:
            run.report.n = P.dim
        elif run.report.n != P.dim:
            raise InputError(f"--n {run.report.n} disagrees with the vertex file dimension {P.dim}")
        return P
    if args.n is None:
        raise InputError("give either --in FILE or --n N")
    cfg = _load_config(args.config)
    run.report.inputs["config_digest"] = cfg.digest
    run.report.details["config_name"] = cfg.name
    return cfg.build(args.n)


def _form(run: _Run, P: LatticePolytope) -> InhomQuadric | None:
    """Quadric from ``--form``, else the fitted representative of ``P``."""
    if getattr(run.args, "form", None):
        q = read_quadric(run.args.form)
        if q.dim != P.dim:
            raise InputError(f"form has dimension {q.dim}, vertex set {P.dim}")
        return q
    with run.stage("fit"):
        space = fit_quadric_space(P)
    run.report.set("quadric_space_dim", space.dimension)
    return space.representative()


def _parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(";", ",").split(","))
    except ValueError:
        raise InputError(f"cannot parse integer vector {text!r}") from None


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse rational {text!r}") from None


def _apexes(args, n):
    if getattr(args, "apex", None):
        a = _parse_vector(args.apex)
        if len(a) != n + 1:
            raise InputError(f"--apex needs {n + 1} coordinates")
        return a, tuple(-x for x in a[:-1]) + (1 - a[-1],)
    return default_apexes(n)


def _finish(run: _Run, ok: bool, incomplete: bool = False) -> int:
    run.report.status = "incomplete" if incomplete else ("verified" if ok else "failed")
    text = run.report.dumps()
    if getattr(run.args, "report", None):
        atomic_write(run.args.report, text)
    else:
        sys.stdout.write(text)
    if incomplete:
        return EXIT_BUDGET
    return EXIT_OK if ok else EXIT_FAILED


# ------------------------------------------------------------ commands


def cmd_gen(run: _Run) -> int:
    args = run.args
    with run.stage("build"):
        cfg = _load_config(args.config)
        P = build_upsilon(cfg, args.n, enforce_count=False)
    run.report.inputs["config_digest"] = cfg.digest
    run.report.set("vertex_count", len(P))
    run.report.details.update(
        config_name=cfg.name, expected_vertex_count=minimal_vertex_count(args.n), affine_rank=P.affine_rank
    )
    ok = len(P) == minimal_vertex_count(args.n)
    if args.out:
        atomic_write(args.out, format_vertex_file(P))
    else:
        # vertex file on stdout; a report is only written when it has its own file
        sys.stdout.write(format_vertex_file(P))
        if not args.report:
            return EXIT_OK if ok else EXIT_FAILED
    return _finish(run, ok)


def cmd_fit(run: _Run) -> int:
    P = _polytope(run)
    run.report.set("vertex_count", len(P))
    with run.stage("fit"):
        space = fit_quadric_space(P)
    run.report.set("quadric_space_dim", space.dimension)
    run.report.set("is_pd", space.is_perfect)
    run.report.details["moment_rank"] = space.rank
    run.report.details["basis"] = [q.to_dict() for q in space.basis]
    rep = space.representative()
    if rep is not None and run.args.out:
        atomic_write(run.args.out, dumps(rep.to_dict()))
    return _finish(run, space.is_perfect)


def cmd_verify(run: _Run) -> int:
    P = _polytope(run)
    run.report.set("vertex_count", len(P))
    q = _form(run, P)
    if q is None:
        run.report.details["reason"] = "no quadric passes through the vertex set"
        return _finish(run, False)
    pd = q.is_ellipsoidal()
    run.report.set("is_pd", pd)
    run.report.details["form"] = q.to_dict()
    if not pd:
        run.report.details["reason"] = "quadratic part is not positive definite"
        return _finish(run, False)
    try:
        with run.stage("enumerate"):
            verdict = check_delaunay(P, q, run.args.node_budget)
    except NotCircumscribed as exc:
        run.report.details["reason"] = "form does not pass through every vertex"
        run.report.details["witness"] = list(exc.vertex)
        run.report.details["witness_value"] = fmt_rational(exc.value)
        return _finish(run, False)
    run.report.set(
        "delaunay",
        {
            "interior_count": verdict.interior_count,
            "on_quadric_count": verdict.on_quadric_count,
            "matches_vertices": verdict.on_quadric_matches_vertices,
            "is_delaunay": verdict.is_delaunay,
            "witness": list(verdict.witness) if verdict.witness is not None else None,
            "node_count": verdict.enumeration.node_count,
            "elimination_order": list(verdict.enumeration.elimination_order),
        },
    )
    return _finish(run, verdict.is_delaunay)


def cmd_audit(run: _Run) -> int:
    args = run.args
    if args.n is None:
        raise InputError("audit needs --n")
    cfg = None
    if args.infile:
        P = _polytope(run)
    else:
        cfg = _load_config(args.config)
        run.report.inputs["config_digest"] = cfg.digest
        P = cfg.build(args.n)
    run.report.set("vertex_count", len(P))
    with run.stage("audit"):
        audit = audit_theorem(args.n, P, cfg)
    doc = audit.to_dict()
    run.report.set(
        "theorem_audit",
        {
            "verdict": doc["verdict"],
            "families": doc["families"],
            "witness": doc["witness"],
            "witness_residual": doc["witness_residual"],
        },
    )
    run.report.details.update(coefficients=doc["coefficients"], symbol_map=doc["symbol_map"], residuals=doc["residuals"])
    return _finish(run, audit.verdict == "exact-match")


def cmd_disambiguate(run: _Run) -> int:
    args = run.args
    if args.n is None:
        raise InputError("disambiguate needs --n")
    with run.stage("search"):
        res = disambiguate_families(args.n, args.t_range, args.allow_negation, args.node_budget)
    run.report.details.update(res.to_dict())
    if not res.complete:
        return _finish(run, False, incomplete=True)
    if args.out and res.admissible:
        atomic_write(args.out, res.admissible[0].config_text)
    return _finish(run, bool(res.admissible))


def _doubled(run: _Run):
    P = _polytope(run)
    with run.stage("double"):
        C = double_to_C(P, _apexes(run.args, P.dim))
    return P, C


def cmd_double(run: _Run) -> int:
    args = run.args
    P, C = _doubled(run)
    run.report.set("vertex_count", len(C.vertices))
    section = C.section(1)
    details = {
        "base_vertex_count": len(P),
        "apexes": [list(a) for a in C.apexes],
        "centrally_symmetric": True,
        "section_matches_base": section == P,
    }
    if args.search_apexes:
        with run.stage("apex_search"):
            cands = find_apexes(P, args.search_apexes, node_budget=args.node_budget)
        details["apex_candidates"] = [
            {"apexes": [list(a) for a in c.apexes], "is_pd": c.is_pd, "is_delaunay": c.is_delaunay}
            for c in cands
            if c.is_pd
        ]
    CP = C.as_polytope()
    with run.stage("fit"):
        space = fit_quadric_space(CP)
    run.report.set("quadric_space_dim", space.dimension)
    run.report.set("is_pd", space.is_perfect)
    ok = space.is_perfect
    if space.is_perfect:
        with run.stage("enumerate"):
            verdict = check_delaunay(CP, space.quadric, args.node_budget)
        run.report.set("delaunay", {k: v for k, v in verdict.to_dict().items()})
        ok = verdict.is_delaunay
    elif space.quadric is not None:
        details["form"] = space.quadric.to_dict()
    run.report.details.update(details)
    if args.out:
        atomic_write(args.out, format_vertex_file(CP))
    return _finish(run, ok)


def _minimal_summary(D, Q, budget) -> dict:
    mn, vecs = lattice_minimal_vectors(D.lattice, Q, budget)
    diag_set = set(D.diagonals) | {tuple(-x for x in d) for d in D.diagonals}
    return {
        "minimal_norm": fmt_rational(mn),
        "minimal_vector_count": len(vecs),
        "minimal_vectors_are_diagonals": set(vecs) == diag_set,
    }


def cmd_lattice(run: _Run) -> int:
    args = run.args
    P, C = _doubled(run)
    n = P.dim
    with run.stage("lattice"):
        D = diagonal_lattice(C)
    q = _form(run, P)
    if q is None or not q.is_ellipsoidal():
        raise NotPositiveDefinite("lattice analysis needs a positive definite form on the base")
    Q = [list(r) for r in q.Q] if args.form else primitive_matrix(q.Q)
    basis = [_parse_vector(b) for b in args.basis.split("/")] if args.basis else default_gram_basis(C)
    with run.stage("gram"):
        g = gram_structure(Q, basis, n)
    ext = [r + [Fraction(0)] for r in Q] + [[Fraction(0)] * n + [Fraction(1)]]
    with run.stage("minimal_vectors"):
        block = _minimal_summary(D, ext, args.node_budget)
    gd = g.to_dict()
    run.report.set(
        "gram",
        {
            "sigma": gd["sigma"],
            "alpha": gd["alpha"],
            "closed_form_alpha": gd["closed_form_alpha"],
            "match": g.proportional_match,
            "strict_match": g.strict_match,
            "admissible_scale": g.admissible_scale,
        },
    )
    run.report.details.update(
        D.to_dict(),
        gram=gd["gram"],
        gram_basis=gd["basis"],
        is_sigma_I_alpha_J=g.is_sigma_I_alpha_J,
        sigma=gd["sigma"],
        alpha=gd["alpha"],
        closed_form_alpha=gd["closed_form_alpha"],
        form_Q=[[fmt_rational(x) for x in r] for r in Q],
        block_form=block,
    )
    # the doubled polytope's own circumscribed form, when it is an ellipsoid
    with run.stage("doubled_form"):
        space = fit_quadric_space(C.as_polytope())
    own = {"quadric_space_dim": space.dimension, "is_pd": space.is_perfect}
    if space.is_perfect:
        QC = primitive_matrix(space.quadric.Q)
        gc = gram_structure(QC, basis, n).to_dict()
        own.update(_minimal_summary(D, QC, args.node_budget))
        own.update(form_Q=[[fmt_rational(x) for x in r] for r in QC], gram=gc["gram"],
                   is_sigma_I_alpha_J=gc["is_sigma_I_alpha_J"], sigma=gc["sigma"], alpha=gc["alpha"])
    run.report.details["doubled_form"] = own
    return _finish(run, D.contains_2Z and D.contains_2Z_hnf)


def cmd_skeleton(run: _Run) -> int:
    P = _polytope(run)
    run.report.set("vertex_count", len(P))
    q = None
    if getattr(run.args, "form", None):
        q = read_quadric(run.args.form)
    else:
        sp = fit_quadric_space(P)
        q = sp.quadric if sp.is_perfect else None
    if q is not None and not q.is_ellipsoidal():
        q = None
    with run.stage("skeleton"):
        G = skeleton(P, q)
    srg = srg_check(G)
    run.report.set("skeleton", {"v": G.vertex_count, "edge_count": len(G.edges), "srg": list(srg) if srg else None})
    run.report.details.update(G.to_dict())
    return _finish(run, True)


def cmd_simplices(run: _Run) -> int:
    args = run.args
    if args.target is None:
        raise InputError("simplices needs --target")
    P = _polytope(run)
    run.report.set("vertex_count", len(P))
    try:
        with run.stage("search"):
            res = search_simplices(P, args.target, args.node_budget)
    except BudgetExceeded as exc:
        part = exc.partial
        run.report.set("simplices", {"target": args.target, "found": len(part.hits), "complete": False})
        run.report.details.update(part.to_dict())
        return _finish(run, False, incomplete=True)
    run.report.set("simplices", {"target": args.target, "found": len(res.hits), "complete": res.complete})
    run.report.details.update(res.to_dict())
    run.report.details["lovasz_bound"] = fmt_rational(lovasz_bound(P.dim))
    return _finish(run, bool(res.hits))


def cmd_triangles(run: _Run) -> int:
    P = _polytope(run)
    run.report.set("vertex_count", len(P))
    q = _form(run, P)
    if q is None or not q.is_ellipsoidal():
        raise NotPositiveDefinite("triangle census needs a positive definite form")
    s = _parse_rational(run.args.norm) if run.args.norm else None
    with run.stage("census"):
        census = triangle_census(P, q, s)
    run.report.details.update(census.to_dict())
    run.report.details["form_Q"] = [[fmt_rational(x) for x in r] for r in q.Q]
    return _finish(run, True)


def cmd_bound(run: _Run) -> int:
    if run.args.n is None:
        raise InputError("bound needs --n")
    b = lovasz_bound(run.args.n)
    run.report.details["lovasz_bound"] = fmt_rational(b)
    if run.args.target is not None:
        run.report.details["target"] = run.args.target
        run.report.details["within_bound"] = run.args.target <= b
        return _finish(run, run.args.target <= b)
    return _finish(run, True)


COMMANDS = {
    "gen": (cmd_gen, "expand a family config into a vertex file"),
    "fit": (cmd_fit, "fit the space of circumscribed quadrics"),
    "verify": (cmd_verify, "decide the empty-ellipsoid property"),
    "audit": (cmd_audit, "evaluate the closed-form quadric on a vertex set"),
    "disambiguate": (cmd_disambiguate, "search readings of the family table"),
    "double": (cmd_double, "build the centrally symmetric doubling"),
    "lattice": (cmd_lattice, "diagonal lattice, Gram test and minimal vectors"),
    "skeleton": (cmd_skeleton, "certified 1-skeleton and SRG parameters"),
    "simplices": (cmd_simplices, "search vertex simplices of a given volume"),
    "triangles": (cmd_triangles, "equilateral triangle census"),
    "bound": (cmd_bound, "upper bound on Delaunay simplex volume"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supertope", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=int)
        p.add_argument("--config", help="config file or bundled config name")
        p.add_argument("--in", dest="infile", metavar="FILE", help="vertex file")
        p.add_argument("--form", metavar="FILE", help="quadric JSON")
        p.add_argument("--out", metavar="FILE")
        p.add_argument("--report", metavar="FILE")
        p.add_argument("--target", type=int)
        p.add_argument("--t-range", type=int, default=None)
        p.add_argument("--allow-negation", action="store_true")
        budget = DEFAULT_SIMPLEX_BUDGET if name == "simplices" else DEFAULT_NODE_BUDGET
        p.add_argument("--node-budget", type=int, default=budget)
        p.add_argument("--norm", metavar="P/Q")
        if name in ("double", "lattice"):
            p.add_argument("--apex", help="first apex, comma separated; its partner is the antipode")
        if name == "double":
            p.add_argument("--search-apexes", type=int, default=0, metavar="BOUND")
        if name == "lattice":
            p.add_argument("--basis", help="slash-separated diagonal vectors replacing the default basis")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.n is None:
        parser.error("gen needs --n")
    run = _Run(args, args.command)
    try:
        return COMMANDS[args.command][0](run)
    except BudgetExceeded as exc:
        print(f"supertope: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, json.JSONDecodeError) as exc:
        print(f"supertope: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SupertopeError as exc:
        print(f"supertope: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
