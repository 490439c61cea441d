"""Vertex-family shorthand: parsing, printing and expansion.

A family line looks like::

    [1^2,0^{n-3};-1] x (n-1)(n-2)/2

The entries before ``;`` are a multiset of values (``value^repeat``) that is
arranged over the leading coordinates; the expression after ``;`` is the
fixed last coordinate.  Without ``;`` the entries fill all ``n`` coordinates.
The number after ``x`` is the declared multiplicity, which the expansion must
reproduce exactly.  A leading ``-`` negates every vector of the family.

Expressions are integer arithmetic in ``n`` with ``+ - * /``, parentheses,
implicit multiplication (``(n-1)(n-2)``) and the binomial ``C(a,b)``.
Division must be exact when evaluated.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from importlib import resources
from math import comb
from pathlib import Path
from typing import Iterable, Union

from .errors import (
    DuplicateVertex,
    FamilySyntaxError,
    InputError,
    MultiplicityMismatch,
    SlotCountError,
)

MODES = ("all-permutations", "cyclic")


# ------------------------------------------------------------ expressions


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Binom:
    top: "Expr"
    bottom: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Binom]

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def evaluate_expr(e: Expr, n: int) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return n
    if isinstance(e, Neg):
        return -evaluate_expr(e.arg, n)
    if isinstance(e, Binom):
        a, b = evaluate_expr(e.top, n), evaluate_expr(e.bottom, n)
        return comb(a, b) if a >= 0 and b >= 0 else 0
    a, b = evaluate_expr(e.left, n), evaluate_expr(e.right, n)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if b == 0 or a % b:
        raise InputError(f"inexact division {a}/{b} in {format_expr(e)} at n={n}")
    return a // b


def format_expr(e: Expr) -> str:
    """Canonical text: explicit ``*``, minimal parentheses."""
    return _fmt(e, 0)


def _fmt(e: Expr, ctx: int) -> str:
    if isinstance(e, Num):
        return str(e.value) if e.value >= 0 else f"({e.value})" if ctx else str(e.value)
    if isinstance(e, Var):
        return "n"
    if isinstance(e, Binom):
        return f"C({_fmt(e.top, 0)},{_fmt(e.bottom, 0)})"
    if isinstance(e, Neg):
        s = "-" + _fmt(e.arg, 3)
        return f"({s})" if ctx else s
    p = _PREC[e.op]
    # left-associative: right operand of - and / needs a tighter context
    right_ctx = p + 1 if e.op in "-/" else p
    s = f"{_fmt(e.left, p)}{e.op}{_fmt(e.right, right_ctx)}"
    return f"({s})" if p < ctx else s


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # -- lexing helpers
    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, msg):
        raise FamilySyntaxError(msg, self.text, self.pos)

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    # -- expressions
    def expr(self) -> Expr:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            ch = self.peek()
            if ch in ("*", "/"):
                self.pos += 1
                node = BinOp(ch, node, self.unary())
            elif ch == "(" or ch == "n" or ch == "C" or ch.isdigit():
                # implicit multiplication, e.g. (n-1)(n-2) or 2n
                node = BinOp("*", node, self.atom())
            else:
                return node

    def unary(self) -> Expr:
        if self.peek() == "-":
            self.pos += 1
            arg = self.unary()
            if isinstance(arg, Num):
                return Num(-arg.value)
            return Neg(arg)
        if self.peek() == "+":
            self.pos += 1
            return self.unary()
        return self.atom()

    def atom(self) -> Expr:
        ch = self.peek()
        if ch.isdigit():
            return Num(self.integer())
        if ch == "n":
            self.pos += 1
            return Var()
        if ch == "C":
            self.pos += 1
            self.expect("(")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return Binom(a, b)
        if ch in ("(", "{"):
            close = ")" if ch == "(" else "}"
            self.pos += 1
            e = self.expr()
            self.expect(close)
            return e
        self.error("expected a number, 'n', 'C(' or '('")

    def exponent(self) -> Expr:
        # ^7, ^n, ^{n-3}, ^(n-3)
        ch = self.peek()
        if ch in ("{", "("):
            return self.atom()
        if ch == "n":
            self.pos += 1
            return Var()
        if ch.isdigit():
            return Num(self.integer())
        self.error("expected an exponent")


# ------------------------------------------------------------ families


@dataclass(frozen=True)
class FamilySpec:
    prefix: tuple[tuple[int, Expr], ...]
    last: Expr | None
    multiplicity: Expr
    mode: str = "all-permutations"
    negate: bool = False

    def slot_count(self, n: int) -> int:
        return sum(evaluate_expr(r, n) for _, r in self.prefix)

    def expected_slots(self, n: int) -> int:
        return n - 1 if self.last is not None else n

    def check_slots(self, n: int) -> None:
        got = self.slot_count(n)
        want = self.expected_slots(n)
        if got != want:
            where = "with a fixed last coordinate" if self.last is not None else "without a last coordinate"
            raise SlotCountError(
                f"{format_family(self)}: entries fill {got} slots at n={n}, {where} they must fill {want}"
            )
        if any(evaluate_expr(r, n) < 0 for _, r in self.prefix):
            raise SlotCountError(f"{format_family(self)}: negative repeat count at n={n}")

    def multiplicity_at(self, n: int) -> int:
        return evaluate_expr(self.multiplicity, n)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.peek():
        p.error("unexpected trailing text")
    return e


def parse_family(text: str, mode: str = "all-permutations") -> FamilySpec:
    if mode not in MODES:
        raise InputError(f"unknown expansion mode {mode!r}")
    p = _Parser(text)
    negate = False
    if p.peek() == "-":
        p.pos += 1
        negate = True
    p.expect("[")
    prefix = []
    while True:
        sign = 1
        if p.peek() == "-":
            p.pos += 1
            sign = -1
        value = sign * p.integer()
        rep: Expr = Num(1)
        if p.peek() == "^":
            p.pos += 1
            rep = p.exponent()
        prefix.append((value, rep))
        if p.peek() == ",":
            p.pos += 1
            continue
        break
    last = None
    if p.peek() == ";":
        p.pos += 1
        last = p.expr()
    p.expect("]")
    ch = p.peek()
    if ch in ("x", "×", "*"):
        p.pos += 1
    else:
        p.error("expected 'x' and a multiplicity")
    mult = p.expr()
    if p.peek():
        p.error("unexpected trailing text")
    spec = FamilySpec(tuple(prefix), last, mult, mode, negate)
    _check_symbolic_slots(spec, text)
    return spec


def _check_symbolic_slots(spec: FamilySpec, text: str) -> None:
    # Flags only families whose slot count can never match: a constant,
    # nonzero surplus at every n (checked where the expressions are defined).
    def surplus(n):
        return sum(evaluate_expr(r, n) for _, r in spec.prefix) - spec.expected_slots(n)

    try:
        diffs = [surplus(n) for n in (6, 7, 8, 9)]
    except InputError:
        return
    if len(set(diffs)) == 1 and diffs[0] != 0:
        need = "n-1 (a last coordinate is present)" if spec.last is not None else "n"
        raise SlotCountError(
            f"{text.strip()!r}: entries fill {spec.expected_slots(6) + diffs[0]} slots at n=6, "
            f"{diffs[0]:+d} against the {need} required at every n"
        )


def format_family(f: FamilySpec) -> str:
    entries = []
    for value, rep in f.prefix:
        if rep == Num(1):
            entries.append(str(value))
        elif isinstance(rep, (Num, Var)) and not (isinstance(rep, Num) and rep.value < 0):
            entries.append(f"{value}^{format_expr(rep)}")
        else:
            entries.append(f"{value}^{{{format_expr(rep)}}}")
    body = ",".join(entries)
    if f.last is not None:
        body += ";" + format_expr(f.last)
    return f"{'-' if f.negate else ''}[{body}] x {format_expr(f.multiplicity)}"


def _arrangements(multiset: list[int], mode: str) -> list[tuple[int, ...]]:
    if mode == "cyclic":
        k = len(multiset)
        return sorted({tuple(multiset[i:] + multiset[:i]) for i in range(max(k, 1))})
    # distinct permutations of the multiset, generated in lex order
    items = sorted(multiset)
    out = []

    def rec(prefix, counts):
        if len(prefix) == len(items):
            out.append(tuple(prefix))
            return
        for v in sorted(counts):
            if counts[v]:
                counts[v] -= 1
                prefix.append(v)
                rec(prefix, counts)
                prefix.pop()
                counts[v] += 1

    counts: dict[int, int] = {}
    for v in items:
        counts[v] = counts.get(v, 0) + 1
    rec([], counts)
    return out


def expand_family(f: FamilySpec, n: int) -> list[tuple[int, ...]]:
    f.check_slots(n)
    multiset = []
    for value, rep in f.prefix:
        multiset.extend([value] * evaluate_expr(rep, n))
    heads = _arrangements(multiset, f.mode)
    if f.last is not None:
        t = evaluate_expr(f.last, n)
        vecs = [h + (t,) for h in heads]
    else:
        vecs = list(heads)
    if f.negate:
        vecs = [tuple(-x for x in v) for v in vecs]
    vecs = sorted(set(vecs))
    expected = f.multiplicity_at(n)
    if expected != len(vecs):
        raise MultiplicityMismatch(expected, len(vecs), format_family(f))
    return vecs


# ------------------------------------------------------------ polytopes


@dataclass(frozen=True)
class LatticePolytope:
    """Lex-sorted, duplicate-free integer vertex set.

    ``family_of`` optionally records which config family produced each
    vertex (parallel to ``vertices``).
    """

    dim: int
    vertices: tuple[tuple[int, ...], ...]
    family_of: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertices")
        if list(self.vertices) != sorted(self.vertices):
            raise InputError("vertices must be lex-sorted; use LatticePolytope.from_points")
        if any(len(v) != self.dim for v in self.vertices):
            raise InputError("vertex of wrong dimension")

    @classmethod
    def from_points(cls, points: Iterable, dim: int | None = None) -> "LatticePolytope":
        from ._validation import check_lattice_points

        pts = check_lattice_points(points, dim=dim)
        d = len(pts[0])
        return cls(d, tuple(sorted(set(pts))))

    def __len__(self):
        return len(self.vertices)

    @property
    def affine_rank(self) -> int:
        from .exact import rank

        v0 = self.vertices[0]
        diffs = [[a - b for a, b in zip(v, v0)] for v in self.vertices[1:]]
        return rank(diffs) if diffs else 0


@dataclass(frozen=True)
class PolytopeConfig:
    name: str
    min_n: int
    families: tuple[FamilySpec, ...]
    mode: str = "all-permutations"
    source: str = ""

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.source.encode()).hexdigest() if self.source else ""

    def expected_count(self, n: int) -> int:
        return sum(f.multiplicity_at(n) for f in self.families)

    def build(self, n: int) -> LatticePolytope:
        if n < self.min_n:
            raise InputError(f"config {self.name!r} needs n >= {self.min_n}, got {n}")
        seen: dict[tuple[int, ...], int] = {}
        for idx, f in enumerate(self.families):
            for v in expand_family(f, n):
                if v in seen:
                    raise DuplicateVertex(v)
                seen[v] = idx
        verts = tuple(sorted(seen))
        if len(verts) != self.expected_count(n):
            raise MultiplicityMismatch(self.expected_count(n), len(verts), self.name)
        return LatticePolytope(n, verts, tuple(seen[v] for v in verts))

    def to_text(self) -> str:
        lines = [f"name: {self.name}", f"min_n: {self.min_n}", f"mode: {self.mode}"]
        lines += [format_family(f) for f in self.families]
        return "\n".join(lines) + "\n"


def parse_config(text: str) -> PolytopeConfig:
    name, min_n, mode = "unnamed", 1, "all-permutations"
    family_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if sep and key.strip() in ("name", "min_n", "mode"):
            key, value = key.strip(), value.strip()
            if key == "name":
                name = value
            elif key == "min_n":
                try:
                    min_n = int(value)
                except ValueError:
                    raise InputError(f"line {lineno}: min_n must be an integer") from None
            else:
                if value not in MODES:
                    raise InputError(f"line {lineno}: unknown mode {value!r}")
                mode = value
            continue
        family_lines.append((lineno, line))
    if not family_lines:
        raise InputError("config has no families")
    fams = []
    for lineno, line in family_lines:
        try:
            fams.append(parse_family(line, mode))
        except FamilySyntaxError as exc:
            raise FamilySyntaxError(f"line {lineno}: {exc}") from exc
    return PolytopeConfig(name, min_n, tuple(fams), mode, text)


def load_polytope_config(path: str | Path) -> PolytopeConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def bundled_config(name: str = "default") -> PolytopeConfig:
    try:
        text = resources.files("supertope.data").joinpath(f"{name}.cfg").read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        raise InputError(f"no bundled config named {name!r}") from None
    return parse_config(text)


def bundled_config_names() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files("supertope.data").iterdir() if p.name.endswith(".cfg"))


# ------------------------------------------------------------ vertex files


def format_vertex_file(P: LatticePolytope) -> str:
    lines = [f"{P.dim} {len(P.vertices)}"]
    lines += [" ".join(str(x) for x in v) for v in P.vertices]
    return "\n".join(lines) + "\n"


def parse_vertex_file(text: str) -> LatticePolytope:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise InputError("vertex file must start with a 'n k' header line")
    try:
        n, k = int(rows[0][0]), int(rows[0][1])
        verts = [tuple(int(x) for x in r) for r in rows[1:]]
    except ValueError:
        raise InputError("vertex file contains a non-integer entry") from None
    if len(verts) != k:
        raise InputError(f"header declares {k} vertices, file has {len(verts)}")
    if any(len(v) != n for v in verts):
        raise InputError(f"every vertex line must have {n} integers")
    if len(set(verts)) != len(verts):
        raise InputError("duplicate vertex in vertex file")
    return LatticePolytope(n, tuple(sorted(verts)))


def read_vertex_file(path: str | Path) -> LatticePolytope:
    try:
        return parse_vertex_file(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read vertex file {path}: {exc}") from exc


def family_orbit(f: FamilySpec, n: int) -> set[tuple[int, ...]]:
    """Set of vectors a family produces, without the multiplicity check."""
    f.check_slots(n)
    multiset = list(itertools.chain.from_iterable([v] * evaluate_expr(r, n) for v, r in f.prefix))
    heads = _arrangements(multiset, f.mode)
    tail = (evaluate_expr(f.last, n),) if f.last is not None else ()
    sign = -1 if f.negate else 1
    return {tuple(sign * x for x in h + tail) for h in heads}
