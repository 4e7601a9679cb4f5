"""Modal formulas, the modal CNF grammar, and the operations on it.

Two representations live here.  ``ModalFormula`` is an ordinary syntax tree
(``Var``, ``Bottom``, ``Not``, ``Or``, ``And``, ``Dia``, ``Box``).  A
``ModalCnf`` is a tuple of clauses, a clause is a tuple of literals, and a
literal is one of ``Pos``, ``Neg``, ``BoxClause``, ``BoxBottom``, ``DiaCnf``.
Before normalization a clause may also hold ``BotLit`` (a bare falsum
disjunct); ``normalize`` removes every such occurrence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


# ---------------------------------------------------------------------------
# formula AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Not:
    child: "ModalFormula"


@dataclass(frozen=True)
class Or:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class And:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class Dia:
    child: "ModalFormula"


@dataclass(frozen=True)
class Box:
    child: "ModalFormula"


ModalFormula = Union[Var, Bottom, Not, Or, And, Dia, Box]


# ---------------------------------------------------------------------------
# CNF literals


@dataclass(frozen=True)
class Pos:
    var: str


@dataclass(frozen=True)
class Neg:
    var: str


@dataclass(frozen=True)
class BoxClause:
    clause: "Clause"


@dataclass(frozen=True)
class BoxBottom:
    pass


@dataclass(frozen=True)
class DiaCnf:
    cnf: "ModalCnf"


@dataclass(frozen=True)
class BotLit:
    """A falsum disjunct; only legal before normalization."""


Literal = Union[Pos, Neg, BoxClause, BoxBottom, DiaCnf, BotLit]
Clause = tuple  # tuple[Literal, ...]
ModalCnf = tuple  # tuple[Clause, ...]


@dataclass(frozen=True)
class TrivialUnsat:
    """Normalization found an empty top-level clause."""

    reason: str = "empty clause at top level"


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class CnfSizeError(RuntimeError):
    pass


DEFAULT_CNF_CAP = 100_000


# ---------------------------------------------------------------------------
# parsing and rendering

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<box>\[\])|(?P<dia><>)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[~&|()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind != "ws":
            if kind == "id" and lexeme == "false":
                kind = "false"
            tokens.append((kind, lexeme, line, col))
        for ch in lexeme:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str):
        _, lexeme, line, col = self.peek()
        found = lexeme or "end of input"
        raise FormulaSyntaxError(f"{message}, found {found!r}", line, col)

    def parse(self) -> ModalFormula:
        f = self.disjunction()
        if self.peek()[0] != "eof":
            self.fail("expected end of input")
        return f

    def disjunction(self) -> ModalFormula:
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> ModalFormula:
        f = self.prefix()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.prefix())
        return f

    def prefix(self) -> ModalFormula:
        kind, lexeme, _, _ = self.peek()
        if lexeme == "~":
            self.take()
            return Not(self.prefix())
        if kind == "box":
            self.take()
            return Box(self.prefix())
        if kind == "dia":
            self.take()
            return Dia(self.prefix())
        return self.atom()

    def atom(self) -> ModalFormula:
        kind, lexeme, _, _ = self.peek()
        if kind == "false":
            self.take()
            return Bottom()
        if kind == "id":
            self.take()
            return Var(lexeme)
        if lexeme == "(":
            self.take()
            f = self.disjunction()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return f
        self.fail("expected a formula")


def parse_formula(text: str) -> ModalFormula:
    return _Parser(text).parse()


def render(f: ModalFormula) -> str:
    """Print with the minimum parentheses the grammar needs."""
    return _render(f, 0)


def _render(f: ModalFormula, ctx: int) -> str:
    # ctx: 0 = anywhere, 1 = operand of |, 2 = operand of &, 3 = prefix operand
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Not):
        return "~" + _render(f.child, 3)
    if isinstance(f, Box):
        return "[]" + _render(f.child, 3)
    if isinstance(f, Dia):
        return "<>" + _render(f.child, 3)
    if isinstance(f, Or):
        s = f"{_render(f.left, 1)} | {_render(f.right, 2)}"
        return f"({s})" if ctx >= 2 else s
    if isinstance(f, And):
        s = f"{_render(f.left, 2)} & {_render(f.right, 3)}"
        return f"({s})" if ctx >= 3 else s
    raise TypeError(f"not a modal formula: {f!r}")


# ---------------------------------------------------------------------------
# depth and variables


def modal_depth(f) -> int:
    if isinstance(f, tuple):
        return max((_clause_depth(c) for c in f), default=0)
    if isinstance(f, (Var, Bottom)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.child)
    if isinstance(f, (Or, And)):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Box, Dia)):
        return 1 + modal_depth(f.child)
    raise TypeError(f"not a formula or CNF: {f!r}")


def _clause_depth(clause: Clause) -> int:
    return max((_literal_depth(l) for l in clause), default=0)


def _literal_depth(lit: Literal) -> int:
    if isinstance(lit, BoxClause):
        return 1 + _clause_depth(lit.clause)
    if isinstance(lit, BoxBottom):
        return 1
    if isinstance(lit, DiaCnf):
        return 1 + modal_depth(lit.cnf)
    return 0


def formula_variables(f: ModalFormula) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Bottom):
        return set()
    if isinstance(f, (Not, Box, Dia)):
        return formula_variables(f.child)
    return formula_variables(f.left) | formula_variables(f.right)


def cnf_variables(cnf: ModalCnf) -> set[str]:
    out: set[str] = set()
    for lit in iter_literals(cnf):
        if isinstance(lit, (Pos, Neg)):
            out.add(lit.var)
    return out


def iter_literals(cnf: ModalCnf) -> Iterator[Literal]:
    """Every literal occurrence, at every depth."""
    for clause in cnf:
        yield from _iter_clause(clause)


def _iter_clause(clause: Clause) -> Iterator[Literal]:
    for lit in clause:
        yield lit
        if isinstance(lit, BoxClause):
            yield from _iter_clause(lit.clause)
        elif isinstance(lit, DiaCnf):
            yield from iter_literals(lit.cnf)


def count_dia(cnf: ModalCnf) -> int:
    return sum(isinstance(l, DiaCnf) for l in iter_literals(cnf))


# ---------------------------------------------------------------------------
# CNF conversion

# NNF nodes are tagged tuples: ("var", v), ("nvar", v), ("bot",), ("top",),
# ("and", a, b), ("or", a, b), ("box", a), ("dia", a).


def to_nnf(f: ModalFormula, negate: bool = False):
    if isinstance(f, Var):
        return ("nvar", f.name) if negate else ("var", f.name)
    if isinstance(f, Bottom):
        return ("top",) if negate else ("bot",)
    if isinstance(f, Not):
        return to_nnf(f.child, not negate)
    if isinstance(f, Or):
        tag = "and" if negate else "or"
        return (tag, to_nnf(f.left, negate), to_nnf(f.right, negate))
    if isinstance(f, And):
        tag = "or" if negate else "and"
        return (tag, to_nnf(f.left, negate), to_nnf(f.right, negate))
    if isinstance(f, Box):
        return ("dia" if negate else "box", to_nnf(f.child, negate))
    if isinstance(f, Dia):
        return ("box" if negate else "dia", to_nnf(f.child, negate))
    raise TypeError(f"not a modal formula: {f!r}")


@dataclass
class _Budget:
    cap: int
    used: int = 0

    def spend(self, n: int) -> None:
        self.used += n
        if self.used > self.cap:
            raise CnfSizeError(
                f"CNF conversion exceeded {self.cap} literal nodes; supply CNF input directly"
            )


def to_cnf(f: ModalFormula, cap: int = DEFAULT_CNF_CAP) -> ModalCnf:
    """Negation normal form followed by distribution of | over &.

    A truth constant (only reachable as ``~false``) becomes the tautological
    clause ``p | ~p`` for the alphabetically first variable, so the result is
    logically equivalent and keeps the modal depth.
    """
    names = sorted(formula_variables(f))
    taut = names[0] if names else "top"
    return _cnf(to_nnf(f), taut, _Budget(cap))


def _cnf(node, taut: str, budget: _Budget) -> ModalCnf:
    tag = node[0]
    if tag == "var":
        budget.spend(1)
        return ((Pos(node[1]),),)
    if tag == "nvar":
        budget.spend(1)
        return ((Neg(node[1]),),)
    if tag == "bot":
        budget.spend(1)
        return ((BotLit(),),)
    if tag == "top":
        budget.spend(2)
        return ((Pos(taut), Neg(taut)),)
    if tag == "and":
        return _cnf(node[1], taut, budget) + _cnf(node[2], taut, budget)
    if tag == "or":
        left = _cnf(node[1], taut, budget)
        right = _cnf(node[2], taut, budget)
        out = []
        for a in left:
            for b in right:
                budget.spend(len(a) + len(b))
                out.append(a + b)
        return tuple(out)
    if tag == "box":
        budget.spend(1)
        return tuple((BoxClause(c),) for c in _cnf(node[1], taut, budget))
    if tag == "dia":
        budget.spend(1)
        return ((DiaCnf(_cnf(node[1], taut, budget)),),)
    raise ValueError(f"bad NNF node {node!r}")


def cnf_to_formula(cnf: ModalCnf) -> ModalFormula:
    """Inverse direction, used to print CNFs in the text syntax."""
    if not cnf:
        raise ValueError("the empty CNF has no formula rendering")
    return _fold(And, [_clause_to_formula(c) for c in cnf])


def _clause_to_formula(clause: Clause) -> ModalFormula:
    if not clause:
        return Bottom()
    return _fold(Or, [_literal_to_formula(l) for l in clause])


def _literal_to_formula(lit: Literal) -> ModalFormula:
    if isinstance(lit, Pos):
        return Var(lit.var)
    if isinstance(lit, Neg):
        return Not(Var(lit.var))
    if isinstance(lit, BoxClause):
        return Box(_clause_to_formula(lit.clause))
    if isinstance(lit, BoxBottom):
        return Box(Bottom())
    if isinstance(lit, DiaCnf):
        return Dia(cnf_to_formula(lit.cnf))
    if isinstance(lit, BotLit):
        return Bottom()
    raise TypeError(f"not a literal: {lit!r}")


def _fold(op, items):
    out = items[0]
    for item in items[1:]:
        out = op(out, item)
    return out


def render_cnf(cnf: ModalCnf) -> str:
    """Set-style rendering, e.g. ``{~q | [](r | ~s)} & {q}``."""
    return " & ".join("{" + _render_clause(c) + "}" for c in cnf) or "(empty)"


def _render_clause(clause: Clause) -> str:
    return " | ".join(_render_literal(l) for l in clause) or "false"


def _render_literal(lit: Literal) -> str:
    if isinstance(lit, Pos):
        return lit.var
    if isinstance(lit, Neg):
        return "~" + lit.var
    if isinstance(lit, BoxClause):
        return "[](" + _render_clause(lit.clause) + ")"
    if isinstance(lit, BoxBottom):
        return "[]false"
    if isinstance(lit, DiaCnf):
        return "<>(" + " & ".join("{" + _render_clause(c) + "}" for c in lit.cnf) + ")"
    if isinstance(lit, BotLit):
        return "false"
    raise TypeError(f"not a literal: {lit!r}")


# ---------------------------------------------------------------------------
# falsum normalization


def normalize(cnf: ModalCnf) -> Union[ModalCnf, TrivialUnsat]:
    out = []
    for clause in cnf:
        c = _norm_clause(clause)
        if not c:
            return TrivialUnsat()
        out.append(c)
    return tuple(out)


def _norm_clause(clause: Clause) -> Clause:
    out = []
    for lit in clause:
        if isinstance(lit, BotLit):
            continue
        if isinstance(lit, BoxClause):
            inner = _norm_clause(lit.clause)
            out.append(BoxClause(inner) if inner else BoxBottom())
        elif isinstance(lit, DiaCnf):
            if not lit.cnf:
                raise ValueError("a diamond needs at least one clause")
            inner = normalize(lit.cnf)
            if not isinstance(inner, TrivialUnsat):
                out.append(DiaCnf(inner))
        elif isinstance(lit, (Pos, Neg, BoxBottom)):
            out.append(lit)
        else:
            raise TypeError(f"not a literal: {lit!r}")
    return tuple(out)


def is_normalized(cnf: ModalCnf) -> bool:
    res = normalize(cnf)
    return not isinstance(res, TrivialUnsat) and res == cnf


def prepare(text_or_cnf) -> Union[ModalCnf, TrivialUnsat]:
    """Formula text or a raw CNF to a normalized CNF."""
    if isinstance(text_or_cnf, str):
        return normalize(to_cnf(parse_formula(text_or_cnf)))
    if isinstance(text_or_cnf, tuple):
        return normalize(text_or_cnf)
    return normalize(to_cnf(text_or_cnf))


# ---------------------------------------------------------------------------
# levels

Path = tuple  # tuple[int, ...]


@dataclass
class LevelAnnotation:
    """Levels of clause and literal occurrences, addressed by position paths.

    A top clause ``i`` has path ``(i,)``; literal ``j`` of the clause at
    ``P`` has path ``P + (j,)``; the clause under a box literal at ``L`` has
    path ``L + (0,)`` and clause ``k`` of a diamond at ``L`` has ``L + (k,)``.
    """

    md: int
    clause_levels: dict = field(default_factory=dict)
    literal_levels: dict = field(default_factory=dict)
    var_levels: dict = field(default_factory=dict)

    def clauses_at(self, level: int) -> list:
        return [p for p, l in self.clause_levels.items() if l == level]


def assign_levels(cnf: ModalCnf) -> LevelAnnotation:
    ann = LevelAnnotation(md=modal_depth(cnf))
    for i, clause in enumerate(cnf):
        _level_clause(clause, (i,), ann.md, ann)
    return ann


def _level_clause(clause: Clause, path: Path, level: int, ann: LevelAnnotation) -> None:
    ann.clause_levels[path] = level
    for j, lit in enumerate(clause):
        lp = path + (j,)
        ann.literal_levels[lp] = level
        if isinstance(lit, (Pos, Neg)):
            ann.var_levels.setdefault(lit.var, set()).add(level)
        elif isinstance(lit, BoxClause):
            _level_clause(lit.clause, lp + (0,), level - 1, ann)
        elif isinstance(lit, DiaCnf):
            for k, inner in enumerate(lit.cnf):
                _level_clause(inner, lp + (k,), level - 1, ann)


# ---------------------------------------------------------------------------
# JSON interchange


def cnf_to_json(cnf: ModalCnf) -> list:
    return [_clause_to_json(c) for c in cnf]


def _clause_to_json(clause: Clause) -> list:
    return [_literal_to_json(l) for l in clause]


def _literal_to_json(lit: Literal) -> dict:
    if isinstance(lit, Pos):
        return {"pos": lit.var}
    if isinstance(lit, Neg):
        return {"neg": lit.var}
    if isinstance(lit, BoxClause):
        return {"box": _clause_to_json(lit.clause)}
    if isinstance(lit, BoxBottom):
        return {"boxbot": True}
    if isinstance(lit, DiaCnf):
        return {"dia": cnf_to_json(lit.cnf)}
    if isinstance(lit, BotLit):
        return {"bot": True}
    raise TypeError(f"not a literal: {lit!r}")


def cnf_from_json(data) -> ModalCnf:
    if not isinstance(data, list):
        raise ValueError("a CNF is a JSON array of clauses")
    return tuple(_clause_from_json(c) for c in data)


def _clause_from_json(data) -> Clause:
    if not isinstance(data, list):
        raise ValueError("a clause is a JSON array of literals")
    return tuple(_literal_from_json(l) for l in data)


def _literal_from_json(data) -> Literal:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError(f"bad literal object {data!r}")
    (key, value), = data.items()
    if key == "pos":
        return Pos(str(value))
    if key == "neg":
        return Neg(str(value))
    if key == "box":
        return BoxClause(_clause_from_json(value))
    if key == "boxbot":
        return BoxBottom()
    if key == "dia":
        return DiaCnf(cnf_from_json(value))
    if key == "bot":
        return BotLit()
    raise ValueError(f"unknown literal kind {key!r}")
