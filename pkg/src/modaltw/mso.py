"""Monadic second-order logic over finite relational structures.

The evaluator is exact.  It compiles a formula to closures over a slot
environment (first-order slots hold an element index, set slots hold a
bitmask) and keeps three semantics-preserving shortcuts for set quantifiers:

* ``EX X (ALL y (y in X <-> psi) & ...)`` with X absent from psi: X is computed.
* the same shape with X occurring only positively in psi: every candidate X
  is a fixpoint of a monotone operator, so only sets between the least and
  greatest fixpoints are tried.
* ``ALL y (y in X -> psi)`` conjuncts with X absent from psi restrict the
  subsets that are enumerated.

Quantified subformulas are memoized on the values of their free variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Union

# ---------------------------------------------------------------------------
# syntax


@dataclass(frozen=True, eq=False)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True, eq=False)
class Mem:
    var: str
    set_var: str


@dataclass(frozen=True, eq=False)
class Eq:
    left: str
    right: str


@dataclass(frozen=True, eq=False)
class Not:
    child: "MsoFormula"


@dataclass(frozen=True, eq=False)
class And:
    left: "MsoFormula"
    right: "MsoFormula"


@dataclass(frozen=True, eq=False)
class Or:
    left: "MsoFormula"
    right: "MsoFormula"


@dataclass(frozen=True, eq=False)
class Implies:
    left: "MsoFormula"
    right: "MsoFormula"


@dataclass(frozen=True, eq=False)
class Iff:
    left: "MsoFormula"
    right: "MsoFormula"


@dataclass(frozen=True, eq=False)
class ExistsFO:
    var: str
    body: "MsoFormula"


@dataclass(frozen=True, eq=False)
class ForallFO:
    var: str
    body: "MsoFormula"


@dataclass(frozen=True, eq=False)
class ExistsSO:
    var: str
    body: "MsoFormula"


@dataclass(frozen=True, eq=False)
class ForallSO:
    var: str
    body: "MsoFormula"


MsoFormula = Union[Rel, Mem, Eq, Not, And, Or, Implies, Iff, ExistsFO, ForallFO, ExistsSO, ForallSO]
_BINARY = (And, Or, Implies, Iff)
_FO_Q = (ExistsFO, ForallFO)
_SO_Q = (ExistsSO, ForallSO)


def R(name: str, *args: str) -> Rel:
    return Rel(name, tuple(args))


def conj(*fs: MsoFormula) -> MsoFormula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(*fs: MsoFormula) -> MsoFormula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def children(f: MsoFormula) -> tuple:
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, Not):
        return (f.child,)
    if isinstance(f, _FO_Q + _SO_Q):
        return (f.body,)
    return ()


def free_vars(f: MsoFormula) -> tuple[frozenset, frozenset]:
    """(free first-order variables, free set variables)."""
    if isinstance(f, Rel):
        return frozenset(f.args), frozenset()
    if isinstance(f, Mem):
        return frozenset([f.var]), frozenset([f.set_var])
    if isinstance(f, Eq):
        return frozenset([f.left, f.right]), frozenset()
    if isinstance(f, _FO_Q):
        fo, so = free_vars(f.body)
        return fo - {f.var}, so
    if isinstance(f, _SO_Q):
        fo, so = free_vars(f.body)
        return fo, so - {f.var}
    fo, so = frozenset(), frozenset()
    for c in children(f):
        a, b = free_vars(c)
        fo, so = fo | a, so | b
    return fo, so


@dataclass(frozen=True)
class FormulaStats:
    node_count: int
    so_quantifier_count: int
    so_nesting: int


def stats(f: MsoFormula) -> FormulaStats:
    nodes = so = 0
    deepest = 0
    stack = [(f, 0)]
    while stack:
        g, depth = stack.pop()
        nodes += 1
        if isinstance(g, _SO_Q):
            so += 1
            depth += 1
            deepest = max(deepest, depth)
        stack.extend((c, depth) for c in children(g))
    return FormulaStats(nodes, so, deepest)


def dump(f: MsoFormula) -> str:
    """Prefix-notation text, stable enough for golden comparisons."""
    if isinstance(f, Rel):
        return f"{f.name}({','.join(f.args)})"
    if isinstance(f, Mem):
        return f"{f.set_var}({f.var})"
    if isinstance(f, Eq):
        return f"=({f.left},{f.right})"
    if isinstance(f, Not):
        return f"not({dump(f.child)})"
    if isinstance(f, _BINARY):
        return f"{type(f).__name__.lower()}({dump(f.left)},{dump(f.right)})"
    tag = {ExistsFO: "ex", ForallFO: "all", ExistsSO: "EX", ForallSO: "ALL"}[type(f)]
    return f"{tag} {f.var}.{dump(f.body)}"


# ---------------------------------------------------------------------------
# structures


class MsoError(ValueError):
    pass


class SizeGuardError(RuntimeError):
    pass


DEFAULT_SIZE_GUARD = 24


def size_guard_from_env() -> int | None:
    """Cap on the number of elements a set quantifier may range over.

    ``MODALTW_SIZE_GUARD`` may hold an integer or ``off``.
    """
    raw = os.environ.get("MODALTW_SIZE_GUARD")
    if raw is None:
        return DEFAULT_SIZE_GUARD
    if raw.strip().lower() in ("off", "none", "0", ""):
        return None
    return int(raw)


@dataclass
class RelStructure:
    size: int
    unary: dict  # name -> bitmask
    binary: dict  # name -> set of pairs

    def __post_init__(self):
        self.fwd = {}
        self.bwd = {}
        for name, pairs in self.binary.items():
            fwd = [0] * self.size
            bwd = [0] * self.size
            for a, b in pairs:
                fwd[a] |= 1 << b
                bwd[b] |= 1 << a
            self.fwd[name] = fwd
            self.bwd[name] = bwd

    @property
    def full(self) -> int:
        return (1 << self.size) - 1


def relational(s) -> RelStructure:
    """View an incidence structure as a relational structure."""
    unary = {name: _mask(ids) for name, ids in s.unary().items()}
    binary = {name: set(pairs) for name, pairs in s.binary().items()}
    return RelStructure(s.size, unary, binary)


def _mask(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def _bits(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


def gray_subsets(universe: int):
    """All submasks of universe, consecutive ones differing in one element."""
    bits = [1 << b for b in _bits(universe)]
    mask = 0
    yield mask
    for i in range(1, 1 << len(bits)):
        mask ^= bits[(i & -i).bit_length() - 1]
        yield mask


# ---------------------------------------------------------------------------
# compilation

Env = list
Fn = Callable[[Env], bool]


class _Compiler:
    def __init__(self, st: RelStructure, guard: int | None):
        self.st = st
        self.guard = guard
        self.slots = 0
        self._has_so: dict[int, bool] = {}

    def fresh(self) -> int:
        self.slots += 1
        return self.slots - 1

    def has_so(self, f) -> bool:
        key = id(f)
        if key not in self._has_so:
            self._has_so[key] = isinstance(f, _SO_Q) or any(self.has_so(c) for c in children(f))
        return self._has_so[key]

    # -- helpers ---------------------------------------------------------

    def lookup(self, scope: dict, name: str, kind: str) -> int:
        entry = scope.get(name)
        if entry is None or entry[0] != kind:
            raise MsoError(f"unbound {'set ' if kind == 'so' else ''}variable {name!r}")
        return entry[1]

    # -- main ------------------------------------------------------------

    def compile(self, f: MsoFormula, scope: dict) -> Fn:
        fn = self._compile(f, scope)
        if isinstance(f, _FO_Q + _SO_Q) and self.has_so(f):
            fo, so = free_vars(f)
            slots = tuple(sorted(scope[v][1] for v in fo | so))
            cache: dict = {}
            inner = fn

            def fn(env, inner=inner, slots=slots, cache=cache):
                key = tuple(env[s] for s in slots)
                hit = cache.get(key)
                if hit is None:
                    hit = cache[key] = inner(env)
                return hit

        return fn

    def _compile(self, f: MsoFormula, scope: dict) -> Fn:
        st = self.st
        if isinstance(f, Rel):
            slots = [self.lookup(scope, a, "fo") for a in f.args]
            if len(slots) == 1:
                if f.name not in st.unary:
                    raise MsoError(f"unknown unary relation {f.name!r}")
                mask, s = st.unary[f.name], slots[0]
                return lambda env: (mask >> env[s]) & 1 == 1
            if len(slots) == 2:
                if f.name not in st.binary:
                    raise MsoError(f"unknown binary relation {f.name!r}")
                fwd, a, b = st.fwd[f.name], slots[0], slots[1]
                return lambda env: (fwd[env[a]] >> env[b]) & 1 == 1
            raise MsoError(f"unsupported arity {len(slots)} for {f.name!r}")
        if isinstance(f, Mem):
            x, s = self.lookup(scope, f.var, "fo"), self.lookup(scope, f.set_var, "so")
            return lambda env: (env[s] >> env[x]) & 1 == 1
        if isinstance(f, Eq):
            a, b = self.lookup(scope, f.left, "fo"), self.lookup(scope, f.right, "fo")
            return lambda env: env[a] == env[b]
        if isinstance(f, Not):
            c = self.compile(f.child, scope)
            return lambda env: not c(env)
        if isinstance(f, And):
            a, b = self.compile(f.left, scope), self.compile(f.right, scope)
            return lambda env: a(env) and b(env)
        if isinstance(f, Or):
            a, b = self.compile(f.left, scope), self.compile(f.right, scope)
            return lambda env: a(env) or b(env)
        if isinstance(f, Implies):
            a, b = self.compile(f.left, scope), self.compile(f.right, scope)
            return lambda env: (not a(env)) or b(env)
        if isinstance(f, Iff):
            a, b = self.compile(f.left, scope), self.compile(f.right, scope)
            return lambda env: a(env) == b(env)
        if isinstance(f, ExistsFO):
            return self._exists_fo(f, scope)
        if isinstance(f, ForallFO):
            return self._forall_fo(f, scope)
        if isinstance(f, ExistsSO):
            return self._exists_so(f, scope)
        if isinstance(f, ForallSO):
            return self._forall_so(f, scope)
        raise MsoError(f"not an MSO formula: {f!r}")

    # -- first-order quantifiers ------------------------------------------

    def _restrictor(self, x: str, f: MsoFormula, scope: dict):
        """A function env -> mask over-approximating {x : f}, or None."""
        st = self.st
        if isinstance(f, Mem) and f.var == x:
            s = self.lookup(scope, f.set_var, "so")
            return lambda env: env[s]
        if isinstance(f, Rel) and len(f.args) == 1 and f.args[0] == x:
            if f.name not in st.unary:
                raise MsoError(f"unknown unary relation {f.name!r}")
            mask = st.unary[f.name]
            return lambda env: mask
        if isinstance(f, Rel) and len(f.args) == 2 and f.name in st.binary:
            a, b = f.args
            if b == x and a != x and a in scope:
                fwd, s = st.fwd[f.name], self.lookup(scope, a, "fo")
                return lambda env: fwd[env[s]]
            if a == x and b != x and b in scope:
                bwd, s = st.bwd[f.name], self.lookup(scope, b, "fo")
                return lambda env: bwd[env[s]]
        if isinstance(f, Eq) and x in (f.left, f.right):
            other = f.right if f.left == x else f.left
            if other != x:
                s = self.lookup(scope, other, "fo")
                return lambda env: 1 << env[s]
        if isinstance(f, And):
            parts = [r for r in (self._restrictor(x, c, scope) for c in (f.left, f.right)) if r]
            if len(parts) == 2:
                p, q = parts
                return lambda env: p(env) & q(env)
            return parts[0] if parts else None
        if isinstance(f, Or):
            p, q = self._restrictor(x, f.left, scope), self._restrictor(x, f.right, scope)
            if p and q:
                return lambda env: p(env) | q(env)
        return None

    def _bind(self, scope: dict, name: str, kind: str) -> tuple[dict, int]:
        slot = self.fresh()
        inner = dict(scope)
        inner[name] = (kind, slot)
        return inner, slot

    def _exists_fo(self, f: ExistsFO, scope: dict) -> Fn:
        inner, slot = self._bind(scope, f.var, "fo")
        body = self.compile(f.body, inner)
        restrict = self._restrictor(f.var, f.body, inner)
        full = self.st.full

        def run(env):
            m = restrict(env) if restrict else full
            while m:
                low = m & -m
                env[slot] = low.bit_length() - 1
                if body(env):
                    return True
                m ^= low
            return False

        return run

    def _forall_fo(self, f: ForallFO, scope: dict) -> Fn:
        inner, slot = self._bind(scope, f.var, "fo")
        body = self.compile(f.body, inner)
        restrict = None
        if isinstance(f.body, Implies):
            restrict = self._restrictor(f.var, f.body.left, inner)
        full = self.st.full

        def run(env):
            m = restrict(env) if restrict else full
            while m:
                low = m & -m
                env[slot] = low.bit_length() - 1
                if not body(env):
                    return False
                m ^= low
            return True

        return run

    # -- set quantifiers ---------------------------------------------------

    def _element_set(self, psi: MsoFormula, y: str, scope: dict):
        """Compile psi with y free; returns env -> mask of satisfying y."""
        inner, slot = self._bind(scope, y, "fo")
        fn = self.compile(psi, inner)
        restrict = self._restrictor(y, psi, inner)
        full = self.st.full

        def run(env):
            out = 0
            m = restrict(env) if restrict else full
            while m:
                low = m & -m
                env[slot] = low.bit_length() - 1
                if fn(env):
                    out |= low
                m ^= low
            return out

        return run

    def _check_universe(self, universe: int) -> None:
        if self.guard is not None and bin(universe).count("1") > self.guard:
            raise SizeGuardError(
                f"set quantifier would range over {bin(universe).count('1')} elements "
                f"(cap {self.guard}); raise MODALTW_SIZE_GUARD to override"
            )

    def _exists_so(self, f: ExistsSO, scope: dict) -> Fn:
        X = f.var
        inner, slot = self._bind(scope, X, "so")
        conjuncts = _flatten_and(f.body)

        definition = None
        for c in conjuncts:
            parsed = _as_definition(c, X)
            if parsed is not None:
                definition = (c,) + parsed
                break
        if definition is not None:
            c, y, psi = definition
            rest = [d for d in conjuncts if d is not c]
            if X not in free_vars(psi)[1]:
                compute = self._element_set(psi, y, scope)
                rest_fn = self._conj(rest, inner)

                def run_def(env):
                    env[slot] = compute(env)
                    return rest_fn(env)

                return run_def
            if _positive_in(psi, X):
                operator = self._element_set(psi, y, inner)
                check = self._conj(conjuncts, inner)
                full = self.st.full

                def run_fix(env):
                    env[slot] = 0
                    while True:
                        nxt = operator(env)
                        if nxt == env[slot]:
                            break
                        env[slot] = nxt
                    least = env[slot]
                    env[slot] = full
                    while True:
                        nxt = operator(env)
                        if nxt == env[slot]:
                            break
                        env[slot] = nxt
                    greatest = env[slot]
                    free_part = greatest & ~least
                    self._check_universe(free_part)
                    for extra in gray_subsets(free_part):
                        env[slot] = least | extra
                        if check(env):
                            return True
                    return False

                return run_fix

        guards = []
        rest = []
        for c in conjuncts:
            g = _as_guard(c, X)
            if g is not None:
                guards.append(self._element_set(g[1], g[0], scope))
            else:
                rest.append(c)
        rest_fn = self._conj(rest, inner)
        full = self.st.full

        def run(env):
            universe = full
            for g in guards:
                universe &= g(env)
                if not universe:
                    break
            self._check_universe(universe)
            for m in gray_subsets(universe):
                env[slot] = m
                if rest_fn(env):
                    return True
            return False

        return run

    def _forall_so(self, f: ForallSO, scope: dict) -> Fn:
        inner, slot = self._bind(scope, f.var, "so")
        body = self.compile(f.body, inner)
        full = self.st.full

        def run(env):
            self._check_universe(full)
            for m in gray_subsets(full):
                env[slot] = m
                if not body(env):
                    return False
            return True

        return run

    def _conj(self, fs: list, scope: dict) -> Fn:
        fns = [self.compile(c, scope) for c in fs]
        if not fns:
            return lambda env: True
        if len(fns) == 1:
            return fns[0]

        def run(env):
            for fn in fns:
                if not fn(env):
                    return False
            return True

        return run


def _flatten_and(f: MsoFormula) -> list:
    if isinstance(f, And):
        return _flatten_and(f.left) + _flatten_and(f.right)
    return [f]


def _as_definition(c: MsoFormula, X: str):
    """Match ALL y (y in X <-> psi); returns (y, psi)."""
    if not isinstance(c, ForallFO) or not isinstance(c.body, Iff):
        return None
    y = c.var
    for mem, psi in ((c.body.left, c.body.right), (c.body.right, c.body.left)):
        if isinstance(mem, Mem) and mem.var == y and mem.set_var == X:
            return y, psi
    return None


def _as_guard(c: MsoFormula, X: str):
    """Match ALL y (y in X -> psi) with X not free in psi; returns (y, psi)."""
    if not isinstance(c, ForallFO) or not isinstance(c.body, Implies):
        return None
    mem, psi = c.body.left, c.body.right
    if isinstance(mem, Mem) and mem.var == c.var and mem.set_var == X:
        if X not in free_vars(psi)[1]:
            return c.var, psi
    return None


def _positive_in(f: MsoFormula, X: str, positive: bool = True) -> bool:
    """True if every free occurrence of X in f has positive polarity."""
    if isinstance(f, Mem):
        return f.set_var != X or positive
    if isinstance(f, (Rel, Eq)):
        return True
    if isinstance(f, Not):
        return _positive_in(f.child, X, not positive)
    if isinstance(f, (And, Or)):
        return _positive_in(f.left, X, positive) and _positive_in(f.right, X, positive)
    if isinstance(f, Implies):
        return _positive_in(f.left, X, not positive) and _positive_in(f.right, X, positive)
    if isinstance(f, Iff):
        return X not in free_vars(f)[1]
    if isinstance(f, _SO_Q) and f.var == X:
        return True
    return _positive_in(f.body, X, positive)


def evaluate(
    st,
    f: MsoFormula,
    assignment: dict | None = None,
    size_guard: int | None | str = "env",
) -> bool:
    """Truth of f in st.

    ``st`` is a RelStructure or an IncidenceStructure.  ``assignment`` maps
    free variables to an element (first-order) or a set of elements.
    """
    if not isinstance(st, RelStructure):
        st = relational(st)
    guard = size_guard_from_env() if size_guard == "env" else size_guard
    assignment = assignment or {}
    fo, so = free_vars(f)
    missing = (fo | so) - set(assignment)
    if missing:
        raise MsoError(f"unbound variables {sorted(missing)}")
    comp = _Compiler(st, guard)
    scope = {}
    values = []
    for name in sorted(assignment):
        kind = "so" if name in so else "fo"
        scope[name] = (kind, comp.fresh())
        v = assignment[name]
        values.append(v if kind == "fo" else _mask(v))
    fn = comp.compile(f, scope)
    env = values + [0] * (comp.slots - len(values))
    return bool(fn(env))


# ---------------------------------------------------------------------------
# sentence builders


def build_reach(x: str = "x", X: str = "X", tag: str = "") -> MsoFormula:
    """X is exactly the set of elements reachable from x in one or more steps."""
    y, z = f"y{tag}", f"z{tag}"
    return ForallFO(
        y,
        Iff(
            Mem(y, X),
            Or(R("Oc", x, y), ExistsFO(z, And(Mem(z, X), R("Oc", z, y)))),
        ),
    )


def _cover(cl: str, positive: MsoFormula, lt: str, neg_range: MsoFormula, neg_lt: str) -> MsoFormula:
    """positive(lt) & Oc(cl,lt) for some lt, or neg_range(lt') & NegOc(cl,lt')."""
    return Or(
        ExistsFO(lt, And(positive, R("Oc", cl, lt))),
        ExistsFO(neg_lt, And(neg_range, R("NegOc", cl, neg_lt))),
    )


def _set_def(S: str, y: str, psi: MsoFormula) -> MsoFormula:
    return ForallFO(y, Iff(Mem(y, S), psi))


def _subset_guard(S: str, y: str, psi: MsoFormula) -> MsoFormula:
    return ForallFO(y, Implies(Mem(y, S), psi))


def _level_cover(i: int, C: str, Tr: str) -> MsoFormula:
    cl, lt, nl = f"cl{i}", f"lt{i}", f"nl{i}"
    return ForallFO(
        cl,
        Implies(
            Mem(cl, C),
            _cover(
                cl,
                Mem(lt, Tr),
                lt,
                conj(R("Lt", nl), R(f"Lv{i}", nl), Not(Mem(nl, Tr))),
                nl,
            ),
        ),
    )


def build_xi(i: int, C: str) -> MsoFormula:
    """Clauses in C (all at level i) hold together at one world of a model."""
    Tr = f"Tr{i}"
    guard = _subset_guard(Tr, f"x{i}", And(R("Lt", f"x{i}"), R(f"Lv{i}", f"x{i}")))
    cover = _level_cover(i, C, Tr)
    if i == 0:
        return ExistsSO(Tr, And(guard, cover))
    x, y, lt, c = f"gx{i}", f"gy{i}", f"dl{i}", f"c{i}"
    Cm, Dm = f"Cm{i - 1}", f"Dm{i - 1}"
    no_dead_end = Implies(
        ExistsFO(x, And(Mem(x, Tr), R("DDia", x))),
        ForallFO(y, Implies(Mem(y, Tr), Not(R("U", y)))),
    )
    no_dead_dia = ForallFO(x, Implies(And(Mem(x, Tr), R("DDia", x)), Not(R("U", x))))
    b = f"bl{i}"
    cm_def = _set_def(Cm, c, ExistsFO(b, conj(Mem(b, Tr), R("BBox", b), R("Oc", b, c))))
    demands = ForallFO(
        lt,
        Implies(
            And(Mem(lt, Tr), R("DDia", lt)),
            ExistsSO(Dm, And(_set_def(Dm, c, Or(Mem(c, Cm), R("Oc", lt, c))), build_xi(i - 1, Dm))),
        ),
    )
    return ExistsSO(Tr, conj(guard, cover, no_dead_end, no_dead_dia, ExistsSO(Cm, And(cm_def, demands))))


def build_xi_sentence(md: int) -> MsoFormula:
    """Satisfiability of the whole CNF in arbitrary models."""
    C = f"Cl{md}"
    return ExistsSO(
        C,
        And(_set_def(C, "c", And(R("Cl", "c"), R(f"Lv{md}", "c"))), build_xi(md, C)),
    )


def build_zeta(i: int, C: str) -> MsoFormula:
    """Clauses in C (levels at most i) hold at one world of a reflexive model."""
    if i == 0:
        return build_xi(0, C)
    Tr, Cm, Dm = f"Tr{i}", f"Cm{i - 1}", f"Dm{i - 1}"
    x, cl, X, c, b, lt = f"x{i}", f"rc{i}", f"X{i}", f"c{i}", f"bl{i}", f"dl{i}"
    reach_guard = _subset_guard(
        Tr,
        x,
        And(
            R("Lt", x),
            ExistsFO(cl, And(Mem(cl, C), ExistsSO(X, And(build_reach(cl, X, str(i)), Mem(x, X))))),
        ),
    )
    no_box_bottom = _subset_guard(Tr, f"u{i}", Not(R("U", f"u{i}")))
    cm_def = _set_def(Cm, c, ExistsFO(b, conj(Mem(b, Tr), R("BBox", b), R("Oc", b, c))))
    k, pl, nl = f"k{i}", f"pl{i}", f"nl{i}"
    cover = ForallFO(
        k,
        Implies(
            Or(Mem(k, C), Mem(k, Cm)),
            _cover(k, Mem(pl, Tr), pl, And(R("Lt", nl), Not(Mem(nl, Tr))), nl),
        ),
    )
    demands = ForallFO(
        lt,
        Implies(
            And(Mem(lt, Tr), R("DDia", lt)),
            ExistsSO(Dm, And(_set_def(Dm, c, Or(Mem(c, Cm), R("Oc", lt, c))), build_zeta(i - 1, Dm))),
        ),
    )
    return ExistsSO(Tr, conj(reach_guard, no_box_bottom, ExistsSO(Cm, conj(cm_def, cover, demands))))


def build_zeta_sentence(md: int) -> MsoFormula:
    """Satisfiability of the whole CNF in reflexive models."""
    C = f"Cl{md}"
    return ExistsSO(
        C,
        And(_set_def(C, "c", And(R("Cl", "c"), R(f"Lv{md}", "c"))), build_zeta(md, C)),
    )


# -- Euclidean family (structures built without levels) ----------------------


def _pv_cover(cl: str, pos_sets: tuple, T: str, tag: str) -> MsoFormula:
    lt, nl = f"pl{tag}", f"nl{tag}"
    positive = disj(*(Mem(lt, S) for S in pos_sets))
    return _cover(cl, positive, lt, And(R("Pv", nl), Not(Mem(nl, T))), nl)


def _all_covered(sets: tuple, pos_sets: tuple, T: str, tag: str) -> MsoFormula:
    k = f"k{tag}"
    return ForallFO(k, Implies(disj(*(Mem(k, S) for S in sets)), _pv_cover(k, pos_sets, T, tag)))


def _box_clause_guard(G: str, tag: str) -> MsoFormula:
    c, b = f"gc{tag}", f"gb{tag}"
    return _subset_guard(G, c, ExistsFO(b, And(R("BBox", b), R("Oc", b, c))))


def build_chi_cluster(C1: str, G: str) -> MsoFormula:
    """A cluster world meets C1 plus G while every cluster world meets G.

    Tr picks the diamonds made true inside the cluster, T0 the valuation of
    the world itself, and each chosen diamond gets its own world valued by T1.
    """
    Tr, T0, T1, Glt, Dm = "TrE", "TrE0", "TrE1", "Glt", "DmE"
    x, c, b, lt = "xe", "ce", "be", "le"
    glt_def = _set_def(Glt, x, And(R("BBox", x), ExistsFO(c, And(Mem(c, G), R("Oc", x, c)))))
    per_diamond = ForallFO(
        lt,
        Implies(
            Mem(lt, Tr),
            ExistsSO(
                T1,
                conj(
                    _subset_guard(T1, "xe1", R("Pv", "xe1")),
                    ExistsSO(
                        Dm,
                        And(
                            _set_def(Dm, c, R("Oc", lt, c)),
                            _all_covered((Dm, G), (Tr, Glt, T1), T1, "e1"),
                        ),
                    ),
                ),
            ),
        ),
    )
    own_world = ExistsSO(
        T0,
        And(_subset_guard(T0, "xe0", R("Pv", "xe0")), _all_covered((C1, G), (Glt, Tr, T0), T0, "e0")),
    )
    return ExistsSO(
        Tr,
        conj(
            _subset_guard(Tr, x, R("DDia", x)),
            ExistsSO(Glt, conj(glt_def, per_diamond, own_world)),
        ),
    )


def _root_guard(T: str) -> MsoFormula:
    return Implies(
        ExistsFO("rx", And(Mem("rx", T), R("DDia", "rx"))),
        ForallFO("ry", Implies(Mem("ry", T), Not(R("U", "ry")))),
    )


def build_chi_root(C0: str, transitive: bool = False) -> MsoFormula:
    """Root that is not its own successor.

    Without ``transitive`` the root sees only the demand worlds; with it the
    root sees every cluster world, so its box clauses join the global set.
    """
    T0, Cm, G, Dm, G2 = "TrR", "CmR", "GCl", "DmR", "GClR"
    x, c, b, lt = "xr", "cr", "br", "lr"
    cm_def = _set_def(Cm, c, ExistsFO(b, conj(Mem(b, T0), R("BBox", b), R("Oc", b, c))))
    if transitive:
        demand = ExistsSO(
            Dm,
            conj(
                _set_def(Dm, c, Or(R("Oc", lt, c), Mem(c, Cm))),
                ExistsSO(G2, And(_set_def(G2, "cg", Or(Mem("cg", G), Mem("cg", Cm))), build_chi_cluster(Dm, G2))),
            ),
        )
    else:
        demand = ExistsSO(Dm, And(_set_def(Dm, c, Or(R("Oc", lt, c), Mem(c, Cm))), build_chi_cluster(Dm, G)))
    demands = ForallFO(lt, Implies(And(Mem(lt, T0), R("DDia", lt)), demand))
    return ExistsSO(
        T0,
        conj(
            _subset_guard(T0, x, And(R("Lt", x), ExistsFO("co", And(Mem("co", C0), R("Oc", "co", x))))),
            _root_guard(T0),
            _all_covered((C0,), (T0,), T0, "r"),
            ExistsSO(Cm, And(cm_def, ExistsSO(G, And(_box_clause_guard(G, "r"), demands)))),
        ),
    )


def build_chi_reflexive_root(C0: str) -> MsoFormula:
    """Root inside its own cluster: the generated frame is an equivalence."""
    T0, G, Dm = "TrQ", "GClQ", "DmQ"
    x, c, b, lt = "xq", "cq", "bq", "lq"
    boxes_agree = ForallFO(b, Implies(And(Mem(b, T0), R("BBox", b)), ExistsFO(c, And(Mem(c, G), R("Oc", b, c)))))
    demands = ForallFO(
        lt,
        Implies(
            And(Mem(lt, T0), R("DDia", lt)),
            ExistsSO(Dm, And(_set_def(Dm, c, R("Oc", lt, c)), build_chi_cluster(Dm, G))),
        ),
    )
    return ExistsSO(
        G,
        conj(
            _box_clause_guard(G, "q"),
            ExistsSO(
                T0,
                conj(
                    _subset_guard(
                        T0,
                        x,
                        And(R("Lt", x), ExistsFO("co", And(Or(Mem("co", C0), Mem("co", G)), R("Oc", "co", x)))),
                    ),
                    boxes_agree,
                    _all_covered((C0, G), (T0,), T0, "q"),
                    demands,
                ),
            ),
        ),
    )


def build_no_successor(C0: str) -> MsoFormula:
    """A single world without successors: every box literal is true there."""
    T0 = "TrN"
    return ExistsSO(
        T0,
        And(
            _subset_guard(T0, "xn", R("Pv", "xn")),
            ForallFO(
                "kn",
                Implies(
                    Mem("kn", C0),
                    _cover("kn", Or(Mem("pn", T0), R("BBox", "pn")), "pn", And(R("Pv", "nn"), Not(Mem("nn", T0))), "nn"),
                ),
            ),
        ),
    )


PLAIN, REFLEXIVE_E, SYMMETRIC_E, TRANSITIVE_E = "plain", "reflexive", "symmetric", "transitive"
CHI_VARIANTS = (PLAIN, REFLEXIVE_E, SYMMETRIC_E, TRANSITIVE_E)


def build_chi_family(variant: str) -> MsoFormula:
    C0 = "Cl0"
    top = _set_def(C0, "c", And(R("Cl", "c"), Not(ExistsFO("p", R("Oc", "p", "c")))))
    if variant == PLAIN:
        body = Or(build_chi_root(C0), build_chi_reflexive_root(C0))
    elif variant == REFLEXIVE_E:
        body = build_chi_reflexive_root(C0)
    elif variant == SYMMETRIC_E:
        body = Or(build_chi_reflexive_root(C0), build_no_successor(C0))
    elif variant == TRANSITIVE_E:
        body = Or(build_chi_root(C0, transitive=True), build_chi_reflexive_root(C0))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return ExistsSO(C0, And(top, body))
