"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from modaltw import formula as F

NAMES = ("q", "r", "s")


def formulas(names=NAMES, max_depth=2, max_leaves=8):
    def extend(children, depth):
        return st.one_of(
            st.builds(F.Not, children),
            st.builds(F.Or, children, children),
            st.builds(F.And, children, children),
        )

    leaves = st.one_of(st.sampled_from([F.Var(n) for n in names]), st.just(F.Bottom()))

    def build(depth):
        if depth == 0:
            return st.recursive(leaves, lambda c: extend(c, 0), max_leaves=max_leaves)
        inner = build(depth - 1)
        base = st.one_of(leaves, st.builds(F.Dia, inner), st.builds(F.Box, inner))
        return st.recursive(base, lambda c: extend(c, depth), max_leaves=max_leaves)

    return build(max_depth)


def literals(names, depth):
    flat = [F.Pos(n) for n in names] + [F.Neg(n) for n in names]
    if depth == 0:
        return st.sampled_from(flat)
    return st.one_of(
        st.sampled_from(flat),
        st.just(F.BoxBottom()),
        st.builds(F.BoxClause, clauses(names, depth - 1)),
        st.builds(F.DiaCnf, cnfs(names, depth - 1, max_clauses=2)),
    )


def clauses(names, depth, max_literals=3):
    return st.lists(literals(names, depth), min_size=1, max_size=max_literals).map(tuple)


def cnfs(names=NAMES, depth=2, max_clauses=3):
    return st.lists(clauses(names, depth), min_size=1, max_size=max_clauses).map(tuple)
