"""A second MSO evaluator, deliberately naive.

Variables are substituted by concrete values as quantifiers are unwound and
every set quantifier enumerates all subsets.  It shares no code with the
compiled evaluator in :mod:`modaltw.mso` beyond the syntax classes, and exists
to cross-check it on small inputs.
"""

from __future__ import annotations

import itertools

from . import mso as M


def _subsets(size: int):
    for r in range(size + 1):
        for combo in itertools.combinations(range(size), r):
            yield frozenset(combo)


def _unary_members(st: M.RelStructure, name: str) -> frozenset:
    mask = st.unary[name]
    return frozenset(i for i in range(st.size) if mask >> i & 1)


def holds(st, f: M.MsoFormula, env: dict | None = None) -> bool:
    if not isinstance(st, M.RelStructure):
        st = M.relational(st)
    return _holds(st, f, dict(env or {}))


def _lookup(env: dict, name: str):
    if name not in env:
        raise M.MsoError(f"unbound variable {name}")
    return env[name]


def _holds(st: M.RelStructure, f, env: dict) -> bool:
    if isinstance(f, M.Rel):
        vals = [_lookup(env, a) for a in f.args]
        if len(vals) == 1 and f.name in st.unary:
            return vals[0] in _unary_members(st, f.name)
        if len(vals) == 2 and f.name in st.binary:
            return tuple(vals) in st.binary[f.name]
        raise M.MsoError(f"unknown relation {f.name}/{len(vals)}")
    if isinstance(f, M.Mem):
        return _lookup(env, f.var) in _lookup(env, f.set_var)
    if isinstance(f, M.Eq):
        return _lookup(env, f.left) == _lookup(env, f.right)
    if isinstance(f, M.Not):
        return not _holds(st, f.child, env)
    if isinstance(f, M.And):
        return _holds(st, f.left, env) and _holds(st, f.right, env)
    if isinstance(f, M.Or):
        return _holds(st, f.left, env) or _holds(st, f.right, env)
    if isinstance(f, M.Implies):
        return (not _holds(st, f.left, env)) or _holds(st, f.right, env)
    if isinstance(f, M.Iff):
        return _holds(st, f.left, env) == _holds(st, f.right, env)
    if isinstance(f, (M.ExistsFO, M.ForallFO)):
        values = range(st.size)
    else:
        values = _subsets(st.size)
    want = isinstance(f, (M.ExistsFO, M.ExistsSO))
    for v in values:
        if _holds(st, f.body, {**env, f.var: v}) == want:
            return want
    return not want
