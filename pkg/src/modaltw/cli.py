"""Command-line front end: ``modaltw <command> ...``.

JSON goes to stdout and diagnostics to stderr.  Usage errors exit 2 and
internal invariant violations exit 70.  With ``--exitcode-verdict`` the
``solve`` command exits 10 for SAT, 20 for UNSAT and 30 for unknown.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import corpus as C
from . import decomposition as D
from . import formula as F
from . import kripke as K
from . import mso
from . import reductions as R
from . import solvers as S
from .incidence import LEVEL_MODE, PV_MODE, build_structure, gaifman_graph, structure_to_json

log = logging.getLogger("modaltw")

EXIT_USAGE, EXIT_INTERNAL = 2, 70
VERDICT_EXIT = {True: 10, False: 20, None: 30}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    args: argparse.Namespace
    seed: int = 0
    size_guard: Optional[int] = None


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write("\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc.msg})") from exc


def _formula_text(args) -> str:
    if getattr(args, "expr", None) is not None:
        return args.expr
    if getattr(args, "file", None) is None:
        raise UsageError("give a formula file or -e TEXT")
    return _read_text(args.file)


def _load_cnf(args):
    """Normalized CNF or TrivialUnsat, from formula text or CNF JSON."""
    text = _formula_text(args)
    if text.lstrip().startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            data = None  # formula text such as "[]q"
        if data is not None:
            try:
                return F.normalize(F.cnf_from_json(data))
            except (KeyError, TypeError, ValueError) as exc:
                raise UsageError(f"malformed CNF JSON: {exc}") from exc
    try:
        return F.prepare(text)
    except F.FormulaSyntaxError as exc:
        raise UsageError(str(exc)) from exc


def _need_structure(cnf):
    if isinstance(cnf, F.TrivialUnsat):
        raise UsageError("the formula is trivially unsatisfiable; it has no incidence structure")
    return cnf


# ---------------------------------------------------------------------------
# commands


def cmd_parse(args) -> int:
    try:
        f = F.parse_formula(_formula_text(args))
    except F.FormulaSyntaxError as exc:
        raise UsageError(str(exc)) from exc
    _emit(
        {
            "formula": F.render(f),
            "modalDepth": F.modal_depth(f),
            "variables": sorted(F.formula_variables(f)),
        }
    )
    return 0


def cmd_cnf(args) -> int:
    cnf = _load_cnf(args)
    if isinstance(cnf, F.TrivialUnsat):
        _emit({"trivialUnsat": True, "reason": cnf.reason})
        return 0
    _emit(
        {
            "trivialUnsat": False,
            "text": F.render_cnf(cnf),
            "modalDepth": F.modal_depth(cnf),
            "cnf": F.cnf_to_json(cnf),
        }
    )
    return 0


def cmd_structure(args) -> int:
    cnf = _need_structure(_load_cnf(args))
    s = build_structure(cnf, PV_MODE if args.pv_mode else LEVEL_MODE)
    out = structure_to_json(s)
    out["md"] = s.md
    out["mode"] = s.mode
    _emit(out)
    return 0


def cmd_decompose(args) -> int:
    cnf = _need_structure(_load_cnf(args))
    s = build_structure(cnf, LEVEL_MODE)
    g = gaifman_graph(s)
    if args.exact:
        try:
            d = D.exact_path_decomposition(g, args.cap) if args.path else D.exact_small(g, args.cap)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        d = D.minfill_heuristic(g)
        if args.path:
            raise UsageError("--path needs --exact")
    rep = D.validate(s, d)
    if not rep.valid:
        raise AssertionError(f"computed decomposition is {rep.summary()}")
    out = D.decomposition_to_json(d)
    out["width"] = rep.width
    _emit(out)
    return 0


def cmd_validate(args) -> int:
    cnf = _need_structure(_load_cnf(args))
    s = build_structure(cnf, LEVEL_MODE)
    try:
        d = D.decomposition_from_json(_read_json(args.decomposition))
        rep = D.validate(s, d)
    except (KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"bad decomposition: {exc}") from exc
    _emit(
        {
            "valid": rep.valid,
            "width": rep.width,
            "uncoveredElements": rep.uncovered_elements,
            "disconnectedElements": rep.disconnected_elements,
            "uncoveredEdges": [list(e) for e in rep.uncovered_edges],
            "treeProblems": rep.tree_problems,
        }
    )
    return 0 if rep.valid else 1


def _verdict_json(v: S.SatVerdict) -> dict:
    out = {"engine": v.engine, "sat": v.satisfiable, "verdict": v.label}
    if v.bound_used is not None:
        out["boundUsed"] = v.bound_used
    if v.witness is not None:
        out["witness"] = K.model_to_json(v.witness)
    return out


def cmd_solve(args) -> int:
    cnf = _load_cnf(args)
    try:
        kind, extras = S.parse_class(args.cls)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.engine == "all":
        engines = [S.ORACLE] if kind == "transitive-bounded" else [S.DIRECT, S.MSO_EVAL, S.ORACLE]
    else:
        engines = [args.engine]
    if kind == "transitive-bounded" and engines != [S.ORACLE]:
        raise UsageError("transitive-bounded is only available with --engine oracle")
    if isinstance(cnf, F.TrivialUnsat):
        verdicts = [S.SatVerdict(False, e) for e in engines]
    else:
        verdicts = []
        for e in engines:
            try:
                verdicts.append(S.solve(cnf, args.cls, e, args.max_worlds))
            except mso.SizeGuardError as exc:
                raise UsageError(f"{exc}; raise MODALTW_SIZE_GUARD to allow it") from exc
    exact = {v.satisfiable for v in verdicts if v.satisfiable is not None}
    if len(exact) > 1:
        raise AssertionError("engines disagree: " + ", ".join(f"{v.engine}={v.label}" for v in verdicts))
    sat = exact.pop() if exact else None
    _emit({"class": args.cls, "sat": sat, "engines": [_verdict_json(v) for v in verdicts]})
    return VERDICT_EXIT[sat] if args.exitcode_verdict else 0


def cmd_mso_stats(args) -> int:
    if args.formula == "xi":
        f = mso.build_xi_sentence(args.md)
    elif args.formula == "zeta":
        f = mso.build_zeta_sentence(args.md)
    else:
        f = mso.build_chi_family(args.variant)
    st = mso.stats(f)
    out = {
        "formula": args.formula,
        "md": args.md,
        "nodeCount": st.node_count,
        "soQuantifiers": st.so_quantifier_count,
        "soNesting": st.so_nesting,
    }
    if args.formula == "chi":
        out["variant"] = args.variant
    if args.dump:
        out["text"] = mso.dump(f)
    _emit(out)
    return 0


def _load_pd(path: Optional[str], names=None) -> Optional[D.PathDecomposition]:
    if path is None:
        return None
    d = D.decomposition_from_json(_read_json(path))
    if not isinstance(d, D.PathDecomposition):
        raise UsageError("a path decomposition (no treeEdges) is required")
    if names is not None:
        def name(x):
            if isinstance(x, int):
                if not 1 <= x <= len(names):
                    raise UsageError(f"variable {x} out of range")
                return names[x - 1]
            return x

        d = D.PathDecomposition(tuple(frozenset(name(x) for x in b) for b in d.bags))
    return d


def cmd_reduce(args) -> int:
    data = _read_json(args.instance)
    try:
        if args.direction == "nlcp-to-pwsat":
            inst = R.nlcp_from_json(data)
            pd = _load_pd(args.pd) or D.exact_path_decomposition(inst.graph())
            pw, ppd = R.nlcp_to_pwsat(inst, pd)
            _emit({"pwsat": R.pwsat_to_json(pw), "pd": D.decomposition_to_json(ppd)})
            return 0
        inst = R.pwsat_from_json(data)
        pd = _load_pd(args.pd, inst.variables)
        if pd is None:
            g = R.pwsat_primal_graph(inst)
            if g.number_of_nodes() > D.DEFAULT_EXACT_CAP:
                raise UsageError("instance too large for an exact decomposition; pass --pd")
            pd = D.exact_path_decomposition(g)
        order = D.first_introduction_order(pd, inst.variable_key)
        pd = D.enforce_continuity(pd, order, inst.variable_key)
        phi = R.pwsat_to_modal(inst, pd)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed instance: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = R.phi_to_json(phi)
    if args.with_pd:
        layout = D.build_phiF_path_decomposition(pd, inst, phi)
        out["structurePd"] = D.decomposition_to_json(layout.decomposition)
        out["structurePdWidth"] = D.width(layout.decomposition)
        out["widthBound"] = layout.bound
    _emit(out)
    return 0


def _report_json(name: str, rep: R.PipelineReport) -> dict:
    return {
        "case": name,
        "ok": rep.ok,
        "nlcpYes": rep.nlcp_yes,
        "pwsatYes": rep.pwsat_yes,
        "checks": {k: {"status": s, "detail": d} for k, (s, d) in sorted(rep.checks.items())},
        "width": rep.layout_width,
        "bound": rep.layout_bound,
    }


def cmd_verify_pipeline(args) -> int:
    if args.exhaustive:
        reports = [
            (f"nlcp-{i:05d}", R.verify_pipeline(inst))
            for i, inst in enumerate(R.nlcp_corpus(args.max_vertices))
        ]
    else:
        if args.instance is None:
            raise UsageError("give an NLCP instance file or --exhaustive")
        try:
            inst = R.nlcp_from_json(_read_json(args.instance))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed instance: {exc}") from exc
        reports = [(args.instance, R.verify_pipeline(inst, _load_pd(args.pd)))]
    reports.sort(key=lambda r: r[0])
    failed = [n for n, r in reports if not r.ok]
    if args.exhaustive:
        _emit(
            {
                "instances": len(reports),
                "yes": sum(r.pwsat_yes for _, r in reports),
                "failed": failed,
                "maxWidthSlack": min(r.layout_bound - r.layout_width for _, r in reports),
            }
        )
    else:
        _emit(_report_json(*reports[0]))
    return 0 if not failed else 1


def cmd_cross_check(args) -> int:
    spec = C.CorpusSpec(
        seed=args.seed,
        count=args.cases,
        n_vars=args.vars,
        max_depth=args.max_depth,
        max_clauses=args.max_clauses,
    )
    classes = tuple(args.classes.split(";")) if args.classes else S.CLASSES
    for cls in classes:
        try:
            S.parse_class(cls)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    rep = S.cross_check(C.generate(spec), classes, with_oracle=not args.no_oracle)
    _emit(
        {
            "cases": rep.cases,
            "checks": rep.checks,
            "disagreements": [
                {
                    "case": d.case_id,
                    "class": d.cls,
                    "verdicts": d.verdicts,
                    "formula": F.render_cnf(d.cnf),
                    "minimized": F.render_cnf(d.minimized),
                }
                for d in sorted(rep.disagreements, key=lambda d: (d.case_id, d.cls))
            ],
        }
    )
    return 0 if rep.ok else 1


def cmd_generate_corpus(args) -> int:
    spec = C.CorpusSpec(
        seed=args.seed,
        count=args.count,
        n_vars=args.vars,
        max_depth=args.max_depth,
        max_clauses=args.max_clauses,
        include_edge_cases=not args.no_edge_cases,
    )
    cases = C.generate(spec)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, cnf in cases:
            (out / f"{name}.mf").write_text(F.render(F.cnf_to_formula(cnf)) + "\n")
        _emit({"written": len(cases), "directory": str(out)})
    else:
        _emit([{"case": name, "text": F.render(F.cnf_to_formula(cnf))} for name, cnf in cases])
    return 0


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _formula_args(p) -> None:
    p.add_argument("file", nargs="?", help="formula file ('-' for stdin)")
    p.add_argument("-e", "--expr", help="formula text given inline")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="modaltw", description=__doc__.splitlines()[0])
    top.add_argument("-v", "--verbose", action="store_true")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="parse and pretty-print a formula")
    _formula_args(p)
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("cnf", help="normalized modal CNF")
    _formula_args(p)
    p.set_defaults(run=cmd_cnf)

    p = sub.add_parser("structure", help="incidence structure as JSON")
    _formula_args(p)
    p.add_argument("--pv-mode", action="store_true", help="Pv/Hl instead of level predicates")
    p.set_defaults(run=cmd_structure)

    p = sub.add_parser("decompose", help="tree or path decomposition of the incidence structure")
    _formula_args(p)
    how = p.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true")
    how.add_argument("--minfill", action="store_true")
    p.add_argument("--path", action="store_true", help="path decomposition (with --exact)")
    p.add_argument("--cap", type=int, default=D.DEFAULT_EXACT_CAP)
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("validate-decomposition", help="check a decomposition JSON against a formula")
    _formula_args(p)
    p.add_argument("--decomposition", required=True)
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("solve", help="decide satisfiability in a frame class")
    _formula_args(p)
    p.add_argument("--class", dest="cls", default="general")
    p.add_argument("--engine", choices=["direct", "mso", "oracle", "all"], default="direct")
    p.add_argument("--max-worlds", type=int)
    p.add_argument("--exitcode-verdict", action="store_true")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("mso-stats", help="size of the MSO sentences")
    p.add_argument("--formula", choices=["xi", "zeta", "chi"], required=True)
    p.add_argument("--md", type=int, default=0)
    p.add_argument("--variant", choices=list(mso.CHI_VARIANTS), default=mso.CHI_VARIANTS[0])
    p.add_argument("--dump", action="store_true")
    p.set_defaults(run=cmd_mso_stats)

    p = sub.add_parser("reduce", help="NLCP to p-PW-SAT, or p-PW-SAT to φ_F")
    p.add_argument("direction", choices=["nlcp-to-pwsat", "pwsat-to-modal"])
    p.add_argument("instance")
    p.add_argument("--pd", help="path decomposition JSON")
    p.add_argument("--with-pd", action="store_true", help="also emit the structure decomposition")
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("verify-pipeline", help="check the reduction chain on NLCP instances")
    p.add_argument("instance", nargs="?")
    p.add_argument("--pd")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--max-vertices", type=int, default=4)
    p.set_defaults(run=cmd_verify_pipeline)

    for name, run in (("cross-check", cmd_cross_check), ("generate-corpus", cmd_generate_corpus)):
        p = sub.add_parser(name)
        p.add_argument("--seed", type=int, default=0)
        if name == "cross-check":
            p.add_argument("--cases", type=int, default=300)
            p.add_argument("--classes", help="';'-separated class list")
            p.add_argument("--no-oracle", action="store_true")
        else:
            p.add_argument("--count", type=int, default=100)
            p.add_argument("--out")
            p.add_argument("--no-edge-cases", action="store_true")
        p.add_argument("--vars", type=int, default=4)
        p.add_argument("--max-depth", type=int, default=2)
        p.add_argument("--max-clauses", type=int, default=4)
        p.set_defaults(run=run)
    return top


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        try:
            guard = mso.size_guard_from_env()
        except ValueError as exc:
            raise UsageError("MODALTW_SIZE_GUARD must be an integer or 'off'") from exc
        log.debug("config %s", CliConfig(args.command, args, getattr(args, "seed", 0), guard))
        return args.run(args)
    except UsageError as exc:
        print(f"modaltw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, S.WitnessError) as exc:
        print(f"modaltw: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
