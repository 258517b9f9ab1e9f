"""Command-line interface.

Subcommands: eval, entail, closure, counterexample, validity, translate,
eso-check, branch, desugar.  Formula arguments are taken verbatim unless
they name an existing file, in which case the file's contents are parsed.
Exit codes: 0 for a completed report (for ``eval``: satisfied), 1 for
``eval`` on an unsatisfied instance, 2 for any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import atoms as atoms_mod
from . import branching as branching_mod
from . import eso as eso_mod
from .core import (
    Assignment,
    Structure,
    format_structure,
    format_team,
    parse_structure,
    parse_team,
)
from .errors import LogicError
from .semantics import evaluate, validity_search
from .syntax import (
    DepStatement,
    Henkin,
    IndStatement,
    desugar_henkin,
    desugar_slash,
    format_formula,
    parse_atom_statement,
    parse_atoms_text,
    parse_formula,
)


def _read_formula_arg(arg: str):
    path = Path(arg)
    text = path.read_text() if path.is_file() else arg
    return parse_formula(text)


def _read_structure(path: str) -> Structure:
    return parse_structure(Path(path).read_text())


def _print_countermodel(structure: Structure, team, out) -> None:
    print(f"countermodel team (domain size {structure.size}):", file=out)
    print(format_team(team, structure), end="", file=out)


def cmd_eval(args, out) -> int:
    structure = _read_structure(args.structure)
    team = parse_team(Path(args.team).read_text(), structure)
    formula = desugar_henkin(desugar_slash(_read_formula_arg(args.formula)))
    ok = evaluate(structure, team, formula, mode=args.semantics, budget=args.budget)
    print(f"{'SAT' if ok else 'UNSAT'} ({args.semantics})", file=out)
    return 0 if ok else 1


def _syntactic_report(premises, goal, out) -> None:
    if isinstance(goal, DepStatement) and all(isinstance(a, DepStatement) for a in premises):
        result = atoms_mod.armstrong_derives(premises, goal)
        engine = "functional-dependence closure"
    elif (
        isinstance(goal, IndStatement)
        and goal.is_unconditional_single()
        and all(
            isinstance(a, IndStatement) and a.is_unconditional_single() for a in premises
        )
    ):
        result = atoms_mod.independence_derives(premises, goal)
        engine = "symmetry/constancy rules"
    else:
        closure = atoms_mod.rule_closure(premises)
        derived = goal.canonical() in closure.atoms
        print(
            f"SYNTACTIC: {'DERIVED' if derived else 'NOT DERIVED'} "
            f"(forward chaining{'; truncated' if closure.truncated else ''})",
            file=out,
        )
        if derived:
            trace = closure.derivation_of(goal)
            if trace is not None:
                print(trace.render(), file=out)
        return
    print(f"SYNTACTIC: {'DERIVED' if result.derived else 'NOT DERIVED'} ({engine})", file=out)
    if result.trace is not None:
        print(result.trace.render(), file=out)


def cmd_entail(args, out) -> int:
    premises = parse_atoms_text(Path(args.atoms).read_text())
    goal = parse_atom_statement(args.goal)
    if args.mode in ("syntactic", "both"):
        _syntactic_report(premises, goal, out)
    if args.mode in ("semantic", "both"):
        cfg = atoms_mod.EntailmentConfig(
            domain_sizes=tuple(args.domain_sizes) if args.domain_sizes else None,
            max_rows=args.max_rows,
            samples=args.samples,
            seed=args.seed,
        )
        verdict = atoms_mod.semantic_entails(premises, goal, cfg)
        kind = "exact" if verdict.exact else "up to bound"
        sizes = ",".join(str(s) for s in verdict.bound.domain_sizes)
        if verdict.entailed:
            print(
                f"SEMANTIC: ENTAILED ({kind}; domain sizes {sizes}; "
                f"rows <= {verdict.bound.max_rows})",
                file=out,
            )
        else:
            print(f"SEMANTIC: NOT ENTAILED (domain sizes {sizes})", file=out)
            _print_countermodel(verdict.witness_structure, verdict.witness, out)
    return 0


def cmd_closure(args, out) -> int:
    premises = parse_atoms_text(Path(args.atoms).read_text())
    universe = tuple(args.universe) if args.universe else None
    result = atoms_mod.rule_closure(premises, max_steps=args.max_steps, universe=universe)
    print(f"closure size: {len(result.atoms)} (truncated: {'yes' if result.truncated else 'no'})", file=out)
    for atom in sorted(result.atoms, key=str):
        print(str(atom), file=out)
    if args.traces:
        print("--- derivation steps ---", file=out)
        print(result.trace.render(), file=out)
    return 0


def cmd_counterexample(args, out) -> int:
    premises = parse_atoms_text(Path(args.atoms).read_text())
    goal = parse_atom_statement(args.goal)
    if isinstance(goal, DepStatement):
        team = atoms_mod.counterexample_armstrong(premises, goal)
        structure = atoms_mod.armstrong_counterexample_domain()
    else:
        team = atoms_mod.counterexample_independence(premises, goal)
        structure = atoms_mod.independence_counterexample_domain(premises)
    if team is None:
        print("DERIVABLE (no counterexample)", file=out)
    else:
        _print_countermodel(structure, team, out)
    return 0


def cmd_validity(args, out) -> int:
    sentence = desugar_henkin(desugar_slash(_read_formula_arg(args.formula)))
    result = validity_search(
        sentence,
        args.max_size,
        mode=args.semantics,
        max_structures=args.max_structures,
        jobs=args.jobs,
    )
    if result.valid_up_to_bound:
        print(f"VALID-UP-TO-{args.max_size} ({args.semantics})", file=out)
    else:
        size = result.countermodel.size
        print(f"COUNTERMODEL size {size} ({args.semantics})", file=out)
        print(format_structure(result.countermodel), end="", file=out)
    return 0


def cmd_translate(args, out) -> int:
    formula = desugar_henkin(desugar_slash(_read_formula_arg(args.formula)))
    sentence = eso_mod.translate(formula, tuple(args.scope))
    print(eso_mod.format_eso(sentence), file=out)
    return 0


def cmd_eso_check(args, out) -> int:
    structure = _read_structure(args.structure)
    team = parse_team(Path(args.team).read_text(), structure)
    formula = desugar_henkin(desugar_slash(_read_formula_arg(args.formula)))
    report = eso_mod.check_translation(structure, team, formula, max_bits=args.max_bits)
    print(
        f"team={'SAT' if report.team_value else 'UNSAT'} "
        f"eso={'SAT' if report.eso_value else 'UNSAT'} "
        f"agree={'yes' if report.agree else 'no'}",
        file=out,
    )
    return 0


def cmd_branch(args, out) -> int:
    formula = _read_formula_arg(args.formula)
    if not isinstance(formula, Henkin):
        raise LogicError("the branch command expects a branch {...} formula")
    structure = _read_structure(args.structure)
    pairs = []
    for item in args.assign or []:
        name, _, value = item.partition("=")
        if not name or not value:
            raise LogicError(f"malformed assignment {item!r}; expected var=element")
        pairs.append((name, structure.id_of(value)))
    assignment = Assignment(
        tuple(n for n, _ in pairs), tuple(v for _, v in pairs)
    )
    report = branching_mod.check_branching_equivalence(
        structure, assignment, formula, mode=args.semantics, max_domain=args.max_domain
    )
    print(
        f"skolem={'TRUE' if report.skolem else 'FALSE'} "
        f"compositional={'TRUE' if report.compositional else 'FALSE'} "
        f"agree={'yes' if report.agree else 'no'}",
        file=out,
    )
    return 0


def cmd_desugar(args, out) -> int:
    formula = desugar_henkin(desugar_slash(_read_formula_arg(args.formula)))
    print(format_formula(formula), file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teamlogic",
        description="Model checking and inference for dependence and independence "
        "logic under team semantics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a formula on a structure and team")
    p.add_argument("structure")
    p.add_argument("team")
    p.add_argument("formula", help="formula text, or a path to a formula file")
    p.add_argument("--semantics", choices=("strict", "lax"), default="lax")
    p.add_argument("--budget", type=int, default=10**7)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("entail", help="decide atom entailment")
    p.add_argument("atoms", help="file with one dep(...)/ind(...) atom per line")
    p.add_argument("--goal", required=True)
    p.add_argument("--mode", choices=("syntactic", "semantic", "both"), default="both")
    p.add_argument("--domain-sizes", type=int, nargs="*", default=None)
    p.add_argument("--max-rows", type=int, default=3)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_entail)

    p = sub.add_parser("closure", help="forward-chaining closure of an atom set")
    p.add_argument("atoms")
    p.add_argument("--max-steps", type=int, default=50_000)
    p.add_argument("--universe", nargs="*", default=None)
    p.add_argument("--traces", action="store_true")
    p.set_defaults(handler=cmd_closure)

    p = sub.add_parser("counterexample", help="construct a countermodel team for a goal")
    p.add_argument("atoms")
    p.add_argument("--goal", required=True)
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("validity", help="bounded validity check for a sentence")
    p.add_argument("formula")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--semantics", choices=("strict", "lax"), default="lax")
    p.add_argument("--max-structures", type=int, default=2**20)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_validity)

    p = sub.add_parser("translate", help="second-order translation of a formula")
    p.add_argument("formula")
    p.add_argument("--scope", nargs="+", required=True)
    p.set_defaults(handler=cmd_translate)

    p = sub.add_parser("eso-check", help="compare team evaluation with the translation")
    p.add_argument("structure")
    p.add_argument("team")
    p.add_argument("formula")
    p.add_argument("--max-bits", type=int, default=eso_mod.DEFAULT_RELATION_BITS_CAP)
    p.set_defaults(handler=cmd_eso_check)

    p = sub.add_parser("branch", help="check a branching prefix both ways")
    p.add_argument("formula")
    p.add_argument("structure")
    p.add_argument("--assign", nargs="*", default=None, metavar="VAR=ELEM")
    p.add_argument("--semantics", choices=("strict", "lax"), default="lax")
    p.add_argument("--max-domain", type=int, default=branching_mod.DEFAULT_SKOLEM_DOMAIN_CAP)
    p.set_defaults(handler=cmd_branch)

    p = sub.add_parser("desugar", help="rewrite slashed and branching quantifiers away")
    p.add_argument("formula")
    p.set_defaults(handler=cmd_desugar)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, sys.stdout)
    except LogicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
