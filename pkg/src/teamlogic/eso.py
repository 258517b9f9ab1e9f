"""Translation of team formulas into existential second-order sentences.

A team formula over scope (x1..xn) becomes a sentence over the base
vocabulary extended with an n-ary team predicate S and a block of
existentially quantified relation variables.  The brute-force evaluator
interprets S as the team's relation, enumerates all interpretations of
the relation variables, and evaluates the first-order matrix classically,
which gives an independent cross-check of the team evaluator.

The independence-atom clause is the load-bearing one; the connective and
quantifier clauses follow the usual relational encoding of team
operations (covers for disjunction, extension graphs for quantifiers) and
are trusted only as far as the agreement checks confirm them.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from .core import Structure, Team, VarTuple, team_to_relation
from .errors import LogicError, ScopeError, SearchSpaceError
from .firstorder import compile_formula
from .semantics import evaluate
from .syntax import (
    And,
    DepAtom,
    Eq,
    Exists,
    Forall,
    Formula,
    IndAtom,
    Not,
    Or,
    Rel,
    Term,
    Var,
    contains_sugar,
    format_formula,
    free_vars,
)

DEFAULT_RELATION_BITS_CAP = 22


@dataclass(frozen=True)
class EsoSentence:
    """An existential relation-variable prefix over a first-order matrix."""

    team_symbol: str
    team_arity: int
    scope: VarTuple
    relation_vars: tuple[tuple[str, int], ...]
    matrix: Formula


def format_eso(sentence: EsoSentence) -> str:
    prefix = " ".join(f"{name}/{arity}" for name, arity in sentence.relation_vars)
    head = f"exists2 {prefix} ." if prefix else "exists2 ."
    return f"{head} {format_formula(sentence.matrix)}"


def _forall_chain(names, body: Formula) -> Formula:
    for name in reversed(names):
        body = Forall(name, body)
    return body


def _exists_chain(names, body: Formula) -> Formula:
    for name in reversed(names):
        body = Exists(name, body)
    return body


def _and_chain(parts) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _or_chain(parts) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def _rel(name: str, variables) -> Rel:
    return Rel(name, tuple(Var(v) for v in variables))


def _subst_term(t: Term, mapping: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping[t.name])
    return t


def _subst_atom(atom: Formula, mapping: dict[str, str]) -> Formula:
    if isinstance(atom, Eq):
        return Eq(_subst_term(atom.left, mapping), _subst_term(atom.right, mapping))
    if isinstance(atom, Rel):
        return Rel(atom.name, tuple(_subst_term(a, mapping) for a in atom.args))
    if isinstance(atom, Not):
        return Not(_subst_atom(atom.atom, mapping))
    raise TypeError(f"not a pointwise atom: {atom!r}")


def _indices(scope: VarTuple, variables) -> tuple[int, ...]:
    out = set()
    for v in variables:
        try:
            out.add(scope.index(v))
        except ValueError:
            raise ScopeError(f"variable {v!r} is not in the scope {scope}") from None
    return tuple(sorted(out))


class _Translator:
    def __init__(self, scope: VarTuple):
        self.counter = 0
        self.relation_vars: list[tuple[str, int]] = []

    def fresh(self, arity: int) -> str:
        self.counter += 1
        name = f"S{self.counter}"
        self.relation_vars.append((name, arity))
        return name

    # clause helpers --------------------------------------------------------

    def ind_atom(self, atom: IndAtom, team: str, scope: VarTuple) -> Formula:
        n = len(scope)
        left = _indices(scope, atom.left)
        cond = _indices(scope, atom.condition)
        right = _indices(scope, atom.right)
        ys = [f"y{i + 1}" for i in range(n)]
        zs = [f"z{i + 1}" for i in range(n)]
        us = [f"u{i + 1}" for i in range(n)]
        antecedent_negs: list[Formula] = [Not(_rel(team, ys)), Not(_rel(team, zs))]
        antecedent_negs.extend(Not(Eq(Var(ys[j]), Var(zs[j]))) for j in cond)
        witness_eqs: list[Formula] = [_rel(team, us)]
        witness_eqs.extend(Eq(Var(us[j]), Var(ys[j])) for j in cond)
        witness_eqs.extend(Eq(Var(us[i]), Var(ys[i])) for i in left)
        witness_eqs.extend(Eq(Var(us[k]), Var(zs[k])) for k in right)
        consequent = _exists_chain(us, _and_chain(witness_eqs))
        return _forall_chain(ys + zs, _or_chain(antecedent_negs + [consequent]))

    def pointwise(self, atom: Formula, team: str, scope: VarTuple) -> Formula:
        vs = [f"v{i + 1}" for i in range(len(scope))]
        mapping = dict(zip(scope, vs))
        return _forall_chain(vs, Or(Not(_rel(team, vs)), _subst_atom(atom, mapping)))

    def empty_team(self, team: str, scope: VarTuple) -> Formula:
        vs = [f"v{i + 1}" for i in range(len(scope))]
        return _forall_chain(vs, Not(_rel(team, vs)))

    # main recursion ---------------------------------------------------------

    def translate(self, f: Formula, team: str, scope: VarTuple) -> Formula:
        if isinstance(f, IndAtom):
            return self.ind_atom(f, team, scope)
        if isinstance(f, DepAtom):
            return self.ind_atom(IndAtom(f.determined, f.determiner, f.determined), team, scope)
        if isinstance(f, (Eq, Rel)):
            return self.pointwise(f, team, scope)
        if isinstance(f, Not):
            if isinstance(f.atom, (Eq, Rel)):
                return self.pointwise(f, team, scope)
            return self.empty_team(team, scope)
        if isinstance(f, And):
            return And(self.translate(f.left, team, scope), self.translate(f.right, team, scope))
        if isinstance(f, Or):
            n = len(scope)
            s1 = self.fresh(n)
            s2 = self.fresh(n)
            vs = [f"v{i + 1}" for i in range(n)]
            cover = _forall_chain(
                vs, _or_chain([Not(_rel(team, vs)), _rel(s1, vs), _rel(s2, vs)])
            )
            within1 = _forall_chain(vs, Or(Not(_rel(s1, vs)), _rel(team, vs)))
            within2 = _forall_chain(vs, Or(Not(_rel(s2, vs)), _rel(team, vs)))
            return _and_chain(
                [
                    cover,
                    within1,
                    within2,
                    self.translate(f.left, s1, scope),
                    self.translate(f.right, s2, scope),
                ]
            )
        if isinstance(f, Exists):
            return self.quantifier(f, team, scope, universal=False)
        if isinstance(f, Forall):
            return self.quantifier(f, team, scope, universal=True)
        raise LogicError(f"formula cannot be translated: {f!r}")

    def quantifier(self, f, team: str, scope: VarTuple, universal: bool) -> Formula:
        n = len(scope)
        vs = [f"v{i + 1}" for i in range(n)]
        if f.var not in scope:
            scope2 = scope + (f.var,)
            fresh = self.fresh(n + 1)
            w = f"v{n + 1}"
            # every extended row projects to a team row
            ax_projection = _forall_chain(
                vs + [w], Or(Not(_rel(fresh, vs + [w])), _rel(team, vs))
            )
            if universal:
                ax_total = _forall_chain(
                    vs + [w], Or(Not(_rel(team, vs)), _rel(fresh, vs + [w]))
                )
            else:
                ax_total = _forall_chain(
                    vs, Or(Not(_rel(team, vs)), Exists(w, _rel(fresh, vs + [w])))
                )
            body = self.translate(f.body, fresh, scope2)
            return _and_chain([ax_projection, ax_total, body])
        # requantified variable: the column is overwritten, the arity stays
        pos = scope.index(f.var)
        fresh = self.fresh(n)
        b = f"v{n + 1}"

        def with_b(names):
            swapped = list(names)
            swapped[pos] = b
            return swapped

        ax_projection = _forall_chain(
            vs, Or(Not(_rel(fresh, vs)), Exists(b, _rel(team, with_b(vs))))
        )
        if universal:
            ax_total = _forall_chain(
                vs + [b], Or(Not(_rel(team, vs)), _rel(fresh, with_b(vs)))
            )
        else:
            ax_total = _forall_chain(
                vs, Or(Not(_rel(team, vs)), Exists(b, _rel(fresh, with_b(vs))))
            )
        body = self.translate(f.body, fresh, scope)
        return _and_chain([ax_projection, ax_total, body])


def translate(f: Formula, scope, team_symbol: str = "S") -> EsoSentence:
    """Build the second-order counterpart of a team formula over a scope."""
    scope = tuple(scope)
    if len(set(scope)) != len(scope):
        raise ValueError("scope variables must be distinct")
    if contains_sugar(f):
        raise LogicError("slashed and branching quantifiers must be rewritten first")
    missing = [v for v in free_vars(f) if v not in scope]
    if missing:
        raise ScopeError(f"free variable {missing[0]!r} is not in the scope {scope}")
    tr = _Translator(scope)
    matrix = tr.translate(f, team_symbol, scope)
    return EsoSentence(team_symbol, len(scope), scope, tuple(tr.relation_vars), matrix)


def _subsets_by_popcount(cells):
    for k in range(len(cells) + 1):
        for combo in itertools.combinations(cells, k):
            yield frozenset(combo)


@functools.lru_cache(maxsize=4096)
def _compiled_matrix(sentence: EsoSentence):
    return compile_formula(sentence.matrix)


def eval_eso(
    structure: Structure,
    team: Team,
    sentence: EsoSentence,
    max_bits: int = DEFAULT_RELATION_BITS_CAP,
) -> bool:
    """Brute-force satisfaction of the translated sentence.

    Interprets the team symbol as the team's relation and enumerates every
    interpretation of the relation variables (per relation in ascending
    popcount order, with early exit).  The total cell count of the
    relation variables is capped.
    """
    if sentence.team_symbol in structure.relations:
        raise LogicError(
            f"relation {sentence.team_symbol!r} clashes with the team symbol"
        )
    size = structure.size
    bits = sum(size**arity for _, arity in sentence.relation_vars)
    if bits > max_bits:
        raise SearchSpaceError(
            f"ESO search too large: {bits} relation cells exceed the cap of {max_bits}"
        )
    relations: dict = dict(structure.relations)
    relations[sentence.team_symbol] = team_to_relation(team, sentence.scope)
    compiled = _compiled_matrix(sentence)
    domain = tuple(structure.domain_ids())
    cell_space = [
        sorted(itertools.product(domain, repeat=arity))
        for _, arity in sentence.relation_vars
    ]
    names = [name for name, _ in sentence.relation_vars]

    def search(i: int) -> bool:
        if i == len(names):
            return compiled(domain, relations, structure.constants, {})
        for table in _subsets_by_popcount(cell_space[i]):
            relations[names[i]] = table
            if search(i + 1):
                return True
        del relations[names[i]]
        return False

    return search(0)


@dataclass(frozen=True)
class TranslationCheck:
    team_value: bool
    eso_value: bool

    @property
    def agree(self) -> bool:
        return self.team_value == self.eso_value


def check_translation(
    structure: Structure,
    team: Team,
    f: Formula,
    mode: str = "lax",
    max_bits: int = DEFAULT_RELATION_BITS_CAP,
) -> TranslationCheck:
    """Evaluate both routes on the same input and report both verdicts."""
    sentence = translate(f, team.scope)
    return TranslationCheck(
        evaluate(structure, team, f, mode=mode),
        eval_eso(structure, team, sentence, max_bits=max_bits),
    )
