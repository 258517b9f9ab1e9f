"""Team-semantics evaluation, sentence satisfaction, and validity search.

The evaluator is compositional: first-order atoms hold when every row
satisfies them pointwise, a negated dependency atom holds on the empty
team alone, conjunction shares the team, disjunction searches covers of
the team (disjoint covers under strict semantics), the existential
quantifier searches choice functions (singleton choices under strict
semantics) and the universal quantifier extends every row with every
domain element.

Existential search is per-row with pruning: conjuncts without dependency
atoms restrict each row's candidate values up front, and the common shape
"one independence atom headed by the new variable plus pointwise
conjuncts" is decided class by class without enumerating choice
functions.  Everything else falls back to a budgeted depth-first search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    Structure,
    Team,
    VarTuple,
    check_mode,
    duplicate,
)
from .errors import BudgetExceededError, LogicError, ScopeError, SearchSpaceError
from .syntax import (
    And,
    Const,
    DepAtom,
    Eq,
    Exists,
    Forall,
    Formula,
    Henkin,
    IndAtom,
    Not,
    Or,
    Rel,
    SlashedExists,
    Var,
    contains_sugar,
    free_vars,
)

DEFAULT_SEARCH_BUDGET = 10**7


def satisfies_dep(team: Team, determiner, determined) -> bool:
    """Do the determiner values fix the determined values on this team?"""
    pos_d = team.positions(determiner)
    pos_x = team.positions(determined)
    seen: dict = {}
    for r in team.rows:
        key = tuple(r[i] for i in pos_d)
        val = tuple(r[i] for i in pos_x)
        if seen.setdefault(key, val) != val:
            return False
    return True


def satisfies_ind(team: Team, left, condition, right) -> bool:
    """Within each condition class, left and right patterns combine freely."""
    pos_c = team.positions(condition)
    pos_l = team.positions(left)
    pos_r = team.positions(right)
    groups: dict = {}
    for r in team.rows:
        key = tuple(r[i] for i in pos_c)
        lv = tuple(r[i] for i in pos_l)
        rv = tuple(r[i] for i in pos_r)
        ls, rs, pairs = groups.setdefault(key, (set(), set(), set()))
        ls.add(lv)
        rs.add(rv)
        pairs.add((lv, rv))
    for ls, rs, pairs in groups.values():
        if len(pairs) != len(ls) * len(rs):
            return False
    return True


def check_vocabulary(structure: Structure, f: Formula) -> None:
    """Reject unknown relations/constants and arity mismatches up front."""

    def walk(node: Formula):
        if isinstance(node, Rel):
            if node.name not in structure.relations:
                raise LogicError(f"unknown relation {node.name!r}")
            if structure.arities[node.name] != len(node.args):
                raise LogicError(
                    f"relation {node.name!r} used with arity {len(node.args)}, "
                    f"declared {structure.arities[node.name]}"
                )
            for t in node.args:
                if isinstance(t, Const) and t.name not in structure.constants:
                    raise LogicError(f"unknown constant {t.name!r}")
        elif isinstance(node, Eq):
            for t in (node.left, node.right):
                if isinstance(t, Const) and t.name not in structure.constants:
                    raise LogicError(f"unknown constant {t.name!r}")
        elif isinstance(node, Not):
            walk(node.atom)
        elif isinstance(node, (And, Or)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (Exists, Forall)):
            walk(node.body)
        elif isinstance(node, (SlashedExists, Henkin)):
            pass  # rejected separately before evaluation
        elif isinstance(node, (DepAtom, IndAtom)):
            pass
        else:
            raise TypeError(f"not a formula: {node!r}")

    walk(f)


def _flatten_and(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _flatten_and(f.left) + _flatten_and(f.right)
    return [f]


def _rebuild_and(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _is_flat(f: Formula) -> bool:
    """Dependency-atom-free subformulas are flat: row-by-row decidable."""
    if isinstance(f, (Eq, Rel)):
        return True
    if isinstance(f, (DepAtom, IndAtom)):
        return False
    if isinstance(f, Not):
        return _is_flat(f.atom)
    if isinstance(f, (And, Or)):
        return _is_flat(f.left) and _is_flat(f.right)
    if isinstance(f, (Exists, Forall)):
        return _is_flat(f.body)
    return False


class _Evaluator:
    def __init__(self, structure: Structure, mode: str, budget: int):
        self.structure = structure
        self.mode = mode
        self.remaining = budget
        self.memo: dict = {}
        self.plans: dict = {}

    def spend(self, n: int = 1):
        self.remaining -= n
        if self.remaining < 0:
            raise BudgetExceededError("search exhausted: candidate budget used up")

    # -- pointwise atoms ----------------------------------------------------

    def _term_value(self, t, scope: VarTuple, row) -> int:
        if isinstance(t, Var):
            return row[scope.index(t.name)]
        return self.structure.constants[t.name]

    def _row_satisfies(self, f: Formula, scope: VarTuple, row) -> bool:
        """Pointwise satisfaction of a flat (dependency-atom-free) formula."""
        if isinstance(f, Eq):
            return self._term_value(f.left, scope, row) == self._term_value(
                f.right, scope, row
            )
        if isinstance(f, Rel):
            vals = tuple(self._term_value(a, scope, row) for a in f.args)
            return vals in self.structure.relations[f.name]
        if isinstance(f, Not):
            return not self._row_satisfies(f.atom, scope, row)
        if isinstance(f, And):
            return self._row_satisfies(f.left, scope, row) and self._row_satisfies(
                f.right, scope, row
            )
        if isinstance(f, Or):
            return self._row_satisfies(f.left, scope, row) or self._row_satisfies(
                f.right, scope, row
            )
        if isinstance(f, (Exists, Forall)):
            if f.var in scope:
                pos = scope.index(f.var)
                scope2 = scope
            else:
                pos = len(scope)
                scope2 = scope + (f.var,)
            want = isinstance(f, Exists)
            for a in self.structure.domain_ids():
                extended = row[:pos] + (a,) + row[pos + 1 :]
                if self._row_satisfies(f.body, scope2, extended) == want:
                    return want
            return not want
        raise TypeError(f"not a flat formula: {f!r}")

    # -- main recursion ------------------------------------------------------

    def eval(self, team: Team, f: Formula) -> bool:
        if not team.rows:
            return True  # the empty team satisfies every formula
        key = (id(f), team.scope, team.rows)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        value = self._eval(team, f)
        self.memo[key] = value
        return value

    def _eval(self, team: Team, f: Formula) -> bool:
        if isinstance(f, (Eq, Rel)):
            return all(self._row_satisfies(f, team.scope, r) for r in team.rows)
        if isinstance(f, Not):
            if isinstance(f.atom, (Eq, Rel)):
                return all(not self._row_satisfies(f.atom, team.scope, r) for r in team.rows)
            return not team.rows  # negated dep/ind atom: empty team alone
        if isinstance(f, DepAtom):
            return satisfies_dep(team, f.determiner, f.determined)
        if isinstance(f, IndAtom):
            return satisfies_ind(team, f.left, f.condition, f.right)
        if isinstance(f, And):
            return self.eval(team, f.left) and self.eval(team, f.right)
        if isinstance(f, Or):
            return self._eval_or(team, f)
        if isinstance(f, Forall):
            return self.eval(duplicate(team, f.var, self.structure), f.body)
        if isinstance(f, Exists):
            return self._eval_exists(team, f)
        if isinstance(f, (SlashedExists, Henkin)):
            raise LogicError("slashed and branching quantifiers must be rewritten first")
        raise TypeError(f"not a formula: {f!r}")

    # -- disjunction ---------------------------------------------------------

    def _eval_or(self, team: Team, f: Formula) -> bool:
        # The extreme covers (team, empty) and (empty, team) come first and
        # subsume the overlap-maximal lax cover (team, team).
        if self.eval(team, f.left) or self.eval(team, f.right):
            return True
        options = ((True, False), (False, True))
        if self.mode == "lax":
            options = ((True, True),) + options
        rows = team.rows
        scope = team.scope
        for flags in itertools.product(options, repeat=len(rows)):
            self.spend()
            left = tuple(r for r, fl in zip(rows, flags) if fl[0])
            if len(left) == len(rows) or not left:
                continue  # extremes already covered above
            right = tuple(r for r, fl in zip(rows, flags) if fl[1])
            if self.eval(Team(scope, left), f.left) and self.eval(Team(scope, right), f.right):
                return True
        return False

    # -- existential quantifier ------------------------------------------------

    def _exists_plan(self, team_scope: VarTuple, f: Exists):
        key = (id(f), team_scope)
        plan = self.plans.get(key)
        if plan is None:
            var = f.var
            if var in team_scope:
                scope2 = team_scope
                pos = team_scope.index(var)
            else:
                scope2 = team_scope + (var,)
                pos = len(team_scope)
            conjuncts = _flatten_and(f.body)
            flats = [c for c in conjuncts if _is_flat(c)]
            residual = [c for c in conjuncts if not _is_flat(c)]
            residual_formula = _rebuild_and(residual) if residual else None
            fast_atom = None
            if len(residual) == 1 and isinstance(residual[0], IndAtom):
                fast_atom = self._normalize_fast_atom(residual[0], var, scope2)
            plan = (scope2, pos, flats, residual_formula, fast_atom)
            self.plans[key] = plan
        return plan

    @staticmethod
    def _normalize_fast_atom(atom: IndAtom, var: str, scope2: VarTuple):
        """Orient the atom so the quantified variable is alone on the left.

        The independence condition is symmetric in its outer tuples, so
        an atom headed by the new variable on either side qualifies.
        Returns (condition, other) position-free tuples or None.
        """
        left, cond, right = set(atom.left), set(atom.condition), set(atom.right)
        if var in cond:
            return None
        if left == {var} and var not in right:
            other = atom.right
        elif right == {var} and var not in left:
            other = atom.left
        else:
            return None
        rest = set(atom.condition) | set(other)
        if any(v not in scope2 or v == var for v in rest):
            return None
        return (atom.condition, other)

    def _eval_exists(self, team: Team, f: Exists) -> bool:
        scope2, pos, flats, residual, fast_atom = self._exists_plan(team.scope, f)
        domain = tuple(self.structure.domain_ids())

        def extended(row, a):
            if pos == len(row):
                return row + (a,)
            return row[:pos] + (a,) + row[pos + 1 :]

        allowed = []
        for r in team.rows:
            vals = tuple(
                a
                for a in domain
                if all(self._row_satisfies(fl, scope2, extended(r, a)) for fl in flats)
            )
            if not vals:
                return False
            allowed.append(vals)

        if residual is None:
            return True  # pointwise conjuncts only: any choice works

        if fast_atom is not None and self.mode == "lax":
            return self._exists_ind_classes(team, allowed, fast_atom)

        return self._exists_dfs(team, scope2, extended, allowed, residual)

    def _exists_ind_classes(self, team: Team, allowed, fast_atom) -> bool:
        """Class-by-class decision for a single independence conjunct.

        Within one condition class the extension must realize the full
        product of new-variable values and other-side patterns, so the
        largest feasible value set per class is the intersection of the
        per-pattern candidate unions; the class succeeds exactly when
        every row still meets that set.
        """
        condition, other = fast_atom
        pos_c = team.positions(condition)
        pos_o = team.positions(other)
        classes: dict = {}
        for idx, r in enumerate(team.rows):
            key = tuple(r[i] for i in pos_c)
            classes.setdefault(key, []).append(idx)
        for members in classes.values():
            unions: dict = {}
            for idx in members:
                rho = tuple(team.rows[idx][i] for i in pos_o)
                unions.setdefault(rho, set()).update(allowed[idx])
            feasible = set.intersection(*unions.values())
            if not feasible:
                return False
            for idx in members:
                if feasible.isdisjoint(allowed[idx]):
                    return False
        return True

    def _exists_dfs(self, team: Team, scope2, extended, allowed, residual) -> bool:
        if self.mode == "strict":
            candidate_sets = [tuple((a,) for a in vals) for vals in allowed]
        else:
            candidate_sets = []
            for vals in allowed:
                subsets = []
                for k in range(1, len(vals) + 1):
                    subsets.extend(itertools.combinations(vals, k))
                candidate_sets.append(tuple(subsets))
            # The full extension is a frequent witness; try it first.
            self.spend()
            full = [extended(r, a) for r, vals in zip(team.rows, allowed) for a in vals]
            if self.eval(Team(scope2, full), residual):
                return True
        for combo in itertools.product(*candidate_sets):
            self.spend()
            rows = [extended(r, a) for r, vals in zip(team.rows, combo) for a in vals]
            if self.eval(Team(scope2, rows), residual):
                return True
        return False


def evaluate(
    structure: Structure,
    team: Team,
    f: Formula,
    mode: str = "lax",
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> bool:
    """Does the team satisfy the formula in the structure?"""
    check_mode(mode)
    if contains_sugar(f):
        raise LogicError("slashed and branching quantifiers must be rewritten first")
    missing = [v for v in free_vars(f) if v not in team.scope]
    if missing:
        raise ScopeError(f"free variable {missing[0]!r} is not in the team scope {team.scope}")
    check_vocabulary(structure, f)
    return _Evaluator(structure, mode, budget).eval(team, f)


def sentence_sat(
    structure: Structure,
    sentence: Formula,
    mode: str = "lax",
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> bool:
    """Satisfaction of a sentence: evaluation on the single-empty-assignment team."""
    if free_vars(sentence):
        raise LogicError(
            f"not a sentence: free variables {', '.join(free_vars(sentence))}"
        )
    return evaluate(structure, Team.initial(), sentence, mode=mode, budget=budget)


@dataclass(frozen=True)
class ValidityResult:
    """Outcome of a bounded validity check."""

    max_size: int
    mode: str
    countermodel: Structure | None

    @property
    def valid_up_to_bound(self) -> bool:
        return self.countermodel is None


def _relation_signature(f: Formula) -> dict[str, int]:
    sig: dict[str, int] = {}

    def walk(node: Formula):
        if isinstance(node, Rel):
            arity = len(node.args)
            if sig.setdefault(node.name, arity) != arity:
                raise LogicError(f"relation {node.name!r} used with two arities")
        elif isinstance(node, Eq):
            pass
        elif isinstance(node, Not):
            walk(node.atom)
        elif isinstance(node, (And, Or)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (Exists, Forall, SlashedExists)):
            walk(node.body)
        elif isinstance(node, Henkin):
            walk(node.matrix)

    walk(f)
    return sig


def _uses_constants(f: Formula) -> bool:
    def walk(node: Formula) -> bool:
        if isinstance(node, Eq):
            return isinstance(node.left, Const) or isinstance(node.right, Const)
        if isinstance(node, Rel):
            return any(isinstance(a, Const) for a in node.args)
        if isinstance(node, Not):
            return walk(node.atom)
        if isinstance(node, (And, Or)):
            return walk(node.left) or walk(node.right)
        if isinstance(node, (Exists, Forall, SlashedExists)):
            return walk(node.body)
        if isinstance(node, Henkin):
            return walk(node.matrix)
        return False

    return walk(f)


def _structures_of_size(size: int, signature: dict[str, int]):
    names = [str(i) for i in range(size)]
    if not signature:
        yield Structure(names)
        return
    rel_names = sorted(signature)
    cell_lists = [
        sorted(itertools.product(range(size), repeat=signature[n])) for n in rel_names
    ]
    subset_lists = []
    for cells in cell_lists:
        subsets = []
        for k in range(len(cells) + 1):
            subsets.extend(itertools.combinations(cells, k))
        subset_lists.append(subsets)
    for combo in itertools.product(*subset_lists):
        relations = {
            name: (signature[name], table) for name, table in zip(rel_names, combo)
        }
        yield Structure(names, relations)


def validity_search(
    sentence: Formula,
    max_size: int,
    mode: str = "lax",
    max_structures: int = 2**20,
    budget: int = DEFAULT_SEARCH_BUDGET,
    jobs: int = 1,
) -> ValidityResult:
    """Check a sentence on every structure with domain size up to the bound.

    The vocabulary may contain equality and relation symbols; pure-equality
    sentences need one structure per size.  Returns the first countermodel
    in enumeration order, or a bound certificate.
    """
    check_mode(mode)
    if free_vars(sentence):
        raise LogicError("validity search expects a sentence")
    if _uses_constants(sentence):
        raise LogicError("validity search supports equality-and-relation vocabularies only")
    signature = _relation_signature(sentence)

    total = 0
    for size in range(1, max_size + 1):
        count = 1
        for arity in signature.values():
            count *= 2 ** (size**arity)
        total += count
    if total > max_structures:
        raise SearchSpaceError(
            f"validity search over {total} structures exceeds the cap of {max_structures}"
        )

    for size in range(1, max_size + 1):
        if jobs > 1:
            from concurrent.futures import ThreadPoolExecutor

            structures = list(_structures_of_size(size, signature))
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(
                    pool.map(lambda s: sentence_sat(s, sentence, mode, budget), structures)
                )
            for structure, ok in zip(structures, outcomes):
                if not ok:
                    return ValidityResult(max_size, mode, structure)
        else:
            for structure in _structures_of_size(size, signature):
                if not sentence_sat(structure, sentence, mode, budget):
                    return ValidityResult(max_size, mode, structure)
    return ValidityResult(max_size, mode, None)
