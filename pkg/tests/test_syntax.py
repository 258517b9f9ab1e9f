"""Parser, printer, free variables, and the quantifier rewrites."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teamlogic.errors import LogicError, ParseError, ScopeError
from teamlogic.syntax import (
    And,
    Const,
    DepAtom,
    DepStatement,
    Eq,
    Exists,
    Forall,
    Henkin,
    IndAtom,
    IndStatement,
    Not,
    Or,
    Rel,
    SlashedExists,
    Var,
    contains_sugar,
    desugar_henkin,
    desugar_slash,
    format_atom_statement,
    format_formula,
    free_vars,
    parse_atom_statement,
    parse_atoms_text,
    parse_formula,
    same_atom,
)


class TestParser:
    def test_quantified_sentence(self):
        f = parse_formula("forall x. forall y. exists z. (ind(z ;; x) and z = y)")
        assert f == Forall(
            "x",
            Forall(
                "y",
                Exists(
                    "z",
                    And(IndAtom(("z",), (), ("x",)), Eq(Var("z"), Var("y"))),
                ),
            ),
        )

    def test_dep_atom(self):
        assert parse_formula("dep(x y ; z)") == DepAtom(("x", "y"), ("z",))

    def test_slashed_exists(self):
        f = parse_formula("exists z/{x}. z = x")
        assert f == SlashedExists("z", ("x",), Eq(Var("z"), Var("x")))

    def test_branch(self):
        f = parse_formula("branch {forall x exists y ; forall u exists v}. R(x, y, u, v)")
        assert isinstance(f, Henkin)
        assert f.rows == (("x", "y"), ("u", "v"))

    def test_precedence(self):
        f = parse_formula("x = x and y = y or z = z")
        assert isinstance(f, Or) and isinstance(f.left, And)

    def test_quantifier_extends_to_end(self):
        f = parse_formula("forall x. x = x and x = x")
        assert isinstance(f, Forall) and isinstance(f.body, And)

    def test_constant_term(self):
        f = parse_formula("x = C")
        assert f == Eq(Var("x"), Const("C"))

    def test_relation_atom(self):
        assert parse_formula("R(x, C)") == Rel("R", (Var("x"), Const("C")))

    def test_empty_tuples(self):
        assert parse_formula("dep( ; x)") == DepAtom((), ("x",))
        assert parse_formula("ind(u ; ; v)") == IndAtom(("u",), (), ("v",))

    def test_negation_of_atom(self):
        assert parse_formula("not x = y") == Not(Eq(Var("x"), Var("y")))
        assert parse_formula("not dep(x ; y)") == Not(DepAtom(("x",), ("y",)))

    def test_negation_of_non_atom_rejected(self):
        with pytest.raises(ParseError) as err:
            parse_formula("not (x = y and y = z)")
        assert "atomic" in str(err.value)

    def test_slash_on_forall_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("forall x/{y}. x = x")

    def test_error_positions(self):
        with pytest.raises(ParseError) as err:
            parse_formula("forall x x = x")
        assert err.value.line == 1
        assert err.value.column is not None

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_formula("x = y )")

    def test_not_constructor_guard(self):
        with pytest.raises(LogicError):
            Not(And(Eq(Var("x"), Var("x")), Eq(Var("y"), Var("y"))))


class TestAtomStatements:
    def test_parse(self):
        assert parse_atom_statement("dep(x y ; z)") == DepStatement(("x", "y"), ("z",))
        assert parse_atom_statement("ind(u ; ; v)") == IndStatement(("u",), (), ("v",))

    def test_reject_fo_atom(self):
        with pytest.raises(ParseError):
            parse_atom_statement("x = y")

    def test_atoms_file(self):
        text = "# premises\ndep(x ; y)\n\nind(a ; b ; c)\n"
        atoms = parse_atoms_text(text)
        assert atoms == (
            DepStatement(("x",), ("y",)),
            IndStatement(("a",), ("b",), ("c",)),
        )

    def test_set_view_equality(self):
        a = parse_atom_statement("dep(x y y ; z)")
        b = parse_atom_statement("dep(y x ; z)")
        assert a != b and same_atom(a, b)

    def test_format_matches_file_style(self):
        assert format_atom_statement(DepStatement(("x", "y"), ("z",))) == "dep(x y ; z)"
        assert format_atom_statement(IndStatement(("u",), (), ("v",))) == "ind(u ; ; v)"


class TestFreeVars:
    def test_dep_atom(self):
        assert free_vars(DepAtom(("x",), ("y",))) == ("x", "y")

    def test_quantifier_binds(self):
        f = Forall("x", IndAtom(("z",), (), ("x",)))
        assert free_vars(f) == ("z",)

    def test_branch_binds_all_rows(self):
        f = parse_formula("branch {forall x exists y ; forall u exists v}. R(x, y, u, v) and w = w")
        assert free_vars(f) == ("w",)

    def test_slashed_vars_count_as_occurrences(self):
        f = parse_formula("exists z/{x}. z = z")
        assert free_vars(f) == ("x",)


class TestDesugarSlash:
    def test_signaling_sentence(self):
        f = parse_formula("forall x. exists y. exists z/{x}. z = x")
        expected = parse_formula("forall x. exists y. exists z. (ind(x ; y ; z) and z = x)")
        assert desugar_slash(f) == expected

    def test_no_slashes_unchanged(self):
        f = parse_formula("forall x. exists y. dep(x ; y)")
        assert desugar_slash(f) is f or desugar_slash(f) == f

    def test_empty_dependency_tuple(self):
        f = parse_formula("forall x. exists z/{x}. z = z")
        expected = parse_formula("forall x. exists z. (ind(x ;; z) and z = z)")
        assert desugar_slash(f) == expected

    def test_idempotent(self):
        f = parse_formula("forall x. exists y. exists z/{x}. z = x")
        once = desugar_slash(f)
        assert desugar_slash(once) == once
        assert not contains_sugar(once)

    def test_unbound_slashed_var_rejected(self):
        with pytest.raises(ScopeError):
            desugar_slash(parse_formula("exists z/{x}. z = z"))

    def test_closed_sentences_stay_closed(self):
        f = parse_formula("forall x. exists y. exists z/{x}. z = x")
        assert free_vars(f) == ()
        assert free_vars(desugar_slash(f)) == ()


class TestDesugarHenkin:
    def test_closed_matrix(self):
        f = parse_formula("branch {forall x exists y ; forall u exists v}. R(x, y, u, v)")
        expected = parse_formula(
            "forall x. exists y. forall u. exists v. (ind(v ; u ; x) and R(x, y, u, v))"
        )
        assert desugar_henkin(f) == expected

    def test_extra_free_variable_joins_condition(self):
        f = parse_formula("branch {forall x exists y ; forall u exists v}. S(x, y, u, v, w)")
        g = desugar_henkin(f)
        inner = g.body.body.body.body  # forall/exists/forall/exists
        assert inner.left == IndAtom(("v",), ("u", "w"), ("x",))

    def test_duplicate_bound_variable_rejected(self):
        with pytest.raises(LogicError):
            desugar_henkin(Henkin((("x", "y"), ("x", "v")), Eq(Var("x"), Var("x"))))

    def test_more_than_two_rows_rejected(self):
        h = Henkin(
            (("a", "b"), ("c", "d"), ("e", "f")),
            Eq(Var("a"), Var("a")),
        )
        with pytest.raises(LogicError):
            desugar_henkin(h)

    def test_idempotent_on_rewritten(self):
        f = parse_formula("branch {forall x exists y ; forall u exists v}. v = u")
        once = desugar_henkin(f)
        assert desugar_henkin(once) == once


# ---------------------------------------------------------------------------
# Round-trip property: print then parse is the identity on ASTs.
# ---------------------------------------------------------------------------

_vars = st.sampled_from(["x", "y", "z", "u", "w"])
_var_tuples = st.lists(_vars, max_size=3).map(tuple)
_terms = st.one_of(_vars.map(Var), st.sampled_from(["C", "D"]).map(Const))


def _atoms():
    return st.one_of(
        st.builds(Eq, _terms, _terms),
        st.builds(Rel, st.sampled_from(["R", "S"]), st.lists(_terms, min_size=1, max_size=3).map(tuple)),
        st.builds(DepAtom, _var_tuples, _var_tuples),
        st.builds(IndAtom, _var_tuples, _var_tuples, _var_tuples),
    )


def _formulas():
    return st.recursive(
        st.one_of(_atoms(), _atoms().map(Not)),
        lambda inner: st.one_of(
            st.builds(And, inner, inner),
            st.builds(Or, inner, inner),
            st.builds(Exists, _vars, inner),
            st.builds(Forall, _vars, inner),
            st.builds(SlashedExists, _vars, _var_tuples, inner),
            st.builds(
                Henkin,
                st.just((("x", "y"), ("u", "v"))),
                inner,
            ),
        ),
        max_leaves=12,
    )


@settings(max_examples=300, deadline=None)
@given(_formulas())
def test_parse_after_print_is_identity(f):
    assert parse_formula(format_formula(f)) == f


@settings(max_examples=150, deadline=None)
@given(_formulas())
def test_print_after_parse_is_stable(f):
    text = format_formula(f)
    assert format_formula(parse_formula(text)) == text
