"""Formula core: substitution, free variables, equality, classification."""

from haem.formulas import (
    And,
    Atom,
    Exists,
    FALSUM,
    Forall,
    Implies,
    Or,
    SimpleClass,
    alpha_eq,
    classify,
    equation,
    formula_eq,
    formula_to_text,
    free_vars,
    is_simple,
    is_subformula,
    negation,
    normalize_formula,
    substitute_formula,
)
from haem.terms import App, Succ, Var, ZERO, numeral, standard_registry

REG = standard_registry()

x, y, z = Var("x"), Var("y"), Var("z")


def test_substitute_plain():
    a = equation(x, ZERO)
    assert substitute_formula(a, "x", numeral(1), REG) == equation(numeral(1), ZERO)


def test_substitute_capture_forced():
    # (exists y. x = y)[x := y] must rename the binder.
    a = Exists("y", equation(x, y))
    got = substitute_formula(a, "x", y, REG)
    assert isinstance(got, Exists)
    assert got.var == "y'"
    assert got.body == equation(y, Var("y'"))
    # and the result is alpha-equal to exists w. y = w
    assert alpha_eq(got, Exists("w", equation(y, Var("w"))))


def test_substitute_bound_variable_untouched():
    a = Forall("x", equation(x, x))
    assert substitute_formula(a, "x", ZERO, REG) == a


def test_substitution_of_variable_by_itself():
    a = Forall("y", Implies(equation(x, y), equation(x, ZERO)))
    assert alpha_eq(substitute_formula(a, "x", x, REG), a)


def test_free_vars():
    assert free_vars(equation(x, ZERO)) == {"x"}
    assert free_vars(Exists("x", equation(x, ZERO))) == set()
    assert free_vars(Forall("x", equation(x, y))) == {"y"}
    assert free_vars(negation(equation(x, y))) == {"x", "y"}


def test_free_vars_of_substitution_bounded():
    cases = [
        (Exists("y", equation(x, y)), "x", App("add", (Var("u"), numeral(1)))),
        (And(equation(x, ZERO), Forall("x", equation(x, x))), "x", Var("v")),
        (equation(y, y), "x", Var("w")),
    ]
    from haem.terms import term_vars

    for a, v, t in cases:
        got = free_vars(substitute_formula(a, v, t, REG))
        assert got <= (free_vars(a) - {v}) | term_vars(t)


def test_equality_modulo_term_normalization():
    a = equation(App("add", (numeral(1), numeral(1))), numeral(2))
    b = equation(numeral(2), numeral(2))
    assert a != b
    assert formula_eq(a, b, REG)
    assert normalize_formula(a, REG) == b


def test_alpha_equality():
    assert alpha_eq(Exists("x", equation(x, ZERO)), Exists("y", equation(y, ZERO)))
    assert not alpha_eq(Exists("x", equation(x, ZERO)), Exists("y", equation(ZERO, y)))
    # Bound/free mix-ups are rejected.
    assert not alpha_eq(Forall("x", equation(x, y)), Forall("y", equation(y, y)))
    assert not alpha_eq(Forall("y", equation(y, y)), Forall("x", equation(x, y)))


def test_classify():
    assert classify(Exists("x", equation(x, ZERO))) == SimpleClass.SIMPLY_EXISTENTIAL
    assert classify(equation(ZERO, ZERO)) == SimpleClass.CLOSED_ATOMIC
    disj = Or(Forall("x", equation(x, ZERO)), Exists("x", negation(equation(x, ZERO))))
    assert classify(disj) == SimpleClass.NOT_SIMPLE
    assert classify(Forall("x", equation(x, ZERO))) == SimpleClass.SIMPLY_UNIVERSAL
    assert classify(FALSUM) == SimpleClass.CLOSED_ATOMIC
    assert classify(equation(x, ZERO)) == SimpleClass.NOT_SIMPLE
    # Quantifier over a non-atomic body is not simple.
    assert classify(Exists("x", And(equation(x, ZERO), equation(x, ZERO)))) == SimpleClass.NOT_SIMPLE
    assert is_simple(Exists("x", equation(x, ZERO)))
    assert is_simple(equation(numeral(2), numeral(2)))
    assert not is_simple(Forall("x", equation(x, ZERO)))


def test_subformulas():
    a = Implies(equation(x, ZERO), Exists("y", equation(y, ZERO)))
    assert is_subformula(equation(x, ZERO), a)
    assert is_subformula(Exists("w", equation(Var("w"), ZERO)), a)
    assert not is_subformula(equation(ZERO, ZERO), a)


def test_negation_is_sugar():
    n = negation(equation(ZERO, ZERO))
    assert isinstance(n, Implies)
    assert n.right == FALSUM
    assert formula_to_text(n) == "(not (= 0 0))"


def test_formula_text():
    a = And(equation(App("add", (x, numeral(1))), numeral(2)), FALSUM)
    assert formula_to_text(a) == "(and (= (add x 1) 2) false)"
    assert formula_to_text(Forall("x", Exists("y", equation(x, y)))) == "(forall x (exists y (= x y)))"
    assert formula_to_text(equation(Succ(x), ZERO)) == "(= (succ x) 0)"
