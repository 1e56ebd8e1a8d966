"""Term engine: recursion unfolding, numerals, registry scoping."""

import pytest

from haem.terms import (
    App,
    DuplicateSymbol,
    FunctionRegistry,
    IllScopedBody,
    REC_CALL,
    REC_VAR,
    Succ,
    UnknownSymbol,
    Var,
    ZERO,
    normalize_term,
    numeral,
    numeral_value,
    param,
    standard_registry,
    subst_in_term,
    term_to_text,
    term_vars,
)

REG = standard_registry()


def rewrite_once_outermost(t, reg):
    """Fire the leftmost-outermost redex, if any.  Independent of the
    innermost strategy used by normalize_term; used for the confluence
    spot check."""
    if isinstance(t, App):
        fdef = reg.get(t.fn)
        main, rest = t.args[0], t.args[1:]
        env = {f"${i + 1}": a for i, a in enumerate(rest)}
        if isinstance(main, ZERO.__class__):
            return subst_in_term(fdef.base, env), True
        if isinstance(main, Succ):
            env[REC_VAR.name] = main.arg
            env[REC_CALL.name] = App(t.fn, (main.arg,) + rest)
            return subst_in_term(fdef.step, env), True
        new_args = []
        fired = False
        for a in t.args:
            if fired:
                new_args.append(a)
            else:
                a2, fired = rewrite_once_outermost(a, reg)
                new_args.append(a2)
        return App(t.fn, tuple(new_args)), fired
    if isinstance(t, Succ):
        a2, fired = rewrite_once_outermost(t.arg, reg)
        return Succ(a2), fired
    return t, False


def normalize_outermost(t, reg, limit=100000):
    for _ in range(limit):
        t, fired = rewrite_once_outermost(t, reg)
        if not fired:
            return t
    raise AssertionError("outermost rewriting did not settle")


def test_numeral_roundtrip():
    assert numeral_value(ZERO) == 0
    assert numeral_value(numeral(2)) == 2
    assert numeral(2) == Succ(Succ(ZERO))
    assert numeral_value(Var("x")) is None
    assert numeral_value(Succ(Var("x"))) is None


def test_already_normal_numeral():
    assert normalize_term(Succ(Succ(ZERO)), REG) == numeral(2)


def test_add_unfolds_by_hand():
    # add(1,1): S(add(0,1)) then S(1) = 2, checked against the two equations.
    assert normalize_term(App("add", (numeral(1), numeral(1))), REG) == numeral(2)
    # add(2,3): S(add(1,3)) -> S(S(add(0,3))) -> S(S(3)) = 5.
    assert normalize_term(App("add", (numeral(2), numeral(3))), REG) == numeral(5)
    assert normalize_term(App("add", (numeral(0), numeral(3))), REG) == numeral(3)


def test_pred_single_step():
    assert normalize_term(App("pred", (numeral(1),)), REG) == ZERO
    assert normalize_term(App("pred", (numeral(0),)), REG) == ZERO
    assert normalize_term(App("pred", (numeral(4),)), REG) == numeral(3)


def test_open_term_blocks_at_variable():
    t = App("add", (Var("x"), ZERO))
    assert normalize_term(t, REG) == t
    # The argument positions still normalize.
    t2 = App("add", (Var("x"), App("add", (numeral(1), numeral(1)))))
    assert normalize_term(t2, REG) == App("add", (Var("x"), numeral(2)))


def test_mul_sub_eq_values():
    assert normalize_term(App("mul", (numeral(2), numeral(3))), REG) == numeral(6)
    assert normalize_term(App("mul", (numeral(0), numeral(7))), REG) == ZERO
    assert normalize_term(App("sub", (numeral(3), numeral(1))), REG) == numeral(2)
    assert normalize_term(App("sub", (numeral(1), numeral(3))), REG) == ZERO
    assert normalize_term(App("sub", (numeral(5), numeral(5))), REG) == ZERO
    assert normalize_term(App("eq", (numeral(2), numeral(2))), REG) == ZERO
    assert normalize_term(App("eq", (numeral(2), numeral(3))), REG) == numeral(1)
    assert normalize_term(App("eq", (numeral(4), numeral(1))), REG) == numeral(3)


def test_add_matches_machine_addition_up_to_20():
    for m in range(21):
        for n in range(21):
            got = numeral_value(normalize_term(App("add", (numeral(m), numeral(n))), REG))
            assert got == m + n, (m, n, got)


def test_normalize_idempotent():
    corpus = [
        App("add", (numeral(2), numeral(2))),
        App("mul", (numeral(3), numeral(2))),
        App("sub", (Var("x"), numeral(1))),
        App("add", (Var("x"), App("pred", (numeral(3),)))),
        Succ(App("eq", (numeral(1), numeral(1)))),
    ]
    for t in corpus:
        once = normalize_term(t, REG)
        assert normalize_term(once, REG) == once


def test_confluence_spot_check_two_strategies_agree():
    corpus = [
        App("add", (numeral(2), numeral(3))),
        App("mul", (numeral(2), numeral(2))),
        App("sub", (numeral(4), numeral(2))),
        App("eq", (numeral(3), numeral(3))),
        App("add", (App("mul", (numeral(2), numeral(2))), App("pred", (numeral(1),)))),
        App("pred", (App("sub", (numeral(2), numeral(5))),)),
    ]
    for t in corpus:
        assert normalize_term(t, REG) == normalize_outermost(t, REG)


def test_register_duplicate_rejected():
    with pytest.raises(DuplicateSymbol):
        REG.register("add", 2, param(1), Succ(REC_CALL))


def test_register_checks_scope():
    reg = FunctionRegistry.empty()
    with pytest.raises(IllScopedBody):
        reg.register("f", 2, Var("y"), ZERO)  # y is not a placeholder
    with pytest.raises(IllScopedBody):
        reg.register("f", 1, param(1), ZERO)  # no parameters at arity 1
    with pytest.raises(IllScopedBody):
        reg.register("f", 2, App("g", (param(1),)), ZERO)  # g unregistered
    with pytest.raises(IllScopedBody):
        reg.register("f", 2, ZERO, REC_CALL).register("h", 2, App("f", (param(1),)), ZERO)


def test_base_body_cannot_use_recursion_placeholders():
    reg = FunctionRegistry.empty()
    with pytest.raises(IllScopedBody):
        reg.register("f", 2, REC_CALL, ZERO)


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        normalize_term(App("nosuch", (ZERO,)), REG)


def test_registry_is_functional():
    reg = FunctionRegistry.empty()
    reg2 = reg.register("f", 1, ZERO, REC_VAR)
    assert "f" in reg2
    assert "f" not in reg


def test_term_vars_and_text():
    t = App("add", (Var("x"), Succ(Var("y"))))
    assert term_vars(t) == {"x", "y"}
    assert term_to_text(t) == "(add x (succ y))"
    assert term_to_text(numeral(3)) == "3"
    assert term_to_text(Succ(Var("x"))) == "(succ x)"
