"""Formula syntax over arithmetic terms.

Two formulas count as equal when they agree up to renaming of bound
variables after the terms inside them have been rewritten to normal
form; alpha_eq compares structurally, formula_eq normalizes first.
Negation is sugar for implication into falsum, never a constructor of
its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union

from .terms import (
    FunctionRegistry,
    Term,
    Var,
    normalize_term,
    subst_in_term,
    term_to_text,
    term_vars,
)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Falsum, And, Or, Implies, Forall, Exists]

FALSUM = Falsum()


def equation(left: Term, right: Term) -> Atom:
    return Atom("=", (left, right))


def negation(a: Formula) -> Implies:
    return Implies(a, FALSUM)


def is_atomic(a: Formula) -> bool:
    return isinstance(a, (Atom, Falsum))


def free_vars(a: Formula) -> frozenset[str]:
    if isinstance(a, Atom):
        out: frozenset[str] = frozenset()
        for t in a.args:
            out |= term_vars(t)
        return out
    if isinstance(a, Falsum):
        return frozenset()
    if isinstance(a, (And, Or, Implies)):
        return free_vars(a.left) | free_vars(a.right)
    return free_vars(a.body) - {a.var}


def is_closed(a: Formula) -> bool:
    return not free_vars(a)


def normalize_formula(a: Formula, reg: FunctionRegistry) -> Formula:
    """Rewrite every term embedded in a to normal form."""
    if isinstance(a, Atom):
        return Atom(a.pred, tuple(normalize_term(t, reg) for t in a.args))
    if isinstance(a, Falsum):
        return a
    if isinstance(a, (And, Or, Implies)):
        return type(a)(normalize_formula(a.left, reg), normalize_formula(a.right, reg))
    return type(a)(a.var, normalize_formula(a.body, reg))


def formula_is_normal(a: Formula, reg: FunctionRegistry) -> bool:
    return normalize_formula(a, reg) == a


def prime_fresh(base: str, avoid: frozenset[str] | set[str]) -> str:
    """Deterministic renaming: keep priming until the name is unused."""
    name = base
    while name in avoid:
        name += "'"
    return name


def substitute_formula(a: Formula, x: str, t: Term, reg: FunctionRegistry) -> Formula:
    """Capture-avoiding substitution a[x := t]; embedded terms are
    re-normalized on the way out."""
    return normalize_formula(_subst(a, x, t), reg)


def _subst(a: Formula, x: str, t: Term) -> Formula:
    if isinstance(a, Atom):
        return Atom(a.pred, tuple(subst_in_term(s, {x: t}) for s in a.args))
    if isinstance(a, Falsum):
        return a
    if isinstance(a, (And, Or, Implies)):
        return type(a)(_subst(a.left, x, t), _subst(a.right, x, t))
    if a.var == x:
        return a
    if a.var in term_vars(t) and x in free_vars(a.body):
        fresh = prime_fresh(a.var, term_vars(t) | free_vars(a.body) | {x})
        body = _subst(a.body, a.var, Var(fresh))
        return type(a)(fresh, _subst(body, x, t))
    return type(a)(a.var, _subst(a.body, x, t))


def _term_eq(s: Term, t: Term, env: tuple[tuple[str, str], ...]) -> bool:
    from .terms import App, Succ, Zero

    if isinstance(s, Var):
        if not isinstance(t, Var):
            return False
        # The innermost binder pair wins; a variable bound on one side
        # only matches the variable its partner binder introduced.
        for a, b in reversed(env):
            if s.name == a or t.name == b:
                return s.name == a and t.name == b
        return s.name == t.name
    if type(s) is not type(t):
        return False
    if isinstance(s, Zero):
        return True
    if isinstance(s, Succ):
        return _term_eq(s.arg, t.arg, env)
    if isinstance(s, App):
        return (
            s.fn == t.fn
            and len(s.args) == len(t.args)
            and all(_term_eq(a, b, env) for a, b in zip(s.args, t.args))
        )
    return False


def alpha_eq(a: Formula, b: Formula, _env: tuple[tuple[str, str], ...] = ()) -> bool:
    """Structural equality up to renaming of bound variables."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Atom):
        return (
            a.pred == b.pred
            and len(a.args) == len(b.args)
            and all(_term_eq(s, t, _env) for s, t in zip(a.args, b.args))
        )
    if isinstance(a, Falsum):
        return True
    if isinstance(a, (And, Or, Implies)):
        return alpha_eq(a.left, b.left, _env) and alpha_eq(a.right, b.right, _env)
    return alpha_eq(a.body, b.body, _env + ((a.var, b.var),))


def formula_eq(a: Formula, b: Formula, reg: FunctionRegistry) -> bool:
    """Equality modulo bound renaming and term normal forms."""
    return alpha_eq(normalize_formula(a, reg), normalize_formula(b, reg))


class SimpleClass(Enum):
    CLOSED_ATOMIC = "closed-atomic"
    SIMPLY_EXISTENTIAL = "simply-existential"
    SIMPLY_UNIVERSAL = "simply-universal"
    NOT_SIMPLE = "not-simple"


def classify(a: Formula) -> SimpleClass:
    if is_atomic(a) and is_closed(a):
        return SimpleClass.CLOSED_ATOMIC
    if isinstance(a, Exists) and is_atomic(a.body):
        return SimpleClass.SIMPLY_EXISTENTIAL
    if isinstance(a, Forall) and is_atomic(a.body):
        return SimpleClass.SIMPLY_UNIVERSAL
    return SimpleClass.NOT_SIMPLE


def is_simple(a: Formula) -> bool:
    return classify(a) in (SimpleClass.CLOSED_ATOMIC, SimpleClass.SIMPLY_EXISTENTIAL)


def subformulas(a: Formula) -> Iterator[Formula]:
    """a and all its components, binders included without instantiation."""
    yield a
    if isinstance(a, (And, Or, Implies)):
        yield from subformulas(a.left)
        yield from subformulas(a.right)
    elif isinstance(a, (Forall, Exists)):
        yield from subformulas(a.body)


def is_subformula(a: Formula, b: Formula) -> bool:
    return any(alpha_eq(a, s) for s in subformulas(b))


def formula_to_text(a: Formula) -> str:
    if isinstance(a, Atom):
        inner = " ".join(term_to_text(t) for t in a.args)
        return f"({a.pred} {inner})" if a.args else f"({a.pred})"
    if isinstance(a, Falsum):
        return "false"
    if isinstance(a, Implies) and isinstance(a.right, Falsum):
        return f"(not {formula_to_text(a.left)})"
    if isinstance(a, And):
        return f"(and {formula_to_text(a.left)} {formula_to_text(a.right)})"
    if isinstance(a, Or):
        return f"(or {formula_to_text(a.left)} {formula_to_text(a.right)})"
    if isinstance(a, Implies):
        return f"(imp {formula_to_text(a.left)} {formula_to_text(a.right)})"
    if isinstance(a, Forall):
        return f"(forall {a.var} {formula_to_text(a.body)})"
    return f"(exists {a.var} {formula_to_text(a.body)})"
