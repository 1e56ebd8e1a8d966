"""Decision procedure for closed atomic formulas and the atomic rule set.

Equality atoms are decided by rewriting both sides to numerals; declared
predicates through their characteristic function (an atom holds when the
characteristic term rewrites to zero); falsum is always false.  The rule
set is the smallest one containing the equality axioms, compatibility
with function symbols, ex falso quodlibet restricted to atomic
conclusions, the zero/successor rules, and the two one-step axioms for
decided atoms.  Atomic rules never discharge assumptions and never bind
term variables, forced here by the tags carrying neither labels nor
eigenvariables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .formulas import (
    Atom,
    Falsum,
    Formula,
    alpha_eq,
    equation,
    is_atomic,
    is_closed,
    negation,
    normalize_formula,
)
from .terms import App, FunctionRegistry, Succ, Zero, normalize_term, numeral_value


class OracleError(Exception):
    pass


class NotClosedAtomic(OracleError):
    pass


class AtomFalse(OracleError):
    pass


class AtomTrue(OracleError):
    pass


class UndecidablePredicate(OracleError):
    pass


@dataclass(frozen=True)
class EqRefl:
    pass


@dataclass(frozen=True)
class EqSym:
    pass


@dataclass(frozen=True)
class EqTrans:
    pass


@dataclass(frozen=True)
class EqCompat:
    fn: str


@dataclass(frozen=True)
class EfqAtomic:
    pass


@dataclass(frozen=True)
class SuccNotZero:
    pass


@dataclass(frozen=True)
class SuccInjective:
    pass


@dataclass(frozen=True)
class AtomIntro:
    atom: Formula


@dataclass(frozen=True)
class AtomElim:
    atom: Formula


AtomicRule = Union[
    EqRefl, EqSym, EqTrans, EqCompat, EfqAtomic, SuccNotZero, SuccInjective, AtomIntro, AtomElim
]


def decide(a: Formula, reg: FunctionRegistry) -> bool:
    """Truth value of a closed atomic formula."""
    if not is_atomic(a) or not is_closed(a):
        raise NotClosedAtomic(f"not a closed atomic formula: {a}")
    if isinstance(a, Falsum):
        return False
    assert isinstance(a, Atom)
    if a.pred == "=":
        lhs = numeral_value(normalize_term(a.args[0], reg))
        rhs = numeral_value(normalize_term(a.args[1], reg))
        if lhs is None or rhs is None:
            raise NotClosedAtomic(f"equality does not evaluate to numerals: {a}")
        return lhs == rhs
    pdef = reg.predicates.get(a.pred)
    if pdef is None:
        raise UndecidablePredicate(f"predicate '{a.pred}' has no characteristic function")
    value = numeral_value(normalize_term(App(pdef.char_fn, a.args), reg))
    if value is None:
        raise NotClosedAtomic(f"characteristic term does not evaluate: {a}")
    return value == 0


def atom_intro(a: Formula, reg: FunctionRegistry):
    """One-node derivation of a true closed atom."""
    from .derivations import Atomic, Derivation

    a = normalize_formula(a, reg)
    if not decide(a, reg):
        raise AtomFalse(f"cannot introduce a false atom: {a}")
    return Derivation(a, Atomic(AtomIntro(a)), ())


def refute(a: Formula, label: str, reg: FunctionRegistry):
    """Closed three-rule derivation of (not a) for a false closed atom:
    assume a, collapse it to falsum, then discharge."""
    from .derivations import Assumption, Atomic, Derivation, ImpI

    a = normalize_formula(a, reg)
    if decide(a, reg):
        raise AtomTrue(f"cannot refute a true atom: {a}")
    from .formulas import FALSUM

    hyp = Derivation(a, Assumption(label), ())
    bottom = Derivation(FALSUM, Atomic(AtomElim(a)), (hyp,))
    return Derivation(negation(a), ImpI(label, a), (bottom,))


def check_atomic_instance(
    rule: AtomicRule,
    premisses: Sequence[Formula],
    conclusion: Formula,
    reg: FunctionRegistry,
) -> bool:
    """Does (premisses / conclusion) instantiate the rule schema?

    Formulas are compared after term normalization, so e.g. a symmetry
    instance may be written over unevaluated arithmetic.
    """
    ps = [normalize_formula(p, reg) for p in premisses]
    c = normalize_formula(conclusion, reg)
    if any(not is_atomic(p) for p in ps) or not is_atomic(c):
        return False

    def eq_parts(f: Formula):
        if isinstance(f, Atom) and f.pred == "=" and len(f.args) == 2:
            return f.args
        return None

    if isinstance(rule, EqRefl):
        parts = eq_parts(c)
        return not ps and parts is not None and parts[0] == parts[1]
    if isinstance(rule, EqSym):
        if len(ps) != 1:
            return False
        p, cc = eq_parts(ps[0]), eq_parts(c)
        return p is not None and cc is not None and (p[1], p[0]) == cc
    if isinstance(rule, EqTrans):
        if len(ps) != 2:
            return False
        p1, p2, cc = eq_parts(ps[0]), eq_parts(ps[1]), eq_parts(c)
        if p1 is None or p2 is None or cc is None:
            return False
        return p1[1] == p2[0] and cc == (p1[0], p2[1])
    if isinstance(rule, EqCompat):
        if rule.fn == "succ":
            arity = 1
            build = lambda args: Succ(args[0])
        else:
            if rule.fn not in reg:
                return False
            arity = reg.arity(rule.fn)
            build = lambda args: App(rule.fn, tuple(args))
        if len(ps) != arity:
            return False
        parts = [eq_parts(p) for p in ps]
        if any(p is None for p in parts):
            return False
        expected = normalize_formula(
            equation(build([p[0] for p in parts]), build([p[1] for p in parts])), reg
        )
        return expected == c
    if isinstance(rule, EfqAtomic):
        return len(ps) == 1 and isinstance(ps[0], Falsum)
    if isinstance(rule, SuccNotZero):
        if len(ps) != 1 or not isinstance(c, Falsum):
            return False
        p = eq_parts(ps[0])
        return p is not None and isinstance(p[0], Succ) and isinstance(p[1], Zero)
    if isinstance(rule, SuccInjective):
        if len(ps) != 1:
            return False
        p, cc = eq_parts(ps[0]), eq_parts(c)
        if p is None or cc is None:
            return False
        return (
            isinstance(p[0], Succ)
            and isinstance(p[1], Succ)
            and cc == (p[0].arg, p[1].arg)
        )
    if isinstance(rule, AtomIntro):
        atom = normalize_formula(rule.atom, reg)
        try:
            return not ps and alpha_eq(c, atom) and decide(atom, reg)
        except OracleError:
            return False
    if isinstance(rule, AtomElim):
        atom = normalize_formula(rule.atom, reg)
        try:
            return (
                len(ps) == 1
                and alpha_eq(ps[0], atom)
                and isinstance(c, Falsum)
                and not decide(atom, reg)
            )
        except OracleError:
            return False
    return False
