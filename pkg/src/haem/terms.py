"""Arithmetic terms, primitive-recursive function definitions, and rewriting.

Terms are built from variables, zero, successor, and applications of
registered function symbols.  Every registered symbol carries the two
defining equations of the primitive recursion scheme (recursion on the
first argument); rewriting unfolds those equations innermost-first, so
every closed term reduces to a numeral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union


class TermError(Exception):
    """Base class for term-level failures."""


class DuplicateSymbol(TermError):
    pass


class IllScopedBody(TermError):
    pass


class UnknownSymbol(TermError):
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    arg: "Term"


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Term", ...]


Term = Union[Var, Zero, Succ, App]

ZERO = Zero()

# Placeholders used inside defining equations.  "$" is not a legal
# identifier character in the surface syntax, so these can never collide
# with user-written variables.
REC_VAR = Var("$rv")
REC_CALL = Var("$rec")


def param(i: int) -> Var:
    """Placeholder for the i-th (1-based) non-recursive parameter."""
    return Var(f"${i}")


def numeral(n: int) -> Term:
    """The term representing the natural number n, i.e. n applications of Succ to Zero."""
    if n < 0:
        raise ValueError("numerals are non-negative")
    t: Term = ZERO
    for _ in range(n):
        t = Succ(t)
    return t


def numeral_value(t: Term) -> Optional[int]:
    """Return n when t is literally the numeral for n, otherwise None."""
    n = 0
    while isinstance(t, Succ):
        n += 1
        t = t.arg
    return n if isinstance(t, Zero) else None


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Zero):
        return frozenset()
    if isinstance(t, Succ):
        return term_vars(t.arg)
    out: frozenset[str] = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


def subst_in_term(t: Term, env: Mapping[str, Term]) -> Term:
    """Simultaneous substitution of variables by terms."""
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, Zero):
        return t
    if isinstance(t, Succ):
        return Succ(subst_in_term(t.arg, env))
    return App(t.fn, tuple(subst_in_term(a, env) for a in t.args))


def term_to_text(t: Term) -> str:
    n = numeral_value(t)
    if n is not None:
        return str(n)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Succ):
        return f"(succ {term_to_text(t.arg)})"
    if isinstance(t, Zero):
        return "0"
    inner = " ".join(term_to_text(a) for a in t.args)
    return f"({t.fn} {inner})" if t.args else f"({t.fn})"


@dataclass(frozen=True)
class FunctionDef:
    """One registered symbol: f(0, ps) = base, f(succ rv, ps) = step.

    The base body may mention the parameter placeholders $1..$(arity-1);
    the step body may additionally mention $rv (the decremented main
    argument) and $rec (the recursive call at $rv).
    """

    name: str
    arity: int
    base: Term
    step: Term


@dataclass(frozen=True)
class PredicateDef:
    """A declared predicate, decided through its characteristic function.

    An atom p(ts) is decided true when char_fn(ts) rewrites to 0.  The
    built-in equality predicate needs no entry here.
    """

    name: str
    arity: int
    char_fn: str


@dataclass(frozen=True)
class FunctionRegistry:
    """Immutable table of function definitions plus declared predicates."""

    functions: Mapping[str, FunctionDef] = field(default_factory=dict)
    predicates: Mapping[str, PredicateDef] = field(default_factory=dict)

    @staticmethod
    def empty() -> "FunctionRegistry":
        return FunctionRegistry({}, {})

    def __contains__(self, name: str) -> bool:
        return name in self.functions

    def get(self, name: str) -> FunctionDef:
        try:
            return self.functions[name]
        except KeyError:
            raise UnknownSymbol(f"unknown function symbol '{name}'") from None

    def arity(self, name: str) -> int:
        return self.get(name).arity

    def register(self, name: str, arity: int, base: Term, step: Term) -> "FunctionRegistry":
        """Return a new registry extended with f = (base, step).

        Raises DuplicateSymbol when the name is taken and IllScopedBody
        when a body mentions an unknown symbol or an out-of-range
        placeholder.
        """
        if name in self.functions:
            raise DuplicateSymbol(f"function symbol '{name}' already registered")
        if arity < 1:
            raise IllScopedBody(f"'{name}': the recursion scheme needs at least one argument")
        params = {f"${i}" for i in range(1, arity)}
        self._check_body(name, base, params)
        self._check_body(name, step, params | {REC_VAR.name, REC_CALL.name})
        fns = dict(self.functions)
        fns[name] = FunctionDef(name, arity, base, step)
        return FunctionRegistry(fns, self.predicates)

    def register_predicate(self, name: str, arity: int, char_fn: str) -> "FunctionRegistry":
        if name in self.predicates or name == "=":
            raise DuplicateSymbol(f"predicate '{name}' already declared")
        cd = self.get(char_fn)
        if cd.arity != arity:
            raise IllScopedBody(
                f"predicate '{name}': characteristic function '{char_fn}' has arity {cd.arity}, not {arity}"
            )
        preds = dict(self.predicates)
        preds[name] = PredicateDef(name, arity, char_fn)
        return FunctionRegistry(self.functions, preds)

    def _check_body(self, name: str, body: Term, allowed: set[str]) -> None:
        for v in term_vars(body):
            if v not in allowed:
                raise IllScopedBody(f"'{name}': body mentions '{v}' which is not in scope")
        for fn, nargs in _apps_in(body):
            if fn not in self.functions:
                raise IllScopedBody(f"'{name}': body references unregistered symbol '{fn}'")
            if self.functions[fn].arity != nargs:
                raise IllScopedBody(
                    f"'{name}': '{fn}' applied to {nargs} arguments, arity is {self.functions[fn].arity}"
                )


def _apps_in(t: Term) -> Iterator[tuple[str, int]]:
    if isinstance(t, Succ):
        yield from _apps_in(t.arg)
    elif isinstance(t, App):
        yield (t.fn, len(t.args))
        for a in t.args:
            yield from _apps_in(a)


def normalize_term(t: Term, reg: FunctionRegistry) -> Term:
    """Rewrite t to its unique normal form, arguments first.

    Closed terms come back as numerals; open terms stop where the main
    argument of an application is a variable.
    """
    if isinstance(t, (Var, Zero)):
        return t
    if isinstance(t, Succ):
        return Succ(normalize_term(t.arg, reg))
    fdef = reg.get(t.fn)
    if len(t.args) != fdef.arity:
        raise TermError(f"'{t.fn}' applied to {len(t.args)} arguments, arity is {fdef.arity}")
    args = tuple(normalize_term(a, reg) for a in t.args)
    main, rest = args[0], args[1:]
    env = {f"${i + 1}": a for i, a in enumerate(rest)}
    if isinstance(main, Zero):
        return normalize_term(subst_in_term(fdef.base, env), reg)
    if isinstance(main, Succ):
        env[REC_VAR.name] = main.arg
        env[REC_CALL.name] = App(t.fn, (main.arg,) + rest)
        return normalize_term(subst_in_term(fdef.step, env), reg)
    return App(t.fn, args)


def standard_registry() -> FunctionRegistry:
    """The arithmetic preregistered for the shipped corpus.

    add, mul, pred, sub (truncated), eq (characteristic: 0 iff equal) and
    the helper rsub with swapped arguments, through which sub and eq are
    defined by composition inside their step bodies.
    """
    reg = FunctionRegistry.empty()
    reg = reg.register("add", 2, param(1), Succ(REC_CALL))
    reg = reg.register("mul", 2, ZERO, App("add", (param(1), REC_CALL)))
    reg = reg.register("pred", 1, ZERO, REC_VAR)
    # rsub(n, m) = m - n truncated; recursion runs on the amount subtracted.
    reg = reg.register("rsub", 2, param(1), App("pred", (REC_CALL,)))
    # sub(m, n) = m - n truncated: the step ignores the recursive call and
    # delegates to rsub at the incremented argument.
    reg = reg.register("sub", 2, ZERO, App("rsub", (param(1), Succ(REC_VAR))))
    # eq(m, n) = sub(m,n) + sub(n,m): zero exactly when m = n.
    reg = reg.register(
        "eq",
        2,
        param(1),
        App(
            "add",
            (
                App("sub", (Succ(REC_VAR), param(1))),
                App("sub", (param(1), Succ(REC_VAR))),
            ),
        ),
    )
    return reg
