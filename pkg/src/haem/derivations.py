"""Derivation trees and the trusted checking/substitution kernel.

A derivation node carries its concluded formula, a rule tag, and the
subderivations of its premisses, major premiss first.  Discharge labels
identify assumption classes; individual occurrences are identified by
their address (the child-index path from the root).  Four tags bind a
term variable over one of their premiss derivations: forall-intro over
its only premiss, exists-elim, induction and the excluded-middle rule
over their rightmost premiss.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

from . import oracle
from .formulas import (
    And,
    Atom,
    Exists,
    Falsum,
    Forall,
    Formula,
    Implies,
    Or,
    alpha_eq,
    formula_eq,
    formula_to_text,
    free_vars,
    is_atomic,
    negation,
    normalize_formula,
    prime_fresh,
    substitute_formula,
)
from .terms import (
    FunctionRegistry,
    Succ,
    Term,
    Var,
    ZERO,
    numeral,
    subst_in_term,
    term_to_text,
    term_vars,
)


class KernelError(Exception):
    pass


class ConclusionMismatch(KernelError):
    pass


@dataclass(frozen=True)
class Assumption:
    label: str


@dataclass(frozen=True)
class Atomic:
    rule: oracle.AtomicRule


@dataclass(frozen=True)
class AndI:
    pass


@dataclass(frozen=True)
class AndE:
    side: int  # 1 or 2


@dataclass(frozen=True)
class OrI:
    side: int


@dataclass(frozen=True)
class OrE:
    label: str


@dataclass(frozen=True)
class ImpI:
    label: str
    antecedent: Formula


@dataclass(frozen=True)
class ImpE:
    pass


@dataclass(frozen=True)
class ForallI:
    var: str


@dataclass(frozen=True)
class ForallE:
    term: Term


@dataclass(frozen=True)
class ExistsI:
    term: Term


@dataclass(frozen=True)
class ExistsE:
    label: str
    var: str


@dataclass(frozen=True)
class Ind:
    """Induction: children are the base and, rightmost, the step, which
    concludes motive[var := succ var] from the discharged motive.  The
    motive and the main term make instance checking decidable."""

    label: str
    var: str
    motive: Formula
    main: Term


@dataclass(frozen=True)
class EM1:
    """Restricted excluded middle over the atomic body: the left child
    proves the conclusion from the discharged universal assumption
    (forall qvar body), the right child from the discharged negated
    instance (not body[qvar := eigenvar])."""

    label: str
    eigenvar: str
    body: Formula
    qvar: str


RuleTag = Union[
    Assumption, Atomic, AndI, AndE, OrI, OrE, ImpI, ImpE,
    ForallI, ForallE, ExistsI, ExistsE, Ind, EM1,
]

ELIM_TAGS = (AndE, OrE, ImpE, ForallE, ExistsE)
INTRO_TAGS = (AndI, OrI, ImpI, ForallI, ExistsI)


@dataclass(frozen=True)
class Derivation:
    conclusion: Formula
    rule: RuleTag
    children: tuple["Derivation", ...] = ()


Address = tuple[int, ...]


def node_at(d: Derivation, addr: Address) -> Derivation:
    for i in addr:
        d = d.children[i]
    return d


def replace_at(d: Derivation, addr: Address, new: Derivation) -> Derivation:
    if not addr:
        return new
    i = addr[0]
    kids = list(d.children)
    kids[i] = replace_at(kids[i], addr[1:], new)
    return Derivation(d.conclusion, d.rule, tuple(kids))


def iter_nodes(d: Derivation, prefix: Address = ()) -> Iterator[tuple[Address, Derivation]]:
    """Preorder walk, children left to right."""
    yield prefix, d
    for i, c in enumerate(d.children):
        yield from iter_nodes(c, prefix + (i,))


def address_text(addr: Address) -> str:
    return "/" + "/".join(str(i) for i in addr)


def tag_bindings(rule: RuleTag) -> tuple[tuple[int, str], ...]:
    """(child index, variable) pairs bound by this instance."""
    if isinstance(rule, ForallI):
        return ((0, rule.var),)
    if isinstance(rule, ExistsE):
        return ((1, rule.var),)
    if isinstance(rule, Ind):
        return ((1, rule.var),)
    if isinstance(rule, EM1):
        return ((1, rule.eigenvar),)
    return ()


def tag_discharges(node: Derivation) -> dict[int, tuple[str, Formula]]:
    """Per child index, the (label, assumed formula) this node discharges
    over that child.  Shapes that cannot be determined (e.g. or-elim over
    a non-disjunction) yield no entry; the shape check reports them."""
    rule = node.rule
    if isinstance(rule, OrE) and node.children:
        major = node.children[0].conclusion
        if isinstance(major, Or):
            return {1: (rule.label, major.left), 2: (rule.label, major.right)}
        return {}
    if isinstance(rule, ImpI):
        return {0: (rule.label, rule.antecedent)}
    if isinstance(rule, ExistsE) and node.children:
        major = node.children[0].conclusion
        if isinstance(major, Exists):
            inst = _subst_raw(major.body, major.var, Var(rule.var))
            return {1: (rule.label, inst)}
        return {}
    if isinstance(rule, Ind):
        return {1: (rule.label, rule.motive)}
    if isinstance(rule, EM1):
        return {
            0: (rule.label, Forall(rule.qvar, rule.body)),
            1: (rule.label, negation(_subst_raw(rule.body, rule.qvar, Var(rule.eigenvar)))),
        }
    return {}


def _subst_raw(a: Formula, x: str, t: Term) -> Formula:
    from .formulas import _subst

    return _subst(a, x, t)


def discharge_labels(rule: RuleTag) -> tuple[str, ...]:
    if isinstance(rule, (OrE, ImpI, ExistsE, Ind, EM1)):
        return (rule.label,)
    return ()


@dataclass(frozen=True)
class Violation:
    kind: str  # ShapeMismatch | DischargeMismatch | EigenvariableViolation
    address: Address
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} @{address_text(self.address)}: {self.detail}"


@dataclass(frozen=True)
class OpenAssumption:
    label: str
    formula: Formula
    address: Address


def open_assumptions(d: Derivation) -> tuple[OpenAssumption, ...]:
    """All assumption occurrences not discharged by any ancestor."""
    out: list[OpenAssumption] = []

    def walk(node: Derivation, addr: Address, scope: frozenset[str]) -> None:
        if isinstance(node.rule, Assumption):
            if node.rule.label not in scope:
                out.append(OpenAssumption(node.rule.label, node.conclusion, addr))
            return
        dis = tag_discharges(node)
        plain = discharge_labels(node.rule)
        for i, c in enumerate(node.children):
            child_scope = scope
            if i in dis:
                child_scope = scope | {dis[i][0]}
            elif plain and isinstance(node.rule, (OrE, ExistsE)) and i > 0:
                # Shape was undeterminable; still treat minors as in scope
                # so the label is not reported open twice.
                child_scope = scope | set(plain)
            walk(c, addr + (i,), child_scope)

    walk(d, (), frozenset())
    return tuple(out)


def free_term_variables(d: Derivation) -> frozenset[str]:
    """Variables occurring free in some formula occurrence and not bound
    by a forall-intro, exists-elim, induction or excluded-middle instance
    above it."""
    bound = dict(tag_bindings(d.rule))
    out = free_vars(d.conclusion)
    for i, c in enumerate(d.children):
        sub = free_term_variables(c)
        if i in bound:
            sub = sub - {bound[i]}
        out |= sub
    return out


def labels_in(d: Derivation) -> frozenset[str]:
    out: set[str] = set()
    for _, node in iter_nodes(d):
        if isinstance(node.rule, Assumption):
            out.add(node.rule.label)
        out.update(discharge_labels(node.rule))
    return frozenset(out)


def fresh_label(base: str, taken: set[str]) -> str:
    if base not in taken:
        taken.add(base)
        return base
    n = 2
    while f"{base}#{n}" in taken:
        n += 1
    name = f"{base}#{n}"
    taken.add(name)
    return name


# ---------------------------------------------------------------------------
# Checking


def check(d: Derivation, reg: FunctionRegistry) -> list[Violation]:
    """Validate every rule instance, discharge and eigenvariable
    condition; an empty list means the derivation is accepted."""
    out: list[Violation] = []

    seen: dict[str, Address] = {}
    for addr, node in iter_nodes(d):
        for lbl in discharge_labels(node.rule):
            if lbl in seen:
                out.append(
                    Violation("DischargeMismatch", addr, f"discharge label '{lbl}' reused")
                )
            else:
                seen[lbl] = addr

    def walk(node: Derivation, addr: Address, scope: dict[str, Formula]) -> list[OpenAssumption]:
        if isinstance(node.rule, Assumption):
            lbl = node.rule.label
            if lbl in scope:
                if not formula_eq(node.conclusion, scope[lbl], reg):
                    out.append(
                        Violation(
                            "DischargeMismatch",
                            addr,
                            f"assumption '{lbl}' is {formula_to_text(node.conclusion)}, "
                            f"discharged as {formula_to_text(scope[lbl])}",
                        )
                    )
                return []
            return [OpenAssumption(lbl, node.conclusion, addr)]

        dis = tag_discharges(node)
        opens_per_child: list[list[OpenAssumption]] = []
        for i, c in enumerate(node.children):
            child_scope = scope
            if i in dis:
                child_scope = dict(scope)
                child_scope[dis[i][0]] = dis[i][1]
            opens_per_child.append(walk(c, addr + (i,), child_scope))

        v = check_instance(node, reg)
        if v is not None:
            out.append(Violation(v[0], addr, v[1]))

        for child_index, var in tag_bindings(node.rule):
            if child_index >= len(node.children):
                continue
            for oa in opens_per_child[child_index]:
                if var in free_vars(oa.formula):
                    out.append(
                        Violation(
                            "EigenvariableViolation",
                            addr,
                            f"'{var}' is free in open assumption {formula_to_text(oa.formula)}",
                        )
                    )
        rule = node.rule
        if isinstance(rule, (ExistsE, EM1)):
            var = rule.var if isinstance(rule, ExistsE) else rule.eigenvar
            if var in free_vars(node.conclusion):
                out.append(
                    Violation(
                        "EigenvariableViolation", addr, f"'{var}' is free in the conclusion"
                    )
                )
        if isinstance(rule, ExistsE) and node.children:
            if rule.var in free_vars(node.children[0].conclusion):
                out.append(
                    Violation(
                        "EigenvariableViolation",
                        addr,
                        f"'{rule.var}' is free in the major premiss",
                    )
                )
        if isinstance(rule, EM1):
            if rule.eigenvar in free_vars(Forall(rule.qvar, rule.body)):
                out.append(
                    Violation(
                        "EigenvariableViolation",
                        addr,
                        f"'{rule.eigenvar}' is free in the universal assumption body",
                    )
                )

        merged = [oa for opens in opens_per_child for oa in opens]
        return merged

    walk(d, (), {})
    return out


def check_ok(d: Derivation, reg: FunctionRegistry) -> bool:
    return not check(d, reg)


def check_instance(node: Derivation, reg: FunctionRegistry) -> Optional[tuple[str, str]]:
    """Local shape of one rule instance, children taken as given.
    Returns (kind, detail) on failure."""
    rule = node.rule
    c = node.conclusion
    kids = node.children

    def shape(detail: str) -> tuple[str, str]:
        return ("ShapeMismatch", detail)

    def want_children(n: int) -> Optional[tuple[str, str]]:
        if len(kids) != n:
            return shape(f"expected {n} premisses, got {len(kids)}")
        return None

    def same(a: Formula, b: Formula) -> bool:
        return formula_eq(a, b, reg)

    if isinstance(rule, Assumption):
        return want_children(0)

    if isinstance(rule, Atomic):
        premisses = [k.conclusion for k in kids]
        if not oracle.check_atomic_instance(rule.rule, premisses, c, reg):
            return shape(f"not an instance of {type(rule.rule).__name__}")
        return None

    if isinstance(rule, AndI):
        return want_children(2) or (
            None if same(c, And(kids[0].conclusion, kids[1].conclusion)) else shape("conclusion is not the conjunction of the premisses")
        )

    if isinstance(rule, AndE):
        err = want_children(1)
        if err:
            return err
        major = normalize_formula(kids[0].conclusion, reg)
        if not isinstance(major, And):
            return shape("major premiss is not a conjunction")
        if rule.side not in (1, 2):
            return shape("projection side must be 1 or 2")
        part = major.left if rule.side == 1 else major.right
        return None if same(c, part) else shape("conclusion is not the selected conjunct")

    if isinstance(rule, OrI):
        err = want_children(1)
        if err:
            return err
        cc = normalize_formula(c, reg)
        if not isinstance(cc, Or):
            return shape("conclusion is not a disjunction")
        if rule.side not in (1, 2):
            return shape("injection side must be 1 or 2")
        part = cc.left if rule.side == 1 else cc.right
        return None if same(kids[0].conclusion, part) else shape("premiss is not the selected disjunct")

    if isinstance(rule, OrE):
        err = want_children(3)
        if err:
            return err
        major = normalize_formula(kids[0].conclusion, reg)
        if not isinstance(major, Or):
            return shape("major premiss is not a disjunction")
        if not (same(kids[1].conclusion, c) and same(kids[2].conclusion, c)):
            return shape("minor premisses do not conclude the conclusion")
        return None

    if isinstance(rule, ImpI):
        err = want_children(1)
        if err:
            return err
        if not same(c, Implies(rule.antecedent, kids[0].conclusion)):
            return shape("conclusion is not antecedent -> premiss")
        return None

    if isinstance(rule, ImpE):
        err = want_children(2)
        if err:
            return err
        major = normalize_formula(kids[0].conclusion, reg)
        if not isinstance(major, Implies):
            return shape("major premiss is not an implication")
        if not same(kids[1].conclusion, major.left):
            return shape("minor premiss does not conclude the antecedent")
        return None if same(c, major.right) else shape("conclusion is not the consequent")

    if isinstance(rule, ForallI):
        err = want_children(1)
        if err:
            return err
        if not same(c, Forall(rule.var, kids[0].conclusion)):
            return shape("conclusion does not generalize the premiss")
        return None

    if isinstance(rule, ForallE):
        err = want_children(1)
        if err:
            return err
        major = normalize_formula(kids[0].conclusion, reg)
        if not isinstance(major, Forall):
            return shape("major premiss is not universally quantified")
        inst = substitute_formula(major.body, major.var, rule.term, reg)
        return None if same(c, inst) else shape("conclusion is not the instance at the given term")

    if isinstance(rule, ExistsI):
        err = want_children(1)
        if err:
            return err
        cc = normalize_formula(c, reg)
        if not isinstance(cc, Exists):
            return shape("conclusion is not existentially quantified")
        inst = substitute_formula(cc.body, cc.var, rule.term, reg)
        return None if same(kids[0].conclusion, inst) else shape("premiss is not the instance at the given term")

    if isinstance(rule, ExistsE):
        err = want_children(2)
        if err:
            return err
        major = normalize_formula(kids[0].conclusion, reg)
        if not isinstance(major, Exists):
            return shape("major premiss is not existentially quantified")
        return None if same(kids[1].conclusion, c) else shape("minor premiss does not conclude the conclusion")

    if isinstance(rule, Ind):
        err = want_children(2)
        if err:
            return err
        base_want = substitute_formula(rule.motive, rule.var, ZERO, reg)
        step_want = substitute_formula(rule.motive, rule.var, Succ(Var(rule.var)), reg)
        conc_want = substitute_formula(rule.motive, rule.var, rule.main, reg)
        if not same(kids[0].conclusion, base_want):
            return shape("base premiss is not the motive at zero")
        if not same(kids[1].conclusion, step_want):
            return shape("step premiss is not the motive at the successor")
        return None if same(c, conc_want) else shape("conclusion is not the motive at the main term")

    if isinstance(rule, EM1):
        err = want_children(2)
        if err:
            return err
        if not is_atomic(rule.body):
            return shape("excluded-middle body must be atomic")
        if not (same(kids[0].conclusion, c) and same(kids[1].conclusion, c)):
            return shape("premisses do not conclude the conclusion")
        return None

    return ("ShapeMismatch", f"unknown rule tag {type(rule).__name__}")


# ---------------------------------------------------------------------------
# Substitution of terms into derivations


def _subst_tag(rule: RuleTag, x: str, t: Term) -> RuleTag:
    if isinstance(rule, ForallE):
        return ForallE(subst_in_term(rule.term, {x: t}))
    if isinstance(rule, ExistsI):
        return ExistsI(subst_in_term(rule.term, {x: t}))
    if isinstance(rule, ImpI):
        return ImpI(rule.label, _subst_raw(rule.antecedent, x, t))
    if isinstance(rule, Ind):
        motive = rule.motive if rule.var == x else _subst_raw(rule.motive, x, t)
        return Ind(rule.label, rule.var, motive, subst_in_term(rule.main, {x: t}))
    if isinstance(rule, EM1):
        body = rule.body if rule.qvar == x else _subst_raw(rule.body, x, t)
        return EM1(rule.label, rule.eigenvar, body, rule.qvar)
    if isinstance(rule, Atomic):
        r = rule.rule
        if isinstance(r, oracle.AtomIntro):
            return Atomic(oracle.AtomIntro(_subst_raw(r.atom, x, t)))
        if isinstance(r, oracle.AtomElim):
            return Atomic(oracle.AtomElim(_subst_raw(r.atom, x, t)))
    return rule


def _rename_binder(node: Derivation, child_index: int, old: str, new: str, reg: FunctionRegistry) -> Derivation:
    """Rename the variable a node binds over one child, adjusting the tag."""
    rule = node.rule
    kids = list(node.children)
    kids[child_index] = subst_term(kids[child_index], old, Var(new), reg)
    if isinstance(rule, ForallI):
        rule = ForallI(new)
    elif isinstance(rule, ExistsE):
        rule = ExistsE(rule.label, new)
    elif isinstance(rule, Ind):
        motive = _subst_raw(rule.motive, rule.var, Var(new))
        rule = Ind(rule.label, new, motive, rule.main)
    elif isinstance(rule, EM1):
        rule = EM1(rule.label, new, rule.body, rule.qvar)
    return Derivation(node.conclusion, rule, tuple(kids))


def subst_term(d: Derivation, x: str, t: Term, reg: FunctionRegistry) -> Derivation:
    """Substitute t for x in every formula occurrence and tag payload,
    renaming bound variables as needed to avoid capture."""
    bound = dict(tag_bindings(d.rule))
    node = d
    if bound:
        avoid = term_vars(t)
        for child_index, var in list(bound.items()):
            if var == x:
                continue
            if var in avoid and x in free_term_variables(node.children[child_index]):
                fresh = prime_fresh(
                    var,
                    avoid
                    | free_term_variables(node.children[child_index])
                    | free_vars(node.conclusion)
                    | {x},
                )
                node = _rename_binder(node, child_index, var, fresh, reg)
        bound = dict(tag_bindings(node.rule))
    kids = []
    for i, c in enumerate(node.children):
        if i in bound and bound[i] == x:
            kids.append(c)
        else:
            kids.append(subst_term(c, x, t, reg))
    # In the EM tag, the quantified variable is a binder for the body.
    rule = node.rule
    if isinstance(rule, EM1) and rule.qvar != x and rule.qvar in term_vars(t) and x in free_vars(rule.body):
        fresh = prime_fresh(rule.qvar, term_vars(t) | free_vars(rule.body) | {x})
        rule = EM1(rule.label, rule.eigenvar, _subst_raw(rule.body, rule.qvar, Var(fresh)), fresh)
    rule = _subst_tag(rule, x, t)
    conclusion = substitute_formula(node.conclusion, x, t, reg)
    return Derivation(conclusion, rule, tuple(kids))


# ---------------------------------------------------------------------------
# Grafting derivations onto assumptions


def relabel_bound(d: Derivation, taken: set[str]) -> Derivation:
    """Fresh names for every discharge label whose discharging node lies
    inside d; open labels pass through unchanged.  Used when a reduction
    duplicates a subderivation."""
    mapping: dict[str, str] = {}
    for _, node in iter_nodes(d):
        for lbl in discharge_labels(node.rule):
            if lbl not in mapping:
                mapping[lbl] = fresh_label(lbl, taken)

    def rewrite(node: Derivation) -> Derivation:
        rule = node.rule
        if isinstance(rule, Assumption) and rule.label in mapping:
            rule = Assumption(mapping[rule.label])
        elif isinstance(rule, OrE) and rule.label in mapping:
            rule = OrE(mapping[rule.label])
        elif isinstance(rule, ImpI) and rule.label in mapping:
            rule = ImpI(mapping[rule.label], rule.antecedent)
        elif isinstance(rule, ExistsE) and rule.label in mapping:
            rule = ExistsE(mapping[rule.label], rule.var)
        elif isinstance(rule, Ind) and rule.label in mapping:
            rule = Ind(mapping[rule.label], rule.var, rule.motive, rule.main)
        elif isinstance(rule, EM1) and rule.label in mapping:
            rule = EM1(mapping[rule.label], rule.eigenvar, rule.body, rule.qvar)
        return Derivation(node.conclusion, rule, tuple(rewrite(c) for c in node.children))

    return rewrite(d) if mapping else d


def graft(d: Derivation, label: str, replacement: Derivation, reg: FunctionRegistry) -> Derivation:
    """Replace every assumption occurrence carrying the label with the
    replacement derivation.  The caller removes the discharging node;
    binders above a graft site are renamed when they would capture a
    variable of the replacement, and copies beyond the first get fresh
    internal labels so discharge labels stay unique."""
    for _, node in iter_nodes(d):
        if isinstance(node.rule, Assumption) and node.rule.label == label:
            if not formula_eq(node.conclusion, replacement.conclusion, reg):
                raise ConclusionMismatch(
                    f"graft target assumes {formula_to_text(node.conclusion)}, "
                    f"replacement concludes {formula_to_text(replacement.conclusion)}"
                )

    avoid = free_term_variables(replacement)
    taken = set(labels_in(d) | labels_in(replacement))
    used = [False]  # first graft site keeps the replacement's own labels

    def contains_label(node: Derivation) -> bool:
        return any(
            isinstance(n.rule, Assumption) and n.rule.label == label for _, n in iter_nodes(node)
        )

    def walk(node: Derivation) -> Derivation:
        if isinstance(node.rule, Assumption) and node.rule.label == label:
            if not used[0]:
                used[0] = True
                return replacement
            return relabel_bound(replacement, taken)
        if not node.children or not contains_label(node):
            return node
        bound = dict(tag_bindings(node.rule))
        current = node
        for child_index, var in list(bound.items()):
            if var in avoid and contains_label(current.children[child_index]):
                fresh = prime_fresh(
                    var, avoid | free_term_variables(current) | free_vars(current.conclusion)
                )
                current = _rename_binder(current, child_index, var, fresh, reg)
        return Derivation(
            current.conclusion, current.rule, tuple(walk(c) for c in current.children)
        )

    return walk(d)


def is_atomic_derivation(d: Derivation) -> bool:
    """Only atomic formulas occur anywhere in the tree."""
    return all(is_atomic(node.conclusion) for _, node in iter_nodes(d))
