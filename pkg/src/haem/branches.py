"""Branches of a derivation and the reducibility analysis over them.

A branch runs from a top occurrence (an assumption or the conclusion of
a premiss-less atomic rule) down to the derivation's conclusion.  It is
principal when every elimination and excluded-middle instance on it is
entered through its major (leftmost) premiss; introduction, atomic and
induction instances place no restriction.  The head-cut of a principal
branch is the reducible configuration with the greatest index, and a
branch is in open normal form when it starts at an open assumption and
splits into an elimination segment, an atomic/EM segment, and an
introduction/EM segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .derivations import (
    Address,
    AndE,
    AndI,
    Assumption,
    Atomic,
    Derivation,
    ELIM_TAGS,
    EM1,
    ForallE,
    Ind,
    INTRO_TAGS,
    iter_nodes,
    node_at,
    open_assumptions,
)
from .formulas import alpha_eq, free_vars, is_atomic
from .terms import FunctionRegistry, Succ, Zero


@dataclass(frozen=True)
class Branch:
    """Addresses of the occurrences, top occurrence first, conclusion last."""

    addrs: tuple[Address, ...]

    def __len__(self) -> int:
        return len(self.addrs)


def _is_elim(rule) -> bool:
    return isinstance(rule, ELIM_TAGS)


def _is_intro(rule) -> bool:
    return isinstance(rule, INTRO_TAGS)


def principal_branches(d: Derivation) -> tuple[Branch, ...]:
    """All principal branches, in leftmost-first depth order."""

    def collect(node: Derivation, addr: Address) -> list[tuple[Address, ...]]:
        if not node.children:
            return [(addr,)]
        if _is_elim(node.rule) or isinstance(node.rule, EM1):
            upper = collect(node.children[0], addr + (0,))
        else:
            upper = []
            for i, c in enumerate(node.children):
                upper.extend(collect(c, addr + (i,)))
        return [path + (addr,) for path in upper]

    return tuple(Branch(p) for p in collect(d, ()))


@dataclass(frozen=True)
class HeadCut:
    branch: Branch
    index: int
    kind: str  # "proper" | "ind" | "witness" | "em-perm"
    detail: str  # connective, or the witness sub-case


def _elim_connective(rule) -> str:
    from .derivations import ImpE, OrE, ExistsE

    if isinstance(rule, AndE):
        return "and"
    if isinstance(rule, OrE):
        return "or"
    if isinstance(rule, ImpE):
        return "imp"
    if isinstance(rule, ForallE):
        return "forall"
    if isinstance(rule, ExistsE):
        return "exists"
    raise ValueError(f"not an elimination tag: {rule}")


def _universal_uses(left: Derivation, label: str) -> int:
    return sum(
        1
        for _, n in iter_nodes(left)
        if isinstance(n.rule, Assumption) and n.rule.label == label
    )


def find_head_cut(d: Derivation, branch: Branch, reg: FunctionRegistry) -> Optional[HeadCut]:
    """The maximum-index reducible configuration along the branch."""
    addrs = branch.addrs
    n = len(addrs) - 1
    for i in range(n, 0, -1):
        node = node_at(d, addrs[i])
        below = node_at(d, addrs[i - 1])
        rule = node.rule

        if _is_elim(rule) and _is_intro(below.rule):
            # On a principal branch the step into an elimination is by the
            # major premiss; a conjunction cut additionally needs the branch
            # to run through the conjunct the projection keeps.
            if isinstance(below.rule, AndI):
                if i < 2 or not alpha_eq(
                    node_at(d, addrs[i - 2]).conclusion, node.conclusion
                ):
                    continue
            return HeadCut(branch, i, "proper", _elim_connective(rule))

        if isinstance(rule, Ind):
            main = rule.main
            if isinstance(main, (Zero, Succ)):
                return HeadCut(branch, i, "ind", "")

        if isinstance(rule, EM1):
            if _universal_uses(node.children[0], rule.label) == 0:
                return HeadCut(branch, i, "witness", "redundant")
            top = node_at(d, addrs[0])
            if (
                isinstance(top.rule, Assumption)
                and top.rule.label == rule.label
                and addrs[0][: len(addrs[i])] == addrs[i]
                and addrs[0][len(addrs[i])] == 0
            ):
                first = node_at(d, addrs[1]).conclusion
                if is_atomic(first) and not free_vars(first):
                    return HeadCut(branch, i, "witness", "instances")

        if _is_elim(rule) and isinstance(below.rule, EM1):
            return HeadCut(branch, i, "em-perm", _elim_connective(rule))

    return None


@dataclass(frozen=True)
class OnfDecomposition:
    n_e: int
    n_a: int
    n_i: int


def open_normal_form(d: Derivation, branch: Branch) -> Optional[OnfDecomposition]:
    """Decompose the branch as eliminations, then atomic/EM, then
    introductions/EM, starting from an open assumption; when the last
    segment is nonempty its first occurrence must close an introduction,
    which pins the split uniquely."""
    addrs = branch.addrs
    open_addrs = {oa.address for oa in open_assumptions(d)}
    if addrs[0] not in open_addrs:
        return None
    n = len(addrs) - 1
    rules = [node_at(d, addrs[i]).rule for i in range(1, n + 1)]

    def seg_e(rule) -> bool:
        return _is_elim(rule)

    def seg_a(rule) -> bool:
        return isinstance(rule, (Atomic, EM1))

    def seg_i(rule) -> bool:
        return _is_intro(rule) or isinstance(rule, EM1)

    n_e = 0
    while n_e < n and seg_e(rules[n_e]):
        n_e += 1
    first_intro = None
    for j in range(n_e, n):
        if _is_intro(rules[j]):
            first_intro = j
            break
    if first_intro is None:
        n_a, n_i = n - n_e, 0
    else:
        n_a, n_i = first_intro - n_e, n - first_intro
    if not all(seg_a(r) for r in rules[n_e : n_e + n_a]):
        return None
    if not all(seg_i(r) for r in rules[n_e + n_a :]):
        return None
    if n_i > 0 and not _is_intro(rules[n_e + n_a]):
        return None
    return OnfDecomposition(n_e, n_a, n_i)


def normal_form_case(d: Derivation, reg: FunctionRegistry) -> Optional[str]:
    """Which residual shape a derivation without head-cuts falls into:
    it ends with an introduction, is atomic throughout, has a principal
    branch in open normal form, or ends with an excluded-middle instance
    whose conclusion is not simple."""
    from .derivations import is_atomic_derivation
    from .formulas import is_simple

    if _is_intro(d.rule):
        return "introduction"
    if is_atomic_derivation(d):
        return "atomic"
    for branch in principal_branches(d):
        if open_normal_form(d, branch) is not None:
            return "open-normal-form"
    if isinstance(d.rule, EM1) and not is_simple(d.conclusion):
        return "em-not-simple"
    return None
