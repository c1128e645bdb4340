"""Plan library: atomic STRIPS-like plans with propositional pre/post-conditions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    DuplicatePlan,
    InconsistentPostcondition,
    NonConjunctivePostcondition,
    NotConjunctive,
    UnknownPlan,
)
from .syntax import (
    ConjClause,
    DnfFormula,
    Formula,
    entails,
    require_propositional,
    to_conj_clause,
    to_dnf,
)


@dataclass(frozen=True)
class Plan:
    name: str
    pre: Formula
    post: ConjClause


@dataclass(frozen=True)
class PlanLibrary:
    plans: tuple[Plan, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {}
        for plan in self.plans:
            if plan.name in index:
                raise DuplicatePlan(f"plan {plan.name!r} defined twice")
            index[plan.name] = plan
        object.__setattr__(self, "plans", tuple(self.plans))
        object.__setattr__(self, "_index", index)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[Plan]:
        return iter(self.plans)

    def __len__(self) -> int:
        return len(self.plans)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.plans)

    def get(self, name: str) -> Plan:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownPlan(f"unknown plan {name!r}") from None

    def pre(self, name: str) -> Formula:
        return self.get(name).pre

    def post(self, name: str) -> ConjClause:
        return self.get(name).post

    def post_entails(self, name: str, phi: DnfFormula | Formula) -> bool:
        return post_entails(self, name, phi)


def make_plan_library(entries: Iterable[tuple[str, Formula, ConjClause | Formula]]) -> PlanLibrary:
    """Build a library from ``(name, pre, post)`` triples.

    ``post`` must be a consistent conjunction of literals.
    """
    plans = []
    for name, pre, post in entries:
        require_propositional(pre, f"precondition of {name!r}")
        try:
            post = to_conj_clause(post)
        except NotConjunctive:
            raise NonConjunctivePostcondition(
                f"postcondition of {name!r} is not a conjunction of literals"
            ) from None
        if not post.is_consistent():
            raise InconsistentPostcondition(f"postcondition of {name!r} is inconsistent: {post}")
        plans.append(Plan(name, pre, post))
    return PlanLibrary(tuple(plans))


def post_entails(library: PlanLibrary, name: str, phi: DnfFormula | Formula) -> bool:
    """Whether every valuation satisfying ``pos(name)`` satisfies ``phi``."""
    return entails(library.post(name).literals, to_dnf(phi))
