"""Syntactic agents: stratified bases, the Max selection, queries and coherence."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import InconsistentLiteralSet, NotConjunctive, UnknownPlan, UnknownSymbol
from .plans import PlanLibrary
from .syntax import (
    ConjClause,
    DnfFormula,
    Formula,
    Literal,
    Vocabulary,
    entails,
    literals_consistent,
    plans_of,
    require_propositional,
    symbols_of,
    to_conj_clause,
    to_dnf,
)


@dataclass(frozen=True)
class RankedFormula:
    formula: Formula
    rank: int

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 0:
            raise ValueError(f"rank must be a natural number, got {self.rank!r}")

    @cached_property
    def literals(self) -> frozenset[Literal]:
        """Literals of a conjunctive entry; raises ``NotConjunctive`` otherwise."""
        return to_conj_clause(self.formula).literals


@dataclass(frozen=True)
class StratifiedBase:
    """Finite set of ranked formulas; rank 0 is the most entrenched stratum."""

    entries: tuple[RankedFormula, ...] = ()

    def __post_init__(self):
        seen = dict.fromkeys(self.entries)
        object.__setattr__(self, "entries", tuple(seen))

    @classmethod
    def of(cls, pairs: Iterable) -> "StratifiedBase":
        out = []
        for item in pairs:
            if isinstance(item, RankedFormula):
                out.append(item)
            else:
                phi, rank = item
                if isinstance(phi, ConjClause):
                    phi = phi.to_formula()
                out.append(RankedFormula(phi, rank))
        return cls(tuple(out))

    def __eq__(self, other):
        if not isinstance(other, StratifiedBase):
            return NotImplemented
        return frozenset(self.entries) == frozenset(other.entries)

    def __hash__(self):
        return hash(frozenset(self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, item) -> bool:
        return item in self.entries

    def ranks(self) -> list[int]:
        return sorted({e.rank for e in self.entries})

    def max_rank(self) -> int:
        return max((e.rank for e in self.entries), default=0)

    def stratum(self, rank: int) -> tuple[Formula, ...]:
        return tuple(e.formula for e in self.entries if e.rank == rank)

    def strata(self) -> list[tuple[int, tuple[Formula, ...]]]:
        return [(r, self.stratum(r)) for r in self.ranks()]

    def add(self, phi: Formula, rank: int) -> "StratifiedBase":
        return StratifiedBase(self.entries + (RankedFormula(phi, rank),))

    def is_conjunctive(self) -> bool:
        try:
            for e in self.entries:
                to_conj_clause(e.formula)
        except NotConjunctive:
            return False
        return True

    def clauses(self) -> list[tuple[ConjClause, int]]:
        return [(to_conj_clause(e.formula), e.rank) for e in self.entries]


@dataclass(frozen=True, eq=False)
class AgentProgram:
    vocab: Vocabulary
    library: PlanLibrary
    knowledge: tuple[Formula, ...] = ()
    beliefs: StratifiedBase = field(default_factory=StratifiedBase)
    desires: StratifiedBase = field(default_factory=StratifiedBase)
    intentions: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "knowledge", tuple(dict.fromkeys(self.knowledge)))
        object.__setattr__(self, "intentions", frozenset(self.intentions))
        for name in self.intentions:
            if name not in self.library:
                raise UnknownPlan(f"intended plan {name!r} is not in the library")
        formulas = list(self.knowledge)
        formulas += [e.formula for e in self.beliefs] + [e.formula for e in self.desires]
        for plan in self.library:
            formulas += [plan.pre, plan.post.to_formula()]
        for phi in formulas:
            require_propositional(phi)
            unknown = symbols_of(phi) - set(self.vocab)
            if unknown:
                raise UnknownSymbol(f"symbols not in vocabulary: {sorted(unknown)}")
            if plans_of(phi):
                raise ValueError("base formulas must be propositional")

    def _key(self):
        return (
            self.vocab,
            self.library,
            frozenset(self.knowledge),
            self.beliefs,
            self.desires,
            self.intentions,
        )

    def __eq__(self, other):
        if not isinstance(other, AgentProgram):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def replace(self, **changes) -> "AgentProgram":
        values = dict(
            vocab=self.vocab,
            library=self.library,
            knowledge=self.knowledge,
            beliefs=self.beliefs,
            desires=self.desires,
            intentions=self.intentions,
        )
        values.update(changes)
        return AgentProgram(**values)

    def knowledge_literals(self) -> frozenset[Literal]:
        return frozenset().union(*(to_conj_clause(k).literals for k in self.knowledge))

    def is_conjunctive(self) -> bool:
        try:
            require_conjunctive(self)
        except NotConjunctive:
            return False
        return True


def require_conjunctive(ag: AgentProgram) -> None:
    """Raise ``NotConjunctive`` unless every base and plan formula is conjunctive."""
    for k in ag.knowledge:
        to_conj_clause(k)
    for base in (ag.beliefs, ag.desires):
        for e in base:
            to_conj_clause(e.formula)
    for plan in ag.library:
        to_conj_clause(plan.pre)


# ---------------------------------------------------------------------------
# Max


def _stratum_literals(base: StratifiedBase) -> list[tuple[int, set[Literal]]]:
    strata: dict[int, set[Literal]] = {}
    for e in base.entries:
        strata.setdefault(e.rank, set()).update(e.literals)
    return sorted(strata.items())


def max_consistent_strata(base: StratifiedBase) -> tuple[frozenset[Literal], tuple[int, ...]]:
    """Greedy whole-stratum selection; returns the literal set and the kept ranks.

    Strata are scanned from the lowest occurring rank.  A stratum is dropped
    wholesale if its literals clash among themselves or with what has been
    accumulated so far.
    """
    accumulated: set[Literal] = set()
    kept = []
    for rank, lits in _stratum_literals(base):
        if not literals_consistent(lits):
            continue
        if any(l.negate() in accumulated for l in lits):
            continue
        accumulated |= lits
        kept.append(rank)
    return frozenset(accumulated), tuple(kept)


def max_consistent(base: StratifiedBase) -> frozenset[Literal]:
    return max_consistent_strata(base)[0]


def base_entails(literals: Iterable[Literal], phi: DnfFormula | Formula) -> bool:
    literals = frozenset(literals)
    if not literals_consistent(literals):
        raise InconsistentLiteralSet(f"inconsistent literal set: {sorted(map(str, literals))}")
    return entails(literals, to_dnf(phi))


# ---------------------------------------------------------------------------
# Queries

ATTITUDES = ("K", "B", "G", "I")


def query(ag: AgentProgram, attitude: str, phi: DnfFormula | Formula) -> bool:
    """Decide ``ag |= X phi`` for X in K, B, G, I."""
    require_conjunctive(ag)
    dnf = to_dnf(phi)
    if attitude == "K":
        lits = ag.knowledge_literals()
        if not literals_consistent(lits):
            return True
        return entails(lits, dnf)
    if attitude == "B":
        return entails(max_consistent(ag.beliefs), dnf)
    if attitude == "G":
        return entails(max_consistent(ag.desires), dnf)
    if attitude == "I":
        if not entails(max_consistent(ag.desires), dnf):
            return False
        return any(ag.library.post_entails(a, dnf) for a in sorted(ag.intentions))
    raise ValueError(f"unknown attitude {attitude!r}; expected one of {ATTITUDES}")


# ---------------------------------------------------------------------------
# Coherence

CONDITION_NAMES = {
    1: "knowledge consistency",
    2: "belief-knowledge consistency",
    3: "desire-knowledge consistency",
    4: "intention-desire consistency",
    5: "pursuable plan",
    6: "intention consistency",
    7: "plans are relevant",
}


@dataclass(frozen=True)
class CoherenceReport:
    conditions: dict[int, bool]
    details: dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    def failed(self) -> list[int]:
        return [c for c, passed in sorted(self.conditions.items()) if not passed]

    def lines(self) -> list[str]:
        out = []
        for c in sorted(self.conditions):
            status = "ok" if self.conditions[c] else "FAIL"
            line = f"{c}. {CONDITION_NAMES[c]}: {status}"
            if c in self.details:
                line += f" ({self.details[c]})"
            out.append(line)
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _rank0_clauses(base: StratifiedBase) -> set[ConjClause]:
    return {to_conj_clause(e.formula) for e in base if e.rank == 0}


def is_coherent(ag: AgentProgram) -> CoherenceReport:
    require_conjunctive(ag)
    conditions: dict[int, bool] = {}
    details: dict[int, str] = {}
    k_lits = ag.knowledge_literals()
    conditions[1] = literals_consistent(k_lits)

    k_clauses = {to_conj_clause(k) for k in ag.knowledge}
    for c, base in ((2, ag.beliefs), (3, ag.desires)):
        rank0 = _rank0_clauses(base)
        conditions[c] = rank0 == k_clauses
        if not conditions[c]:
            missing = sorted(map(str, k_clauses - rank0))
            extra = sorted(map(str, rank0 - k_clauses))
            details[c] = f"missing at rank 0: {missing}; not in knowledge: {extra}"

    b_max = max_consistent(ag.beliefs)
    d_max = max_consistent(ag.desires)
    intended = sorted(ag.intentions)
    bad4 = [a for a in intended if not (ag.library.post(a).literals & d_max)]
    bad5 = [a for a in intended if not entails(b_max, to_dnf(ag.library.pre(a)))]
    posts = frozenset().union(*(ag.library.post(a).literals for a in intended))
    bad7 = [a for a in intended if entails(b_max, to_dnf(ag.library.post(a)))]
    conditions[4] = not bad4
    conditions[5] = not bad5
    conditions[6] = literals_consistent(posts)
    conditions[7] = not bad7
    for c, bad in ((4, bad4), (5, bad5), (7, bad7)):
        if bad:
            details[c] = "plans: " + ", ".join(bad)
    return CoherenceReport(conditions, details)
