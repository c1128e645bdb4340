"""Program-level mental change: announcement, radical upgrade, contraction.

Each operation maps a conjunctive agent program to a new one.  Intention
sets are re-filtered after every change.  Two filters are available:

``"coherent"`` (default)
    keep a plan iff its precondition is believed, its postcondition is
    desired, jointly possible with knowledge and not already believed.
    This is the admissibility condition the model-level operations apply.
``"verbatim"``
    the per-operation filters in their original, weaker form (belief in the
    precondition, non-belief in the postcondition, and for announcement a
    desire-relevance test against the kept desire strata).
"""

from __future__ import annotations

import warnings

from .errors import (
    IncoherentProgram,
    InconsistentAnnouncement,
    InconsistentFormula,
    NotDnf,
    NotLiteralDisjunction,
)
from .program import (
    AgentProgram,
    RankedFormula,
    StratifiedBase,
    is_coherent,
    max_consistent,
    max_consistent_strata,
    require_conjunctive,
)
from .syntax import (
    ConjClause,
    DnfFormula,
    Formula,
    entails,
    literals_consistent,
    to_conj_clause,
    to_dnf,
)

FILTERS = ("coherent", "verbatim")


class CoherenceWarning(UserWarning):
    pass


def _precheck(ag: AgentProgram, permissive: bool) -> None:
    require_conjunctive(ag)
    report = is_coherent(ag)
    if not report.ok:
        if not permissive:
            raise IncoherentProgram(report)
        warnings.warn(
            f"operating on an incoherent program (conditions {report.failed()})",
            CoherenceWarning,
            stacklevel=3,
        )


def _clause(phi) -> ConjClause:
    clause = to_conj_clause(phi)
    if not clause.is_consistent():
        raise InconsistentFormula(f"{clause} is inconsistent")
    return clause


def _literal_disjunction(phi) -> DnfFormula:
    try:
        dnf = to_dnf(phi)
    except NotDnf:
        raise NotLiteralDisjunction(f"not a disjunction of literals: {phi}") from None
    if any(len(c) != 1 for c in dnf.clauses):
        raise NotLiteralDisjunction(f"not a disjunction of literals: {dnf}")
    return dnf


def _check_filter(mode: str) -> None:
    if mode not in FILTERS:
        raise ValueError(f"unknown intention filter {mode!r}; expected one of {FILTERS}")


def coherent_intentions(ag: AgentProgram, candidates=None) -> frozenset[str]:
    """Plans whose precondition is believed and whose postcondition is
    desired, possible given knowledge, and not yet believed."""
    b_max = max_consistent(ag.beliefs)
    d_max = max_consistent(ag.desires)
    k_lits = ag.knowledge_literals()
    keep = set()
    for name in sorted(ag.intentions if candidates is None else candidates):
        plan = ag.library.get(name)
        post = DnfFormula((plan.post,))
        if not entails(b_max, to_dnf(plan.pre)):
            continue
        if not entails(d_max, post):
            continue
        if not literals_consistent(k_lits | plan.post.literals):
            continue
        if entails(b_max, post):
            continue
        keep.add(name)
    return frozenset(keep)


def _believed_and_open(ag: AgentProgram, b_max) -> set[str]:
    keep = set()
    for name in sorted(ag.intentions):
        plan = ag.library.get(name)
        if entails(b_max, to_dnf(plan.pre)) and not entails(b_max, DnfFormula((plan.post,))):
            keep.add(name)
    return keep


def _desire_relevant_literal(ag: AgentProgram, names) -> set[str]:
    d_max = max_consistent(ag.desires)
    return {a for a in names if ag.library.post(a).literals & d_max}


# ---------------------------------------------------------------------------
# Operations


def announce(
    ag: AgentProgram, phi: ConjClause | Formula, *, intention_filter: str = "coherent", permissive: bool = False
) -> AgentProgram:
    """Acquire knowledge ``phi``: add it to K and at rank 0 of both bases."""
    _check_filter(intention_filter)
    _precheck(ag, permissive)
    clause = _clause(phi)
    if not literals_consistent(ag.knowledge_literals() | clause.literals):
        raise InconsistentAnnouncement(f"announcing {clause} contradicts knowledge")
    formula = clause.to_formula()
    new = ag.replace(
        knowledge=ag.knowledge + (formula,),
        beliefs=ag.beliefs.add(formula, 0),
        desires=ag.desires.add(formula, 0),
    )
    if intention_filter == "coherent":
        return new.replace(intentions=coherent_intentions(new))
    b_max = max_consistent(new.beliefs)
    _, kept = max_consistent_strata(new.desires)
    kept_clauses = [to_conj_clause(e.formula) for e in new.desires if e.rank in kept]
    keep = {
        a
        for a in _believed_and_open(new, b_max)
        if any(entails(new.library.post(a).literals, DnfFormula((c,))) for c in kept_clauses)
    }
    return new.replace(intentions=frozenset(keep))


def _revised_base(ag: AgentProgram, base: StratifiedBase, clause: ConjClause) -> StratifiedBase:
    entries = [RankedFormula(k, 0) for k in ag.knowledge]
    entries.append(RankedFormula(clause.to_formula(), 1))
    entries += [RankedFormula(e.formula, e.rank + 2) for e in base]
    return StratifiedBase(tuple(entries))


def revise_belief(
    ag: AgentProgram, phi: ConjClause | Formula, *, intention_filter: str = "coherent", permissive: bool = False
) -> AgentProgram:
    """Radical upgrade of beliefs: ``phi`` goes right below knowledge and
    every old stratum moves down by two."""
    _check_filter(intention_filter)
    _precheck(ag, permissive)
    clause = _clause(phi)
    new = ag.replace(beliefs=_revised_base(ag, ag.beliefs, clause))
    if intention_filter == "coherent":
        return new.replace(intentions=coherent_intentions(new))
    return new.replace(intentions=frozenset(_believed_and_open(new, max_consistent(new.beliefs))))


def revise_desire(
    ag: AgentProgram, phi: ConjClause | Formula, *, intention_filter: str = "coherent", permissive: bool = False
) -> AgentProgram:
    _check_filter(intention_filter)
    _precheck(ag, permissive)
    clause = _clause(phi)
    new = ag.replace(desires=_revised_base(ag, ag.desires, clause))
    if intention_filter == "coherent":
        return new.replace(intentions=coherent_intentions(new))
    open_plans = _believed_and_open(new, max_consistent(new.beliefs))
    return new.replace(intentions=frozenset(_desire_relevant_literal(new, open_plans)))


def cont_base(base: StratifiedBase, phi: DnfFormula | Formula) -> StratifiedBase:
    """Erase every literal over a symbol of ``phi`` from every entry.

    Entries that become empty stay in place as ``top`` so ranks never shift.
    """
    symbols = _literal_disjunction(phi).symbols
    entries = []
    for e in base:
        clause = to_conj_clause(e.formula)
        kept = ConjClause(frozenset(l for l in clause.literals if l.symbol not in symbols))
        entries.append(RankedFormula(kept.to_formula(), e.rank))
    return StratifiedBase(tuple(entries))


def contract_belief(
    ag: AgentProgram, phi: DnfFormula | Formula, *, intention_filter: str = "coherent", permissive: bool = False
) -> AgentProgram:
    _check_filter(intention_filter)
    _precheck(ag, permissive)
    new = ag.replace(beliefs=cont_base(ag.beliefs, phi))
    if intention_filter == "coherent":
        return new.replace(intentions=coherent_intentions(new))
    return new.replace(intentions=frozenset(_believed_and_open(new, max_consistent(new.beliefs))))


def contract_desire(
    ag: AgentProgram, phi: DnfFormula | Formula, *, intention_filter: str = "coherent", permissive: bool = False
) -> AgentProgram:
    _check_filter(intention_filter)
    _precheck(ag, permissive)
    new = ag.replace(desires=cont_base(ag.desires, phi))
    if intention_filter == "coherent":
        return new.replace(intentions=coherent_intentions(new))
    open_plans = _believed_and_open(new, max_consistent(new.beliefs))
    return new.replace(intentions=frozenset(_desire_relevant_literal(new, open_plans)))


OPERATIONS = {
    "announce": announce,
    "reviseB": revise_belief,
    "reviseD": revise_desire,
    "contractB": contract_belief,
    "contractD": contract_desire,
}
