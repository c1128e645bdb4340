"""Small constructors shared by the test modules."""

from dplagent.plans import make_plan_library
from dplagent.program import AgentProgram, StratifiedBase
from dplagent.syntax import Literal, Vocabulary, parse_formula, to_conj_clause

V = Vocabulary.of("p", "q", "r", "s")


def base(*pairs):
    return StratifiedBase.of((parse_formula(text), rank) for text, rank in pairs)


def lits(*texts):
    return frozenset(Literal.parse(t) for t in texts)


def strata_literals(b):
    return [frozenset().union(*(to_conj_clause(f).literals for f in fs)) for _, fs in b.strata()]


def program(knowledge=(), beliefs=(), desires=(), plans=(), intend=(), vocab=V):
    """Build a program with ``knowledge`` mirrored at rank 0 of both bases."""
    k = tuple(parse_formula(t) for t in knowledge)
    lib = make_plan_library([(n, parse_formula(pre), parse_formula(post)) for n, pre, post in plans])
    mirror = [(t, 0) for t in knowledge]
    return AgentProgram(
        vocab, lib, k, base(*mirror, *beliefs), base(*mirror, *desires), frozenset(intend)
    )
