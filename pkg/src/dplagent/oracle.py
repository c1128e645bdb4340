"""Randomised and enumerative cross-checks of program operations against models.

Each program-level operation has a model-level counterpart.  For a program
``ag`` and formula ``phi`` the two routes are::

    induced_model(op(ag, phi))      vs      sem_op(induced_model(ag), phi)

and :func:`check_commutation` compares them with ``models_equal``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import agentfile
from .dynamics import (
    announce,
    contract_belief,
    contract_desire,
    revise_belief,
    revise_desire,
)
from .plans import make_plan_library
from .program import AgentProgram, RankedFormula, StratifiedBase, is_coherent, max_consistent
from .semantics import (
    AgentModel,
    Preorder,
    World,
    all_valuations,
    dump_model,
    induced_model,
    models_equal,
    sem_announce,
    sem_contract_d,
    sem_contract_p,
    sem_upgrade_d,
    sem_upgrade_p,
)
from .syntax import (
    BOT,
    TOP,
    And,
    Atom,
    BoxLeqD,
    BoxLeqP,
    BoxLtD,
    BoxLtP,
    ConjClause,
    DnfFormula,
    DynAnnounce,
    DynContractD,
    DynContractP,
    DynUpgradeD,
    DynUpgradeP,
    Formula,
    IntendAtom,
    Literal,
    Not,
    Or,
    PlanBox,
    Univ,
    Vocabulary,
    literals_consistent,
)

SYMBOLS = ("p", "q", "r", "s", "t", "u")

OPERATION_PAIRS: dict[str, tuple[Callable, Callable]] = {
    "announce": (announce, sem_announce),
    "reviseB": (revise_belief, sem_upgrade_p),
    "reviseD": (revise_desire, sem_upgrade_d),
    "contractB": (contract_belief, sem_contract_p),
    "contractD": (contract_desire, sem_contract_d),
}


# ---------------------------------------------------------------------------
# Random programs


def random_literal(rng: random.Random, vocab: Vocabulary) -> Literal:
    return Literal(rng.choice(vocab.symbols), rng.random() < 0.5)


def random_clause(rng, vocab, max_literals=2, min_literals=0, consistent=False) -> ConjClause:
    while True:
        n = rng.randint(min_literals, max_literals)
        clause = ConjClause(frozenset(random_literal(rng, vocab) for _ in range(n)))
        if not consistent or clause.is_consistent():
            return clause


def random_dnf(rng, vocab, max_clauses=3, max_literals=2) -> DnfFormula:
    n = rng.randint(1, max_clauses)
    return DnfFormula(tuple(random_clause(rng, vocab, max_literals, min_literals=1) for _ in range(n)))


def random_literal_disjunction(rng, vocab, max_literals=2) -> DnfFormula:
    n = rng.randint(1, max_literals)
    return DnfFormula(tuple(ConjClause(frozenset({random_literal(rng, vocab)})) for _ in range(n)))


def _random_base(rng, vocab, knowledge, max_strata=3) -> StratifiedBase:
    entries = [RankedFormula(k, 0) for k in knowledge]
    for rank in range(1, rng.randint(0, max_strata) + 1):
        for _ in range(rng.randint(1, 2)):
            clause = random_clause(rng, vocab, 2, min_literals=1, consistent=rng.random() < 0.85)
            entries.append(RankedFormula(clause.to_formula(), rank))
    return StratifiedBase(tuple(entries))


def random_coherent_program(rng: random.Random, max_symbols: int = 4) -> AgentProgram:
    """A random coherent conjunctive program over at most ``max_symbols`` symbols.

    Plans are biased towards satisfying the coherence conditions so that
    intention sets are non-empty reasonably often.
    """
    vocab = Vocabulary(SYMBOLS[: rng.randint(1, max_symbols)])
    while True:
        k_clauses = [random_clause(rng, vocab, 2, min_literals=1, consistent=True)
                     for _ in range(rng.randint(0, 2))]
        if literals_consistent(itertools.chain.from_iterable(c.literals for c in k_clauses)):
            break
    knowledge = tuple(c.to_formula() for c in k_clauses)
    beliefs = _random_base(rng, vocab, knowledge)
    desires = _random_base(rng, vocab, knowledge)
    b_max = sorted(max_consistent(beliefs))
    d_max = sorted(max_consistent(desires))

    entries = []
    for i in range(rng.randint(0, 3)):
        if rng.random() < 0.6 and d_max:
            pre = ConjClause(frozenset(rng.sample(b_max, min(len(b_max), rng.randint(0, 2)))))
            post = {rng.choice(d_max)}
            if rng.random() < 0.5:
                post.add(random_literal(rng, vocab))
            post = ConjClause(frozenset(post))
        else:
            pre = random_clause(rng, vocab, 2)
            post = random_clause(rng, vocab, 2, min_literals=1)
        if post.is_consistent():
            entries.append((f"a{i}", pre.to_formula(), post))
    library = make_plan_library(entries)

    base = AgentProgram(vocab, library, knowledge, beliefs, desires, frozenset())
    intentions: set[str] = set()
    names = list(library.names)
    rng.shuffle(names)
    for name in names:
        candidate = base.replace(intentions=frozenset(intentions | {name}))
        if is_coherent(candidate).ok:
            intentions.add(name)
    program = base.replace(intentions=frozenset(intentions))
    assert is_coherent(program).ok
    return program


def random_argument(rng, op: str, ag: AgentProgram):
    """A formula suitable for operation ``op`` on ``ag``."""
    vocab = ag.vocab
    if op == "announce":
        k_lits = ag.knowledge_literals()
        while True:
            clause = random_clause(rng, vocab, 2, consistent=True)
            if literals_consistent(k_lits | clause.literals):
                return clause
    if op in ("reviseB", "reviseD"):
        return random_clause(rng, vocab, 2, consistent=True)
    return random_literal_disjunction(rng, vocab, 2)


# ---------------------------------------------------------------------------
# Commutation


@dataclass
class Trial:
    op: str
    program: AgentProgram
    argument: object
    syntactic: AgentModel
    semantic: AgentModel

    @property
    def agrees(self) -> bool:
        return models_equal(self.syntactic, self.semantic)


def run_trial(ag: AgentProgram, op: str, phi, intention_filter="coherent") -> Trial:
    program_op, model_op = OPERATION_PAIRS[op]
    after = program_op(ag, phi, intention_filter=intention_filter)
    phi_formula = phi.to_formula() if isinstance(phi, (ConjClause, DnfFormula)) else phi
    return Trial(
        op=op,
        program=ag,
        argument=phi,
        syntactic=induced_model(after),
        semantic=model_op(induced_model(ag), phi_formula),
    )


def check_commutation(ag, op, phi, intention_filter="coherent") -> bool:
    return run_trial(ag, op, phi, intention_filter).agrees


def format_trial(trial: Trial) -> str:
    lines = [
        f"# counterexample for {trial.op}",
        "## program",
        agentfile.dumps(trial.program).rstrip(),
        "## argument",
        str(trial.argument),
        "## induced model of the transformed program",
        dump_model(trial.syntactic),
        "## transformed induced model",
        dump_model(trial.semantic),
    ]
    return "\n".join(lines) + "\n"


@dataclass
class VerifyReport:
    trials: dict[str, int] = field(default_factory=dict)
    agreements: dict[str, int] = field(default_factory=dict)
    counterexamples: dict[str, Trial] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def summary(self) -> str:
        lines = []
        for op in OPERATION_PAIRS:
            n = self.trials.get(op, 0)
            if not n:
                continue
            agreed = self.agreements.get(op, 0)
            status = "pass" if agreed == n else "FAIL"
            lines.append(f"{op:<10} {agreed}/{n} agree  {status}")
        lines.append("result: " + ("all operations commute" if self.ok else "counterexamples found"))
        return "\n".join(lines)


def verify(
    trials: int = 200,
    max_symbols: int = 3,
    seed: int = 0,
    ops=tuple(OPERATION_PAIRS),
    intention_filter: str = "coherent",
) -> VerifyReport:
    """Round-robin over ``ops``, one random coherent program per trial."""
    rng = random.Random(seed)
    report = VerifyReport()
    for i in range(trials):
        op = ops[i % len(ops)]
        ag = random_coherent_program(rng, max_symbols)
        phi = random_argument(rng, op, ag)
        trial = run_trial(ag, op, phi, intention_filter)
        report.trials[op] = report.trials.get(op, 0) + 1
        if trial.agrees:
            report.agreements[op] = report.agreements.get(op, 0) + 1
        else:
            report.counterexamples.setdefault(op, trial)
    return report


def _small_programs(n_symbols: int, max_entries: int) -> Iterator[AgentProgram]:
    """Coherent plan-free programs ordered by number of base entries."""
    vocab = Vocabulary(SYMBOLS[:n_symbols])
    lits = [Literal(s, b) for s in vocab for b in (True, False)]
    clauses = [ConjClause(frozenset({l})) for l in lits]
    library = make_plan_library([])
    for size in range(max_entries + 1):
        # each slot: ("K", clause) or ("B"/"D", clause, rank)
        slots = [("K", c, 0) for c in clauses]
        slots += [(kind, c, r) for kind in ("B", "D") for r in range(1, size + 1) for c in clauses]
        for combo in itertools.combinations(slots, size):
            k = tuple(c.to_formula() for kind, c, _ in combo if kind == "K")
            if not literals_consistent(l for kind, c, _ in combo if kind == "K" for l in c.literals):
                continue
            b = [RankedFormula(phi, 0) for phi in k]
            d = list(b)
            b += [RankedFormula(c.to_formula(), r) for kind, c, r in combo if kind == "B"]
            d += [RankedFormula(c.to_formula(), r) for kind, c, r in combo if kind == "D"]
            ag = AgentProgram(vocab, library, k, StratifiedBase(tuple(b)), StratifiedBase(tuple(d)))
            if is_coherent(ag).ok:
                yield ag


def _small_arguments(op: str, vocab: Vocabulary):
    lits = [Literal(s, b) for s in vocab for b in (True, False)]
    if op in ("contractB", "contractD"):
        yield from (DnfFormula((ConjClause(frozenset({l})),)) for l in lits)
        for a, b in itertools.combinations(lits, 2):
            yield DnfFormula((ConjClause(frozenset({a})), ConjClause(frozenset({b}))))
    else:
        yield ConjClause()
        yield from (ConjClause(frozenset({l})) for l in lits)


def minimal_counterexample(op: str, max_symbols: int = 2, max_entries: int = 2) -> Trial | None:
    """First disagreement in order of vocabulary size, program size, argument size."""
    for n in range(1, max_symbols + 1):
        for ag in _small_programs(n, max_entries):
            for phi in _small_arguments(op, ag.vocab):
                if op == "announce" and not literals_consistent(
                    ag.knowledge_literals() | phi.literals
                ):
                    continue
                trial = run_trial(ag, op, phi)
                if not trial.agrees:
                    return trial
    return None


# ---------------------------------------------------------------------------
# Random models and formulas


def random_preorder(rng: random.Random, ids: list[int], density: float = 0.3) -> Preorder:
    pairs = [(a, b) for a in ids for b in ids if a != b and rng.random() < density]
    return Preorder.closure(ids, pairs)


def random_ranked_preorder(rng: random.Random, ids: list[int]) -> Preorder:
    return Preorder.from_ranks({w: rng.randint(0, len(ids)) for w in ids})


def random_library(rng, vocab, max_plans=2):
    entries = []
    for i in range(rng.randint(0, max_plans)):
        pre = random_clause(rng, vocab, 1)
        post = random_clause(rng, vocab, 2, min_literals=1, consistent=True)
        entries.append((f"a{i}", pre.to_formula(), post))
    return make_plan_library(entries)


def random_model(rng: random.Random, max_symbols: int = 3, ranked=False, distinct=False) -> AgentModel:
    """A random agent model.  ``ranked`` gives total preorders; ``distinct``
    forbids two worlds with the same valuation."""
    vocab = Vocabulary(SYMBOLS[: rng.randint(1, max_symbols)])
    universe = all_valuations(vocab)
    if distinct:
        valuations = [v for v in universe if rng.random() < 0.6]
    else:
        valuations = [rng.choice(universe) for _ in range(rng.randint(1, min(6, 2 * len(universe))))]
    worlds = [World(i, v) for i, v in enumerate(valuations)]
    ids = [w.id for w in worlds]
    make = random_ranked_preorder if ranked else random_preorder
    library = random_library(rng, vocab)
    intentions = frozenset(n for n in library.names if rng.random() < 0.5)
    return AgentModel(vocab, tuple(worlds), make(rng, ids), make(rng, ids), intentions, library)


_DYNAMIC = (DynAnnounce, DynUpgradeP, DynUpgradeD, DynContractP, DynContractD)


def random_propositional(rng, vocab, depth=2) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.08:
            return TOP
        if roll < 0.12:
            return BOT
        return Atom(rng.choice(vocab.symbols))
    kind = rng.choice(("not", "and", "or"))
    if kind == "not":
        return Not(random_propositional(rng, vocab, depth - 1))
    cls = And if kind == "and" else Or
    return cls(random_propositional(rng, vocab, depth - 1), random_propositional(rng, vocab, depth - 1))


def random_formula(rng, vocab, library=None, depth=3, dynamic=True) -> Formula:
    """A random AST over the core constructors."""
    plans = library.names if library is not None else ()
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if plans and roll < 0.1:
            return IntendAtom(rng.choice(plans))
        if roll < 0.18:
            return TOP if roll < 0.15 else BOT
        return Atom(rng.choice(vocab.symbols))
    kinds = ["not", "and", "or", "univ", "box"]
    if plans:
        kinds.append("plan")
    if dynamic:
        kinds.append("dyn")
    kind = rng.choice(kinds)
    sub = lambda: random_formula(rng, vocab, library, depth - 1, dynamic)  # noqa: E731
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "or":
        return Or(sub(), sub())
    if kind == "univ":
        return Univ(sub())
    if kind == "box":
        return rng.choice((BoxLeqP, BoxLtP, BoxLeqD, BoxLtD))(sub())
    if kind == "plan":
        return PlanBox(rng.choice(plans), sub())
    return rng.choice(_DYNAMIC)(random_propositional(rng, vocab, 2), sub())
