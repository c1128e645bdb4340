"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
are produced; they are also collected in the terminal summary.
"""

import itertools
import random
import statistics
import time
from pathlib import Path

import pytest

from dplagent.oracle import (
    format_trial,
    minimal_counterexample,
    random_argument,
    random_coherent_program,
    random_dnf,
    random_formula,
    random_model,
    random_propositional,
    run_trial,
)
from dplagent.plans import make_plan_library
from dplagent.program import RankedFormula, StratifiedBase, max_consistent, query
from dplagent.semantics import (
    AgentModel,
    Preorder,
    World,
    evaluate,
    extension,
    extract_program,
    induced_model,
    models_equal,
    sem_announce,
    sem_contract_d,
    sem_contract_p,
    sem_upgrade_d,
    sem_upgrade_p,
    valid,
)
from dplagent.syntax import (
    TOP,
    Atom,
    ConjClause,
    DynAnnounce,
    DynContractD,
    DynContractP,
    DynUpgradeD,
    DynUpgradeP,
    IntendAtom,
    Literal,
    Vocabulary,
    believes,
    disjoin,
    goal,
    intends_that,
    knows,
    min_d,
    min_p,
    parse_formula,
    print_formula,
    conjoin,
    Not,
)

from oracles import brute_force_max

BASELINES = Path(__file__).resolve().parent / "baselines"


# --- 1. Max oracle -----------------------------------------------------------

SYMS3 = ("p", "q", "r")
LITERALS3 = [Literal(s, pos) for s in SYMS3 for pos in (True, False)]
# every formula with at most two literals, inconsistent pairs included
CLAUSES3 = [frozenset(c) for k in range(3) for c in itertools.combinations(LITERALS3, k)]
STRATA3 = [frozenset([c]) for c in CLAUSES3] + [
    frozenset(pair) for pair in itertools.combinations(CLAUSES3, 2)
]

# symmetries of the literal set: permute symbols, flip signs
GROUP3 = [
    (dict(zip(SYMS3, perm)), dict(zip(SYMS3, flips)))
    for perm in itertools.permutations(SYMS3)
    for flips in itertools.product((False, True), repeat=3)
]


def _act(g, stratum):
    rename, flip = g
    return frozenset(
        frozenset(Literal(rename[l.symbol], l.positive ^ flip[l.symbol]) for l in clause)
        for clause in stratum
    )


def _orbit_reps(items, group):
    reps, seen = [], set()
    for s in items:
        if s in seen:
            continue
        reps.append(s)
        seen.update(_act(g, s) for g in group)
    return reps


def _stabilizer(group, stratum):
    return [g for g in group if _act(g, stratum) == stratum]


def _max_instances():
    """One base per orbit of (stratum, stratum, stratum) sequences.

    Each stratum ranges over representatives modulo the symmetries that fix
    the strata chosen before it.  Max commutes with these symmetries (see the
    equivariance property test), so this covers every base.
    """
    yield ()
    for s1 in _orbit_reps(STRATA3, GROUP3):
        yield (s1,)
        fix1 = _stabilizer(GROUP3, s1)
        for s2 in _orbit_reps(STRATA3, fix1):
            yield (s1, s2)
            for s3 in _orbit_reps(STRATA3, _stabilizer(fix1, s2)):
                yield (s1, s2, s3)


# orbits of sequences of at most three strata under the 48 symmetries
MAX_INSTANCES = 1 + 21 + 1993 + 378873  # Burnside count of orbits


def test_max_oracle_exhaustive(acceptance):
    assert len(CLAUSES3) == 22 and len(STRATA3) == 253 and len(GROUP3) == 48
    entries = {
        (clause, rank): RankedFormula(ConjClause(clause).to_formula(), rank)
        for clause in CLAUSES3
        for rank in range(3)
    }
    start = time.perf_counter()
    n = mismatches = 0
    for strata in _max_instances():
        base = StratifiedBase(tuple(
            entries[clause, rank] for rank, stratum in enumerate(strata) for clause in stratum
        ))
        unions = [frozenset().union(*s) for s in strata]
        n += 1
        mismatches += max_consistent(base) != brute_force_max(unions, SYMS3)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60
    acceptance(1, "Max vs brute-force oracle", ok,
               f"{n - mismatches}/{n} bases up to symmetry agree in {elapsed:.1f}s")
    assert n == MAX_INSTANCES
    assert ok


# --- 2. attitude correspondence ----------------------------------------------


@pytest.fixture(scope="module")
def correspondence():
    rng = random.Random(2)
    counts = dict.fromkeys(("K", "B", "G", "I(plan)", "Int"), 0)
    totals = dict.fromkeys(counts, 0)
    start = time.perf_counter()
    for _ in range(1000):
        ag = random_coherent_program(rng, 4)
        m = induced_model(ag)
        for plan in ag.library:
            totals["I(plan)"] += 1
            counts["I(plan)"] += valid(m, IntendAtom(plan.name)) == (plan.name in ag.intentions)
        for _ in range(10):
            dnf = random_dnf(rng, ag.vocab)
            phi = dnf.to_formula()
            for att, encode in (("K", knows), ("B", believes), ("G", goal)):
                totals[att] += 1
                counts[att] += query(ag, att, dnf) == valid(m, encode(phi))
            totals["Int"] += 1
            counts["Int"] += query(ag, "I", dnf) == valid(m, intends_that(phi, ag.library))
    return counts, totals, time.perf_counter() - start


def test_attitude_correspondence(acceptance, correspondence):
    counts, totals, elapsed = correspondence
    detail = ", ".join(f"{k} {counts[k]}/{totals[k]}" for k in counts) + f" in {elapsed:.1f}s"
    acceptance(2, "attitude correspondence", counts == totals and elapsed < 120, detail)
    for att in ("K", "B", "G", "I(plan)"):
        assert counts[att] == totals[att], att
    assert elapsed < 120


@pytest.mark.xfail(
    strict=True,
    reason="the program intention query and the semantic Int encoding are "
    "different notions; see the decisions ledger",
)
def test_int_clause_correspondence(correspondence):
    counts, totals, _ = correspondence
    # observed: 9414/10000 with these seeds
    assert counts["Int"] == totals["Int"]


def test_int_divergence_is_two_sided():
    ag_text = """\
vocab: p q r
plan a1 { pre: top; post: ~q }
knowledge { r }
belief 0 { r }
belief 1 { ~p & q }
desire 0 { r }
desire 1 { ~p & ~q }
intend a1
"""
    from dplagent import agentfile

    ag = agentfile.loads(ag_text)
    m = induced_model(ag)

    def both(text):
        phi = parse_formula(text, ag.vocab)
        return query(ag, "I", phi), valid(m, intends_that(phi, ag.library))

    # a tautology is never an admissible intention, but ~q is a postcondition
    assert both("q | ~q") == (True, False)
    # the plan reaches ~p & ~q from a state believed to satisfy ~p
    assert both("~p & ~q") == (False, True)
    assert both("~q") == (True, True)


# --- 3-5. commutation --------------------------------------------------------


def _commutation(op, seed, trials=1000):
    rng = random.Random(seed)
    agreed = 0
    first_failure = None
    start = time.perf_counter()
    for _ in range(trials):
        ag = random_coherent_program(rng, 4)
        trial = run_trial(ag, op, random_argument(rng, op, ag))
        agreed += trial.agrees
        if not trial.agrees and first_failure is None:
            first_failure = trial
    return agreed, time.perf_counter() - start, first_failure


def test_announcement_commutation(acceptance):
    agreed, elapsed, _ = _commutation("announce", 3)
    ok = agreed == 1000 and elapsed < 120
    acceptance(3, "announcement commutation", ok, f"{agreed}/1000 agree in {elapsed:.1f}s")
    assert ok


@pytest.mark.parametrize("op, seed", [("reviseB", 41), ("reviseD", 42)])
def test_upgrade_commutation(acceptance, op, seed):
    agreed, elapsed, _ = _commutation(op, seed)
    ok = agreed == 1000 and elapsed < 120
    acceptance(4, f"upgrade commutation ({op})", ok, f"{agreed}/1000 agree in {elapsed:.1f}s")
    assert ok


# frozen from the recorded run; a change means the contraction behaviour moved
CONTRACTION_AGREEMENT = {"contractB": 397, "contractD": 440}


@pytest.mark.parametrize("op, seed", [("contractB", 51), ("contractD", 52)])
def test_contraction_commutation(acceptance, op, seed):
    agreed, elapsed, failure = _commutation(op, seed)
    minimal = minimal_counterexample(op)
    artifact = format_trial(minimal) if minimal else ""
    baseline = (BASELINES / f"{op}_counterexample.txt").read_text()
    matches = agreed == 1000 or (failure is not None and artifact == baseline)
    ok = matches and elapsed < 120
    verdict = "full agreement" if agreed == 1000 else "minimal counterexample emitted, matches baseline"
    acceptance(5, f"contraction commutation ({op})", ok,
               f"{agreed}/1000 agree in {elapsed:.1f}s; {verdict}")
    assert artifact == baseline
    assert agreed == CONTRACTION_AGREEMENT[op]
    assert ok


# --- 6. tractability ---------------------------------------------------------


def _sized_base(rng, n):
    symbols = [f"x{i}" for i in range(max(4, n // 4))]
    items, size = [], 0
    while size < n:
        k = min(rng.randint(1, 4), n - size)
        clause = ConjClause(frozenset(
            Literal(rng.choice(symbols), rng.random() < 0.5) for _ in range(k)
        ))
        items.append((clause, rng.randrange(max(1, n // 8))))
        size += len(clause)
    return StratifiedBase.of(items)


def test_max_tractability(acceptance):
    rng = random.Random(6)
    sizes = [100, 200, 400, 800, 1600, 3200]
    medians = []
    for n in sizes:
        base = _sized_base(rng, n)
        runs = []
        for _ in range(5):
            t = time.perf_counter()
            max_consistent(base)
            runs.append(time.perf_counter() - t)
        medians.append(statistics.median(runs))
    ratios = [b / a for a, b in zip(medians, medians[1:])]
    ok = max(ratios) <= 10 and medians[-1] < 5
    acceptance(6, "Max tractability", ok,
               "doubling ratios " + " ".join(f"{r:.1f}" for r in ratios)
               + f"; n=3200 median {medians[-1] * 1000:.1f}ms")
    assert ok


# --- 7. dynamic modalities ---------------------------------------------------

DYNAMIC = [
    (DynAnnounce, sem_announce),
    (DynUpgradeP, sem_upgrade_p),
    (DynUpgradeD, sem_upgrade_d),
    (DynContractP, sem_contract_p),
    (DynContractD, sem_contract_d),
]


def test_dynamic_modality_reduction(acceptance):
    rng = random.Random(7)
    checked = agreed = 0
    for _ in range(500):
        m = random_model(rng, 3)
        chi = random_propositional(rng, m.vocab)
        psi = random_formula(rng, m.vocab, m.library, depth=3)
        w = rng.choice(m.worlds).id
        for node, op in DYNAMIC:
            after = op(m, chi)
            if w not in after.ids:
                continue
            checked += 1
            agreed += evaluate(m, w, node(chi, psi)) == evaluate(after, w, psi)
    ok = agreed == checked
    acceptance(7, "dynamic modality reduction", ok,
               f"{agreed}/{checked} surviving-world cases over 500 tuples x 5 modalities")
    assert checked > 2000
    assert ok


# --- 8. mu law ---------------------------------------------------------------


def _all_preorders(n):
    ids = range(n)
    off = [(a, b) for a in ids for b in ids if a != b]
    for bits in itertools.product((False, True), repeat=len(off)):
        pairs = {(a, a) for a in ids} | {p for p, b in zip(off, bits) if b}
        if all((a, c) in pairs for a, b in pairs for b2, c in pairs if b == b2):
            yield Preorder(frozenset(ids), frozenset(pairs))


def _truth_functions(vocab):
    """One propositional formula per truth function over ``vocab``."""
    valuations = [frozenset(s for s, b in zip(vocab.symbols, bits) if b)
                  for bits in itertools.product((False, True), repeat=len(vocab))]

    def describe(v):
        return conjoin(Atom(s) if s in v else Not(Atom(s)) for s in vocab)

    for chosen in itertools.product((False, True), repeat=len(valuations)):
        yield disjoin(describe(v) for v, c in zip(valuations, chosen) if c)


def _minimal(rel, subset):
    return frozenset(w for w in subset
                     if not any(rel.leq(v, w) and not rel.leq(w, v) for v in subset))


def test_mu_law_exhaustive(acceptance):
    vocab = Vocabulary(("p", "q"))
    phis = list(_truth_functions(vocab))
    valuations = [frozenset(), frozenset("p"), frozenset("q"), frozenset("pq")]
    lib = make_plan_library([])
    checked = agreed = 0
    for n in (1, 2, 3):
        orders = list(_all_preorders(n))
        assert len(orders) == {1: 1, 2: 4, 3: 29}[n]
        for rel in orders:
            for vals in itertools.product(valuations, repeat=n):
                worlds = tuple(World(i, v) for i, v in enumerate(vals))
                m = AgentModel(vocab, worlds, rel, rel, frozenset(), lib)
                for phi in phis:
                    ext = extension(m, phi)
                    checked += 2
                    agreed += extension(m, min_p(phi)) == _minimal(rel, ext)
                    agreed += extension(m, min_d(phi)) == _minimal(rel, ext)
    ok = agreed == checked
    acceptance(8, "mu-operator law", ok,
               f"{agreed}/{checked} (preorders on <=3 worlds x 16 truth functions, both orders)")
    assert len(phis) == 16
    assert ok


# --- 9. extraction -----------------------------------------------------------


def test_extraction_roundtrip(acceptance):
    rng = random.Random(9)
    n = agreed = 0
    for _ in range(600):
        m = random_model(rng, 3, ranked=True, distinct=True)
        n += 1
        agreed += models_equal(induced_model(extract_program(m)), m)
    ok = agreed == n
    acceptance(9, "extraction round-trip", ok, f"{agreed}/{n} ranked models")
    assert ok


# --- 10. parser --------------------------------------------------------------


def test_parser_roundtrip(acceptance):
    rng = random.Random(10)
    vocab = Vocabulary(("p", "q", "r"))
    lib = make_plan_library([
        ("go", Atom("p"), ConjClause.of("q")),
        ("stay", TOP, ConjClause.of("~r")),
    ])
    n = agreed = 0
    for _ in range(1000):
        phi = random_formula(rng, vocab, lib, depth=rng.randint(1, 5))
        n += 1
        agreed += parse_formula(print_formula(phi), vocab, lib) == phi
    ok = agreed == n
    acceptance(10, "parser round-trip", ok, f"{agreed}/{n} ASTs")
    assert ok
