import random

from dplagent.oracle import (
    minimal_counterexample,
    random_argument,
    random_coherent_program,
    random_model,
    run_trial,
    verify,
)
from dplagent.program import is_coherent
from dplagent.syntax import ConjClause, DnfFormula, Literal, parse_formula

from helpers import program


def test_random_programs_are_coherent_and_conjunctive():
    rng = random.Random(11)
    with_intentions = 0
    for _ in range(200):
        ag = random_coherent_program(rng, 4)
        assert ag.is_conjunctive() and is_coherent(ag).ok
        with_intentions += bool(ag.intentions)
    assert with_intentions > 20


def test_random_arguments_match_operation():
    rng = random.Random(2)
    ag = random_coherent_program(rng, 3)
    assert isinstance(random_argument(rng, "announce", ag), ConjClause)
    phi = random_argument(rng, "contractB", ag)
    assert isinstance(phi, DnfFormula) and all(len(c) == 1 for c in phi.clauses)


def test_random_models_are_preorders():
    rng = random.Random(5)
    for _ in range(50):
        m = random_model(rng, 3)
        assert m.check() is m
        ranked = random_model(rng, 3, ranked=True, distinct=True)
        assert ranked.leq_p.is_total()
        vals = [w.valuation for w in ranked.worlds]
        assert len(set(vals)) == len(vals)


def test_verify_is_deterministic():
    a = verify(trials=25, max_symbols=3, seed=4)
    b = verify(trials=25, max_symbols=3, seed=4)
    assert a.summary() == b.summary()
    assert sum(a.trials.values()) == 25


def test_single_trial_agrees_for_revision():
    ag = program(knowledge=["p"], beliefs=[("q", 1)], desires=[("r", 1)],
                 plans=[("a", "p", "r")], intend=["a"])
    assert run_trial(ag, "reviseB", ConjClause.of("~q")).agrees
    assert run_trial(ag, "announce", ConjClause.of("s")).agrees


def test_minimal_contraction_counterexample():
    trial = minimal_counterexample("contractB")
    assert list(trial.program.vocab) == ["p"]
    assert trial.program.knowledge == () and len(trial.program.beliefs) == 0
    assert trial.argument == DnfFormula((ConjClause(frozenset({Literal("p")})),))
    # the program side stays total; the model side leaves the two worlds unrelated
    assert trial.syntactic.leq_p.is_total()
    assert not trial.semantic.leq_p.is_total()


def test_no_small_counterexample_for_expansion_and_revision():
    for op in ("announce", "reviseB", "reviseD"):
        assert minimal_counterexample(op, max_symbols=2, max_entries=2) is None


def test_counterexample_is_reproducible_from_text():
    trial = minimal_counterexample("contractD")
    again = run_trial(trial.program, "contractD", parse_formula(str(trial.argument)))
    assert not again.agrees
