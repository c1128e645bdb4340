"""Explicit agent models and the possible-worlds evaluator.

Everything here is brute force on purpose: models list their worlds and
relations explicitly and formulas are checked globally, bottom-up, one
extension (set of world ids) per subformula.  The module is the reference
against which the program-level operations are verified.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

from .errors import (
    NotRanked,
    ResultNotPreorder,
    UnknownWorld,
    VocabularyMismatch,
    VocabularyTooLarge,
    WorldOutsideExtension,
)
from .plans import PlanLibrary
from .program import AgentProgram, RankedFormula, StratifiedBase
from .syntax import (
    BOT,
    And,
    Atom,
    Bot,
    BoxLeqD,
    BoxLeqP,
    BoxLtD,
    BoxLtP,
    DynAnnounce,
    DynContractD,
    DynContractP,
    DynUpgradeD,
    DynUpgradeP,
    Formula,
    IntendAtom,
    Not,
    Or,
    PlanBox,
    Top,
    Univ,
    Vocabulary,
    adm_int,
    believes,
    conjoin,
    disjoin,
    eval_prop,
    require_propositional,
)

DEFAULT_WORLD_CAP = 16


@dataclass(frozen=True)
class World:
    id: int
    valuation: frozenset[str]


@dataclass(frozen=True)
class Preorder:
    """A relation over world ids; ``(a, b)`` in ``pairs`` means ``a <= b``."""

    ids: frozenset[int]
    pairs: frozenset[tuple[int, int]]

    @classmethod
    def from_predicate(cls, ids: Iterable[int], leq: Callable[[int, int], bool]) -> "Preorder":
        ids = frozenset(ids)
        return cls(ids, frozenset((a, b) for a in ids for b in ids if leq(a, b)))

    @classmethod
    def total(cls, ids: Iterable[int]) -> "Preorder":
        return cls.from_predicate(ids, lambda a, b: True)

    @classmethod
    def from_ranks(cls, ranks: dict[int, int]) -> "Preorder":
        return cls.from_predicate(ranks, lambda a, b: ranks[a] <= ranks[b])

    @classmethod
    def closure(cls, ids: Iterable[int], pairs: Iterable[tuple[int, int]]) -> "Preorder":
        """Reflexive-transitive closure of ``pairs`` over ``ids``."""
        ids = sorted(set(ids))
        up = {a: {a} for a in ids}
        for a, b in pairs:
            up[a].add(b)
        for k in ids:
            for a in ids:
                if k in up[a]:
                    up[a] |= up[k]
        return cls(frozenset(ids), frozenset((a, b) for a in ids for b in up[a]))

    def leq(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def lt(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs and (b, a) not in self.pairs

    @cached_property
    def _below(self) -> dict[int, frozenset[int]]:
        below: dict[int, set[int]] = {w: set() for w in self.ids}
        for a, b in self.pairs:
            below[b].add(a)
        return {w: frozenset(s) for w, s in below.items()}

    @cached_property
    def _strictly_below(self) -> dict[int, frozenset[int]]:
        return {
            w: frozenset(a for a in below if (w, a) not in self.pairs)
            for w, below in self._below.items()
        }

    def below(self, w: int) -> frozenset[int]:
        """Worlds at least as good as ``w``."""
        return self._below[w]

    def strictly_below(self, w: int) -> frozenset[int]:
        return self._strictly_below[w]

    def restrict(self, ids: Iterable[int]) -> "Preorder":
        ids = frozenset(ids)
        return Preorder(ids, frozenset((a, b) for a, b in self.pairs if a in ids and b in ids))

    def is_reflexive(self) -> bool:
        return all((w, w) in self.pairs for w in self.ids)

    def is_transitive(self) -> bool:
        up: dict[int, set[int]] = {w: set() for w in self.ids}
        for a, b in self.pairs:
            up[a].add(b)
        return all(up[b] <= up[a] for a, b in self.pairs)

    def is_preorder(self) -> bool:
        within = all(a in self.ids and b in self.ids for a, b in self.pairs)
        return within and self.is_reflexive() and self.is_transitive()

    def is_total(self) -> bool:
        return all((a, b) in self.pairs or (b, a) in self.pairs for a in self.ids for b in self.ids)

    def ranks(self) -> dict[int, int]:
        """Rank of each world in a total preorder (0 = best)."""
        if not self.is_total():
            raise NotRanked("preorder is not total")
        levels = sorted({len(self.strictly_below(w)) for w in self.ids})
        position = {n: i for i, n in enumerate(levels)}
        return {w: position[len(self.strictly_below(w))] for w in self.ids}

    def strict_pairs(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a, b in self.pairs if (b, a) not in self.pairs)

    def hasse(self) -> list[tuple[int, int]]:
        """Transitive reduction of the strict part."""
        strict = self.strict_pairs()
        lt = set(strict)
        return [
            (a, b)
            for a, b in strict
            if not any((a, c) in lt and (c, b) in lt for c in self.ids)
        ]


@dataclass(frozen=True)
class AgentModel:
    vocab: Vocabulary
    worlds: tuple[World, ...]
    leq_p: Preorder
    leq_d: Preorder
    intentions: frozenset[str]
    library: PlanLibrary = field(default_factory=PlanLibrary)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "intentions", frozenset(self.intentions))

    @cached_property
    def ids(self) -> frozenset[int]:
        return frozenset(w.id for w in self.worlds)

    @cached_property
    def _by_id(self) -> dict[int, World]:
        return {w.id: w for w in self.worlds}

    def world(self, wid: int) -> World:
        try:
            return self._by_id[wid]
        except KeyError:
            raise UnknownWorld(f"no world with id {wid}") from None

    def valuation(self, wid: int) -> frozenset[str]:
        return self.world(wid).valuation

    def order(self, which: str) -> Preorder:
        return {"P": self.leq_p, "D": self.leq_d}[which]

    def replace(self, **changes) -> "AgentModel":
        values = dict(
            vocab=self.vocab,
            worlds=self.worlds,
            leq_p=self.leq_p,
            leq_d=self.leq_d,
            intentions=self.intentions,
            library=self.library,
        )
        values.update(changes)
        return AgentModel(**values)

    def check(self) -> "AgentModel":
        for name, rel in (("P", self.leq_p), ("D", self.leq_d)):
            if rel.ids != self.ids or not rel.is_preorder():
                raise ResultNotPreorder(f"plausibility/desirability order {name} is not a preorder")
        return self


# ---------------------------------------------------------------------------
# Evaluation


class _Checker:
    """Global model checker: memoises extensions of subformulas of one model."""

    def __init__(self, model: AgentModel):
        self.model = model
        self.all = model.ids
        self.memo: dict[int, tuple[Formula, frozenset[int]]] = {}
        self.derived: dict[tuple, AgentModel] = {}

    def ext(self, phi: Formula) -> frozenset[int]:
        key = id(phi)
        hit = self.memo.get(key)
        if hit is not None and hit[0] is phi:
            return hit[1]
        result = self._ext(phi)
        self.memo[key] = (phi, result)
        return result

    def _derived(self, key, build):
        m = self.derived.get(key)
        if m is None:
            m = self.derived[key] = build()
        return m

    def _ext(self, phi: Formula) -> frozenset[int]:
        m = self.model
        if isinstance(phi, Atom):
            return frozenset(w.id for w in m.worlds if phi.symbol in w.valuation)
        if isinstance(phi, Top):
            return self.all
        if isinstance(phi, Bot):
            return frozenset()
        if isinstance(phi, Not):
            return self.all - self.ext(phi.operand)
        if isinstance(phi, And):
            return self.ext(phi.left) & self.ext(phi.right)
        if isinstance(phi, Or):
            return self.ext(phi.left) | self.ext(phi.right)
        if isinstance(phi, Univ):
            return self.all if self.ext(phi.operand) == self.all else frozenset()
        if isinstance(phi, (BoxLeqP, BoxLtP, BoxLeqD, BoxLtD)):
            inner = self.ext(phi.operand)
            rel = m.leq_p if isinstance(phi, (BoxLeqP, BoxLtP)) else m.leq_d
            step = rel.below if isinstance(phi, (BoxLeqP, BoxLeqD)) else rel.strictly_below
            return frozenset(w for w in self.all if step(w) <= inner)
        if isinstance(phi, IntendAtom):
            m.library.get(phi.plan)
            return self.all if phi.plan in m.intentions else frozenset()
        if isinstance(phi, PlanBox):
            pre = self.ext(m.library.pre(phi.plan))
            updated = self._derived(("plan", phi.plan), lambda: update_plan(m, phi.plan))
            after = extension(updated, phi.operand)
            return frozenset(w for w in self.all if w not in pre or w in after)
        for cls, op in _DYNAMIC_OPS.items():
            if isinstance(phi, cls):
                transformed = self._derived((cls, phi.arg), lambda: op(m, phi.arg))
                after = extension(transformed, phi.operand)
                survivors = transformed.ids
                return frozenset(w for w in self.all if w not in survivors or w in after)
        raise TypeError(f"not a formula: {phi!r}")


def extension(model: AgentModel, phi: Formula) -> frozenset[int]:
    """Ids of the worlds of ``model`` where ``phi`` holds."""
    return _Checker(model).ext(phi)


def evaluate(model: AgentModel, wid: int, phi: Formula) -> bool:
    model.world(wid)
    return wid in extension(model, phi)


def valid(model: AgentModel, phi: Formula) -> bool:
    """``M |= phi``: truth at every world (vacuous on the empty model)."""
    return extension(model, phi) == model.ids


def _prop_ext(model: AgentModel, phi: Formula) -> frozenset[int]:
    require_propositional(phi, "argument")
    return frozenset(w.id for w in model.worlds if eval_prop(phi, w.valuation))


def min_worlds(model: AgentModel, order: str | Preorder, subset: Iterable[int]) -> frozenset[int]:
    rel = model.order(order) if isinstance(order, str) else order
    subset = frozenset(subset)
    return frozenset(
        w for w in subset if all(rel.leq(w, v) for v in subset if rel.leq(v, w))
    )


# ---------------------------------------------------------------------------
# Induced models


def induced_order(base: StratifiedBase, worlds: Iterable[World]) -> Preorder:
    """``w <= w'`` iff for every rank i, either ``w' |= base_i`` implies
    ``w |= base_i``, or some lower rank j has ``w |= base_j`` and ``w' not |= base_j``.
    """
    worlds = list(worlds)
    ranks = base.ranks()
    strata = [base.stratum(r) for r in ranks]
    sat = {
        w.id: tuple(all(eval_prop(phi, w.valuation) for phi in s) for s in strata)
        for w in worlds
    }

    def leq(a, b):
        sa, sb = sat[a], sat[b]
        for i in range(len(ranks)):
            if sb[i] and not sa[i]:
                if not any(sa[j] and not sb[j] for j in range(i)):
                    return False
        return True

    return Preorder.from_predicate(sat, leq)


def all_valuations(vocab: Vocabulary) -> list[frozenset[str]]:
    out = []
    for bits in itertools.product((False, True), repeat=len(vocab)):
        out.append(frozenset(s for s, b in zip(vocab, bits) if b))
    return out


def induced_model(ag: AgentProgram, world_cap: int = DEFAULT_WORLD_CAP) -> AgentModel:
    if len(ag.vocab) > world_cap:
        raise VocabularyTooLarge(
            f"{len(ag.vocab)} symbols exceeds the world cap of {world_cap}"
        )
    worlds = [
        World(i, val)
        for i, val in enumerate(all_valuations(ag.vocab))
        if all(eval_prop(k, val) for k in ag.knowledge)
    ]
    return AgentModel(
        vocab=ag.vocab,
        worlds=tuple(worlds),
        leq_p=induced_order(ag.beliefs, worlds),
        leq_d=induced_order(ag.desires, worlds),
        intentions=ag.intentions,
        library=ag.library,
    )


# ---------------------------------------------------------------------------
# Coherence in models


def _is_a_coherent(model: AgentModel, plan: str) -> bool:
    lib = model.library
    post = lib.post(plan).to_formula()
    return valid(model, believes(lib.pre(plan))) and valid(model, adm_int(post))


def max_coherent_intentions(model: AgentModel) -> frozenset[str]:
    """Plans of ``model.intentions`` with believed precondition and an
    admissible postcondition; the conditions are per plan, so this is the
    unique maximal coherent subset."""
    return frozenset(a for a in model.intentions if _is_a_coherent(model, a))


def is_coherent_model(model: AgentModel) -> bool:
    return max_coherent_intentions(model) == model.intentions


# ---------------------------------------------------------------------------
# Model transformations


def update_plan(model: AgentModel, plan: str) -> AgentModel:
    """Execute ``plan``: drop worlds failing its precondition and force its
    postcondition on the survivors.  Ids are kept, so worlds may end up with
    equal valuations."""
    p = model.library.get(plan)
    keep = _prop_ext(model, p.pre)
    forced_true = {l.symbol for l in p.post.literals if l.positive}
    forced_false = {l.symbol for l in p.post.literals if not l.positive}
    worlds = tuple(
        World(w.id, frozenset((w.valuation - forced_false) | forced_true))
        for w in model.worlds
        if w.id in keep
    )
    return model.replace(
        worlds=worlds, leq_p=model.leq_p.restrict(keep), leq_d=model.leq_d.restrict(keep)
    )


def _refilter(model: AgentModel) -> AgentModel:
    return model.replace(intentions=max_coherent_intentions(model))


def sem_announce(model: AgentModel, phi: Formula) -> AgentModel:
    keep = _prop_ext(model, phi)
    restricted = model.replace(
        worlds=tuple(w for w in model.worlds if w.id in keep),
        leq_p=model.leq_p.restrict(keep),
        leq_d=model.leq_d.restrict(keep),
    )
    return _refilter(restricted)


def _upgrade(rel: Preorder, good: frozenset[int]) -> Preorder:
    pairs = {(a, b) for a, b in rel.pairs if not (a not in good and b in good)}
    pairs |= {(a, b) for a in rel.ids for b in rel.ids if a in good and b not in good}
    out = Preorder(rel.ids, frozenset(pairs))
    if not out.is_preorder():
        raise ResultNotPreorder("radical upgrade produced a non-preorder")
    return out


def sem_upgrade_p(model: AgentModel, phi: Formula) -> AgentModel:
    new = model.replace(leq_p=_upgrade(model.leq_p, _prop_ext(model, phi)))
    return _refilter(new)


def sem_upgrade_d(model: AgentModel, phi: Formula) -> AgentModel:
    new = model.replace(leq_d=_upgrade(model.leq_d, _prop_ext(model, phi)))
    return _refilter(new)


def _chain_degrees(rel: Preorder, subset: frozenset[int]) -> dict[int, int]:
    """Longest strict chain inside ``subset`` ending at each member."""
    depth: dict[int, int] = {}

    def visit(w):
        if w not in depth:
            preds = [v for v in rel.strictly_below(w) if v in subset]
            depth[w] = 1 + max(map(visit, preds)) if preds else 0
        return depth[w]

    for w in sorted(subset):
        visit(w)
    return depth


def degree(model: AgentModel, order: str | Preorder, phi: Formula, wid: int) -> int:
    rel = model.order(order) if isinstance(order, str) else order
    ext = extension(model, phi)
    if wid not in ext:
        raise WorldOutsideExtension(f"world {wid} does not satisfy {phi}")
    return _chain_degrees(rel, ext)[wid]


def _contract(rel: Preorder, good: frozenset[int]) -> Preorder:
    bad = rel.ids - good
    d_good = _chain_degrees(rel, good)
    d_bad = _chain_degrees(rel, bad)
    pairs = set()
    for a in rel.ids:
        for b in rel.ids:
            if (a in good) == (b in good):
                if rel.leq(a, b):
                    pairs.add((a, b))
            elif a in good:
                if d_good[a] < d_bad[b]:
                    pairs.add((a, b))
            elif d_bad[a] < d_good[b]:
                pairs.add((a, b))
    out = Preorder.closure(rel.ids, pairs)
    if not out.is_preorder():
        raise ResultNotPreorder("lexicographic contraction produced a non-preorder")
    return out


def sem_contract_p(model: AgentModel, phi: Formula) -> AgentModel:
    new = model.replace(leq_p=_contract(model.leq_p, _prop_ext(model, phi)))
    return _refilter(new)


def sem_contract_d(model: AgentModel, phi: Formula) -> AgentModel:
    new = model.replace(leq_d=_contract(model.leq_d, _prop_ext(model, phi)))
    return _refilter(new)


_DYNAMIC_OPS = {
    DynAnnounce: sem_announce,
    DynUpgradeP: sem_upgrade_p,
    DynUpgradeD: sem_upgrade_d,
    DynContractP: sem_contract_p,
    DynContractD: sem_contract_d,
}


# ---------------------------------------------------------------------------
# Comparison and extraction


def models_equal(m1: AgentModel, m2: AgentModel) -> bool:
    """Equality up to world identity: worlds are compared by valuation,
    as multisets, and relations as multisets of valuation pairs."""
    if set(m1.vocab) != set(m2.vocab):
        raise VocabularyMismatch(f"{m1.vocab} vs {m2.vocab}")
    if Counter(w.valuation for w in m1.worlds) != Counter(w.valuation for w in m2.worlds):
        return False
    for rel in ("leq_p", "leq_d"):
        if _pair_multiset(m1, getattr(m1, rel)) != _pair_multiset(m2, getattr(m2, rel)):
            return False
    return m1.intentions == m2.intentions


def _pair_multiset(model: AgentModel, rel: Preorder) -> Counter:
    return Counter((model.valuation(a), model.valuation(b)) for a, b in rel.pairs)


def describe_valuation(vocab: Vocabulary, valuation: frozenset[str]) -> Formula:
    return conjoin(Atom(s) if s in valuation else Not(Atom(s)) for s in vocab)


def _describe_set(vocab: Vocabulary, valuations: list[frozenset[str]]) -> Formula:
    return disjoin(describe_valuation(vocab, v) for v in valuations)


def _ranked_base(model, rel, knowledge, order_key) -> StratifiedBase:
    ranks = rel.ranks()
    entries = [RankedFormula(k, 0) for k in knowledge]
    for i in range(max(ranks.values(), default=0)):
        members = sorted((model.valuation(w) for w, r in ranks.items() if r <= i), key=order_key)
        entries.append(RankedFormula(_describe_set(model.vocab, members), i + 1))
    return StratifiedBase(tuple(entries))


def extract_program(model: AgentModel) -> AgentProgram:
    """Build a program whose induced model equals ``model`` (ranked models only)."""
    for name, rel in (("plausibility", model.leq_p), ("desirability", model.leq_d)):
        if not rel.is_total():
            raise NotRanked(f"{name} order is not total")
    valuations = [w.valuation for w in model.worlds]
    if len(set(valuations)) != len(valuations):
        raise NotRanked("model has worlds with identical valuations")
    vocab = model.vocab
    universe = all_valuations(vocab)
    position = {v: i for i, v in enumerate(universe)}

    def order_key(v):
        return position[v]

    if len(valuations) == len(universe):
        knowledge: tuple[Formula, ...] = ()
    elif not valuations:
        knowledge = (BOT,)
    else:
        knowledge = (_describe_set(vocab, sorted(valuations, key=order_key)),)
    return AgentProgram(
        vocab=vocab,
        library=model.library,
        knowledge=knowledge,
        beliefs=_ranked_base(model, model.leq_p, knowledge, order_key),
        desires=_ranked_base(model, model.leq_d, knowledge, order_key),
        intentions=model.intentions,
    )


# ---------------------------------------------------------------------------
# Export


def dump_model(model: AgentModel) -> str:
    lines = [f"vocab: {model.vocab}", f"worlds: {len(model.worlds)}"]
    p_ranks = model.leq_p.ranks() if model.leq_p.is_total() else None
    d_ranks = model.leq_d.ranks() if model.leq_d.is_total() else None
    for w in sorted(model.worlds, key=lambda w: w.id):
        extra = []
        if p_ranks is not None:
            extra.append(f"P-rank {p_ranks[w.id]}")
        if d_ranks is not None:
            extra.append(f"D-rank {d_ranks[w.id]}")
        suffix = f"  [{', '.join(extra)}]" if extra else ""
        lines.append(f"  w{w.id}: {_label(model.vocab, w.valuation)}{suffix}")
    for name, rel, ranks in (("P", model.leq_p, p_ranks), ("D", model.leq_d, d_ranks)):
        if ranks is None:
            pairs = " ".join(f"w{a}<w{b}" for a, b in rel.hasse())
            lines.append(f"strict {name} (covering pairs): {pairs or '-'}")
    lines.append("intentions: " + (" ".join(sorted(model.intentions)) or "-"))
    return "\n".join(lines)


def _label(vocab: Vocabulary, valuation: frozenset[str]) -> str:
    return " ".join(s if s in valuation else f"~{s}" for s in vocab) or "(no symbols)"


def export_dot(model: AgentModel) -> str:
    """Graphviz rendering: solid edges are strict plausibility, dashed edges
    strict desirability; both transitively reduced, better world first."""
    lines = ["digraph agent_model {", "  rankdir=BT;"]
    for w in sorted(model.worlds, key=lambda w: w.id):
        atoms = ",".join(s for s in model.vocab if s in w.valuation) or "{}"
        lines.append(f'  w{w.id} [label="w{w.id}: {atoms}"];')
    for a, b in model.leq_p.hasse():
        lines.append(f"  w{a} -> w{b} [style=solid];")
    for a, b in model.leq_d.hasse():
        lines.append(f"  w{a} -> w{b} [style=dashed];")
    lines.append("}")
    return "\n".join(lines)
