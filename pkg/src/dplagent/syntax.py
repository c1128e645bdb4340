"""Formula language: AST, propositional fragments, parser and printer.

The AST covers the core modal language (atoms, boolean connectives, the
universal modality, the four preference boxes, plan boxes, intention atoms)
plus the five dynamic modalities.  Abbreviations such as ``B``, ``G`` or
``Int`` are expanded at construction time and never appear as nodes.

Concrete syntax (whitespace-insensitive, ``->`` is right-associative)::

    formula := orf ("->" formula)?
    orf     := andf ("|" andf)*
    andf    := unary ("&" unary)*
    unary   := "~" unary | box unary | named | atom
    box     := "[<=P]" | "[<P]" | "[<=D]" | "[<D]" | "<<=P>" | "<<P>"
             | "<<=D>" | "<<D>" | "[" PLAN "]" | "[!" formula "]"
             | "[upP" formula "]" | "[upD" formula "]"
             | "[downP" formula "]" | "[downD" formula "]"
    named   := ("A"|"E"|"K"|"B"|"G"|"AdmInt"|"Int"|"min_P"|"min_D") "(" formula ")"
             | "I" "(" PLAN ")"
    atom    := IDENT | "top" | "bot" | "(" formula ")"
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import reduce
from typing import TYPE_CHECKING, Iterable, Iterator

from .errors import (
    InvalidVocabulary,
    NotConjunctive,
    NotDnf,
    NotPropositional,
    ParseError,
    UnknownAbbreviation,
    UnknownPlan,
    UnknownSymbol,
)

if TYPE_CHECKING:
    from .plans import PlanLibrary


KEYWORDS = frozenset(
    {"A", "E", "K", "B", "G", "AdmInt", "Int", "I", "min_P", "min_D", "top", "bot"}
)
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Vocabulary:
    """Ordered set of propositional symbols.

    The order is the canonical world encoding used by the semantics module.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(set(symbols)) != len(symbols):
            raise InvalidVocabulary(f"duplicate symbols in vocabulary: {symbols}")
        for s in symbols:
            if not isinstance(s, str) or not _IDENT_RE.match(s):
                raise InvalidVocabulary(f"invalid symbol name {s!r}")
            if s in KEYWORDS:
                raise InvalidVocabulary(f"{s!r} is a reserved word")

    @classmethod
    def of(cls, *symbols: str) -> "Vocabulary":
        if len(symbols) == 1 and not isinstance(symbols[0], str):
            symbols = tuple(symbols[0])
        return cls(tuple(symbols))

    def __contains__(self, symbol) -> bool:
        return symbol in self.symbols

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return " ".join(self.symbols)


# ---------------------------------------------------------------------------
# Propositional fragments


@dataclass(frozen=True, order=True)
class Literal:
    symbol: str
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.symbol, not self.positive)

    def holds(self, true_symbols) -> bool:
        return (self.symbol in true_symbols) == self.positive

    def to_formula(self) -> "Formula":
        atom = Atom(self.symbol)
        return atom if self.positive else Not(atom)

    def __str__(self) -> str:
        return self.symbol if self.positive else f"~{self.symbol}"

    @classmethod
    def parse(cls, text: str) -> "Literal":
        text = text.strip()
        if text.startswith("~"):
            return cls(text[1:].strip(), False)
        return cls(text, True)


def literals_consistent(literals: Iterable[Literal]) -> bool:
    pos, neg = set(), set()
    for lit in literals:
        (pos if lit.positive else neg).add(lit.symbol)
    return pos.isdisjoint(neg)


@dataclass(frozen=True)
class ConjClause:
    """A conjunction of literals; the empty clause is ``top``."""

    literals: frozenset[Literal] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "literals", frozenset(self.literals))

    @classmethod
    def of(cls, *lits: Literal | str) -> "ConjClause":
        return cls(frozenset(l if isinstance(l, Literal) else Literal.parse(l) for l in lits))

    def is_consistent(self) -> bool:
        return literals_consistent(self.literals)

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(l.symbol for l in self.literals)

    def holds(self, true_symbols) -> bool:
        return all(l.holds(true_symbols) for l in self.literals)

    def sorted_literals(self) -> list[Literal]:
        return sorted(self.literals)

    def to_formula(self) -> "Formula":
        return conjoin(l.to_formula() for l in self.sorted_literals())

    def __iter__(self):
        return iter(self.sorted_literals())

    def __len__(self) -> int:
        return len(self.literals)

    def __str__(self) -> str:
        if not self.literals:
            return "top"
        return " & ".join(str(l) for l in self.sorted_literals())


@dataclass(frozen=True)
class DnfFormula:
    """A disjunction of conjunctive clauses, kept in textual order."""

    clauses: tuple[ConjClause, ...]

    def __post_init__(self):
        clauses = tuple(self.clauses)
        if not clauses:
            raise NotDnf("a DNF formula needs at least one clause")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def of(cls, *clauses) -> "DnfFormula":
        return cls(tuple(c if isinstance(c, ConjClause) else ConjClause.of(*c) for c in clauses))

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset().union(*(c.symbols for c in self.clauses))

    def holds(self, true_symbols) -> bool:
        return any(c.holds(true_symbols) for c in self.clauses)

    def to_formula(self) -> "Formula":
        return disjoin(c.to_formula() for c in self.clauses)

    def __str__(self) -> str:
        if len(self.clauses) == 1:
            return str(self.clauses[0])
        return " | ".join(f"({c})" if len(c) > 1 else str(c) for c in self.clauses)


def entails(literals: Iterable[Literal], dnf: DnfFormula) -> bool:
    """Classical entailment of ``dnf`` by a consistent set of literals.

    Clauses are first evaluated three-valued under the partial assignment;
    only if that is inconclusive are the query's unfixed symbols enumerated.
    """
    fixed = {l.symbol: l.positive for l in literals}
    open_clauses = []
    for clause in dnf.clauses:
        undecided = []
        falsified = False
        for lit in clause.literals:
            value = fixed.get(lit.symbol)
            if value is None:
                undecided.append(lit)
            elif value != lit.positive:
                falsified = True
                break
        if falsified:
            continue
        if not undecided:
            return True
        open_clauses.append(undecided)
    if not open_clauses:
        return False
    free = sorted({l.symbol for c in open_clauses for l in c})
    for bits in itertools.product((False, True), repeat=len(free)):
        assignment = dict(zip(free, bits))
        if not any(all(assignment[l.symbol] == l.positive for l in c) for c in open_clauses):
            return False
    return True


# ---------------------------------------------------------------------------
# Modal AST


class Formula:
    """Base class of all AST nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    symbol: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Univ(Formula):
    operand: Formula


@dataclass(frozen=True)
class BoxLeqP(Formula):
    operand: Formula


@dataclass(frozen=True)
class BoxLtP(Formula):
    operand: Formula


@dataclass(frozen=True)
class BoxLeqD(Formula):
    operand: Formula


@dataclass(frozen=True)
class BoxLtD(Formula):
    operand: Formula


@dataclass(frozen=True)
class PlanBox(Formula):
    plan: str
    operand: Formula


@dataclass(frozen=True)
class IntendAtom(Formula):
    plan: str


@dataclass(frozen=True)
class DynAnnounce(Formula):
    arg: Formula
    operand: Formula


@dataclass(frozen=True)
class DynUpgradeP(Formula):
    arg: Formula
    operand: Formula


@dataclass(frozen=True)
class DynUpgradeD(Formula):
    arg: Formula
    operand: Formula


@dataclass(frozen=True)
class DynContractP(Formula):
    arg: Formula
    operand: Formula


@dataclass(frozen=True)
class DynContractD(Formula):
    arg: Formula
    operand: Formula


TOP = Top()
BOT = Bot()

BOXES = (BoxLeqP, BoxLtP, BoxLeqD, BoxLtD)
DYNAMIC = (DynAnnounce, DynUpgradeP, DynUpgradeD, DynContractP, DynContractD)
PROPOSITIONAL = (Atom, Top, Bot, Not, And, Or)


def conjoin(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TOP
    return reduce(And, parts)


def disjoin(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return BOT
    return reduce(Or, parts)


def is_propositional(phi: Formula) -> bool:
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, (Atom, Top, Bot)):
            continue
        if isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, (And, Or)):
            stack.extend((node.left, node.right))
        else:
            return False
    return True


def require_propositional(phi: Formula, what: str = "formula") -> Formula:
    if not is_propositional(phi):
        raise NotPropositional(f"{what} must be propositional: {print_formula(phi)}")
    return phi


def eval_prop(phi: Formula, true_symbols) -> bool:
    """Truth value of a propositional formula under a valuation."""
    if isinstance(phi, Atom):
        return phi.symbol in true_symbols
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Not):
        return not eval_prop(phi.operand, true_symbols)
    if isinstance(phi, And):
        return eval_prop(phi.left, true_symbols) and eval_prop(phi.right, true_symbols)
    if isinstance(phi, Or):
        return eval_prop(phi.left, true_symbols) or eval_prop(phi.right, true_symbols)
    raise NotPropositional(f"not propositional: {print_formula(phi)}")


def symbols_of(phi: Formula) -> frozenset[str]:
    out = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            out.add(node.symbol)
        for name in ("operand", "left", "right", "arg"):
            child = getattr(node, name, None)
            if child is not None:
                stack.append(child)
    return frozenset(out)


def plans_of(phi: Formula) -> frozenset[str]:
    out = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, (PlanBox, IntendAtom)):
            out.add(node.plan)
        for name in ("operand", "left", "right", "arg"):
            child = getattr(node, name, None)
            if child is not None:
                stack.append(child)
    return frozenset(out)


def to_conj_clause(phi: Formula) -> ConjClause:
    """Flatten a conjunction of literals; ``top`` units are dropped."""
    if isinstance(phi, ConjClause):
        return phi
    lits = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, And):
            stack.extend((node.right, node.left))
        elif isinstance(node, Top):
            continue
        elif isinstance(node, Atom):
            lits.add(Literal(node.symbol, True))
        elif isinstance(node, Not) and isinstance(node.operand, Atom):
            lits.add(Literal(node.operand.symbol, False))
        else:
            raise NotConjunctive(f"not a conjunction of literals: {print_formula(phi)}")
    return ConjClause(frozenset(lits))


def to_dnf(phi: Formula) -> DnfFormula:
    """Read a formula that is syntactically a disjunction of conjunctive clauses."""
    if isinstance(phi, DnfFormula):
        return phi
    if isinstance(phi, ConjClause):
        return DnfFormula((phi,))
    disjuncts = []

    def collect(node):
        if isinstance(node, Or):
            collect(node.left)
            collect(node.right)
        else:
            disjuncts.append(node)

    collect(phi)
    try:
        return DnfFormula(tuple(to_conj_clause(d) for d in disjuncts))
    except NotConjunctive:
        raise NotDnf(f"not in disjunctive normal form: {print_formula(phi)}") from None


# ---------------------------------------------------------------------------
# Abbreviations


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def exists(phi: Formula) -> Formula:
    return Not(Univ(Not(phi)))


def knows(phi: Formula) -> Formula:
    return Univ(phi)


def diamond_leq_p(phi):
    return Not(BoxLeqP(Not(phi)))


def diamond_lt_p(phi):
    return Not(BoxLtP(Not(phi)))


def diamond_leq_d(phi):
    return Not(BoxLeqD(Not(phi)))


def diamond_lt_d(phi):
    return Not(BoxLtD(Not(phi)))


def min_p(phi: Formula) -> Formula:
    """True exactly at the most plausible ``phi``-worlds."""
    return And(phi, Not(diamond_lt_p(phi)))


def min_d(phi: Formula) -> Formula:
    return And(phi, Not(diamond_lt_d(phi)))


def believes(phi: Formula) -> Formula:
    return Univ(implies(min_p(TOP), phi))


def goal(phi: Formula) -> Formula:
    return Univ(implies(min_d(TOP), phi))


def adm_int(phi: Formula) -> Formula:
    return And(And(goal(phi), exists(phi)), Not(believes(phi)))


def intends_that(phi: Formula, library: "PlanLibrary") -> Formula:
    """Prospective intention, expanded over the (finite) plan library."""
    disjuncts = [
        And(IntendAtom(plan.name), believes(And(plan.pre, PlanBox(plan.name, phi))))
        for plan in library
    ]
    return And(adm_int(phi), disjoin(disjuncts))


_ABBREVIATIONS = {
    "K": knows,
    "A": Univ,
    "B": believes,
    "G": goal,
    "E": exists,
    "AdmInt": adm_int,
    "min_P": min_p,
    "min_D": min_d,
    "dia_leqP": diamond_leq_p,
    "dia_ltP": diamond_lt_p,
    "dia_leqD": diamond_leq_d,
    "dia_ltD": diamond_lt_d,
    "implies": implies,
}


def desugar(name: str, *args, library: "PlanLibrary | None" = None) -> Formula:
    """Expand a named abbreviation into core constructors."""
    if name == "Int":
        if library is None:
            raise ValueError("Int needs a plan library")
        (phi,) = args
        return intends_that(phi, library)
    try:
        fn = _ABBREVIATIONS[name]
    except KeyError:
        raise UnknownAbbreviation(f"unknown abbreviation {name!r}") from None
    return fn(*args)


# ---------------------------------------------------------------------------
# Printer

_IMP, _OR, _AND, _UNARY = 0, 1, 2, 3

_BOX_TOKENS = {BoxLeqP: "[<=P]", BoxLtP: "[<P]", BoxLeqD: "[<=D]", BoxLtD: "[<D]"}
_DYN_TOKENS = {
    DynAnnounce: "!",
    DynUpgradeP: "upP",
    DynUpgradeD: "upD",
    DynContractP: "downP",
    DynContractD: "downD",
}
_DYN_BY_TOKEN = {v: k for k, v in _DYN_TOKENS.items()}


def print_formula(phi: Formula) -> str:
    """Render ``phi`` in the concrete syntax accepted by :func:`parse_formula`."""
    return _print(phi, _IMP)


def _print(phi: Formula, context: int) -> str:
    if isinstance(phi, Atom):
        return phi.symbol
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, Bot):
        return "bot"
    if isinstance(phi, IntendAtom):
        return f"I({phi.plan})"
    if isinstance(phi, Univ):
        return f"A({_print(phi.operand, _IMP)})"
    if isinstance(phi, Not):
        text, level = "~" + _print(phi.operand, _UNARY), _UNARY
    elif isinstance(phi, BOXES):
        text, level = f"{_BOX_TOKENS[type(phi)]} {_print(phi.operand, _UNARY)}", _UNARY
    elif isinstance(phi, PlanBox):
        text, level = f"[{phi.plan}] {_print(phi.operand, _UNARY)}", _UNARY
    elif isinstance(phi, DYNAMIC):
        token = _DYN_TOKENS[type(phi)]
        text = f"[{token} {_print(phi.arg, _IMP)}] {_print(phi.operand, _UNARY)}"
        level = _UNARY
    elif isinstance(phi, And):
        text, level = f"{_print(phi.left, _AND)} & {_print(phi.right, _UNARY)}", _AND
    elif isinstance(phi, Or):
        text, level = f"{_print(phi.left, _OR)} | {_print(phi.right, _AND)}", _OR
    else:
        raise TypeError(f"not a formula: {phi!r}")
    return f"({text})" if level < context else text


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<box>\[\s*<\s*=?\s*[PD]\s*\])
  | (?P<dia><\s*<\s*=?\s*[PD]\s*>)
  | (?P<arrow>->)
  | (?P<punct>[~&|()\[\]!])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_BOX_BY_TEXT = {"<=P": BoxLeqP, "<P": BoxLtP, "<=D": BoxLeqD, "<D": BoxLtD}
_DIA_BY_TEXT = {"<=P": diamond_leq_p, "<P": diamond_lt_p, "<=D": diamond_leq_d, "<D": diamond_lt_d}
_NAMED = {"A", "E", "K", "B", "G", "AdmInt", "Int", "min_P", "min_D"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _location(source: str, pos: int) -> tuple[int, int]:
    line = source.count("\n", 0, pos) + 1
    col = pos - (source.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _tokenize(source: str, start: int, end: int) -> list[_Token]:
    tokens = []
    pos = start
    while pos < end:
        m = _TOKEN_RE.match(source, pos, end)
        if m is None:
            line, col = _location(source, pos)
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if kind in ("box", "dia"):
                text = re.sub(r"\s+", "", text)
            tokens.append(_Token(kind, text, pos))
        pos = m.end()
    tokens.append(_Token("eof", "", end))
    return tokens


class _Parser:
    def __init__(self, source, start, end, vocab, library):
        self.source = source
        self.tokens = _tokenize(source, start, end)
        self.i = 0
        self.vocab = vocab
        self.library = library

    # -- token helpers
    def peek(self, ahead=0) -> _Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None, cls=ParseError):
        tok = tok or self.peek()
        line, col = _location(self.source, tok.pos)
        return cls(message, line, col)

    def expect(self, text) -> _Token:
        tok = self.peek()
        if tok.kind == "eof" or tok.text != text:
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        return self.next()

    def at(self, text) -> bool:
        tok = self.peek()
        return tok.kind != "eof" and tok.text == text

    # -- grammar
    def parse(self) -> Formula:
        phi = self.formula()
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r}")
        return phi

    def formula(self) -> Formula:
        left = self.orf()
        if self.peek().kind == "arrow":
            self.next()
            return implies(left, self.formula())
        return left

    def orf(self) -> Formula:
        left = self.andf()
        while self.at("|"):
            self.next()
            left = Or(left, self.andf())
        return left

    def andf(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "~":
            self.next()
            return Not(self.unary())
        if tok.kind == "box":
            self.next()
            return _BOX_BY_TEXT[tok.text[1:-1]](self.unary())
        if tok.kind == "dia":
            self.next()
            return _DIA_BY_TEXT[tok.text[1:-1]](self.unary())
        if tok.kind == "punct" and tok.text == "[":
            return self.bracket()
        if tok.kind == "ident" and tok.text in _NAMED | {"I"} and self.peek(1).text == "(":
            return self.named()
        return self.atom()

    def bracket(self) -> Formula:
        self.next()  # "["
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "!":
            self.next()
            arg = self.dynamic_arg()
            self.expect("]")
            return DynAnnounce(arg, self.unary())
        if tok.kind == "ident":
            if tok.text in _DYN_BY_TOKEN and self.peek(1).text != "]":
                self.next()
                arg = self.dynamic_arg()
                self.expect("]")
                return _DYN_BY_TOKEN[tok.text](arg, self.unary())
            plan = self.plan_name()
            self.expect("]")
            return PlanBox(plan, self.unary())
        raise self.error("expected a plan name or dynamic operator after '['")

    def dynamic_arg(self) -> Formula:
        tok = self.peek()
        arg = self.formula()
        if not is_propositional(arg):
            raise self.error("argument of a dynamic modality must be propositional", tok)
        return arg

    def plan_name(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error("expected a plan name")
        self.next()
        if self.library is None or tok.text not in self.library:
            raise self.error(f"unknown plan {tok.text!r}", tok)
        return tok.text

    def named(self) -> Formula:
        tok = self.next()
        self.expect("(")
        if tok.text == "I":
            plan = self.plan_name()
            self.expect(")")
            return IntendAtom(plan)
        inner = self.formula()
        self.expect(")")
        if tok.text == "Int":
            return intends_that(inner, self.library if self.library is not None else ())
        return desugar(tok.text, inner)

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            if tok.text == "top":
                return TOP
            if tok.text == "bot":
                return BOT
            if tok.text in KEYWORDS:
                raise self.error(f"{tok.text!r} must be followed by '('", tok)
            if self.vocab is not None and tok.text not in self.vocab:
                raise self.error(f"unknown symbol {tok.text!r}", tok, UnknownSymbol)
            return Atom(tok.text)
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise self.error(f"expected a formula, found {found}")


def parse_formula(
    text: str,
    vocab: Vocabulary | None = None,
    plans: "PlanLibrary | None" = None,
    *,
    span: tuple[int, int] | None = None,
) -> Formula:
    """Parse ``text`` into a desugared AST.

    ``vocab=None`` accepts any identifier as an atom.  ``span`` restricts
    parsing to ``text[start:end]`` while reporting locations relative to the
    whole of ``text`` (used by the agent-file reader).
    """
    start, end = span if span is not None else (0, len(text))
    return _Parser(text, start, end, vocab, plans).parse()


def check_plans(phi: Formula, library: "PlanLibrary") -> None:
    for name in plans_of(phi):
        if name not in library:
            raise UnknownPlan(f"unknown plan {name!r}")
