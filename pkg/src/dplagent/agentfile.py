"""Reader and writer for the line-oriented agent file format.

::

    vocab: p q r s
    plan <name> { pre: <formula>; post: <conj-formula> }
    knowledge { <conj-formula> ; <conj-formula> ; ... }
    belief <rank> { <conj-formula> ; ... }
    desire <rank> { <conj-formula> ; ... }
    intend <name>

``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import DplError, ParseError
from .plans import make_plan_library
from .program import AgentProgram, RankedFormula, StratifiedBase
from .syntax import Vocabulary, parse_formula, print_formula, to_conj_clause


class AgentFileError(ParseError):
    pass


_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[0-9]+")


def _strip_comments(text: str) -> str:
    # blank out comments but keep offsets intact for error locations
    return re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)


class _Reader:
    def __init__(self, text: str):
        self.text = _strip_comments(text)
        self.pos = 0
        self.vocab: Vocabulary | None = None
        self.plans: list[tuple[str, object, object, int]] = []
        self.knowledge: list = []
        self.beliefs: list[RankedFormula] = []
        self.desires: list[RankedFormula] = []
        self.intentions: list[tuple[str, int]] = []

    def location(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None) -> AgentFileError:
        line, col = self.location(self.pos if pos is None else pos)
        return AgentFileError(message, line, col)

    def skip_ws(self, newlines=True):
        pattern = r"\s*" if newlines else r"[ \t\r]*"
        self.pos = re.compile(pattern).match(self.text, self.pos).end()

    def word(self) -> str:
        self.skip_ws()
        m = _WORD.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def number(self) -> int:
        self.skip_ws()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise self.error("expected a rank (natural number)")
        self.pos = m.end()
        return int(m.group())

    def expect(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise self.error(f"expected {literal!r}")
        self.pos += len(literal)

    def block(self) -> tuple[int, int]:
        """Span of the text between ``{`` and the matching ``}``."""
        self.expect("{")
        start = self.pos
        end = self.text.find("}", start)
        if end < 0:
            raise self.error("unterminated block, missing '}'", start - 1)
        self.pos = end + 1
        return start, end

    def formula(self, start: int, end: int, conjunctive: bool):
        if self.vocab is None:
            raise self.error("'vocab:' must come before any formula", start)
        lead = len(self.text[start:end]) - len(self.text[start:end].lstrip())
        if not self.text[start:end].strip():
            raise self.error("empty formula", start)
        try:
            phi = parse_formula(self.text, self.vocab, None, span=(start, end))
        except ParseError as exc:
            raise AgentFileError(exc.message, exc.line, exc.column) from None
        if conjunctive:
            try:
                to_conj_clause(phi)
            except DplError:
                raise self.error("expected a conjunction of literals", start + lead) from None
        return phi

    def formulas(self, start: int, end: int) -> list:
        out = []
        pos = start
        for piece in self.text[start:end].split(";"):
            if piece.strip():
                out.append(self.formula(pos, pos + len(piece), conjunctive=True))
            pos += len(piece) + 1
        return out

    def read(self) -> AgentProgram:
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                break
            at = self.pos
            keyword = self.word()
            if keyword == "vocab":
                self.expect(":")
                if self.vocab is not None:
                    raise self.error("duplicate 'vocab:' line", at)
                self.skip_ws(newlines=False)
                eol = self.text.find("\n", self.pos)
                eol = len(self.text) if eol < 0 else eol
                names = self.text[self.pos:eol].split()
                try:
                    self.vocab = Vocabulary(tuple(names))
                except DplError as exc:
                    raise self.error(str(exc), at) from None
                self.pos = eol
            elif keyword == "plan":
                self.read_plan(at)
            elif keyword == "knowledge":
                self.knowledge += self.formulas(*self.block())
            elif keyword in ("belief", "desire"):
                rank = self.number()
                target = self.beliefs if keyword == "belief" else self.desires
                target += [RankedFormula(phi, rank) for phi in self.formulas(*self.block())]
            elif keyword == "intend":
                self.intentions.append((self.word(), at))
            else:
                raise self.error(f"unknown statement {keyword!r}", at)
        return self.build()

    def read_plan(self, at: int):
        name = self.word()
        start, end = self.block()
        body = self.text[start:end]
        m = re.fullmatch(r"\s*pre\s*:(?P<pre>[^;]*);\s*post\s*:(?P<post>[^;]*?);?\s*", body)
        if not m:
            raise self.error("plan body must be 'pre: <formula>; post: <formula>'", start)
        pre = self.formula(start + m.start("pre"), start + m.end("pre"), conjunctive=False)
        post = self.formula(start + m.start("post"), start + m.end("post"), conjunctive=False)
        self.plans.append((name, pre, post, at))

    def build(self) -> AgentProgram:
        if self.vocab is None:
            raise AgentFileError("missing 'vocab:' line", 1, 1)
        seen = set()
        for name, pre, post, at in self.plans:
            if name in seen:
                raise self.error(f"plan {name!r} defined twice", at)
            seen.add(name)
            try:
                make_plan_library([(name, pre, post)])
            except DplError as exc:
                raise self.error(str(exc), at) from None
        library = make_plan_library([(n, p, q) for n, p, q, _ in self.plans])
        for name, at in self.intentions:
            if name not in library:
                raise self.error(f"unknown plan {name!r}", at)
        return AgentProgram(
            vocab=self.vocab,
            library=library,
            knowledge=tuple(self.knowledge),
            beliefs=StratifiedBase(tuple(self.beliefs)),
            desires=StratifiedBase(tuple(self.desires)),
            intentions=frozenset(n for n, _ in self.intentions),
        )


def loads(text: str) -> AgentProgram:
    return _Reader(text).read()


def load(path: str | Path) -> AgentProgram:
    return loads(Path(path).read_text())


def _strata_lines(keyword: str, base: StratifiedBase) -> list[str]:
    lines = []
    for rank, formulas in base.strata():
        body = " ; ".join(print_formula(phi) for phi in formulas)
        lines.append(f"{keyword} {rank} {{ {body} }}")
    return lines


def dumps(ag: AgentProgram) -> str:
    lines = [f"vocab: {ag.vocab}"]
    for plan in ag.library:
        lines.append(
            f"plan {plan.name} {{ pre: {print_formula(plan.pre)}; "
            f"post: {print_formula(plan.post.to_formula())} }}"
        )
    if ag.knowledge:
        lines.append("knowledge { " + " ; ".join(print_formula(k) for k in ag.knowledge) + " }")
    lines += _strata_lines("belief", ag.beliefs)
    lines += _strata_lines("desire", ag.desires)
    lines += [f"intend {name}" for name in sorted(ag.intentions)]
    return "\n".join(lines) + "\n"
