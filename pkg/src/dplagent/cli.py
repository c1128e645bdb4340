"""Command-line front end.

Usage::

    dplagent AGENT_FILE                   # line-oriented REPL
    dplagent AGENT_FILE -c 'query B "p"'  # one or more commands
    dplagent AGENT_FILE --script cmds.txt
    dplagent --oracle [--ops N --symbols K --seed S]

Commands::

    query K|B|G|I <formula>
    apply announce|reviseB|reviseD|contractB|contractD <formula>
    coherence
    model dump
    model export <path.dot>
    oracle verify [--ops N] [--symbols K] [--seed S]
    history
    reset
    show                                  # print the current program
    help
    quit
"""

from __future__ import annotations

import argparse
import shlex
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import agentfile
from .dynamics import FILTERS, OPERATIONS
from .errors import DplError, IncoherentProgram, ParseError
from .oracle import format_trial, verify
from .program import ATTITUDES, AgentProgram, is_coherent, query
from .semantics import DEFAULT_WORLD_CAP, dump_model, export_dot, induced_model
from .syntax import parse_formula

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INCOHERENT = 3
EXIT_COUNTEREXAMPLE = 4


class UsageError(Exception):
    pass


class CounterexampleFound(Exception):
    pass


@dataclass
class Session:
    initial: AgentProgram
    current: AgentProgram
    history: list[tuple[str, str]] = field(default_factory=list)
    permissive: bool = False
    world_cap: int = DEFAULT_WORLD_CAP
    intention_filter: str = "coherent"

    @classmethod
    def start(cls, program: AgentProgram, **flags) -> "Session":
        return cls(initial=program, current=program, **flags)

    def apply(self, op: str, text: str) -> AgentProgram:
        phi = parse_formula(text, self.current.vocab)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = OPERATIONS[op](
                self.current,
                phi,
                intention_filter=self.intention_filter,
                permissive=self.permissive,
            )
        self.current = result
        self.history.append((op, text))
        return result

    def replay(self) -> AgentProgram:
        """Re-run the history from the initial program."""
        fresh = Session.start(
            self.initial,
            permissive=self.permissive,
            world_cap=self.world_cap,
            intention_filter=self.intention_filter,
        )
        for op, text in self.history:
            fresh.apply(op, text)
        return fresh.current

    def reset(self) -> None:
        self.current = self.initial
        self.history.clear()

    def model(self):
        return induced_model(self.current, self.world_cap)


def load_agent(path, **flags) -> Session:
    program = agentfile.load(path)
    report = is_coherent(program)
    if not report.ok and not flags.get("permissive"):
        raise IncoherentProgram(report)
    return Session.start(program, **flags)


# ---------------------------------------------------------------------------
# Commands


def _oracle_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oracle verify", add_help=False, exit_on_error=False)
    p.add_argument("--ops", type=int, default=200)
    p.add_argument("--symbols", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    return p


def run_oracle(ops: int, symbols: int, seed: int, intention_filter: str = "coherent") -> tuple[str, bool]:
    report = verify(trials=ops, max_symbols=symbols, seed=seed, intention_filter=intention_filter)
    parts = [report.summary()]
    for trial in report.counterexamples.values():
        parts.append(format_trial(trial).rstrip())
    return "\n".join(parts), report.ok


def run_command(session: Session | None, line: str) -> str:
    """Execute one command; return its output text.

    Raises ``UsageError`` for malformed commands, ``DplError`` for engine
    errors and ``CounterexampleFound`` (carrying the report) when the oracle
    finds a disagreement.
    """
    try:
        words = shlex.split(line, comments=True)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not words:
        return ""
    cmd, args = words[0], words[1:]

    if cmd == "help":
        return __doc__.split("Commands::", 1)[1].strip("\n")
    if cmd == "oracle":
        if not args or args[0] != "verify":
            raise UsageError("usage: oracle verify [--ops N] [--symbols K] [--seed S]")
        try:
            opts = _oracle_parser().parse_args(args[1:])
        except (argparse.ArgumentError, SystemExit) as exc:
            raise UsageError(f"oracle verify: {exc}") from None
        mode = session.intention_filter if session else "coherent"
        text, ok = run_oracle(opts.ops, opts.symbols, opts.seed, mode)
        if not ok:
            raise CounterexampleFound(text)
        return text

    if session is None:
        raise UsageError(f"{cmd!r} needs an agent file")

    if cmd == "query":
        if len(args) != 2 or args[0] not in ATTITUDES:
            raise UsageError("usage: query K|B|G|I <formula>")
        phi = parse_formula(args[1], session.current.vocab)
        return "true" if query(session.current, args[0], phi) else "false"
    if cmd == "apply":
        if len(args) != 2 or args[0] not in OPERATIONS:
            raise UsageError("usage: apply " + "|".join(OPERATIONS) + " <formula>")
        ag = session.apply(args[0], args[1])
        intentions = ", ".join(sorted(ag.intentions)) or "-"
        return f"ok; intentions: {intentions}"
    if cmd == "coherence":
        report = is_coherent(session.current)
        verdict = "coherent" if report.ok else "incoherent"
        return f"{report}\n{verdict}"
    if cmd == "model":
        if args == ["dump"]:
            return dump_model(session.model())
        if len(args) == 2 and args[0] == "export":
            Path(args[1]).write_text(export_dot(session.model()))
            return f"wrote {args[1]}"
        raise UsageError("usage: model dump | model export <path>")
    if cmd == "history":
        if not session.history:
            return "(empty)"
        return "\n".join(f"{i}. apply {op} {shlex.quote(text)}" for i, (op, text) in enumerate(session.history, 1))
    if cmd == "reset":
        session.reset()
        return "reset to the loaded program"
    if cmd == "show":
        return agentfile.dumps(session.current).rstrip()
    raise UsageError(f"unknown command {cmd!r}; try 'help'")


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, IncoherentProgram):
        return EXIT_INCOHERENT
    if isinstance(exc, CounterexampleFound):
        return EXIT_COUNTEREXAMPLE
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    return EXIT_USAGE


def run_lines(session, lines, out, err, *, keep_going: bool) -> int:
    status = EXIT_OK
    for line in lines:
        if line.strip() in ("quit", "exit"):
            break
        try:
            text = run_command(session, line)
        except CounterexampleFound as exc:
            print(exc, file=out)
            status = EXIT_COUNTEREXAMPLE
            if not keep_going:
                return status
            continue
        except (UsageError, DplError) as exc:
            print(f"error: {exc}", file=err)
            status = _exit_code(exc)
            if not keep_going:
                return status
            continue
        if text:
            print(text, file=out)
    return status


def repl(session, stdin, out, err) -> int:
    status = EXIT_OK
    while True:
        out.write("dpl> ")
        out.flush()
        line = stdin.readline()
        if not line:
            out.write("\n")
            return status
        if line.strip() in ("quit", "exit"):
            return status
        status = run_lines(session, [line], out, err, keep_going=True) or status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dplagent", description="BDI mental-state engine")
    p.add_argument("agent", nargs="?", help="agent file")
    p.add_argument("-c", "--command", action="append", default=[], help="command to run (repeatable)")
    p.add_argument("--script", help="file with one command per line")
    p.add_argument("--permissive", action="store_true", help="allow incoherent programs")
    p.add_argument("--world-cap", type=int, default=DEFAULT_WORLD_CAP)
    p.add_argument("--intention-filter", choices=FILTERS, default="coherent")
    p.add_argument("--oracle", action="store_true", help="run 'oracle verify' and exit")
    p.add_argument("--ops", type=int, default=200)
    p.add_argument("--symbols", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    if args.oracle:
        text, ok = run_oracle(args.ops, args.symbols, args.seed, args.intention_filter)
        print(text, file=out)
        return EXIT_OK if ok else EXIT_COUNTEREXAMPLE

    session = None
    if args.agent:
        try:
            session = load_agent(
                args.agent,
                permissive=args.permissive,
                world_cap=args.world_cap,
                intention_filter=args.intention_filter,
            )
        except OSError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_USAGE
        except IncoherentProgram as exc:
            print(f"error: incoherent program\n{exc.report}", file=err)
            return EXIT_INCOHERENT
        except DplError as exc:
            print(f"error: {args.agent}: {exc}", file=err)
            return _exit_code(exc)

    lines = list(args.command)
    if args.script:
        lines += Path(args.script).read_text().splitlines()
    if lines:
        return run_lines(session, lines, out, err, keep_going=False)
    if stdin.isatty():
        return repl(session, stdin, out, err)
    return run_lines(session, stdin.read().splitlines(), out, err, keep_going=False)


if __name__ == "__main__":
    sys.exit(main())
