import io
from pathlib import Path

import pytest

from dplagent import agentfile
from dplagent.cli import (
    EXIT_COUNTEREXAMPLE,
    EXIT_INCOHERENT,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    Session,
    UsageError,
    load_agent,
    main,
    repl,
    run_command,
)
from dplagent.errors import IncoherentProgram

EXAMPLE = Path(__file__).resolve().parents[1] / "docs" / "worked_example.agent"

SIMPLE = """\
vocab: p q r
plan go { pre: p; post: r }
knowledge { p }
belief 0 { p }
belief 1 { q }
desire 0 { p }
desire 1 { r }
intend go
"""


@pytest.fixture
def agent_file(tmp_path):
    path = tmp_path / "simple.agent"
    path.write_text(SIMPLE)
    return path


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_query(agent_file):
    code, out, _ = run(str(agent_file), "-c", 'query B "q"', "-c", "query B ~q")
    assert code == EXIT_OK
    assert out.splitlines() == ["true", "false"]


def test_revise_then_query(agent_file):
    code, out, _ = run(str(agent_file), "-c", 'apply reviseB "~q"', "-c", 'query B "~q"')
    assert code == EXIT_OK
    assert out.splitlines() == ["ok; intentions: go", "true"]


def test_stdin_script(agent_file):
    code, out, _ = run(str(agent_file), stdin="coherence\n# comment only\nquery I r\n")
    assert code == EXIT_OK
    assert out.splitlines()[-2:] == ["coherent", "true"]


def test_script_file(agent_file, tmp_path):
    script = tmp_path / "cmds.txt"
    script.write_text("apply announce q\nhistory\nreset\nhistory\n")
    code, out, _ = run(str(agent_file), "--script", str(script))
    assert code == EXIT_OK
    assert out.splitlines() == [
        "ok; intentions: go",
        "1. apply announce q",
        "reset to the loaded program",
        "(empty)",
    ]


def test_model_dump_and_export(agent_file, tmp_path):
    dot = tmp_path / "m.dot"
    code, out, _ = run(str(agent_file), "-c", "model dump", "-c", f"model export {dot}")
    assert code == EXIT_OK
    assert "worlds: 4" in out
    assert dot.read_text().startswith("digraph agent_model {")


def test_worked_example_table():
    cmds = [
        "query K at_base",
        "query B door_open",
        "query B has_pkg",
        "query G has_pkg",
        "query I has_pkg",
        "query I charged",
        "query I delivered",
        'apply reviseB "charged"',
        "query B has_pkg",
    ]
    args = [str(EXAMPLE)]
    for c in cmds:
        args += ["-c", c]
    code, out, _ = run(*args)
    assert code == EXIT_OK
    assert out.splitlines() == [
        "true", "true", "false", "true", "true", "true", "false",
        "ok; intentions: -",
        "true",
    ]


# --- exit codes --------------------------------------------------------------


def test_usage_errors(agent_file):
    assert run(str(agent_file), "-c", "frobnicate")[0] == EXIT_USAGE
    assert run(str(agent_file), "-c", "query X p")[0] == EXIT_USAGE
    assert run(str(agent_file), "-c", "query B 'p")[0] == EXIT_USAGE
    assert run("-c", "query B p")[0] == EXIT_USAGE
    assert run("--no-such-flag")[0] == EXIT_USAGE
    assert run("/no/such/file.agent")[0] == EXIT_USAGE


def test_parse_errors(agent_file, tmp_path):
    assert run(str(agent_file), "-c", "query B 'p &'")[0] == EXIT_PARSE
    bad = tmp_path / "bad.agent"
    bad.write_text("vocab: p\nplan a { pre: p; post: p & ~p }\n")
    code, _, err = run(str(bad))
    assert code == EXIT_PARSE
    assert "line 2" in err


def test_incoherent_file(tmp_path):
    bad = tmp_path / "bad.agent"
    bad.write_text("vocab: p\nknowledge { p }\n")
    code, _, err = run(str(bad))
    assert code == EXIT_INCOHERENT
    assert "2. belief-knowledge consistency: FAIL" in err
    assert run(str(bad), "--permissive", "-c", "query K p")[0] == EXIT_OK


def test_incoherent_after_contraction(agent_file):
    # contracting a known literal breaks the mirroring of K in the belief base
    code, out, err = run(str(agent_file), "-c", "apply contractB p", "-c", "apply reviseB q")
    assert code == EXIT_INCOHERENT
    assert "not coherent" in err


def test_oracle_counterexample_exit_code():
    code, out, _ = run("-c", "oracle verify --symbols 2 --ops 20 --seed 7")
    assert code == EXIT_COUNTEREXAMPLE
    assert "contractB" in out and "# counterexample for contractB" in out


def test_oracle_flag_pass_on_subset():
    code, out, _ = run("--oracle", "--ops", "5", "--symbols", "2", "--seed", "1")
    assert code in (EXIT_OK, EXIT_COUNTEREXAMPLE)
    assert out.splitlines()[0].startswith("announce")


def test_oracle_bad_option():
    assert run("-c", "oracle verify --ops many")[0] == EXIT_USAGE


def test_deterministic_output(agent_file):
    args = (str(agent_file), "-c", "apply reviseD q", "-c", "model dump",
            "-c", "oracle verify --ops 10 --seed 3")
    assert run(*args) == run(*args)


# --- session -----------------------------------------------------------------


def test_session_replay(agent_file):
    session = load_agent(agent_file)
    for line in ("apply reviseB ~q", "apply announce q", "apply contractD r"):
        run_command(session, line)
    assert session.replay() == session.current
    assert [op for op, _ in session.history] == ["reviseB", "announce", "contractD"]


def test_load_agent_rejects_incoherent(tmp_path):
    path = tmp_path / "bad.agent"
    path.write_text("vocab: p\nknowledge { p }\n")
    with pytest.raises(IncoherentProgram):
        load_agent(path)
    assert load_agent(path, permissive=True).current.knowledge


def test_run_command_without_session():
    with pytest.raises(UsageError):
        run_command(None, "coherence")
    assert run_command(None, "") == ""
    assert "query K|B|G|I" in run_command(None, "help")


def test_show_prints_agent_file(agent_file):
    session = Session.start(agentfile.load(agent_file))
    assert agentfile.loads(run_command(session, "show")) == session.current


def test_repl(agent_file):
    session = load_agent(agent_file)
    out, err = io.StringIO(), io.StringIO()
    code = repl(session, io.StringIO("query B q\nbogus\nquit\n"), out, err)
    assert code == EXIT_USAGE
    assert "true" in out.getvalue()
    assert "unknown command" in err.getvalue()
