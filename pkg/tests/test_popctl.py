# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""End-to-end tests of the command-line interface."""
import pytest

from helpers import LOOP, SIMPLE, TRAP
from popctl.library.model import parse_mdp
from popctl.popctl import EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, main


REACH = SIMPLE + "w0: w 0\ncommit: w w a\ntarget: 0 w a\n"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, dict(line.split(": ", 1) for line in out.splitlines() if ": " in line), out


def test_oracle(capsys, write):
    code, report, _ = run(capsys, "oracle", write("simple.txt", SIMPLE), "--tokens", "2")
    assert code == EXIT_OK
    assert report["command"] == "oracle"
    assert report["status"] == "ok"
    assert report["answer"] == "true"
    assert report["tokens"] == "2"
    assert report["winning"] == "3"
    assert len(report["input"]) == 16


def test_reports_are_reproducible(capsys, write):
    path = write("trap.txt", TRAP)
    first = run(capsys, "oracle", path, "--tokens", "2")
    again = run(capsys, "oracle", path, "--tokens", "2")
    assert first == again
    assert first[1]["answer"] == "false"


def test_oracle_budget(capsys, write):
    code, report, _ = run(capsys, "oracle", write("simple.txt", SIMPLE), "--tokens", "2",
                          "--budget", "1")
    assert code == EXIT_INCONCLUSIVE
    assert report["status"] == "inconclusive"
    assert "answer" not in report
    assert "budget exhausted" in report["reason"]


def test_decide(capsys, write):
    code, report, _ = run(capsys, "decide", write("simple.txt", SIMPLE))
    assert code == EXIT_OK
    assert report["answer"] == "true"
    assert report["trajectory"] == "32 32"


def test_decide_negative(capsys, write):
    code, report, _ = run(capsys, "decide", write("loop.txt", LOOP))
    assert code == EXIT_OK
    assert report["answer"] == "false"
    assert report["initial"] == "w 0"
    assert report["removed"].endswith("(path, iteration 1)")


def test_decide_cap_from_config_file(capsys, write):
    config = write("limits.yaml", "limits:\n  decide_states: 1\n")
    code, report, _ = run(capsys, "decide", write("simple.txt", SIMPLE), "--config-file", config)
    assert code == EXIT_INCONCLUSIVE
    assert report["status"] == "inconclusive"
    assert report["reason"] == "2 states exceed the decide cap of 1"


def test_unsupported_config(capsys, write):
    config = write("future.yaml", "schema: '9.0'\n")
    code, report, _ = run(capsys, "oracle", write("simple.txt", SIMPLE), "--tokens", "1",
                          "--config-file", config)
    assert code == EXIT_INPUT
    assert report["status"] == "error"
    assert report["error"].startswith("configuration not supported")


def test_malformed_input(capsys, write):
    code, report, _ = run(capsys, "oracle", write("bad.txt", SIMPLE.replace("init: s", "init s")),
                          "--tokens", "1")
    assert code == EXIT_INPUT
    assert report["status"] == "error"
    assert report["error"].startswith("line 3")


def test_undecodable_input(capsys, tmp_path):
    path = tmp_path / "binary.txt"
    path.write_bytes(b"\xff\xfe\x00")
    code = main(["oracle", str(path), "--tokens", "1"])
    assert code == EXIT_INPUT
    assert "status: error" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["oracle"],
    ["oracle", "missing.txt", "--tokens", "1"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as error:
        main(argv)
    assert error.value.code == EXIT_INPUT


def test_simulate(capsys, write):
    code, report, _ = run(capsys, "simulate", write("simple.txt", SIMPLE), "--tokens", "1",
                          "--runs", "5", "--max-steps", "200", "--seed", "3",
                          "--max-processes", "1")
    assert code == EXIT_OK
    assert report["seed"] == "3"
    assert report["runs"] == "5"
    assert report["successes"] == "5"
    assert report["failures"] == "0"


def test_simulate_losing_start(capsys, write):
    code, report, _ = run(capsys, "simulate", write("trap.txt", TRAP), "--tokens", "1",
                          "--max-processes", "1")
    assert code == EXIT_OK
    assert report["answer"] == "false"
    assert report["seed"] == "0"
    assert "runs" not in report


def test_flow(capsys, write):
    path = write("reach.txt", REACH)
    code, report, _ = run(capsys, "flow", path, "--oracle", "2")
    assert code == EXIT_OK
    assert report["answer"] == "true"
    assert report["oracle"] == "0:true 1:true 2:true"
    code, report, _ = run(capsys, "flow", path, "--no-shortcuts")
    assert report["answer"] == "true"


def test_semigroup(capsys, write):
    code, report, out = run(capsys, "semigroup", write("reach.txt", REACH), "--audit", "--dump")
    assert code == EXIT_OK
    assert report["answer"] == "true"
    assert report["closed"] == "true"
    dumped = [line for line in out.splitlines() if line.startswith(("G ", "E "))]
    assert len(dumped) == int(report["elements"])


def test_gadget_list(capsys):
    code, report, _ = run(capsys, "gadget", "--list")
    assert code == EXIT_OK
    assert report["kinds"] == "bottleneck butterfly chain countdown force_all force_one leaky_chain"
    assert "bottleneck(capacity=2)" in report["corpus"]


def test_gadget_output(capsys, tmp_path):
    output = tmp_path / "bottleneck.txt"
    code, report, _ = run(capsys, "gadget", "bottleneck", "--k", "2", "-o", str(output))
    assert code == EXIT_OK
    assert report["gadget"] == "bottleneck(capacity=2)"
    assert parse_mdp(output.read_text(encoding="utf-8")).num_states == int(report["states"]) == 10


def test_gadget_countdown(capsys, write, tmp_path):
    game = write("game.txt", "start: v0 1\nedge: v0 1 v1\n")
    output = tmp_path / "countdown.txt"
    code, report, _ = run(capsys, "gadget", "countdown", "--game", game, "-o", str(output))
    assert code == EXIT_OK
    assert report["answer"] == "true"
    assert output.is_file()


@pytest.mark.parametrize("argv", [
    ["gadget", "bottleneck", "--k", "3", "-o", "out.txt"],
    ["gadget", "chain"],
    ["gadget", "countdown", "-o", "out.txt"],
])
def test_gadget_errors(capsys, tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    code, report, _ = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert report["status"] == "error"
    assert not (tmp_path / "out.txt").exists()
