import io
import json

import pytest

import aidef.cli as cli
from aidef.cli import EXIT_ASSUMPTION, EXIT_IO, EXIT_OK, EXIT_PROTOCOL, main, play
from aidef.miner import load_rules
from aidef.protocol import AssumptionReport, AssumptionResult
from aidef.trace import read_trace


@pytest.fixture
def trace(tmp_path):
    path = tmp_path / "life.jsonl"
    assert main(["run", "--world", "ttt-eye", "--steps", "2000", "--seed", "42", "--out", str(path)]) == EXIT_OK
    return path


def test_run_writes_trace(tmp_path, capsys):
    path = tmp_path / "short.jsonl"
    assert main(["run", "--world", "tm:2:3", "--steps", "20", "--out", str(path)]) == EXIT_OK
    assert "trace written" in capsys.readouterr().out
    life = read_trace(path)
    assert len(life) <= 20 and life.metadata["agent"] == "random"


def test_run_is_reproducible(trace, tmp_path):
    again = tmp_path / "again.jsonl"
    main(["run", "--world", "ttt-eye", "--steps", "2000", "--seed", "42", "--out", str(again)])
    assert again.read_bytes() == trace.read_bytes()


def test_mine_then_run_miner(trace, tmp_path):
    rules_path = tmp_path / "rules.jsonl"
    assert main(["mine", "--trace", str(trace), "--out", str(rules_path)]) == EXIT_OK
    rules = load_rules(rules_path.read_text())
    assert any(str(r).startswith("cell(t)!=0, put_cross(t)=1 =>") for r in rules)
    out = tmp_path / "miner.jsonl"
    code = main(["run", "--world", "ttt-eye", "--agent", "miner", "--rules", str(rules_path),
                 "--steps", "50", "--out", str(out)])
    assert code == EXIT_OK and read_trace(out).metadata["agent"] == "miner"


def test_mine_to_stdout(trace, capsys):
    main(["mine", "--trace", str(trace), "--min-support", "30"])
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(json.loads(line)["then"]["sig"] == "bad_move" for line in lines)


def test_replay_ok(trace, capsys):
    assert main(["replay", "--trace", str(trace)]) == EXIT_OK
    assert "2000/2000 steps: ok" in capsys.readouterr().out


def test_replay_mismatch(trace, tmp_path):
    lines = trace.read_text().splitlines()
    lines[1] = lines[1].replace('"rew":["Nothing"]', '"rew":[2]')
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["replay", "--trace", str(bad)]) == EXIT_PROTOCOL


def test_score(trace, capsys):
    assert main(["score", "--trace", str(trace), "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["steps"] == 2000 and len(doc["checkpoints"]) == 10


def test_score_text(trace, capsys):
    main(["score", "--trace", str(trace)])
    assert capsys.readouterr().out.startswith("steps: 2000\nsuccess: (")


def test_check_world_ok(capsys):
    assert main(["check-world", "--world", "ttt-eye", "--trials", "400"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [d["status"] for d in doc] == ["pass", "pass", "pass"]


def test_check_world_tm(capsys):
    assert main(["check-world", "--world", "tm:4:3", "--trials", "200"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc[2]["status"] == "not_guaranteed"


def test_check_world_failure(monkeypatch):
    def failing(world, *a, **kw):
        return AssumptionReport(world.id, {1: AssumptionResult(1, "fail")})

    monkeypatch.setattr(cli, "check_world_assumptions", failing)
    assert main(["check-world", "--world", "ttt-eye"]) == EXIT_ASSUMPTION


def test_missing_trace_is_io_error(tmp_path):
    assert main(["score", "--trace", str(tmp_path / "nope.jsonl")]) == EXIT_IO


def test_corrupt_trace_is_io_error(trace, tmp_path, capsys):
    cut = tmp_path / "cut.jsonl"
    cut.write_text("\n".join(trace.read_text().splitlines()[:5]))
    assert main(["replay", "--trace", str(cut)]) == EXIT_IO
    assert "line 6" in capsys.readouterr().err


def test_unknown_world_is_io_error():
    assert main(["check-world", "--world", "chess"]) == EXIT_IO


def test_bad_usage_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["run"])
    assert err.value.code == 2


def test_log_level_from_env(monkeypatch, trace, caplog):
    monkeypatch.setenv("AIDEF_LOG", "info")
    main(["mine", "--trace", str(trace), "--show", "1"])
    assert any("bad_move(t+1)=1" in r.getMessage() for r in caplog.records)


# --- play ---


def test_play_session(tmp_path):
    out = tmp_path / "played.jsonl"
    stdin = io.StringIO("0 0 1 0\n0 0 1 0\n1 2 3\n9 9\n0 0 0 1\nq\n")
    stdout = io.StringIO()
    assert play("ttt-eye", 0, stdin, stdout, str(out)) == EXIT_OK
    text = stdout.getvalue()
    assert "incorrect move" in text
    assert text.count("rejected input") == 2
    assert "refused: [(0, 0, 1, 0)]" in text
    life = read_trace(out)
    assert [s.output for s in life.steps] == [(0, 0, 1, 0), (0, 0, 0, 1)]
    assert life.steps[1].incorrect == ((0, 0, 1, 0),)
    assert life.metadata["agent"] == "human"


def test_play_duplicate_refused_politely():
    stdin = io.StringIO("0 0 1 0\n0 0 1 0\n0 0 1 0\n")
    stdout = io.StringIO()
    play("ttt-eye", 0, stdin, stdout)
    assert "already refused" in stdout.getvalue()


def test_play_eof_ends():
    stdout = io.StringIO()
    assert play("tm:1:2", 0, io.StringIO(""), stdout) == EXIT_OK
    assert "0 steps" in stdout.getvalue()


def test_play_via_main(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO("0 0 0 0\nq\n"))
    assert main(["play", "--world", "ttt-eye", "--seed", "3"]) == EXIT_OK
    assert "1 steps; success:" in capsys.readouterr().out
