import json

import pytest

from hamon.cli import EXIT_ALARM, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, main

PLATOON_LOG = "time,x1,x2\n0,40,35\n10,123,117\n20,203,201\n"
SHORT_LOG = "time,x1,x2\n0,40,35\n10,123,117\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "log.csv").write_text(PLATOON_LOG)
    (tmp_path / "short.csv").write_text(SHORT_LOG)
    (tmp_path / "spec.json").write_text('{"atoms": ["x1 - x2 > 0"]}')
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_monitor_alarm(files, capsys):
    code, out, _ = run(capsys, "monitor", "ACCI", files / "log.csv")
    assert code == EXIT_ALARM
    assert "C = {3}" in out


def test_monitor_spec_and_method1(files, capsys):
    model = files / "platoon.json"
    from hamon.benchmarks import platoon
    from hamon.modelio import dump_model

    dump_model(platoon(), model)
    code, out, _ = run(capsys, "monitor", model, files / "log.csv", "--spec", files / "spec.json", "--method", "1")
    assert code == EXIT_ALARM and "C = {3}" in out


def test_monitor_no_alarm(files, capsys):
    code, out, _ = run(capsys, "monitor", "ACCI", files / "short.csv")
    assert code == EXIT_OK
    assert "C = {}" in out


def test_monitor_json_witness(files, capsys):
    code, out, _ = run(capsys, "monitor", "ACCI", files / "log.csv", "--json", "--witness")
    data = json.loads(out)
    assert code == EXIT_ALARM and data["C"] == [3]
    assert data["indices"][2]["witness"][0]["kind"] == "start"


def test_monitor_inconclusive(files, capsys):
    code, out, _ = run(capsys, "monitor", "ACCI", files / "log.csv", "--cap", "1")
    assert code in (EXIT_ALARM, EXIT_INCONCLUSIVE)
    code, out, _ = run(capsys, "monitor", "ACCI", files / "short.csv", "--cap", "1")
    assert code == EXIT_INCONCLUSIVE


def test_follow_stdin(files, capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(PLATOON_LOG))
    code, out, _ = run(capsys, "monitor", "ACCI", "-", "--follow", "--json")
    rows = [json.loads(l) for l in out.splitlines()]
    assert [r["verdict"] for r in rows] == ["rejected", "rejected", "accepted"]
    assert code == EXIT_ALARM


def test_input_errors(files, capsys):
    assert run(capsys, "monitor", "ACCI", files / "missing.csv")[0] == EXIT_INPUT
    assert run(capsys, "monitor", "NOPE", files / "log.csv")[0] == EXIT_INPUT
    (files / "bad.csv").write_text("time,x1,x2\n0,1.5e3,2\n")
    assert run(capsys, "monitor", "ACCI", files / "bad.csv")[0] == EXIT_INPUT
    (files / "other.csv").write_text("time,a,b\n0,1,2\n")
    assert run(capsys, "monitor", "ACCI", files / "other.csv")[0] == EXIT_INPUT


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["monitor"])
    assert exc.value.code == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_INPUT


def test_output_needs_force(files, capsys):
    out = files / "gen.csv"
    assert run(capsys, "gen-log", "ACCI", "--length", 4, "-o", out)[0] == EXIT_OK
    first = out.read_text()
    assert first.startswith("time,x1,x2")
    assert run(capsys, "gen-log", "ACCI", "--length", 4, "--seed", 1, "-o", out)[0] == EXIT_INPUT
    assert out.read_text() == first
    assert run(capsys, "gen-log", "ACCI", "--length", 4, "--seed", 1, "-o", out, "--force")[0] == EXIT_OK


def test_export_and_product(files, capsys):
    code, out, _ = run(capsys, "export", "ACCI", files / "log.csv")
    assert code == EXIT_OK and out.startswith("// hamon export")
    (files / "empty.csv").write_text("time,x1,x2\n")
    assert run(capsys, "export", "ACCI", files / "empty.csv")[0] == EXIT_INPUT
    code, out, _ = run(capsys, "product", "ACCI", "ACCI")
    assert code == EXIT_OK and len(json.loads(out)["locations"]) == 16


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "ACCI")
    assert code == EXIT_OK


def test_bench_small(capsys):
    code, out, _ = run(capsys, "bench", "--model", "ACCI", "--lengths", "3", "--seeds", 1, "--method", "both")
    data = json.loads(out)
    assert code == EXIT_OK and len(data["cells"]) == 2
    assert run(capsys, "bench")[0] == EXIT_INPUT
