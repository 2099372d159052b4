import json

import pytest
from hypothesis import given, settings, strategies as st

from ballotruns.analysis import Config, analyze_transcript
from ballotruns.cli import EXIT_DOMAIN, EXIT_OK, EXIT_PARSE, EXIT_VERIFY, EXIT_WRITE, main
from ballotruns.errors import ParseError
from ballotruns.files import format_transcript, parse_key_values, parse_transcript, read_transcript
from ballotruns.flagseq import candidate_flags
from ballotruns.report import display, dumps, loads, render_table
from ballotruns.synth import FraudScenario, partial_mix, realise

from conftest import anikeeva_like_flags, transcript_from_columns

LABELS = tuple("ABCDEFGHIJK")
PROBS = (0.3,) * 5 + (0.1,) * 6


def anikeeva_transcript():
    flags = anikeeva_like_flags()
    # every ballot needs a mark: the other candidate takes the rest
    return transcript_from_columns({"Anikeeva": flags, "Other": [1 - f for f in flags]}, "218")


@pytest.fixture
def anikeeva_file(tmp_path):
    path = tmp_path / "p218.csv"
    path.write_text(format_transcript(anikeeva_transcript()))
    return path


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# two-candidate roster\ntop_k = 1\ntuned_k = 2\n")
    return path


def test_analyze_reproduces_table_row(anikeeva_file, small_config, tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(["analyze", "--transcript", str(anikeeva_file), "--config", str(small_config),
               "--format", "machine", "--out", str(out)])
    assert rc == EXIT_OK
    report = loads(out.read_text())
    row = [r for r in report.candidates if r.candidate == "Anikeeva"][0]
    cells = [str(row.r0), str(row.s0), display(row.alpha0.power), str(row.r1), str(row.s1),
             display(row.alpha1.power), str(row.m), display(row.alpha_tilde.power)]
    assert " ".join(cells) == "45 13 11.7 532 382 12.3 19 10.4"
    assert main(["analyze", "--transcript", str(anikeeva_file), "--config", str(small_config)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "11.7*" in text and "Anikeeva" in text


def test_empty_file_is_a_parse_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    assert main(["analyze", "--transcript", str(path)]) == EXIT_PARSE


def test_missing_file_and_bad_config(tmp_path, anikeeva_file):
    assert main(["analyze", "--transcript", str(tmp_path / "nope.csv")]) == EXIT_PARSE
    bad = tmp_path / "bad.txt"
    bad.write_text("bogus_key = 3\n")
    assert main(["analyze", "--transcript", str(anikeeva_file), "--config", str(bad)]) == EXIT_PARSE


def test_domain_error_exit(anikeeva_file):
    # default top-5 does not fit a two-candidate roster
    assert main(["analyze", "--transcript", str(anikeeva_file)]) == EXIT_DOMAIN


def test_unwritable_output(anikeeva_file, small_config, tmp_path):
    out = tmp_path / "missing-dir" / "r.json"
    rc = main(["analyze", "--transcript", str(anikeeva_file), "--config", str(small_config), "--out", str(out)])
    assert rc == EXIT_WRITE


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--preset", "honest", "--seed", "-1"])
    assert exc.value.code == 2


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_transcript("A,B\n1,0\n1,2\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError) as exc:
        parse_transcript("A,B\n1,0\n1\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError):
        parse_transcript("A,A\n1,0\n")
    with pytest.raises(ParseError):
        parse_transcript("A,B\n0,0\n", strict=True)


def test_invalid_rows_are_dropped_and_reported():
    t = parse_transcript("# precinct: 7\nA,B\n1,0\n0,0\n0,1\n", max_marks=1)
    assert t.n == 2 and t.invalid_count == 1
    assert t.metadata["invalid_rows"] == "4"
    with pytest.raises(ParseError):
        parse_transcript("A,B\n1,1\n", max_marks=1)  # nothing valid remains


def test_official_totals_disagreement_is_reported():
    text = "# official: 1,9\nA,B\n1,0\n1,0\n0,1\n"
    t = parse_transcript(text)
    assert t.official_votes == {"A": 1, "B": 9}
    report = analyze_transcript(t, Config(top_k=1, tuned_k=2, segments=2))
    assert any("official" in w for w in report.warnings)


def test_transcript_file_round_trip(tmp_path):
    t = realise(FraudScenario(LABELS, PROBS, 60), 1)
    path = tmp_path / "t.csv"
    path.write_text(format_transcript(t))
    back = read_transcript(path)
    assert back.ballots == t.ballots and back.candidates == t.candidates


def test_key_value_files():
    assert parse_key_values("a = 1  # note\n# skip\nb=x\n") == {"a": "1", "b": "x"}
    with pytest.raises(ParseError):
        parse_key_values("no equals sign here\n")


@pytest.mark.parametrize("x, text", [(12.25, "12.3"), (12.35, "12.4"), (0.04, "0.0"), (0.05, "0.1"), (3.0, "3.0")])
def test_display_rounds_half_up(x, text):
    assert display(x) == text


def test_verify_tables_command(tmp_path, capsys):
    assert main(["verify-tables", "--quiet"]) == EXIT_OK
    assert "369/369" in capsys.readouterr().out
    out = tmp_path / "v.json"
    assert main(["verify-tables", "--format", "machine", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["ok"] and len(doc["checks"]) == 369


def test_verify_tables_failure_exit(monkeypatch, dataset):
    import ballotruns.tables as tables

    row = dataset.candidates[0]
    broken = type(dataset)(
        candidates=(row.perturbed(s1=row.s1 + 1),) + dataset.candidates[1:],
        consolidated=dataset.consolidated, tuned=dataset.tuned, summary=dataset.summary,
    )
    monkeypatch.setattr(tables, "load_dataset", lambda: broken)
    assert main(["verify-tables", "--quiet"]) == EXIT_VERIFY


def test_simulate_command(tmp_path, capsys):
    assert main(["simulate", "--preset", "batch50", "--trials", "0"]) == EXIT_OK
    assert "nothing to aggregate" in capsys.readouterr().out
    scen = tmp_path / "s.txt"
    scen.write_text(
        "candidates = A, B, C, D, E, F\nprobabilities = 0.3, 0.3, 0.3, 0.3, 0.3, 1/10\n"
        "n_honest = 120\nbatch_pattern = A, B, C, D, E\nbatch_size = 30\ntuned_k = 5\n"
    )
    out, reports = tmp_path / "sim.json", tmp_path / "reports"
    rc = main(["simulate", "--config", str(scen), "--trials", "3", "--seed", "18446744073709551615",
               "--format", "machine", "--out", str(out), "--reports", str(reports)])
    assert rc == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["trials"] == 3 and len(doc["metrics"]) == 3
    assert doc["rates"]["consolidated_alpha"][repr(1 / 198)] == 1.0
    assert len(list(reports.iterdir())) == 3
    loads((reports / "trial-00000.json").read_text())
    # same seed, same numbers
    out2 = tmp_path / "sim2.json"
    main(["simulate", "--config", str(scen), "--trials", "3", "--seed", "18446744073709551615",
          "--format", "machine", "--out", str(out2)])
    assert json.loads(out2.read_text())["metrics"] == doc["metrics"]


def test_bad_scenario_exit(tmp_path):
    scen = tmp_path / "s.txt"
    scen.write_text("candidates = A, B\nprobabilities = 0.3\nn_honest = 10\n")
    assert main(["simulate", "--config", str(scen)]) == EXIT_DOMAIN


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**63), st.integers(1, 40))
def test_report_round_trip_and_mixing_invariance(seed, chunk):
    sc = FraudScenario(LABELS, PROBS, 150, batch_pattern=LABELS[:5], batch_size=25)
    t = realise(sc, seed)
    report = analyze_transcript(t)
    assert loads(dumps(report)) == report
    assert dumps(loads(dumps(report))) == dumps(report)
    mixed = analyze_transcript(partial_mix(t, chunk, seed))
    for a, b in zip(report.candidates, mixed.candidates):
        assert (a.candidate, a.r0, a.r1) == (b.candidate, b.r0, b.r1)
    assert render_table(report).count("\n") >= t.c + 3
    assert candidate_flags(t, "A").r1 == report.candidates[0].r1
