import copy
import json

from ncdisc.cli import main
from ncdisc.cohomology import Cochain, coboundary
from ncdisc.derivations import GeneratorDerivation, inner_derivation
from ncdisc.series import Series
from ncdisc.words import Alphabet

A2 = Alphabet(2)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def scrub_timings(report):
    report = copy.deepcopy(report)
    stack = [report]
    while stack:
        node = stack.pop()
        if isinstance(node, dict):
            if "elapsed_s" in node:
                node["elapsed_s"] = 0.0
            stack.extend(node.values())
        elif isinstance(node, list):
            stack.extend(node)
    return report


def test_verify_words_passes(capsys):
    code, out = run(capsys, "verify-words", "--max-len", "4")
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1
    assert report["suite"] == "words"
    assert report["passed"] is True
    assert all(check["passed"] for check in report["checks"])


def test_verify_operators_passes(capsys):
    code, out = run(capsys, "verify-operators", "--cutoff", "4")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_report_all_passes_and_merges_sorted(capsys):
    code, out = run(capsys, "report-all", "--max-len", "4", "--cutoff", "4")
    assert code == 0
    report = json.loads(out)
    names = [sub["suite"] for sub in report["reports"]]
    assert names == sorted(names)
    assert {"cohomology", "derivations", "operators", "words"} == set(names)


def test_reports_are_deterministic(capsys):
    args = ("report-all", "--max-len", "3", "--cutoff", "3", "--seed", "7")
    _, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert scrub_timings(json.loads(first)) == scrub_timings(json.loads(second))


def test_csv_format(capsys):
    code, out = run(capsys, "verify-words", "--max-len", "3", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "suite,check,passed,elapsed_s"
    assert all(line.startswith("words,") for line in lines[1:])


def test_suites_pass_for_other_alphabet_sizes(capsys):
    code, _ = run(capsys, "verify-words", "--alphabet", "1", "--max-len", "4")
    assert code == 0
    code, _ = run(capsys, "verify-words", "--alphabet", "3", "--max-len", "4")
    assert code == 0
    code, _ = run(capsys, "verify-operators", "--alphabet", "3", "--cutoff", "3")
    assert code == 0


def test_tightened_tolerance_still_passes(capsys):
    code, out = run(capsys, "verify-operators", "--cutoff", "3", "--tol", "1e-14")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_bad_config_is_rejected(capsys):
    code, _ = run(capsys, "verify-words", "--alphabet", "0")
    assert code == 2
    code, _ = run(capsys, "verify-operators", "--tol", "-1")
    assert code == 2


def test_solve_derivation_roundtrip(tmp_path, capsys):
    symbol = Series(A2, {A2.word([0, 1]): 2.0, A2.generator(1): -1.0})
    derivation = GeneratorDerivation.inner(symbol)
    infile = tmp_path / "derivation.json"
    outfile = tmp_path / "symbol.json"
    infile.write_text(json.dumps(derivation.to_json_dict()))

    code, out = run(capsys, "solve-derivation", "--in", str(infile), "--out", str(outfile))
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert all(v == 0.0 for v in report["max_generator_deviation"].values())

    recovered = Series.from_json_dict(json.loads(outfile.read_text()))
    assert recovered == symbol
    for a in range(2):
        produced = inner_derivation(recovered, Series.basis(A2.generator(a)))
        assert produced == derivation.value(a)


def test_solve_derivation_worked_example(tmp_path, capsys):
    derivation = GeneratorDerivation.inner(Series.basis(A2.generator(0)))
    infile = tmp_path / "derivation.json"
    infile.write_text(json.dumps(derivation.to_json_dict()))
    code, out = run(capsys, "solve-derivation", "--in", str(infile))
    assert code == 0
    payload = json.loads(out)
    assert payload["series"]["terms"] == [{"word": "z0", "re": 1.0, "im": 0.0}]


def test_solve_derivation_inconsistent_input(tmp_path, capsys):
    poisoned = GeneratorDerivation(A2, {0: Series.unit(A2)})
    infile = tmp_path / "bad.json"
    infile.write_text(json.dumps(poisoned.to_json_dict()))
    code, out = run(capsys, "solve-derivation", "--in", str(infile))
    assert code == 1
    report = json.loads(out)
    assert report["passed"] is False
    assert report["error"]["check"] == "commuting_support"
    assert report["error"]["word"] == "e"


def test_solve_derivation_bad_input(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    code, _ = run(capsys, "solve-derivation", "--in", str(missing))
    assert code == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    code, _ = run(capsys, "solve-derivation", "--in", str(garbled))
    assert code == 2


def test_trivialize_cocycle_roundtrip(tmp_path, capsys):
    eta = Cochain(2, A2, {(A2.generator(0), A2.word([1, 0])): 1.5})
    cocycle = coboundary(eta)
    infile = tmp_path / "cocycle.json"
    outfile = tmp_path / "homotopy.json"
    infile.write_text(json.dumps(cocycle.to_json_dict()))

    code, out = run(capsys, "trivialize-cocycle", "--in", str(infile), "--out", str(outfile))
    assert code == 0
    assert json.loads(out)["passed"] is True

    psi = Cochain.from_json_dict(json.loads(outfile.read_text()))
    assert coboundary(psi) == cocycle


def test_trivialize_zero_cochain(tmp_path, capsys):
    zero = Cochain(2, A2, {})
    infile = tmp_path / "zero.json"
    outfile = tmp_path / "psi.json"
    infile.write_text(json.dumps(zero.to_json_dict()))
    code, _ = run(capsys, "trivialize-cocycle", "--in", str(infile), "--out", str(outfile))
    assert code == 0
    psi = Cochain.from_json_dict(json.loads(outfile.read_text()))
    assert psi.arity == 1
    assert psi.is_zero()


def test_trivialize_cocycle_rejects_non_cocycle(tmp_path, capsys):
    arity2 = Cochain(2, A2, {(A2.word([0, 1]), A2.generator(1)): 1.0})
    infile = tmp_path / "noncocycle.json"
    infile.write_text(json.dumps(arity2.to_json_dict()))
    code, out = run(capsys, "trivialize-cocycle", "--in", str(infile))
    assert code == 1
    report = json.loads(out)
    assert report["error"]["witness"] == ["z0", "z1", "z1"]


def test_trivialize_cocycle_rejects_low_arity(tmp_path, capsys):
    low = Cochain(1, A2, {(A2.generator(0),): 1.0})
    infile = tmp_path / "low.json"
    infile.write_text(json.dumps(low.to_json_dict()))
    code, _ = run(capsys, "trivialize-cocycle", "--in", str(infile))
    assert code == 2


def test_replay_reruns_a_check(tmp_path, capsys):
    payload = {
        "check": "words.power_shift_sweep",
        "params": {"m": 2, "w_max": 2, "u_max": 3},
    }
    path = tmp_path / "payload.json"
    path.write_text(json.dumps(payload))
    code, out = run(capsys, "verify-words", "--replay", str(path))
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_replay_rejects_unknown_check(tmp_path, capsys):
    path = tmp_path / "payload.json"
    path.write_text(json.dumps({"check": "words.no_such_check", "params": {}}))
    code, _ = run(capsys, "verify-words", "--replay", str(path))
    assert code == 2


def test_dump_matrix(tmp_path, capsys):
    series = Series(A2, {A2.generator(0): 1.0})
    infile = tmp_path / "series.json"
    outfile = tmp_path / "matrix.csv"
    infile.write_text(json.dumps(series.to_json_dict()))
    code, _ = run(
        capsys,
        "verify-operators",
        "--cutoff", "1",
        "--dump-matrix", str(infile),
        "--out", str(outfile),
    )
    assert code == 0
    lines = outfile.read_text().strip().splitlines()
    assert lines[0] == "row,col,re,im"
    assert "z0,e,1.0,0.0" in lines


def test_report_written_to_file(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, out = run(capsys, "verify-words", "--max-len", "3", "--out", str(out_path))
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["suite"] == "words"
    # stdout carries one status line per check
    assert len(out.strip().splitlines()) == len(report["checks"])
