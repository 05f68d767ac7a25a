import json
import shutil

import pytest

from dtt.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_EVAL, EXIT_OK, main
from conftest import CORPUS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format=json")
    return code, json.loads(out)


def test_check_prelude(capsys):
    code, rep = run_json(capsys, "check", CORPUS / "prelude.dtt")
    assert code == EXIT_OK
    names = {d["name"] for d in rep["declarations"] if d["kind"] == "def"}
    assert {"E1", "E2", "C1", "C2", "symm", "der", "dA"} <= names


def test_check_stops_at_first_error(capsys):
    code, rep = run_json(capsys, "check", CORPUS / "mutants.dtt")
    assert code == EXIT_CHECK
    assert len(rep["diagnostics"]) == 1
    assert rep["diagnostics"][0]["line"] > 0


def test_keep_going_reports_all_mutants(capsys):
    code, rep = run_json(capsys, "check", CORPUS / "mutants.dtt", "--keep-going")
    assert code == EXIT_CHECK
    assert len(rep["diagnostics"]) == 20


def test_missing_file(capsys):
    code, _ = run(capsys, "check", "does-not-exist.dtt")
    assert code == EXIT_CONFIG


def test_exclusive_fext_flags(capsys):
    code, _ = run(capsys, "normalize", CORPUS / "rewrites.dtt", "--term=r03", "--rules=fext1,fext2")
    assert code == EXIT_CONFIG


def test_unknown_option(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check", "--bogus"])
    assert info.value.code == EXIT_CONFIG


def test_normalize(capsys):
    code, rep = run_json(capsys, "normalize", CORPUS / "rewrites.dtt", "--term=r03", "--rules=beta,etad")
    assert code == EXIT_OK
    assert rep["result"]["normal_form"] == "e"


def test_rules_extend_file_set(capsys):
    code, rep = run_json(capsys, "normalize", CORPUS / "rewrites.dtt", "--term=r09", "--rules=+cext")
    assert rep["result"]["normal_form"] == "<refl a0, refl b0>"


def test_fuel_exhaustion(capsys):
    code, out = run(capsys, "normalize", CORPUS / "rewrites.dtt", "--term=r20", "--rules=beta,betad", "--fuel=1")
    assert code == EXIT_EVAL
    assert "fuel 1 exhausted" in out


def test_eval_bag(capsys):
    code, rep = run_json(
        capsys, "eval", CORPUS / "bag.dtt", "--term=delta", "--backend=change", f"--env={CORPUS / 'bag.change.json'}"
    )
    assert code == EXIT_OK
    assert rep["result"]["value"] == 4 and rep["result"]["sound"] is True


def test_eval_needs_matching_env(capsys):
    code, _ = run(capsys, "eval", CORPUS / "bag.dtt", "--term=delta", "--backend=dlr", f"--env={CORPUS / 'bag.change.json'}")
    assert code == EXIT_CONFIG


def test_eval_unknown_term(capsys):
    code, _ = run(capsys, "eval", CORPUS / "bag.dtt", "--term=nope", "--backend=change", f"--env={CORPUS / 'bag.change.json'}")
    assert code == EXIT_CONFIG


def test_eval_unsound_environment(capsys, tmp_path):
    data = json.loads((CORPUS / "bag.change.json").read_text())
    data["dconsts"]["dxs"]["value"]["add"] = [4]
    env = tmp_path / "bad.json"
    env.write_text(json.dumps(data))
    code, out = run(capsys, "eval", CORPUS / "bag.dtt", "--term=delta", "--backend=change", f"--env={env}")
    assert code == EXIT_EVAL
    assert "does not inhabit" in out


def test_derive_cdc_symbolic(capsys):
    code, rep = run_json(
        capsys, "derive", CORPUS / "square.dtt", "square", "--backend=cdc", f"--env={CORPUS / 'square.cdc.json'}"
    )
    assert code == EXIT_OK
    assert rep["result"]["symbolic"] == ["2*v*x"]
    assert rep["result"]["expansion"] == "Der[R, R] square"


def test_derive_metric_propagates_error(capsys):
    code, rep = run_json(
        capsys,
        "derive",
        CORPUS / "rewrites_fuzz.dtt",
        "f",
        "--backend=metric",
        f"--env={CORPUS / 'rewrites_fuzz.metric.json'}",
    )
    assert code == EXIT_OK
    rows = rep["result"]["semantics"]["table"]
    assert rows and all(row[-1] == row[-2] for row in rows)


def test_derive_without_backend(capsys):
    code, out = run(capsys, "derive", CORPUS / "prelude.dtt", "f")
    assert code == EXIT_OK
    assert "Der[A, B] f" in out


def test_json_is_deterministic(capsys):
    args = ("eval", CORPUS / "prelude.dtt", "--term=C2", "--backend=dlr", f"--env={CORPUS / 'prelude.dlr.json'}", "--format=json")
    _, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert first == second
    assert "timing" not in json.loads(first)
    _, timed = run(capsys, *args, "--timing")
    assert "timing" in json.loads(timed)


def test_report_schema_is_stable_across_backends(capsys):
    keys = set()
    for backend in ("dlr", "change", "cdc"):
        _, rep = run_json(
            capsys, "eval", CORPUS / "square.dtt", "--term=dsquare", f"--backend={backend}", f"--env={CORPUS / f'square.{backend}.json'}"
        )
        keys.add(tuple(sorted(rep)))
        keys.add(tuple(sorted(rep["result"])))
    assert len(keys) == 2


def test_corpus_runner(capsys, tmp_path):
    for name in ("trivial.dtt", "bag.dtt", "bag.change.json", "mutants.dtt"):
        shutil.copy(CORPUS / name, tmp_path / name)
    code, rep = run_json(capsys, "corpus", tmp_path)
    assert code == EXIT_OK
    assert rep["result"]["failed"] == 0
    code, rep = run_json(capsys, "corpus", tmp_path, "--rules=+jeta-plus")
    assert code == EXIT_CHECK
    bad = [c for c in rep["result"]["cases"] if not c["ok"]]
    assert bad and all(c["case"] == "trivialization" for c in bad)
    assert all(c["reproduce"].startswith("dttc ") for c in bad)
