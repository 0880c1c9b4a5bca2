import io
import json

import pytest

from toy import TOY
from regbisim import cli


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    body = "".join(l for l in out.getvalue().splitlines(True) if not l.startswith("#"))
    return code, body, err.getvalue()


@pytest.fixture
def toy_bundle(tmp_path):
    d = tmp_path / "toy"
    d.mkdir()
    (d / "model.pts").write_text(TOY)
    (d / "E.rel").write_text('rel E(x, y) = x = "001" & y = "111";\n')
    (d / "bad.rel").write_text('rel E(x, y) = x = "01" & y = "00";\n')
    man = {"name": "toy", "model": "model.pts", "seed": "E.rel", "relations": {"bad": "bad.rel"}}
    (d / "manifest.json").write_text(json.dumps(man))
    return d


def test_validate_random_walk():
    code, body, _ = run("validate", "models/random_walk")
    assert code == cli.OK
    assert "w=4, N=2" in body


def test_validate_rejects_corrupted_model(tmp_path):
    src = (cli.models.resolve("random_walk") / "model.pts").read_text()
    bad = tmp_path / "walk.pts"
    bad.write_text(src.replace("x = y & z = 100", "x = y & z = 11"))
    code, body, _ = run("validate", str(bad))
    assert code == cli.INVALID and body.startswith("Invalid(")


def test_broken_model_file_is_invalid(tmp_path):
    bad = tmp_path / "broken.pts"
    bad.write_text("model m { alphabet = [0, 1]; weight = 1; }")
    assert run("validate", str(bad))[0] == cli.INVALID


def test_check_paper_relation():
    code, body, _ = run("check", "models/ppda", "--relation", "models/ppda/paper_R", "--seed", "models/ppda/E")
    assert code == cli.OK and body.strip() == "Verified"


def test_check_mutant_and_budget():
    code, body, _ = run("check", "ppda", "--relation", "mutated_R", "--seed", "E")
    assert code == cli.NEGATIVE and body.startswith("NotBisim(a")
    code, body, _ = run("check", "ppda", "--relation", "paper_R", "--budget", "20")
    assert code == cli.BUDGET and body.startswith("ResourceExceeded")


def test_reports_are_reproducible():
    args = ("check", "ppda", "--relation", "mutated_R", "--json")
    first, second = run(*args), run(*args)
    assert first == second
    assert json.loads(first[1])["outcome"] == "NotBisim"


@pytest.mark.parametrize(
    "argv",
    [
        ("check", "ppda"),
        ("validate", "no_such_bundle"),
        ("check", "ppda", "--relation", "missing"),
        ("learn", "dcp_single", "--invariant", "x.rel", "--no-invariant"),
        ("frobnicate",),
        ("slice", "ppda"),
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == cli.USAGE


def test_slice_writes_configs_and_partition(toy_bundle, tmp_path):
    part = tmp_path / "part.txt"
    code, body, _ = run("slice", str(toy_bundle / "model.pts"), "-n", "2", "--partition", str(part))
    assert code == cli.OK
    assert body.startswith("weight 2\nconfigs 00 01 10 11\n")
    assert part.read_text() == "block 0: 00 10\nblock 1: 01 11\n"


def test_slice_of_padded_model_is_invalid():
    assert run("slice", "random_walk", "-n", "2")[0] == cli.INVALID


def test_tracedist_exact():
    code, body, _ = run("tracedist", "dcp_single", "-n", "3", "--from", "u0 u1 u1", "--from", "u0' u0' u0'", "--depth", "12")
    assert (code, body) == (cli.OK, "distance = 0\n")
    code, body, _ = run("tracedist", "dcp_single", "-n", "3", "--from", "u0 u1 u0", "--from", "u1 u0 u0", "--depth", "12")
    assert body == "distance = 1\n"


def test_learn_writes_proof_and_transcript(toy_bundle, tmp_path):
    out = tmp_path / "out"
    code, body, _ = run("learn", str(toy_bundle), "--out", str(out))
    assert code == cli.OK
    assert "E ⊆ L(H): yes" in body and "recheck: Verified" in body
    assert (out / "proof.txt").read_text().startswith("states ")
    assert (out / "proof.dot").read_text().startswith("digraph")
    assert "equivalence -> Correct" in (out / "transcript.txt").read_text()
    assert json.loads((out / "report.json").read_text())["outcome"] == "Proof"


def test_learn_no_solution_and_budget(toy_bundle, tmp_path):
    man = json.loads((toy_bundle / "manifest.json").read_text())
    man["seed"] = "bad.rel"
    (toy_bundle / "manifest.json").write_text(json.dumps(man))
    cli.models._build.cache_clear()
    code, body, _ = run("learn", str(toy_bundle), "--out", str(tmp_path / "a"))
    assert code == cli.NEGATIVE and "unrelated seed pair: '01', '00'" in body
    code, body, _ = run("learn", str(toy_bundle), "--out", str(tmp_path / "b"), "--max-length", "1")
    assert code == cli.BUDGET and "membership" in body


def test_export_ws1s(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("# prefix test\nx <=p y\n")
    code, body, _ = run("export-ws1s", str(f))
    assert code == cli.OK
    assert "pred Pref(var2 X, var2 Y)" in body and "Pref(W_x, W_y)" in body
    f.write_text("x <")
    assert run("export-ws1s", str(f))[0] == cli.USAGE


def test_validation_cache(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path / "cache"))
    first = run("validate", "random_walk")
    assert len(list((tmp_path / "cache").iterdir())) == 1
    monkeypatch.setattr(cli, "validate", lambda p: pytest.fail("cache not used"))
    assert run("validate", "random_walk") == first


def test_internal_errors_exit_5(monkeypatch):
    def boom(p):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "validate", boom)
    code, _, err = run("validate", "random_walk")
    assert code == cli.INTERNAL and "boom" in err
