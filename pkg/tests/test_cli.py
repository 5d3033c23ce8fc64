import json

import numpy as np
import pytest

from blockcoh.blockcore import BlockPartition, block_projectors
from blockcoh.channels import KrausSet, classifier_report, gen_random
from blockcoh.cli import main
from blockcoh.sampling import haar_unitary, random_povm
from blockcoh.serialize import kraus_to_json, matrix_to_json, povm_to_json
from blockcoh.naimark import Povm


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_kraus(path, ks):
    path.write_text(json.dumps(kraus_to_json(ks)))
    return str(path)


def test_classify_projectors(tmp_path, capsys):
    p = BlockPartition((2, 3))
    ks = KrausSet(p, np.array(block_projectors(p)))
    path = write_kraus(tmp_path / "proj.json", ks)
    code, out, _ = run(capsys, "classify", path)
    assert code == 0
    report = json.loads(out)
    for key in ("cptp", "mbio", "bio_structural", "bio_semantic",
                "sbio_structural", "sbio_semantic"):
        assert report[key] is True
    assert report["tolerance"] == 1e-10


def test_classify_dense_unitary(tmp_path, capsys):
    p = BlockPartition((2, 3))
    ks = KrausSet(p, haar_unitary(5, 0))
    path = write_kraus(tmp_path / "dense.json", ks)
    code, out, _ = run(capsys, "classify", path)
    assert code == 0
    report = json.loads(out)
    assert report["cptp"] is True
    assert report["bio_structural"] is False
    assert report["bio_semantic"] is False


def test_classify_non_cptp_exits_2(tmp_path, capsys):
    p = BlockPartition((2, 3))
    ks = KrausSet(p, np.array([np.eye(5), np.eye(5)]))
    path = write_kraus(tmp_path / "bad.json", ks)
    code, out, _ = run(capsys, "classify", path)
    assert code == 2
    assert json.loads(out)["cptp"] is False


def test_classify_parse_error_exits_1(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    code, out, err = run(capsys, "classify", str(path))
    assert code == 1
    message = json.loads(err)
    assert "error" in message


def test_classify_names_offending_operator(tmp_path, capsys):
    obj = {
        "dim": 5,
        "partition": [2, 3],
        "kraus": [matrix_to_json(np.eye(5)), matrix_to_json(np.eye(4))],
    }
    path = tmp_path / "mismatch.json"
    path.write_text(json.dumps(obj))
    code, _, err = run(capsys, "classify", str(path))
    assert code == 1
    assert "operator 1" in json.loads(err)["error"]


def test_gen_classify_roundtrip(tmp_path, capsys):
    # file-based classification agrees with the in-memory report
    cases = [
        (kind, dims, seed)
        for kind in ("bio", "sbio", "pbio", "unitary")
        for dims in ((1, 1), (2, 3), (1, 2, 2))
        for seed in (0, 1, 2, 3, 4)
    ]
    assert len(cases) >= 50
    for kind, dims, seed in cases:
        partition = ",".join(str(x) for x in dims)
        out_path = tmp_path / f"{kind}-{partition}-{seed}.json"
        code, _, _ = run(capsys, "gen", "--class", kind, "--partition", partition,
                         "--seed", str(seed), "-o", str(out_path))
        assert code == 0
        code, out, _ = run(capsys, "classify", str(out_path))
        assert code == 0
        ks = gen_random(kind, BlockPartition(dims), seed)
        assert json.loads(out) == classifier_report(ks)


def test_classify_reads_stdin(capsys, monkeypatch):
    import io

    ks = gen_random("sbio", BlockPartition((2, 3)), 7)
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(kraus_to_json(ks))))
    code, out, _ = run(capsys, "classify", "-")
    assert code == 0
    assert json.loads(out)["sbio_structural"] is True


def test_bound_cli_frozen(capsys):
    code, out, _ = run(capsys, "bound", "--class", "bio", "--partition", "2,3")
    assert code == 0
    payload = json.loads(out)
    assert payload == {
        "partition": [2, 3],
        "class": "bio",
        "per_level": ["44772", "574"],
        "total": "45346",
    }
    code, out, _ = run(capsys, "bound", "--class", "sbio", "--partition", "2,2")
    assert json.loads(out)["total"] == "480"


def test_dilate_cli(tmp_path, capsys):
    povm = Povm(random_povm(2, 3, 4))
    path = tmp_path / "povm.json"
    path.write_text(json.dumps(povm_to_json(povm)))
    code, out, _ = run(capsys, "dilate", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["dim"] == 2
    assert payload["outcomes"] == 3
    assert payload["ancilla_index"] == 0
    assert payload["partition"] == [2, 2, 2]
    assert sorted(payload["permutation"]) == list(range(6))
    v = np.array([[complex(re, im) for re, im in row] for row in payload["V"]])
    assert np.max(np.abs(v.conj().T @ v - np.eye(6))) <= 1e-9


def test_measure_cli(tmp_path, capsys):
    plus = {
        "dim": 2,
        "matrix": [[[0.5, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.5, 0.0]]],
    }
    path = tmp_path / "plus.json"
    path.write_text(json.dumps(plus))
    code, out, _ = run(capsys, "measure", "--state", str(path), "--partition", "1,1")
    assert code == 0
    payload = json.loads(out)
    assert payload["measure"] == "rel-entropy"
    assert abs(payload["value"] - 1.0) <= 1e-12
    code, out, _ = run(capsys, "measure", "--state", str(path), "--partition", "1,1",
                       "--measure", "l1")
    assert abs(json.loads(out)["value"] - 1.0) <= 1e-12


def test_measure_cli_rejects_bad_state(tmp_path, capsys):
    bad = {"dim": 2, "matrix": [[[1.0, 0.0], [0.9, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, _, err = run(capsys, "measure", "--state", str(path), "--partition", "1,1")
    assert code == 1
    assert "error" in json.loads(err)


def test_verify_suites_pass(capsys):
    for suite in ("appendix-a", "appendix-b", "lemmas", "inclusion", "naimark", "measures"):
        code, out, _ = run(capsys, "verify", suite, "--trials", "10", "--seed", "5")
        assert code == 0, f"{suite} failed:\n{out}"
        assert out.strip()
        assert all(line.startswith("PASS") for line in out.strip().splitlines())


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit):
        main(["verify", "no-such-suite"])


def test_cli_outputs_are_deterministic(tmp_path, capsys):
    argv = ["gen", "--class", "sbio", "--partition", "2,3", "--seed", "9"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second

    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(capsys, *argv, "-o", str(a))
    run(capsys, *argv, "-o", str(b))
    assert a.read_bytes() == b.read_bytes()

    _, v1, _ = run(capsys, "verify", "inclusion", "--trials", "5")
    _, v2, _ = run(capsys, "verify", "inclusion", "--trials", "5")
    assert v1 == v2


def test_env_tolerance_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BLOCKCOH_TOL", "1e-6")
    p = BlockPartition((2, 3))
    ks = KrausSet(p, np.array(block_projectors(p)))
    path = write_kraus(tmp_path / "proj.json", ks)
    code, out, _ = run(capsys, "classify", str(path))
    assert code == 0
    assert json.loads(out)["tolerance"] == 1e-6
