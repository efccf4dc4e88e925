import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from qpr import certifier
from qpr.cli import main
from qpr.documents import (
    DocumentError,
    bases_document,
    canonical_hash,
    certificate_document,
    load_bases,
    read_witness,
    tag_numbers,
)
from qpr.families import FamilySpec, family_bases
from qpr.lp import check_farkas

STAB_DOC = {"version": 1, "dim": 2, "bases": [{"bloch": [1, 0, 0]}, {"bloch": [0, 1, 0]}, {"bloch": [0, 0, 1]}]}


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
    return str(path)


def test_certify_stabilizer(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["certify", write(tmp_path, "s.json", STAB_DOC), "--symmetric", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "feasible" and doc["mode"] == "exact"
    assert set(read_witness(doc).values()) == {Fraction(1, 4)}
    assert doc["input_sha256"] == canonical_hash(STAB_DOC)


def test_certify_icosahedron_farkas_roundtrip(tmp_path, capsys):
    path = write(tmp_path, "i.json", bases_document(family_bases(FamilySpec("icosahedron"))))
    assert main(["certify", path]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["witness"]["type"] == "farkas" and doc["verified"]
    _, bases = load_bases(json.loads(open(path).read()))
    problem = certifier.build_problem(bases)
    y = read_witness(doc)
    assert check_farkas(problem.matrix(), problem.rhs(True), [y[label] for label in problem.row_labels])


@pytest.mark.parametrize("payload", ["{bad", json.dumps({"bases": [{"bloch": [1, 1, 0]}]}),
                                     json.dumps({"bases": []}), json.dumps([1, 2]),
                                     json.dumps({"bases": [{"bloch": [0, 0, 1]}, {"bloch": [0, 0, -1]}]}),
                                     json.dumps({"version": 9, "bases": [{"bloch": [0, 0, 1]}]})])
def test_certify_invalid_input(tmp_path, payload, capsys):
    assert main(["certify", write(tmp_path, "b.json", payload)]) == 2
    assert "invalid input" in capsys.readouterr().err


def test_certify_missing_file(tmp_path):
    assert main(["certify", str(tmp_path / "nope.json")]) == 2


def test_certify_rational_strings_exact(tmp_path, capsys):
    doc = {"bases": [{"bloch": ["3/5", 0, "4/5"]}, {"bloch": [0, 1, 0]}]}
    assert main(["certify", write(tmp_path, "r.json", doc)]) == 0
    assert json.loads(capsys.readouterr().out)["rhs_shift"] == 0


def test_qpr_mode_env(tmp_path, monkeypatch, capsys):
    path = write(tmp_path, "s.json", STAB_DOC)
    monkeypatch.setenv("QPR_MODE", "float")
    assert main(["certify", path]) == 0
    assert json.loads(capsys.readouterr().out)["mode"] == "float"
    monkeypatch.setenv("QPR_MODE", "bogus")
    assert main(["certify", path]) == 2


def test_certify_numerical_failure(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise certifier.NumericalFailure("pivot budget exhausted")
    monkeypatch.setattr(certifier, "certify", boom)
    assert main(["certify", write(tmp_path, "s.json", STAB_DOC)]) == 3


def test_family_d3_stabilizer_equivalent(capsys):
    assert main(["family", "d3", "--theta", "0.9553"]) == 0
    gram = json.loads(capsys.readouterr().out)["gram"]
    assert all(abs(gram[i][j]) < 1e-4 for i in range(3) for j in range(3) if i != j)


def test_family_cube(capsys):
    assert main(["family", "cuboid", "--theta", "0.9553", "--phi", "0.7854"]) == 0
    doc = json.loads(capsys.readouterr().out)
    for b in doc["bases"]:
        assert all(abs(abs(x) - 1 / math.sqrt(3)) < 1e-4 for x in b["bloch"])


def test_family_emit_frame(capsys):
    assert main(["family", "c2", "--theta", "0.8", "--phi", "1.3", "--emit-frame"]) == 0
    assert len(json.loads(capsys.readouterr().out)["frame"]) == 8


def test_family_out_of_range(capsys):
    assert main(["family", "d3", "--theta", "1.5708", "--emit-frame"]) == 2
    assert "8/9" in capsys.readouterr().err


def test_scan_d3(capsys):
    assert main(["scan", "d3", "--lo", "0.5", "--hi", "1.5"]) == 0
    out = capsys.readouterr().out
    s2 = float(out.split("sin^2 = ")[1].split()[0])
    assert abs(s2 - 8 / 9) < 1e-6


def test_scan_c2(capsys):
    assert main(["scan", "c2", "--param", "phi", "--theta", str(math.pi / 3), "--lo", "0.01", "--hi", "1.5"]) == 0
    cos = float(capsys.readouterr().out.split("cos = ")[1].split()[0])
    assert abs(cos - math.sqrt(3) / 2) < 1e-6


def test_scan_no_threshold(capsys):
    assert main(["scan", "d3", "--lo", "0.2", "--hi", "0.5"]) == 2
    assert "no threshold" in capsys.readouterr().err


def test_simulate(capsys):
    assert main(["simulate", "--family", "stabilizer", "--initial", "z+", "--circuit", "H", "--measure", "x"]) == 0
    out = capsys.readouterr().out
    assert "ontic:   1 0" in out and "agree: true" in out
    assert main(["simulate", "--family", "d3", "--theta", "0.8", "--initial", "b1+", "--circuit", "GAMMA",
                 "--measure", "b2"]) == 0
    assert "agree: true" in capsys.readouterr().out


def test_simulate_unknown_names():
    assert main(["simulate", "--initial", "q+", "--circuit", "H", "--measure", "x"]) == 2
    assert main(["simulate", "--initial", "z+", "--circuit", "T", "--measure", "x"]) == 2


def test_bad_arguments():
    assert main(["family", "hexagon"]) == 2
    assert main([]) == 2


def test_verify_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--suite", "qudit", "--trials", "5", "--seed", "3", "--out", str(a)]) == 0
    assert main(["verify", "--suite", "qudit", "--trials", "5", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_console_script_qubit(tmp_path):
    out = [tmp_path / f"r{i}.json" for i in range(2)]
    for path in out:
        proc = subprocess.run([sys.executable, "-m", "qpr.cli", "verify", "--suite", "qubit", "--trials", "20",
                               "--seed", "7", "--out", str(path)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    assert out[0].read_bytes() == out[1].read_bytes()
    assert_tagged(json.loads(out[0].read_text()))


def assert_tagged(obj):
    if isinstance(obj, dict):
        if set(obj) == {"mode", "value"}:
            assert obj["mode"] in ("exact", "float")
            return
        for v in obj.values():
            assert_tagged(v)
    elif isinstance(obj, list):
        for v in obj:
            assert_tagged(v)
    else:
        assert obj is None or isinstance(obj, (str, bool))


def test_tag_numbers():
    assert tag_numbers({"a": 1, "b": Fraction(1, 3), "c": 0.5, "d": True}) == {
        "a": {"mode": "exact", "value": 1}, "b": {"mode": "exact", "value": "1/3"},
        "c": {"mode": "float", "value": 0.5}, "d": True}


def test_load_bases_vectors_entry():
    s = 1 / math.sqrt(2)
    doc = {"dim": 2, "bases": [{"vectors": [[{"re": s}, {"re": s}], [{"re": s}, {"re": -s}]]}]}
    _, bases = load_bases(doc)
    assert abs(bases[0].direction.as_array()[0] - 1) < 1e-12
    with pytest.raises(DocumentError):
        load_bases({"dim": 2, "bases": [{"vectors": [[{"re": 1}, {"re": 0}], [{"re": 1}, {"re": 0}]]}]})


def test_certificate_document_roundtrip_exact():
    cert = certifier.certify(family_bases(FamilySpec("stabilizer"), exact=True), "exact")
    doc = json.loads(json.dumps(certificate_document(cert, "h")))
    w = read_witness(doc)
    assert w == {certifier.pattern_str(s): v for s, v in cert.q.items()}
