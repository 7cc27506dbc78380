import json

import pytest

from quatcert.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSymbolCommands:
    def test_hilbert(self, capsys):
        code, out, _ = run(capsys, "hilbert", "--a", "2", "--b", "5",
                           "--place", "2+i")
        assert code == 0 and out.strip() == "-1"

    def test_hilbert_dyadic(self, capsys):
        code, out, _ = run(capsys, "hilbert", "--a", "2", "--b", "5",
                           "--place", "1+i")
        assert code == 0 and out.strip() == "+1"

    def test_ramify(self, capsys):
        code, out, _ = run(capsys, "ramify", "--a", "2", "--b", "5")
        assert code == 0 and out.strip() == "1+2i, 2+i"

    def test_ramify_ff(self, capsys):
        code, out, _ = run(capsys, "ramify", "--a", "2t@5", "--b", "2t+3@5")
        assert code == 0 and out.strip() == "t@5, t+4@5"

    def test_grammar_error_exit_code(self, capsys):
        code, _, err = run(capsys, "hilbert", "--a", "2", "--b", "bogus!",
                           "--place", "2+i")
        assert code == 2 and "error" in err


class TestRepresentsCommand:
    def test_local_false(self, capsys):
        code, out, _ = run(capsys, "represents", "--form", "-2,-5,10",
                           "--d", "6", "--place", "2+i")
        assert code == 0 and out.startswith("false")

    def test_local_true(self, capsys):
        code, out, _ = run(capsys, "represents", "--form", "-2,-5,10",
                           "--d", "3", "--place", "2+i")
        assert code == 0 and out.startswith("true")

    def test_global(self, capsys):
        code, out, _ = run(capsys, "represents", "--form", "1,-2,-5,10",
                           "--d", "-6", "--global", "--bound", "6")
        assert code == 0 and out.strip() == "(1, 1, 1, 0)"

    def test_global_miss_is_exit_zero(self, capsys):
        code, out, _ = run(capsys, "represents", "--form", "-2,-5,10",
                           "--d", "6", "--global", "--bound", "2")
        assert code == 0 and "no solution" in out

    def test_missing_mode(self, capsys):
        code, _, err = run(capsys, "represents", "--form", "-2,-5,10",
                           "--d", "6")
        assert code == 2


class TestWitnessCommands:
    def test_build_verify_cycle(self, capsys, tmp_path):
        out_file = tmp_path / "cert.json"
        code, out, _ = run(capsys, "witness", "build", "--field", "gaussian",
                           "--sigma", "2+i,2-i", "--n", "3",
                           "--out", str(out_file))
        assert code == 0
        assert "Q = (2, 5), d = 6, trdeg bound 13" in out
        code, out, _ = run(capsys, "witness", "verify", str(out_file))
        assert code == 0 and out.strip().endswith("checks)")
        assert "PASS" in out

    def test_default_sigma(self, capsys, tmp_path):
        out_file = tmp_path / "cert.json"
        code, out, _ = run(capsys, "witness", "build",
                           "--out", str(out_file))
        assert code == 0 and "d = 6" in out

    def test_verify_detects_tampering(self, capsys, tmp_path):
        out_file = tmp_path / "cert.json"
        run(capsys, "witness", "build", "--out", str(out_file))
        doc = json.loads(out_file.read_text())
        doc["d"] = "5"
        out_file.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "witness", "verify", str(out_file))
        assert code == 1
        assert "FAIL" in out

    def test_catalog(self, capsys, tmp_path):
        code, out, _ = run(capsys, "witness", "catalog", "--n", "3,5",
                           "--out-dir", str(tmp_path / "cat"))
        assert code == 0
        assert (tmp_path / "cat" / "witness_n3.json").exists()
        assert (tmp_path / "cat" / "witness_n5.json").exists()
        assert "trdeg bound 19" in out

    def test_catalog_rejects_even_n(self, capsys, tmp_path):
        code, _, err = run(capsys, "witness", "catalog", "--n", "3,4",
                           "--out-dir", str(tmp_path / "cat"))
        assert code == 2

    def test_exhaustion_exit_code(self, capsys, tmp_path):
        code, _, err = run(capsys, "witness", "build", "--sigma", "3,7",
                           "--bound", "3", "--out", str(tmp_path / "x.json"))
        assert code == 3 and "exhausted" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "witness", "verify", "/nonexistent.json")
        assert code == 2
