import json
import math
import subprocess
import sys

import numpy as np
import pytest

from voimetric.cli import main, read_distribution_file

from conftest import FIXTURES, expected


def run(*args):
    p = subprocess.run([sys.executable, "-m", "voimetric", *map(str, args)], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def write(tmp_path, name, p):
    path = tmp_path / name
    path.write_text(json.dumps({"p": p}))
    return path


class TestFiles:
    def test_text_format(self):
        assert np.allclose(read_distribution_file(FIXTURES / "example1_psi.txt"), [0.4, 0.6])

    def test_json_format(self):
        assert read_distribution_file(FIXTURES / "example1_phi.json").size == 5

    def test_renormalize(self):
        with pytest.raises(ValueError):
            read_distribution_file(FIXTURES / "example2_phi.json")
        assert read_distribution_file(FIXTURES / "example2_phi.json", renormalize=True).sum() == pytest.approx(1, abs=1e-15)


class TestDistance:
    def test_greedy_example2(self):
        code, out, _ = run("distance", "--method", "greedy", "--phi", FIXTURES / "example2_phi.json",
                           "--psi", FIXTURES / "example2_psi.json", "--renormalize", "--trace")
        assert code == 0
        rec = json.loads(out)
        assert rec["exact"] is False and rec["n"] == 40 and rec["m"] == 10
        assert rec["trace"]["rounds"][0]["K"] == [35, 36, 38]
        assert rec["d"] == pytest.approx(rec["V_phi_psi"] + rec["V_psi_phi"], abs=1e-10)

    def test_exact_permutation(self, tmp_path):
        a, b = write(tmp_path, "a.json", [0.3, 0.7]), write(tmp_path, "b.json", [0.7, 0.3])
        code, out, _ = run("distance", "--phi", a, "--psi", b)
        assert code == 0 and abs(json.loads(out)["d"]) < 1e-10

    @pytest.mark.parametrize("method", ["exact", "closed2x2", "n_by_2"])
    def test_methods_agree(self, tmp_path, method):
        a, b = write(tmp_path, "a.json", [0.3, 0.7]), write(tmp_path, "b.json", [0.5, 0.5])
        rec = json.loads(run("distance", "--method", method, "--phi", a, "--psi", b)[1])
        v = 0.7 * -(5 / 7 * math.log(5 / 7) + 2 / 7 * math.log(2 / 7))
        assert rec["V_phi_psi"] == pytest.approx(v, abs=1e-10)

    def test_log_base(self, tmp_path):
        a, b = write(tmp_path, "a.json", [0.3, 0.7]), write(tmp_path, "b.json", [0.5, 0.5])
        e = json.loads(run("distance", "--phi", a, "--psi", b)[1])["d"]
        two = json.loads(run("distance", "--phi", a, "--psi", b, "--log-base", "2")[1])["d"]
        assert two == pytest.approx(e / math.log(2), rel=1e-10)

    def test_exact_trace(self, tmp_path):
        a, b = write(tmp_path, "a.json", [0.3, 0.7]), write(tmp_path, "b.json", [0.7, 0.3])
        rec = json.loads(run("distance", "--phi", a, "--psi", b, "--trace")[1])
        assert rec["trace"]["argmin_joint"] == [[0.0, 0.3], [0.7, 0.0]]

    def test_size_cap_exit(self, tmp_path):
        a = write(tmp_path, "a.json", [1 / 6] * 6)
        b = write(tmp_path, "b.json", [0.25] * 4)
        code, out, err = run("distance", "--phi", a, "--psi", b, "--size-cap", 10)
        assert code == 3 and out == "" and "size cap" in err

    def test_input_errors(self, tmp_path):
        bad = write(tmp_path, "bad.json", [0.3, 0.4])
        good = write(tmp_path, "good.json", [0.5, 0.5])
        assert run("distance", "--phi", bad, "--psi", good)[0] == 2
        assert run("distance", "--phi", tmp_path / "missing.json", "--psi", good)[0] == 2
        (tmp_path / "junk.txt").write_text("abc\n")
        assert run("distance", "--phi", tmp_path / "junk.txt", "--psi", good)[0] == 2
        assert run("distance", "--method", "closed2x2", "--phi", write(tmp_path, "c.json", [1.0]), "--psi", good)[0] == 2
        assert run("distance", "--method", "bogus", "--phi", good, "--psi", good)[0] == 2

    def test_deterministic(self):
        args = ("distance", "--method", "greedy", "--phi", FIXTURES / "example2_phi.json",
                "--psi", FIXTURES / "example2_psi.json", "--renormalize", "--trace")
        assert run(*args)[1] == run(*args)[1]


class TestReduce:
    def test_greedy_example3(self):
        code, out, _ = run("reduce", "--phi", FIXTURES / "example2_phi.json", "--m", 10, "--renormalize")
        rec = json.loads(out)
        assert code == 0
        assert np.allclose(rec["psi_a"], expected()["example3"]["unsorted_psi_a"], atol=1e-3)
        assert rec["bound_thm9"]["ok"] is True

    def test_greedy_sorted(self):
        rec = json.loads(run("reduce", "--phi", FIXTURES / "example2_phi.json", "--m", 10, "--renormalize", "--presort")[1])
        assert np.allclose(rec["psi_a"], expected()["example3"]["sorted_psi_a"], atol=1e-3)

    def test_exact(self, tmp_path):
        phi = [0.4, 0.3, 0.2, 0.1]
        rec = json.loads(run("reduce", "--method", "exact", "--phi", write(tmp_path, "p.json", phi), "--m", 2)[1])
        assert rec["psi_a"] == [0.5, 0.5]
        h = -sum(x * math.log(x) for x in phi)
        assert rec["distance"] == pytest.approx(h - math.log(2), abs=1e-10)

    def test_errors(self, tmp_path):
        p = write(tmp_path, "p.json", [0.5, 0.5])
        assert run("reduce", "--phi", p, "--m", 3)[0] == 2
        assert run("reduce", "--method", "exact", "--phi", write(tmp_path, "q.json", [0.1] * 10),
                   "--m", 3, "--size-cap", 10)[0] == 3


class TestEntropyAndGen:
    def test_entropy(self, tmp_path):
        rec = json.loads(run("entropy", "--phi", write(tmp_path, "p.json", [0.5, 0.5]), "--log-base", "2")[1])
        assert rec["entropy"] == 1.0

    def test_gen_exp_stretch(self, tmp_path):
        out = tmp_path / "g.json"
        assert run("gen", "--n", 40, "--seed", 7, "--out", out)[0] == 0
        p = np.array(json.loads(out.read_text())["p"])
        assert abs(p.sum() - 1) < 1e-12
        assert p.max() / p.min() <= math.e
        assert read_distribution_file(out).size == 40

    def test_gen_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run("gen", "--n", 40, "--seed", 3, "--out", a)
        run("gen", "--n", 40, "--seed", 3, "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_gen_simplex_stdout(self):
        code, out, _ = run("gen", "--n", 5, "--seed", 1, "--style", "uniform_simplex")
        assert code == 0 and len(json.loads(out)["p"]) == 5

    def test_gen_unwritable(self, tmp_path):
        assert run("gen", "--n", 3, "--seed", 1, "--out", tmp_path / "no" / "such" / "dir.json")[0] == 2

    def test_in_process_main(self, capsys, tmp_path):
        assert main(["entropy", "--phi", str(write(tmp_path, "p.json", [1.0]))]) == 0
        assert json.loads(capsys.readouterr().out)["entropy"] == 0.0
