import json
import subprocess
import sys

import pytest

from brpic.cli import main, render_class, table
from brpic.extraspecial import ExtraSpecialSpec, omega_class
from brpic.gfp import PrimeField
from brpic.h3 import H3Class
from brpic.io import bundled, save_form


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    return code, json.loads(out), err


@pytest.fixture
def form_file(tmp_path):
    def make(p, n, kind=None, omega=None):
        omega = omega if omega is not None else omega_class(ExtraSpecialSpec(p, n, kind))
        path = tmp_path / f"w{p}{n}{kind}.form.json"
        save_form(omega, path)
        return path
    return make


class TestH3:
    def test_odd(self, capsys):
        code, doc, _ = run_json(capsys, "h3", "--p", 3, "--n", 3)
        assert code == 0 and (doc["dim"], doc["alt"], doc["sym"], doc["delta_rank"]) == (7, 1, 6, 3)

    def test_even(self, capsys):
        code, doc, _ = run_json(capsys, "h3", "--p", 2, "--n", 3)
        assert code == 0 and doc["dim"] == 7 and len(doc["basis"]) == 7

    def test_not_prime(self, capsys):
        code, _, err = run(capsys, "h3", "--p", 4, "--n", 2)
        assert code == 1 and "p must be prime" in err

    def test_table_output(self, capsys):
        code, out, _ = run(capsys, "h3", "--p", 3, "--n", 2)
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("+") and all(l[0] in "+|" and l[-1] in "+|" for l in lines)

    def test_json_flag_after_subcommand(self, capsys):
        code, out, _ = run(capsys, "h3", "--p", 3, "--n", 2, "--json")
        assert code == 0 and out.endswith("}\n") and json.loads(out)["dim"] == 3


class TestStab:
    def test_d_p2(self, capsys, form_file):
        code, doc, _ = run_json(capsys, "stab", form_file(2, 1, "D"), "--expect", "S:4")
        assert code == 0 and doc["order"] == 24 and doc["named_match"]["name"] == "S"
        assert doc["order_id"]

    def test_q_p3(self, capsys, form_file):
        code, doc, _ = run_json(capsys, "stab", form_file(3, 1, "Q"), "--workers", 3)
        assert code == 0 and doc["order"] == 36 and doc["named_match"]["name"] == "AffO+"

    @pytest.mark.slow
    def test_d_p2_n2(self, capsys, form_file):
        code, doc, _ = run_json(capsys, "stab", form_file(2, 2, "D"), "--workers", 8)
        assert code == 0 and doc["order"] == 720

    def test_guard_exit_2(self, capsys, form_file):
        code, _, err = run(capsys, "stab", form_file(5, 2, "D"))
        assert code == 2 and "--method closure" in err

    def test_closure_with_gens(self, capsys, form_file, tmp_path):
        gens = tmp_path / "gens.json"
        gens.write_text(json.dumps({"matrices": [[[1, 1], [0, 1]], [[0, 1], [1, 0]]]}))
        code, doc, _ = run_json(capsys, "stab", form_file(2, 2, omega=H3Class.zero(PrimeField(2), 2)),
                                "--method", "closure", "--gens", gens)
        assert code == 0 and doc["order"] == 6 and doc["method"] == "closure"

    def test_closure_needs_gens(self, capsys, form_file):
        code, _, err = run(capsys, "stab", form_file(2, 1, "D"), "--method", "closure")
        assert code == 1 and "--gens" in err

    def test_bad_document(self, capsys, tmp_path):
        bad = tmp_path / "bad.form.json"
        bad.write_text("{")
        code, _, err = run(capsys, "stab", bad)
        assert code == 1 and "bad.form.json:1:" in err

    def test_reruns_identical(self, capsys, form_file):
        path = form_file(3, 1, "Q")
        _, a, _ = run_json(capsys, "stab", path, "--workers", 1)
        _, b, _ = run_json(capsys, "stab", path, "--workers", 4)
        for key in ("order", "order_id", "named_match", "order_consistent_with"):
            assert a[key] == b[key]


class TestBrPic:
    def test_d_p3(self, capsys, form_file):
        code, doc, _ = run_json(capsys, "brpic", form_file(3, 1, "D"))
        assert code == 0 and doc["brpic_order"] == 5616 and doc["kernel_exponent"] == 0

    def test_zero_exit_3(self, capsys, form_file):
        code, out, err = run(capsys, "brpic", form_file(3, 3, omega=H3Class.zero(PrimeField(3), 3)))
        assert code == 3 and "radical" in err

    def test_zero_json(self, capsys, form_file):
        code, doc, _ = run_json(capsys, "brpic", form_file(3, 3, omega=H3Class.zero(PrimeField(3), 3)))
        assert code == 3 and doc["error"] == "NondegenerateRequired"

    def test_q_p2(self, capsys, form_file):
        code, doc, _ = run_json(capsys, "brpic", form_file(2, 1, "Q"))
        assert code == 0 and doc["brpic_order"] == 6


class TestExtraSpecial:
    @pytest.mark.parametrize("p,n,kind,order", [(2, 1, "D", 24), (3, 1, "Q", 36), (2, 1, "Q", 6),
                                                pytest.param(2, 2, "Q", 720, marks=pytest.mark.slow)])
    def test_verify_pass(self, capsys, p, n, kind, order):
        code, doc, _ = run_json(capsys, "extraspecial", "--p", p, "--n", n, "--type", kind, "--verify")
        assert code == 0 and doc["verdict"] == "PASS" and doc["stab"]["order"] == order

    def test_text_verdict(self, capsys):
        code, out, _ = run(capsys, "extraspecial", "--p", 2, "--n", 1, "--type", "D", "--verify")
        assert code == 0 and "PASS (24 = 24)" in out

    def test_without_verify(self, capsys):
        code, doc, _ = run_json(capsys, "extraspecial", "--p", 3, "--n", 1, "--type", "Q")
        assert code == 0 and doc["kappa"] == "x1x2 + y1" and "stab" not in doc
        assert doc["expected"]["order"] == 36

    def test_unidentified_still_reports(self, capsys):
        code, doc, _ = run_json(capsys, "extraspecial", "--p", 3, "--n", 2, "--type", "Q")
        assert code == 0 and doc["expected"] is None

    def test_save_form(self, capsys, tmp_path):
        path = tmp_path / "q.form.json"
        run(capsys, "extraspecial", "--p", 3, "--n", 1, "--type", "Q", "--save-form", path)
        code, doc, _ = run_json(capsys, "stab", path)
        assert code == 0 and doc["order"] == 36


class TestLie:
    def test_sl2_display(self, capsys):
        code, doc, _ = run_json(capsys, "lie", bundled("sl2.lie.json"))
        assert code == 0 and doc["omega"] == "(3*xe^xf^xh, 4*ze*zf + 3*zh^2)"
        assert doc["form"] == [[0, 4, 0], [4, 0, 0], [0, 0, 3]] and doc["form_nondegenerate"]

    def test_sl2_verify(self, capsys):
        code, doc, _ = run_json(capsys, "lie", bundled("sl2.lie.json"), "--verify")
        assert code == 0 and doc["stab"]["order"] == 120 and doc["brpic_order"] == 120

    @pytest.mark.slow
    def test_sl2_f7(self, capsys):
        code, doc, _ = run_json(capsys, "lie", bundled("sl2.lie.json"), "--p", 7, "--verify",
                                "--max-order", 41_000_000)
        assert code == 0 and doc["stab"]["order"] == 336

    def test_f7_guard(self, capsys):
        code, _, _ = run(capsys, "lie", bundled("sl2.lie.json"), "--p", 7, "--verify")
        assert code == 2

    def test_jacobi_file(self, capsys, tmp_path):
        doc = json.loads(bundled("sl2.lie.json").read_text())
        doc["brackets"][0]["terms"] = [{"k": 0, "c": 1}]
        bad = tmp_path / "bad.lie.json"
        bad.write_text(json.dumps(doc))
        code, _, err = run(capsys, "lie", bad)
        assert code == 1 and "Jacobi" in err

    def test_form_not_invariant(self, capsys, tmp_path):
        doc = json.loads(bundled("sl2.lie.json").read_text())
        doc["form"] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        path = tmp_path / "eye.lie.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(capsys, "lie", path)
        assert code == 1 and "(" in err


class TestBetaCheck:
    @pytest.mark.parametrize("args", [("--p", 3, "--n", 3), ("--p", 2, "--n", 3),
                                      ("--p", 5, "--n", 2, "--samples", 200)])
    def test_pass(self, capsys, args):
        code, doc, _ = run_json(capsys, "beta-check", *args)
        assert code == 0 and doc["verdict"] == "PASS" and doc["mismatches"] == 0 and doc["checked"] > 0


class TestUsage:
    def test_missing_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 64

    def test_bad_choice(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["extraspecial", "--p", "3", "--n", "1", "--type", "Z"])
        assert exc.value.code == 64

    def test_console_script_module(self):
        res = subprocess.run([sys.executable, "-m", "brpic.cli", "h3", "--p", "2", "--n", "2", "--json"],
                             capture_output=True, text=True, check=False)
        assert res.returncode == 0 and json.loads(res.stdout)["dim"] == 3


def test_render_class_p3():
    assert render_class(omega_class(ExtraSpecialSpec(3, 1, "Q"))) == "(x0^x1^x2, z0*z1)"


def test_table_borders():
    lines = table([("a", 1), ("long key", "value")]).splitlines()
    assert len({len(l) for l in lines}) == 1
