import io
import json
import subprocess
import sys

import jsonschema
import pytest

from boolmobius import bench
from boolmobius.cli import main
from boolmobius.core import SparsePoly


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def json_lines(text):
    return [json.loads(line) for line in text.splitlines()]


# --- transform ------------------------------------------------------------

def test_transform_dense_to_truth_table(capsys):
    assert run(capsys, "transform", "-e", "anf:0101", "--algo", "ibm", "--out", "tt") == (0, "tt:0100\n", "")


def test_transform_inverse(capsys):
    assert run(capsys, "transform", "-e", "tt:0100", "--out", "anf")[1] == "anf:0101\n"


def test_transform_dense_role_mismatch(capsys):
    code, _, err = run(capsys, "transform", "-e", "anf:0101", "--out", "anf")
    assert code == 1 and "is a tt vector" in err


def test_transform_poly_greedy(capsys):
    assert run(capsys, "transform", "-e", "X1 + X1*X2", "--algo", "greedy", "--out", "poly")[1] == "X1\n"


def test_transform_forced_n(capsys):
    out = run(capsys, "transform", "-e", "X1 + X1*X2", "--n", "4")[1]
    assert out == "X1 + X1*X3 + X1*X4 + X1*X3*X4\n"


def test_transform_poly_to_truth_table(capsys):
    assert run(capsys, "transform", "-e", "X1 + X1*X2", "--out", "tt")[1] == "tt:0100\n"


def test_transform_dense_to_poly(capsys):
    assert run(capsys, "transform", "-e", "tt:0100", "--out", "poly")[1] == "X1 + X1*X2\n"


def test_transform_order_and_counts(capsys):
    code, out, err = run(capsys, "transform", "-e", "X3 + X1*X2 + X1*X3", "--algo", "list", "--order", "2,1,3",
                         "--counts")
    assert code == 0
    counts = json.loads(err)
    assert counts == {"op_count": 5, "op_unit": "list_mod", "per_step": [2, 2, 1]}


def test_transform_order_needs_list_algorithm(capsys):
    assert run(capsys, "transform", "-e", "X1", "--algo", "greedy", "--order", "1")[0] == 1


def test_transform_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("X1 + X1*X2\n"))
    assert run(capsys, "transform")[1] == "X1\n"


def test_transform_from_file_keeps_indexing(capsys, tmp_path):
    path = tmp_path / "f.poly"
    path.write_text("#indexing=0\n#n=2\nX0 + X0*X1\n", encoding="utf-8")
    assert run(capsys, "transform", str(path))[1] == "X0\n"


def test_transform_indexing_flag(capsys):
    assert run(capsys, "transform", "-e", "X0 + X0*X1", "--indexing", "0")[1] == "X0\n"


# --- weight ---------------------------------------------------------------

@pytest.mark.parametrize("method", ["transform", "naive", "fastpath"])
def test_weight_achterbahn(capsys, method):
    code, out, err = run(capsys, "weight", "--corpus", "achterbahn", "--method", method)
    assert (code, out) == (0, "4096\n")
    if method == "fastpath":
        assert "warning" in err


def test_weight_fastpath_reports_family(capsys):
    code, out, err = run(capsys, "weight", "-e", "X1*X2*(X4+X5)", "--n", "5", "--method", "fastpath")
    assert (code, out) == (0, "4\n")
    assert "family: MonoTimesLinear" in err


def test_weight_fastpath_mono_pair_shows_uncorrected_value(capsys):
    code, out, err = run(capsys, "weight", "-e", "X1*X2 + X1*X3", "--method", "fastpath")
    assert out == "2\n"
    assert "MonoTimesMonoPair" in err and "gives 4" in err


def test_weight_zero(capsys):
    assert run(capsys, "weight", "-e", "0")[1] == "0\n"


@pytest.mark.parametrize("method", ["transform", "naive", "fastpath"])
def test_weight_dense_inputs(capsys, method):
    assert run(capsys, "weight", "-e", "tt:01000100", "--method", method)[1] == "2\n"
    assert run(capsys, "weight", "-e", "anf:0101", "--method", method)[1] == "1\n"


def test_weight_naive_capacity(capsys):
    code, _, err = run(capsys, "weight", "-e", "X17", "--method", "naive")
    assert code == 3 and "capacity" in err


# --- exit codes -----------------------------------------------------------

@pytest.mark.parametrize(
    "argv, code",
    [
        (["transform", "-e", "X1X2"], 2),
        (["transform", "-e", "anf:010"], 2),
        (["transform", "-e", "X0"], 2),
        (["transform", "-e", "X70"], 3),
        (["transform", "-e", "X1", "--n", "30", "--algo", "ibm"], 3),
        (["transform", "-e", "X3", "--n", "2"], 1),
        (["transform", "-e", "anf:0101", "--n", "3"], 1),
        (["transform", "/nonexistent/file.poly"], 1),
        (["transform", "--algo", "fft", "-e", "X1"], 1),
        ([], 1),
        (["bench", "--corpus", "random"], 1),
        (["verify", "--n", "17", "--samples", "1"], 3),
        (["verify", "--n", "2", "--samples", "many"], 1),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


# --- verify ---------------------------------------------------------------

def test_verify_exhaustive_small(capsys):
    code, out, _ = run(capsys, "verify", "--n", "3")
    result = json.loads(out)
    assert code == 0 and result["ok"] and result["checked"] == 256


def test_verify_sampled_is_deterministic(capsys):
    first = run(capsys, "verify", "--n", "6", "--samples", "30", "--seed", "42")
    second = run(capsys, "verify", "--n", "6", "--samples", "30", "--seed", "42")
    assert first == second and first[0] == 0


def test_verify_reports_injected_fault(capsys, monkeypatch):
    real = bench.default_transforms()["ibm"]

    def broken(p):
        # drops the constant monomial from the image
        image = real(p)
        return SparsePoly(tuple(m for m in image.masks if m), p.nvars)

    monkeypatch.setattr(bench, "default_transforms", lambda: {"ibm": broken})
    code, out, err = run(capsys, "verify", "--n", "2")
    assert code == 4
    assert json.loads(out)["divergence"]["algorithm"] == "ibm"
    assert "divergence" in err


# --- bench ----------------------------------------------------------------

@pytest.fixture(scope="module")
def validator():
    schema = bench.load_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def test_bench_table_example(capsys, validator):
    code, out, _ = run(capsys, "bench", "-e", "X3 + X1*X2 + X1*X3", "--order", "2,1,3", "--json")
    reports = json_lines(out)
    for r in reports:
        validator.validate(r)
    by_algo = {r["algorithm"]: r for r in reports}
    assert by_algo["greedy"]["op_count"] == 3
    assert by_algo["list[order=2,1,3]"]["op_count"] == 5
    assert by_algo["ibm"]["op_count"] == 12 and by_algo["ibm"]["op_unit"] == "xor"
    assert all(r["agrees_with_oracle"] for r in reports)
    assert [r["algorithm"] for r in reports] == sorted(by_algo)


def test_bench_achterbahn(capsys, validator):
    code, out, _ = run(capsys, "bench", "--corpus", "achterbahn", "--json")
    reports = json_lines(out)
    for r in reports:
        validator.validate(r)
    by_algo = {r["algorithm"]: r for r in reports}
    assert by_algo["ibm"]["op_count"] == 53248
    fast = by_algo["fastpath"]
    assert fast["op_unit"] == "emitted_term" and fast["agrees_with_oracle"]
    assert fast["baseline_ops"] == 53248
    assert fast["savings"] == pytest.approx(1 - fast["op_count"] / 53248, abs=1e-6)


def test_bench_output_is_byte_deterministic(capsys):
    argv = ("bench", "--corpus", "random", "--n", "5", "--samples", "3", "--seed", "7", "--json")
    assert run(capsys, *argv) == run(capsys, *argv)


def test_bench_timing_flag(capsys, validator):
    reports = json_lines(run(capsys, "bench", "-e", "X1", "--json", "--timing")[1])
    for r in reports:
        validator.validate(r)
        assert r["wall_time_s"] is not None


def test_bench_text_output(capsys):
    out = run(capsys, "bench", "-e", "X3 + X1*X2 + X1*X3")[1]
    assert "greedy" in out and "list_mod" in out


def test_agreement_flag_absent_without_oracle():
    # a degree-15 monomial in 17 variables: the image has four terms
    p = SparsePoly(((1 << 15) - 1,), 17)
    reports = bench.bench_poly(p, "wide")
    assert reports and all("agrees_with_oracle" not in r for r in reports)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "boolmobius.cli", "weight", "-e", "X1*X2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "1\n"


def test_docs_schema_matches_packaged_schema():
    from pathlib import Path

    docs = Path(__file__).resolve().parents[1] / "docs" / "bench_report.schema.json"
    assert json.loads(docs.read_text(encoding="utf-8")) == bench.load_schema()
