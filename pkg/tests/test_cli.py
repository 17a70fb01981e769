import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from hsetembed.cli import Query, UsageError, main, run
from hsetembed.hset_lab import loads

SCHEMA = json.loads(resources.files("hsetembed").joinpath("schema/report.schema.json").read_text())

DSET_CASE = [
    "embed-gamma", "--gauge", "r^0.5", "--sigma", "paren(1)", "--p", "1", "--q", "1",
    "--tau", "paren(0.2)", "--p2", "2", "--q2", "1",
]


def run_json(capsys, argv):
    capsys.readouterr()  # drop output of earlier calls
    code = main(argv + ["--json"])
    out = capsys.readouterr().out
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    return code, rep, out


def test_empty_argv(capsys):
    assert main([]) == 64
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["lq", "--sigma", "paren(1)"],
        ["lq", "--sigma", "paren(1)", "--q", "abc"],
        ["embed-rn", "--sigma", "paren(1)", "--p", "1", "--q", "1"],
        ["trace-lr", "--gauge", "r^0.5", "--sigma", "paren(1)", "--p", "1", "--q", "1", "--r", "inf"],
        ["trace-exists", "--gauge", "r^2", "--sigma", "paren(1)", "--p", "1", "--q", "1"],
        ["verify", "--case", "missing"],
        ["hset", "--gauge", "r^0.5", "--n", "2"],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == 64
    assert capsys.readouterr().err.startswith("hsetembed")


def test_parse_error_has_offset(capsys):
    assert main(["lq", "--sigma", "2^(j)*", "--q", "1"]) == 64
    err = capsys.readouterr().err
    assert "parse error" in err and "6" in err


def test_lq_exit_codes(capsys):
    assert main(["lq", "--sigma", "2^(-1j)", "--q", "1"]) == 0
    assert main(["lq", "--sigma", "(1+j)^-1", "--q", "1"]) == 64  # the rate is mandatory in the grammar
    assert main(["lq", "--sigma", "2^(0j)*(1+j)^-1", "--q", "1"]) == 1


def test_dset_embedding_holds(capsys):
    code, rep, _ = run_json(capsys, DSET_CASE)
    assert code == 0 and rep["status"] == "Holds"
    assert "iff" in rep["citation"]
    assert rep["conditions"][0]["decision"] == "In"
    assert rep["inputs"]["target_sigma"] == "2^(0.2j)"


def test_gap_is_inconclusive(capsys):
    argv = [
        "embed-gamma", "--gauge", "r^0.5", "--sigma", "paren(0.2)", "--p", "4", "--q", "1",
        "--tau", "paren(0.3)", "--p2", "1", "--q2", "1",
    ]
    code, rep, _ = run_json(capsys, argv)
    assert code == 2 and rep["status"] == "Inconclusive"


def test_embed_gamma_targets(capsys):
    base = ["embed-gamma", "--gauge", "r^0.5", "--sigma", "paren(0.25)", "--p", "2", "--q", "2"]
    assert main(base + ["--target", "linfty"]) == 1
    assert main(base[:-2] + ["--q", "1", "--target", "linfty"]) == 0
    assert main(base + ["--target", "lmax"]) == 0


def test_embed_rn_reports_numerics(capsys):
    argv = ["embed-rn", "--sigma", "paren(1)", "--p", "1", "--q", "2", "--tau", "paren(0)", "--p2", "2", "--q2", "2"]
    code, rep, _ = run_json(capsys, argv)
    assert code == 0
    num = rep["numerics"]
    assert num["log2_opnorm_search"] <= num["log2_opnorm_exact"] + 1e-9
    assert main(["embed-rn", "--sigma", "paren(1)", "--p", "1", "--q", "1", "--target", "c"]) == 0
    assert main(["embed-rn", "--sigma", "paren(0.5)", "--p", "2", "--q", "2", "--target", "c"]) == 1


def test_trace_commands(capsys):
    g = ["--gauge", "r^0.5"]
    assert main(["trace-exists", *g, "--sigma", "paren(0.1)", "--p", "2", "--q", "2"]) == 0
    assert main(["trace-exists", *g, "--sigma", "paren(0)", "--p", "2", "--q", "2"]) == 1
    assert main(["trace-lr", *g, "--sigma", "paren(0)", "--p", "2", "--q", "1", "--r", "2"]) == 0
    code, rep, _ = run_json(capsys, ["trace-exists", "--gauge", "r^0*(1+L)^-1", "--sigma", "paren(0)", "--p", "0.5", "--q", "2"])
    assert code == 2
    assert rep["hypotheses"]["upind_h_negative"] == "Fails"


def test_envelope_reports(capsys):
    code, rep, _ = run_json(capsys, ["envelope", "--gauge", "r^1", "--p", "2", "--depth", "4"])
    assert code == 0 and rep["status"] is None
    assert rep["numerics"]["grid"][1] == [0.25, 2.0]
    code, rep, _ = run_json(capsys, ["envelope", "--gauge", "r^0.5", "--sigma", "paren(0.1)", "--p", "2", "--q", "2"])
    assert rep["numerics"]["mode"] == "exact" and rep["numerics"]["index_u"] == "2"
    assert rep["numerics"]["closed_form"]["t_exponent"] == "-0.3"


def test_indices_and_oracle(capsys):
    code, rep, _ = run_json(capsys, ["indices", "--sigma", "2^(0.5j)*(1+j)^-1"])
    assert code == 0 and rep["numerics"]["lower"] == "0.5"
    code, rep, _ = run_json(capsys, ["oracle", "--sigma", "paren(-0.5)", "--q", "2", "--q2", "1"])
    assert code == 0 and rep["status"] == "Holds"
    assert main(["oracle", "--sigma", "2^(0j)", "--q", "2", "--q2", "1"]) == 1


def test_hset_writes_tree(tmp_path, capsys):
    out = tmp_path / "tree.txt"
    code, rep, _ = run_json(capsys, ["hset", "--gauge", "r^0.5", "--depth", "12", "--tree-out", str(out)])
    assert code == 0
    tree = loads(out.read_text())
    assert tree.depth == 12
    assert rep["numerics"]["nodes_per_level"][-1] == tree.level_size(12)
    assert rep["numerics"]["mass_bound"] <= 0.5
    # text mode leaves the tree out
    main(["hset", "--gauge", "r^0.5", "--depth", "6"])
    assert "hset-tree" not in capsys.readouterr().out


def test_byte_identical_reports(capsys):
    argv = ["embed-rn", "--sigma", "paren(1)", "--p", "1", "--q", "3", "--tau", "paren(0.2)", "--p2", "2", "--q2", "1", "--seed", "4"]
    _, _, a = run_json(capsys, argv)
    _, _, b = run_json(capsys, argv)
    assert a == b
    _, _, c = run_json(capsys, ["hset", "--gauge", "r^0.7", "--seed", "3"])
    _, _, d = run_json(capsys, ["hset", "--gauge", "r^0.7", "--seed", "3"])
    assert c == d


def test_verify_rn_random(capsys):
    code, rep, _ = run_json(capsys, ["verify", "--case", "rn-random", "--seed", "7", "--n", "200"])
    assert code == 0
    assert rep["numerics"]["total"] == 200 and rep["numerics"]["consistent"] == 200


@pytest.mark.parametrize("case", ["rn-table", "gamma-dset", "trace-table", "landau"])
def test_verify_suites(capsys, case):
    code, rep, _ = run_json(capsys, ["verify", "--case", case])
    assert code == 0, rep["numerics"]["failures"]


def test_text_output(capsys):
    assert main(DSET_CASE) == 0
    out = capsys.readouterr().out
    assert out.startswith("embed-gamma: Holds")
    assert "[In]" in out


def test_run_api():
    rep = run(Query("lq", {"sigma": "paren(-1)", "q": "2"}))
    assert rep.exit_code == 0
    with pytest.raises(UsageError):
        run(Query("bogus"))


def test_console_module():
    proc = subprocess.run([sys.executable, "-m", "hsetembed", "lq", "--sigma", "paren(1)", "--q", "1"], capture_output=True, text=True)
    assert proc.returncode == 1
    assert proc.stdout.startswith("lq: Fails")
