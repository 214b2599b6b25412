import json

import numpy as np
import pytest

import oomlab as ol
from oomlab.cli import COMMANDS, OPERATION_COVERAGE, build_parser, main
from oomlab.model_io import save_model, serialize_model

from conftest import fixture_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# basic commands


def test_dim_on_coin(capsys):
    code, out, _ = run_cli(
        capsys, "dim", "--model", fixture_path("bernoulli05.json"), "--max-level", "4"
    )
    assert code == 0
    report = json.loads(out)
    assert report["dimension"] == 1
    assert report["rank_by_level"] == {"1": 1, "2": 1, "3": 1, "4": 1}
    assert report["stabilized"] is True


def test_dim_inconclusive_exit_code(capsys):
    code, out, _ = run_cli(
        capsys, "dim", "--model", fixture_path("mixture_2bern.json"), "--max-level", "1"
    )
    assert code == 3
    assert json.loads(out)["dimension"] == "not stabilized"


def test_eval_word(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "--model", fixture_path("bernoulli05.json"), "--word", "101"
    )
    assert code == 0
    assert json.loads(out)["probability"] == pytest.approx(0.125)


def test_eval_empty_word(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "--model", fixture_path("bernoulli05.json"), "--word", ""
    )
    assert code == 0
    assert json.loads(out)["probability"] == 1.0


def test_eval_unknown_symbol_is_usage_error(capsys):
    code, _, err = run_cli(
        capsys, "eval", "--model", fixture_path("bernoulli05.json"), "--word", "10x"
    )
    assert code == 2
    assert "unknown symbol" in err


def test_validate_good_model(capsys):
    code, out, _ = run_cli(capsys, "validate", "--model", fixture_path("markov2.json"))
    assert code == 0
    assert json.loads(out)["validation"]["passed"] is True


def test_validate_bad_model_exits_one(capsys, tmp_path):
    payload = serialize_model(ol.bernoulli(0.5))
    payload["eval"] = [2.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "validate", "--model", str(path))
    assert code == 1
    assert json.loads(out)["validation"]["passed"] is False


def test_validate_with_stationarity(capsys):
    code, out, _ = run_cli(
        capsys,
        "validate",
        "--model",
        fixture_path("qubit_product.json"),
        "--check-stationarity",
    )
    assert code == 0
    report = json.loads(out)
    assert report["stationarity"]["stationary"] is True


def test_validate_mixture_file(capsys):
    code, out, _ = run_cli(capsys, "validate", "--model", fixture_path("mixture_2bern.json"))
    assert code == 0
    report = json.loads(out)
    assert report["model_type"] == "OomModel"
    assert report["validation"]["passed"] is True


def test_validate_nc_mixture_file(capsys, tmp_path):
    alg = ol.construct_algebra([2])

    def product_state(p0, p1):
        return ol.NcOomModel(
            algebra=alg,
            op_per_basis=np.array([[[p0]], [[0.0]], [[0.0]], [[p1]]], dtype=complex),
            init=[1.0],
            eval=[1.0],
        )

    save_model(product_state(0.9, 0.1), tmp_path / "q1.json")
    save_model(product_state(0.3, 0.7), tmp_path / "q2.json")
    (tmp_path / "mix.json").write_text(
        json.dumps(
            {
                "type": "mixture",
                "parts": [
                    {"weight": 0.5, "path": "q1.json"},
                    {"weight": 0.5, "path": "q2.json"},
                ],
            }
        )
    )
    code, out, _ = run_cli(capsys, "validate", "--model", str(tmp_path / "mix.json"))
    assert code == 0
    report = json.loads(out)
    assert report["model_type"] == "NcOomModel"
    assert report["validation"]["passed"] is True


def test_schema_error_exits_two(capsys, tmp_path):
    path = tmp_path / "junk.json"
    path.write_text('{"type": "oom", "alphabet": ["0"]}')
    code, _, err = run_cli(capsys, "validate", "--model", str(path))
    assert code == 2
    assert "missing field" in err


def test_minimize_reports_reduction(capsys):
    code, out, _ = run_cli(capsys, "minimize", "--model", fixture_path("mixture_2bern.json"))
    assert code == 0
    report = json.loads(out)
    assert report["dim_before"] == 2 and report["dim_after"] == 2
    assert report["equivalent"] is True
    assert report["model"]["type"] == "oom"


def test_minimize_writes_model_file(capsys, tmp_path):
    out_path = tmp_path / "mini.json"
    code, out, _ = run_cli(
        capsys,
        "minimize",
        "--model",
        fixture_path("mixture_2bern.json"),
        "--output",
        str(out_path),
    )
    assert code == 0
    reduced = ol.parse_model_file(out_path)
    assert reduced.dim == 2


def test_causal_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "causal",
        "--model",
        fixture_path("markov2.json"),
        "--past-len",
        "1",
        "--horizon",
        "3",
    )
    assert code == 0
    report = json.loads(out)
    assert report["n_states"] == 2
    assert report["causal_span_rank"] == 2
    assert report["topological_complexity_bits"] == 1
    assert report["statistical_complexity_bits"] == pytest.approx(np.log2(3) - 2 / 3)


def test_causal_rejects_nonstationary(capsys, tmp_path):
    skew = ol.markov_chain([[0, 1], [1, 0]], labels=["0", "1"], init=[1, 0])
    path = tmp_path / "skew.json"
    save_model(skew, path)
    code, _, err = run_cli(
        capsys, "causal", "--model", str(path), "--past-len", "1", "--horizon", "2"
    )
    assert code == 1
    assert "stationary" in err


def test_nc_eval_with_word(capsys):
    code, out, _ = run_cli(
        capsys,
        "nc-eval",
        "--model",
        fixture_path("bernoulli05.json"),
        "--word",
        "101",
    )
    assert code == 0
    assert json.loads(out)["value"] == [pytest.approx(0.125), 0.0]


def test_nc_eval_with_factors_file(capsys, tmp_path):
    factors = [
        {"unit": True},
        {"blocks": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]]},
    ]
    path = tmp_path / "factors.json"
    path.write_text(json.dumps(factors))
    code, out, _ = run_cli(
        capsys,
        "nc-eval",
        "--model",
        fixture_path("qubit_product.json"),
        "--factors",
        str(path),
    )
    assert code == 0
    assert json.loads(out)["value"][0] == pytest.approx(0.6)  # tr(rho Z)


def test_nc_eval_require_positive_rejects_z(capsys, tmp_path):
    factors = [{"blocks": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]]}]
    path = tmp_path / "factors.json"
    path.write_text(json.dumps(factors))
    code, _, err = run_cli(
        capsys,
        "nc-eval",
        "--model",
        fixture_path("qubit_product.json"),
        "--factors",
        str(path),
        "--require-positive",
    )
    assert code == 1
    assert "not positive" in err


def test_nc_eval_basis_index_factor(capsys, tmp_path):
    path = tmp_path / "factors.json"
    path.write_text(json.dumps([{"basis_index": 0}]))
    code, out, _ = run_cli(
        capsys,
        "nc-eval",
        "--model",
        fixture_path("qubit_product.json"),
        "--factors",
        str(path),
    )
    assert code == 0
    assert json.loads(out)["value"][0] == pytest.approx(0.8)


def test_nc_dim_on_embedded_classical(capsys):
    code, out, _ = run_cli(
        capsys,
        "nc-dim",
        "--model",
        fixture_path("mixture_2bern.json"),
        "--max-level",
        "3",
    )
    assert code == 0
    assert json.loads(out)["dimension"] == 2


def test_sample_deterministic_and_env_seed(capsys, monkeypatch):
    code, out1, _ = run_cli(
        capsys, "sample", "--model", fixture_path("bernoulli05.json"),
        "--length", "20", "--seed", "7",
    )
    assert code == 0
    code, out2, _ = run_cli(
        capsys, "sample", "--model", fixture_path("bernoulli05.json"),
        "--length", "20", "--seed", "7",
    )
    assert out1 == out2
    monkeypatch.setenv("OOMLAB_SEED", "7")
    code, out3, _ = run_cli(
        capsys, "sample", "--model", fixture_path("bernoulli05.json"), "--length", "20"
    )
    assert out3 == out1
    assert json.loads(out3)["seed"] == 7


# ---------------------------------------------------------------------------
# experiments


def test_experiment_run_writes_report_and_csv(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "experiment",
        "run",
        fixture_path("exp_additivity_2bern.json"),
        "--out-dir",
        str(tmp_path),
    )
    assert code == 0
    report = json.loads(out)
    assert report["verdict"] == "PASS"
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "points.csv").exists()
    on_disk = json.loads((tmp_path / "report.json").read_text())
    assert on_disk == report
    csv_text = (tmp_path / "points.csv").read_text()
    assert csv_text.splitlines()[0].startswith("point,")


@pytest.mark.parametrize(
    "spec",
    [
        "exp_semicont_mixture_weight.json",
        "exp_semicont_coalescing.json",
        "exp_semicont_markov_merge.json",
        "exp_upperbound_markov2.json",
    ],
)
def test_shipped_experiment_specs_pass(capsys, tmp_path, spec):
    code, out, _ = run_cli(
        capsys, "experiment", "run", fixture_path(spec), "--out-dir", str(tmp_path)
    )
    assert code == 0
    assert json.loads(out)["verdict"] == "PASS"


def test_experiment_csv_stdout(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "experiment",
        "run",
        fixture_path("exp_upperbound_markov2.json"),
        "--out-dir",
        str(tmp_path),
        "--csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("point,")
    assert lines[1].startswith("process,")


def test_experiment_inconclusive_exit_code(capsys, tmp_path):
    spec = {
        "experiment": "additivity",
        "parts": [
            {"weight": 0.5, "path": fixture_path("bernoulli02.json")},
            {"weight": 0.5, "path": fixture_path("bernoulli07.json")},
        ],
        "max_level": 1,
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run_cli(
        capsys, "experiment", "run", str(path), "--out-dir", str(tmp_path)
    )
    assert code == 3
    assert json.loads(out)["verdict"] == "INCONCLUSIVE"


def test_experiment_refusal_is_usage_error(capsys, tmp_path):
    spec = {
        "experiment": "additivity",
        "parts": [
            {"weight": 0.5, "path": fixture_path("bernoulli05.json")},
            {"weight": 0.5, "path": fixture_path("bernoulli05.json")},
        ],
        "max_level": 2,
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, _, err = run_cli(
        capsys, "experiment", "run", str(path), "--out-dir", str(tmp_path)
    )
    assert code == 2
    assert "pairwise distinct" in err


def test_jobs_flag_does_not_change_output(capsys):
    _, out1, _ = run_cli(
        capsys, "dim", "--model", fixture_path("mixture_2bern.json"),
        "--max-level", "3", "--jobs", "1",
    )
    _, out4, _ = run_cli(
        capsys, "dim", "--model", fixture_path("mixture_2bern.json"),
        "--max-level", "3", "--jobs", "4",
    )
    assert out1 == out4


def test_byte_identical_reports_across_runs(capsys, tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        code, _, _ = run_cli(
            capsys,
            "experiment",
            "run",
            fixture_path("exp_additivity_2bern.json"),
            "--out-dir",
            str(d),
        )
        assert code == 0
    assert (d1 / "report.json").read_bytes() == (d2 / "report.json").read_bytes()
    assert (d1 / "points.csv").read_bytes() == (d2 / "points.csv").read_bytes()


# ---------------------------------------------------------------------------
# surface coverage


def test_usage_error_exit_code(capsys):
    assert main([]) == 2
    assert main(["dim"]) == 2  # missing required flags


def test_missing_file_is_usage_error(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "dim", "--model", str(tmp_path / "nope.json"), "--max-level", "2"
    )
    assert code == 2
    assert "cannot read" in err


def test_nc_eval_needs_exactly_one_input(capsys, tmp_path):
    factors = tmp_path / "f.json"
    factors.write_text("[]")
    code, _, err = run_cli(
        capsys, "nc-eval", "--model", fixture_path("qubit_product.json"),
        "--factors", str(factors), "--word", "1",
    )
    assert code == 2
    assert "exactly one" in err
    code, _, err = run_cli(
        capsys, "nc-eval", "--model", fixture_path("qubit_product.json")
    )
    assert code == 2


def test_sample_length_zero(capsys):
    code, out, _ = run_cli(
        capsys, "sample", "--model", fixture_path("bernoulli05.json"),
        "--length", "0", "--seed", "1",
    )
    assert code == 0
    assert json.loads(out)["word"] == []


def test_subcommand_set_is_exactly_the_interface():
    parser = build_parser()
    sub = next(
        a for a in parser._actions if isinstance(a, type(parser._subparsers._group_actions[0]))
    )
    assert set(sub.choices) == set(COMMANDS)
    assert set(OPERATION_COVERAGE) == set(COMMANDS)


def test_every_public_operation_reachable_from_cli():
    operations = {
        # algebra
        "construct_algebra", "unit_element", "is_positive", "basis_elements",
        # classical models
        "validate_oom", "word_probability", "hmm_to_oom", "mixture_direct_sum",
        "stationarity_check", "sample_trajectory",
        # dimension
        "apply_tau", "build_hankel", "numerical_rank", "process_dimension",
        "minimize_oom", "equivalent",
        # causal states
        "predictive_distribution", "enumerate_causal_states",
        "statistical_complexity", "topological_complexity", "causal_span_rank",
        # operator-algebra models
        "validate_ncoom", "nc_evaluate", "embed_classical", "nc_hankel",
        "nc_process_dimension", "nc_mixture_direct_sum", "nc_stationarity_check",
        # harnesses
        "cylinder_distance", "run_additivity", "run_semicontinuity", "run_upperbound",
        # persistence and dispatch
        "parse_model_file", "dispatch",
    }
    covered = set()
    for ops in OPERATION_COVERAGE.values():
        covered.update(ops)
    missing = operations - covered
    assert not missing, f"operations not reachable from any subcommand: {sorted(missing)}"
