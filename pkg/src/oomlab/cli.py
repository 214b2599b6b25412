"""Command-line front end.

Subcommands cover every library operation (validate, eval, dim, minimize,
causal, nc-eval, nc-dim, experiment, sample). Reports go to standard output
as canonical JSON (17-significant-digit floats, byte-identical across runs
for identical inputs and seeds); errors go to standard error. Exit codes:
0 success or PASS, 1 FAIL or invalid model, 2 usage or schema error,
3 INCONCLUSIVE. The env var OOMLAB_SEED overrides the default seed 0.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from .causal import (
    causal_span_rank,
    enumerate_causal_states,
    predictive_distribution,
    statistical_complexity,
    topological_complexity,
    total_variation,
)
from .dimension import equivalent, minimize_oom, process_dimension
from .errors import (
    PreconditionError,
    ResourceLimitError,
    SchemaError,
    ValidationError,
)
from .model_io import (
    dumps_canonical,
    experiment_points_rows,
    parse_experiment_file,
    parse_factors_file,
    parse_model_file,
    save_model,
    serialize_model,
)
from .ncoom import (
    NcOomModel,
    embed_classical,
    indicator_factors,
    nc_evaluate,
    nc_process_dimension,
    nc_stationarity_check,
    validate_ncoom,
)
from .oom import (
    HmmModel,
    OomModel,
    hmm_to_oom,
    sample_trajectory,
    stationarity_check,
    validate_hmm,
    validate_oom,
    word_probability,
)
from .algebra import is_positive
from .words import normalize_word

COMMANDS = (
    "validate",
    "eval",
    "dim",
    "minimize",
    "causal",
    "nc-eval",
    "nc-dim",
    "experiment",
    "sample",
)

# Which library operations each subcommand exercises, directly or through the
# machinery it drives; the test suite checks this table against the public API.
OPERATION_COVERAGE = {
    "validate": (
        "parse_model_file",
        "validate_oom",
        "validate_ncoom",
        "construct_algebra",
        "unit_element",
        "mixture_direct_sum",
        "nc_mixture_direct_sum",
        "stationarity_check",
        "nc_stationarity_check",
    ),
    "eval": ("parse_model_file", "word_probability", "hmm_to_oom"),
    "dim": ("parse_model_file", "apply_tau", "build_hankel", "numerical_rank", "process_dimension"),
    "minimize": ("parse_model_file", "minimize_oom", "equivalent"),
    "causal": (
        "parse_model_file",
        "stationarity_check",
        "predictive_distribution",
        "enumerate_causal_states",
        "statistical_complexity",
        "topological_complexity",
        "causal_span_rank",
    ),
    "nc-eval": (
        "parse_model_file",
        "embed_classical",
        "nc_evaluate",
        "is_positive",
        "basis_elements",
        "unit_element",
    ),
    "nc-dim": ("parse_model_file", "embed_classical", "nc_hankel", "nc_process_dimension", "numerical_rank"),
    "experiment": (
        "parse_model_file",
        "run_additivity",
        "run_semicontinuity",
        "run_upperbound",
        "cylinder_distance",
        "mixture_direct_sum",
        "dispatch",
    ),
    "sample": ("parse_model_file", "hmm_to_oom", "sample_trajectory", "validate_oom"),
}


def _emit(obj) -> None:
    sys.stdout.write(dumps_canonical(obj))


def _resolve_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is not None:
        return int(seed)
    env = os.environ.get("OOMLAB_SEED")
    return int(env) if env else 0


def _parse_cli_word(text: str, alphabet) -> tuple:
    if text == "":
        return ()
    if "," in text:
        return normalize_word(tuple(text.split(",")), alphabet)
    return normalize_word(text, alphabet)


def _classical(model, what: str) -> OomModel:
    if isinstance(model, HmmModel):
        return hmm_to_oom(model)
    if isinstance(model, OomModel):
        return model
    raise ValueError(f"{what} needs a classical model, got an operator-algebra model")


# ---------------------------------------------------------------------------
# Handlers


def _cmd_validate(args) -> int:
    model = parse_model_file(args.model, validate=False)
    seed = _resolve_seed(args)
    report: dict = {"model_type": type(model).__name__}
    if isinstance(model, NcOomModel):
        if args.depth is None:
            args.depth = 4
        rep = validate_ncoom(model, l_val=args.depth, samples=args.samples, seed=seed)
        report["validation"] = rep.to_dict()
        if args.check_stationarity:
            report["stationarity"] = nc_stationarity_check(
                model, l=args.stationarity_level, seed=seed
            ).to_dict()
        passed = rep.passed
    elif isinstance(model, HmmModel):
        if args.depth is None:
            args.depth = 8
        hrep = validate_hmm(model)
        report["validation"] = hrep.to_dict()
        passed = hrep.passed
        if passed:
            orep = validate_oom(hmm_to_oom(model), l_val=args.depth)
            report["induced_model_validation"] = orep.to_dict()
            passed = orep.passed
        if args.check_stationarity and passed:
            report["stationarity"] = stationarity_check(
                hmm_to_oom(model), l=args.stationarity_level
            ).to_dict()
    else:
        if args.depth is None:
            args.depth = 8
        rep = validate_oom(model, l_val=args.depth)
        report["validation"] = rep.to_dict()
        if args.check_stationarity:
            report["stationarity"] = stationarity_check(
                model, l=args.stationarity_level
            ).to_dict()
        passed = rep.passed
    _emit(report)
    return 0 if passed else 1


def _cmd_eval(args) -> int:
    model = _classical(parse_model_file(args.model), "eval")
    word = _parse_cli_word(args.word, model.alphabet)
    prob = word_probability(model, word, neg_tol=args.neg_tol)
    _emit({"word": list(word), "probability": prob})
    return 0


def _cmd_dim(args) -> int:
    model = _classical(parse_model_file(args.model), "dim")
    report = process_dimension(model, args.max_level, args.tol_rel)
    _emit(report.to_dict())
    return 0 if report.stabilized else 3


def _cmd_minimize(args) -> int:
    model = _classical(parse_model_file(args.model), "minimize")
    reduced = minimize_oom(model, args.tol_rel)
    same = equivalent(model, reduced, model.dim + reduced.dim, tol=1e-9)
    report = {
        "dim_before": model.dim,
        "dim_after": reduced.dim,
        "equivalent_up_to_depth": model.dim + reduced.dim,
        "equivalent": same,
    }
    if args.output:
        save_model(reduced, args.output)
        report["output"] = args.output
    else:
        report["model"] = serialize_model(reduced)
    _emit(report)
    return 0 if same else 1


def _cmd_causal(args) -> int:
    model = _classical(parse_model_file(args.model), "causal")
    stat = stationarity_check(model, l=args.stationarity_level)
    if not stat.stationary:
        raise ValidationError(
            f"causal states need a stationary process; residual {stat.residual:.3e}"
        )
    partition = enumerate_causal_states(
        model, args.past_len, args.horizon, cluster_tol=args.cluster_tol
    )
    # cross-check each stored representative against a fresh conditional
    rep_gap = 0.0
    for state in partition.states:
        pd = predictive_distribution(model, state.representative_past, args.horizon)
        rep_gap = max(rep_gap, total_variation(pd.dist, state.representative))
    report = partition.to_dict()
    report["stationarity_residual"] = stat.residual
    report["representative_check_max_tv"] = rep_gap
    report["statistical_complexity_bits"] = statistical_complexity(partition)
    report["topological_complexity_bits"] = topological_complexity(partition)
    report["causal_span_rank"] = causal_span_rank(partition, args.tol_rel)
    _emit(report)
    return 0


def _load_nc(args):
    model = parse_model_file(args.model)
    alphabet = None
    if isinstance(model, HmmModel):
        model = hmm_to_oom(model)
    if isinstance(model, OomModel):
        alphabet = model.alphabet
        model = embed_classical(model)
    return model, alphabet


def _cmd_nc_eval(args) -> int:
    model, alphabet = _load_nc(args)
    if (args.factors is None) == (args.word is None):
        raise ValueError("provide exactly one of --factors or --word")
    if args.factors is not None:
        factors = parse_factors_file(args.factors, model.algebra)
    else:
        if alphabet is None:
            raise ValueError("--word applies only to classical model files")
        word = _parse_cli_word(args.word, alphabet)
        factors = indicator_factors(model, alphabet, word)
    if args.require_positive:
        for i, a in enumerate(factors):
            if not is_positive(a, tol=1e-10):
                print(f"error: factor {i} is not positive", file=sys.stderr)
                return 1
    value = nc_evaluate(model, factors)
    _emit({"n_factors": len(factors), "value": [value.real, value.imag]})
    return 0


def _cmd_nc_dim(args) -> int:
    model, _ = _load_nc(args)
    report = nc_process_dimension(model, args.max_level, args.tol_rel)
    _emit(report.to_dict())
    return 0 if report.stabilized else 3


def _cmd_experiment(args) -> int:
    name, runner = parse_experiment_file(args.spec)
    report = runner()
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(report.to_dict()))
    header, rows = experiment_points_rows(report)
    csv_path = os.path.join(out_dir, "points.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        _emit(report.to_dict())
    if report.runtime_seconds is not None:
        print(f"runtime: {report.runtime_seconds:.3f}s", file=sys.stderr)
    return {"PASS": 0, "FAIL": 1, "INCONCLUSIVE": 3}[report.verdict]


def _cmd_sample(args) -> int:
    model = _classical(parse_model_file(args.model), "sample")
    seed = _resolve_seed(args)
    word = sample_trajectory(model, args.length, seed)
    _emit({"length": args.length, "seed": seed, "word": list(word)})
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oomlab",
        description="Observable operator models: evaluation, dimension, causal states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model(p):
        p.add_argument("--model", required=True, help="model file (JSON)")

    p = sub.add_parser("validate", help="check the defining conditions of a model file")
    add_model(p)
    p.add_argument("--depth", type=int, default=None, help="word/tuple scan depth")
    p.add_argument("--samples", type=int, default=200, help="positivity samples per depth")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--check-stationarity", action="store_true")
    p.add_argument("--stationarity-level", type=int, default=4)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("eval", help="probability of a word")
    add_model(p)
    p.add_argument("--word", required=True, help='e.g. 101 or "a,b,a" (empty for the empty word)')
    p.add_argument("--neg-tol", type=float, default=1e-10, dest="neg_tol")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("dim", help="process dimension via the Hankel rank ladder")
    add_model(p)
    p.add_argument("--max-level", type=int, required=True, dest="max_level")
    p.add_argument("--tol-rel", type=float, default=1e-9, dest="tol_rel")
    p.add_argument("--jobs", type=int, default=1,
                   help="accepted for interface compatibility; the fill is vectorized")
    p.set_defaults(func=_cmd_dim)

    p = sub.add_parser("minimize", help="equivalent model of minimal dimension")
    add_model(p)
    p.add_argument("--tol-rel", type=float, default=1e-9, dest="tol_rel")
    p.add_argument("--output", default=None, help="write the reduced model here")
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("causal", help="finite-horizon causal states and complexities")
    add_model(p)
    p.add_argument("--past-len", type=int, required=True, dest="past_len")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--cluster-tol", type=float, default=1e-8, dest="cluster_tol")
    p.add_argument("--tol-rel", type=float, default=1e-9, dest="tol_rel")
    p.add_argument("--stationarity-level", type=int, default=4)
    p.set_defaults(func=_cmd_causal)

    p = sub.add_parser("nc-eval", help="evaluate a state on an elementary tensor")
    add_model(p)
    p.add_argument("--factors", default=None, help="JSON file with algebra elements")
    p.add_argument("--word", default=None, help="indicator tuple of a classical word")
    p.add_argument("--require-positive", action="store_true")
    p.set_defaults(func=_cmd_nc_eval)

    p = sub.add_parser("nc-dim", help="process dimension of an operator-algebra model")
    add_model(p)
    p.add_argument("--max-level", type=int, required=True, dest="max_level")
    p.add_argument("--tol-rel", type=float, default=1e-9, dest="tol_rel")
    p.add_argument("--jobs", type=int, default=1,
                   help="accepted for interface compatibility; the fill is vectorized")
    p.set_defaults(func=_cmd_nc_dim)

    p = sub.add_parser("experiment", help="run a verification harness from a spec file")
    p.add_argument("action", choices=["run"])
    p.add_argument("spec", help="experiment spec file (JSON)")
    p.add_argument("--out-dir", default=".", dest="out_dir")
    p.add_argument("--csv", action="store_true", help="print the flat point table instead of JSON")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("sample", help="draw a trajectory from a model")
    add_model(p)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_sample)

    return parser


def dispatch(argv) -> int:
    """Parse arguments and run the chosen subcommand, returning the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (SchemaError, ResourceLimitError, PreconditionError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return dispatch(argv)


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
