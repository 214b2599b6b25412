"""Model persistence: strict JSON schemas, round-trip serialization, and a
canonical emitter.

Files carry a ``type`` tag (``oom``, ``hmm``, ``ncoom`` or ``mixture``).
Unknown fields are rejected rather than ignored so fixtures cannot drift, and
schema errors name the offending field. Models are validated on load by
default; loading can be deferred with ``validate=False`` when the point is to
inspect an invalid model.

Mixture files reference other model files by path (relative to the mixture
file) and resolve recursively into a single direct-sum model. Complex numbers
are written as ``[re, im]`` pairs and all matrices are row-major.

The canonical emitter formats every float with 17 significant digits, enough
to round-trip doubles exactly, so identical inputs produce byte-identical
reports.
"""

from __future__ import annotations

import json
import math
import os
from typing import Mapping

import numpy as np

from .algebra import CStarAlgebra, construct_algebra
from .errors import SchemaError, ValidationError
from .ncoom import NcOomModel, nc_mixture_direct_sum, validate_ncoom
from .oom import (
    HmmModel,
    OomModel,
    hmm_to_oom,
    mixture_direct_sum,
    validate_hmm,
    validate_oom,
)

_MAX_MIXTURE_DEPTH = 10


# ---------------------------------------------------------------------------
# Canonical JSON


def dumps_canonical(obj, indent: int = 2) -> str:
    """Deterministic JSON with floats at 17 significant digits."""

    def fmt(x, level: int) -> str:
        pad = " " * (indent * level)
        pad_in = " " * (indent * (level + 1))
        if x is None:
            return "null"
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        if isinstance(x, (float, np.floating)):
            v = float(x)
            if not math.isfinite(v):
                raise ValueError(f"cannot serialize non-finite float {v!r}")
            return format(v, ".17g")
        if isinstance(x, str):
            return json.dumps(x)
        if isinstance(x, Mapping):
            if not x:
                return "{}"
            items = [
                f"{pad_in}{json.dumps(str(k))}: {fmt(v, level + 1)}" for k, v in x.items()
            ]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(x, (list, tuple, np.ndarray)):
            seq = list(x)
            if not seq:
                return "[]"
            items = [f"{pad_in}{fmt(v, level + 1)}" for v in seq]
            return "[\n" + ",\n".join(items) + "\n" + pad + "]"
        raise TypeError(f"cannot serialize {type(x).__name__}")

    return fmt(obj, 0) + "\n"


# ---------------------------------------------------------------------------
# Strict schema helpers


def _pop(data: dict, key: str, context: str):
    if key not in data:
        raise SchemaError(f'missing field "{key}" in {context}')
    return data.pop(key)


def _pop_optional(data: dict, key: str):
    return data.pop(key, None)


def _no_leftovers(data: dict, context: str):
    if data:
        names = ", ".join(sorted(repr(k) for k in data))
        raise SchemaError(f"unknown field(s) {names} in {context}")


def _as_str_list(x, field: str) -> list:
    if not isinstance(x, list) or not x or not all(isinstance(s, str) for s in x):
        raise SchemaError(f'field "{field}" must be a non-empty list of strings')
    return x


def _as_int(x, field: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(f'field "{field}" must be an integer')
    return x


def _as_number(x, field: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f'field "{field}" must be a number')
    return float(x)


def _as_real_vector(x, field: str, length: int) -> np.ndarray:
    if not isinstance(x, list) or len(x) != length:
        raise SchemaError(f'field "{field}" must be a list of {length} numbers')
    return np.array([_as_number(v, field) for v in x])


def _as_real_matrix(x, field: str, shape: tuple) -> np.ndarray:
    rows, cols = shape
    if not isinstance(x, list) or len(x) != rows:
        raise SchemaError(f'field "{field}" must be a {rows}x{cols} row-major matrix')
    out = np.empty(shape)
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(
                f'field "{field}" must be a {rows}x{cols} row-major matrix'
            )
        out[i] = [_as_number(v, field) for v in row]
    return out


def _as_complex(x, field: str) -> complex:
    if not isinstance(x, list) or len(x) != 2:
        raise SchemaError(f'field "{field}" must hold complex numbers as [re, im] pairs')
    return complex(_as_number(x[0], field), _as_number(x[1], field))


def _as_complex_vector(x, field: str, length: int) -> np.ndarray:
    if not isinstance(x, list) or len(x) != length:
        raise SchemaError(f'field "{field}" must be a list of {length} [re, im] pairs')
    return np.array([_as_complex(v, field) for v in x])


def _as_complex_matrix(x, field: str, shape: tuple) -> np.ndarray:
    rows, cols = shape
    if not isinstance(x, list) or len(x) != rows:
        raise SchemaError(
            f'field "{field}" must be a {rows}x{cols} matrix of [re, im] pairs'
        )
    out = np.empty(shape, dtype=complex)
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(
                f'field "{field}" must be a {rows}x{cols} matrix of [re, im] pairs'
            )
        out[i] = [_as_complex(v, field) for v in row]
    return out


def _pop_metadata(data: dict) -> dict:
    meta = {}
    name = _pop_optional(data, "name")
    desc = _pop_optional(data, "description")
    if name is not None and not isinstance(name, str):
        raise SchemaError('field "name" must be a string')
    if desc is not None and not isinstance(desc, str):
        raise SchemaError('field "description" must be a string')
    meta["name"] = name
    meta["description"] = desc
    return meta


# ---------------------------------------------------------------------------
# Parsing


def _parse_oom(data: dict, context: str) -> OomModel:
    alphabet = _as_str_list(_pop(data, "alphabet", context), "alphabet")
    dim = _as_int(_pop(data, "dim", context), "dim")
    if dim < 1:
        raise SchemaError('field "dim" must be a positive integer')
    operators = _pop(data, "operators", context)
    if not isinstance(operators, dict):
        raise SchemaError('field "operators" must map symbols to matrices')
    if set(operators) != set(alphabet):
        raise SchemaError('field "operators" must have exactly one matrix per alphabet symbol')
    ops = {
        s: _as_real_matrix(operators[s], f"operators[{s!r}]", (dim, dim))
        for s in alphabet
    }
    init = _as_real_vector(_pop(data, "init", context), "init", dim)
    evalv = _as_real_vector(_pop(data, "eval", context), "eval", dim)
    meta = _pop_metadata(data)
    _no_leftovers(data, context)
    return OomModel(alphabet=tuple(alphabet), operators=ops, init=init, eval=evalv, **meta)


def _parse_hmm(data: dict, context: str) -> HmmModel:
    alphabet = _as_str_list(_pop(data, "alphabet", context), "alphabet")
    n = _as_int(_pop(data, "n_states", context), "n_states")
    if n < 1:
        raise SchemaError('field "n_states" must be a positive integer')
    te = _pop(data, "transition_emission", context)
    if not isinstance(te, dict) or set(te) != set(alphabet):
        raise SchemaError(
            'field "transition_emission" must have exactly one matrix per alphabet symbol'
        )
    mats = {
        s: _as_real_matrix(te[s], f"transition_emission[{s!r}]", (n, n)) for s in alphabet
    }
    init = _as_real_vector(_pop(data, "init", context), "init", n)
    meta = _pop_metadata(data)
    _no_leftovers(data, context)
    return HmmModel(alphabet=tuple(alphabet), transition_emission=mats, init=init, **meta)


def _parse_ncoom(data: dict, context: str) -> NcOomModel:
    alg = _pop(data, "algebra", context)
    if not isinstance(alg, dict):
        raise SchemaError('field "algebra" must be an object like {"blocks": [2, 1]}')
    alg = dict(alg)
    blocks = alg.pop("blocks", None)
    _no_leftovers(alg, f'{context}, field "algebra"')
    if (
        not isinstance(blocks, list)
        or not blocks
        or not all(isinstance(b, int) and not isinstance(b, bool) and b >= 1 for b in blocks)
    ):
        raise SchemaError('field "algebra.blocks" must be a non-empty list of positive integers')
    algebra = construct_algebra(blocks)
    dim = _as_int(_pop(data, "dim", context), "dim")
    if dim < 1:
        raise SchemaError('field "dim" must be a positive integer')
    raw_ops = _pop(data, "op_per_basis", context)
    if not isinstance(raw_ops, list) or len(raw_ops) != algebra.total_dim:
        raise SchemaError(
            f'field "op_per_basis" must list {algebra.total_dim} matrices '
            "(one per basis element)"
        )
    ops = np.stack(
        [
            _as_complex_matrix(m, f"op_per_basis[{i}]", (dim, dim))
            for i, m in enumerate(raw_ops)
        ]
    )
    init = _as_complex_vector(_pop(data, "init", context), "init", dim)
    evalv = _as_complex_vector(_pop(data, "eval", context), "eval", dim)
    meta = _pop_metadata(data)
    _no_leftovers(data, context)
    return NcOomModel(algebra=algebra, op_per_basis=ops, init=init, eval=evalv, **meta)


def _parse_mixture(data: dict, context: str, base_dir: str, validate: bool, depth: int):
    if depth > _MAX_MIXTURE_DEPTH:
        raise SchemaError(f"mixture nesting deeper than {_MAX_MIXTURE_DEPTH} in {context}")
    raw_parts = _pop(data, "parts", context)
    if not isinstance(raw_parts, list) or not raw_parts:
        raise SchemaError('field "parts" must be a non-empty list')
    meta = _pop_metadata(data)
    _no_leftovers(data, context)
    parts = []
    for i, entry in enumerate(raw_parts):
        if not isinstance(entry, dict):
            raise SchemaError(f'field "parts[{i}]" must be an object with "weight" and "path"')
        entry = dict(entry)
        weight = _as_number(_pop(entry, "weight", f'{context}, "parts[{i}]"'), f"parts[{i}].weight")
        path = _pop(entry, "path", f'{context}, "parts[{i}]"')
        if not isinstance(path, str):
            raise SchemaError(f'field "parts[{i}].path" must be a string')
        _no_leftovers(entry, f'{context}, field "parts[{i}]"')
        sub = parse_model_file(
            os.path.join(base_dir, path), validate=validate, _depth=depth + 1
        )
        parts.append((weight, sub))
    classical = [isinstance(m, (OomModel, HmmModel)) for _, m in parts]
    if all(classical):
        resolved = [
            (w, hmm_to_oom(m) if isinstance(m, HmmModel) else m) for w, m in parts
        ]
        combined = mixture_direct_sum(resolved)
    elif all(isinstance(m, NcOomModel) for _, m in parts):
        combined = nc_mixture_direct_sum(parts)
    else:
        raise SchemaError(f"mixture in {context} mixes classical and operator-algebra parts")
    combined.name = meta["name"]
    combined.description = meta["description"]
    return combined


def parse_model_file(path, validate: bool = True, _depth: int = 0):
    """Load and (by default) validate a typed model from a JSON file.

    Returns an :class:`OomModel`, :class:`HmmModel` or :class:`NcOomModel`;
    mixture files resolve recursively into the combined direct-sum model.
    Parse errors carry line and column, schema violations name the field, and
    validation failures quote the residuals.
    """
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"parse error in {path} at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, dict):
        raise SchemaError(f"top level of {path} must be an object")
    context = f"model file {os.path.basename(path)}"
    data = dict(data)
    mtype = _pop(data, "type", context)
    if mtype == "oom":
        model = _parse_oom(data, context)
        if validate:
            _validate_loaded(model)
        return model
    if mtype == "hmm":
        model = _parse_hmm(data, context)
        if validate:
            _validate_loaded(model)
        return model
    if mtype == "ncoom":
        model = _parse_ncoom(data, context)
        if validate:
            _validate_loaded(model)
        return model
    if mtype == "mixture":
        model = _parse_mixture(
            data, context, os.path.dirname(os.path.abspath(path)), validate, _depth
        )
        if validate:
            _validate_loaded(model)
        return model
    raise SchemaError(f'unknown model type {mtype!r} in {context}')


def _validate_loaded(model):
    if isinstance(model, OomModel):
        rep = validate_oom(model)
        if not rep.passed:
            raise ValidationError(
                "model failed validation: "
                f"condition-1 residual {rep.condition1_residual:.6e}, "
                f"condition-2 residual {rep.condition2_residual:.6e}, "
                f"most negative probability {rep.most_negative_probability:.6e} "
                f"at depth {rep.checked_depth}"
            )
    elif isinstance(model, HmmModel):
        rep = validate_hmm(model)
        if not rep.passed:
            raise ValidationError(
                "HMM failed validation: "
                f"row-sum residual {rep.row_sum_residual:.6e}, "
                f"init-sum residual {rep.init_sum_residual:.6e}, "
                f"min entry {rep.min_entry:.6e}"
            )
    elif isinstance(model, NcOomModel):
        rep = validate_ncoom(model)
        if not rep.passed:
            raise ValidationError(
                "model failed validation: "
                f"condition-1 residual {rep.condition1_residual:.6e}, "
                f"condition-2 residual {rep.condition2_residual:.6e}, "
                f"worst sampled value real part {rep.worst_negative_real:.6e}, "
                f"worst imaginary magnitude {rep.worst_imaginary:.6e}"
            )
    else:
        raise TypeError(f"cannot validate {type(model).__name__}")


# ---------------------------------------------------------------------------
# Serialization


def _complex_matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def serialize_model(model) -> dict:
    """Plain-JSON dict for a model; inverse of parsing, field for field."""
    if isinstance(model, OomModel):
        out = {
            "type": "oom",
            "alphabet": list(model.alphabet),
            "dim": model.dim,
            "operators": {
                s: [[float(v) for v in row] for row in model.operators[s]]
                for s in model.alphabet
            },
            "init": [float(v) for v in model.init],
            "eval": [float(v) for v in model.eval],
        }
    elif isinstance(model, HmmModel):
        out = {
            "type": "hmm",
            "alphabet": list(model.alphabet),
            "n_states": model.n_states,
            "transition_emission": {
                s: [[float(v) for v in row] for row in model.transition_emission[s]]
                for s in model.alphabet
            },
            "init": [float(v) for v in model.init],
        }
    elif isinstance(model, NcOomModel):
        out = {
            "type": "ncoom",
            "algebra": {"blocks": list(model.algebra.block_dims)},
            "dim": model.dim,
            "op_per_basis": [_complex_matrix_to_pairs(m) for m in model.op_per_basis],
            "init": [[float(v.real), float(v.imag)] for v in model.init],
            "eval": [[float(v.real), float(v.imag)] for v in model.eval],
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    if model.name is not None:
        out["name"] = model.name
    if model.description is not None:
        out["description"] = model.description
    return out


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(serialize_model(model)))


# ---------------------------------------------------------------------------
# Algebra-element factor files (for evaluating states on elementary tensors)


def parse_factors_file(path, algebra: CStarAlgebra) -> list:
    """List of algebra elements from a JSON file.

    Each entry is one of ``{"blocks": [...]}`` (explicit block matrices of
    [re, im] pairs), ``{"basis_index": k}`` (the k-th matrix unit) or
    ``{"unit": true}``.
    """
    from .algebra import AlgebraElement, basis_elements, unit_element

    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"parse error in {path} at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, list):
        raise SchemaError(f"top level of {path} must be a list of factors")
    basis = None
    out = []
    for i, entry in enumerate(data):
        ctx = f"factor {i} in {os.path.basename(path)}"
        if not isinstance(entry, dict):
            raise SchemaError(f"{ctx} must be an object")
        entry = dict(entry)
        if "blocks" in entry:
            raw = entry.pop("blocks")
            _no_leftovers(entry, ctx)
            if not isinstance(raw, list) or len(raw) != algebra.n_blocks:
                raise SchemaError(
                    f'{ctx}: field "blocks" must list {algebra.n_blocks} matrices'
                )
            blocks = [
                _as_complex_matrix(b, f"blocks[{k}]", (d, d))
                for k, (b, d) in enumerate(zip(raw, algebra.block_dims))
            ]
            out.append(AlgebraElement(algebra, blocks))
        elif "basis_index" in entry:
            k = _as_int(entry.pop("basis_index"), "basis_index")
            _no_leftovers(entry, ctx)
            if not 0 <= k < algebra.total_dim:
                raise SchemaError(
                    f'{ctx}: "basis_index" must be in [0, {algebra.total_dim})'
                )
            if basis is None:
                basis = basis_elements(algebra)
            out.append(basis[k])
        elif "unit" in entry:
            flag = entry.pop("unit")
            _no_leftovers(entry, ctx)
            if flag is not True:
                raise SchemaError(f'{ctx}: "unit" must be true')
            out.append(unit_element(algebra))
        else:
            raise SchemaError(
                f'{ctx} must contain one of "blocks", "basis_index" or "unit"'
            )
    return out


# ---------------------------------------------------------------------------
# Experiment spec files


def parse_experiment_file(path):
    """Build a ready-to-run experiment closure from a JSON spec file.

    Returns ``(name, runner)`` where ``runner()`` yields the
    :class:`~oomlab.experiments.ExperimentReport`. Model references are
    resolved relative to the spec file.
    """
    from . import experiments as xp

    path = os.fspath(path)
    base_dir = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"parse error in {path} at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, dict):
        raise SchemaError(f"top level of {path} must be an object")
    context = f"experiment file {os.path.basename(path)}"
    data = dict(data)
    kind = _pop(data, "experiment", context)
    name = _pop_optional(data, "name")
    if name is None:
        name = str(kind)
    elif not isinstance(name, str):
        raise SchemaError('field "name" must be a string')

    def load_classical(rel, field):
        if not isinstance(rel, str):
            raise SchemaError(f'field "{field}" must be a path string')
        m = parse_model_file(os.path.join(base_dir, rel))
        if isinstance(m, HmmModel):
            m = hmm_to_oom(m)
        if not isinstance(m, OomModel):
            raise SchemaError(f'field "{field}" must reference a classical model')
        return m

    if kind == "additivity":
        raw_parts = _pop(data, "parts", context)
        if not isinstance(raw_parts, list) or not raw_parts:
            raise SchemaError('field "parts" must be a non-empty list')
        parts = []
        for i, entry in enumerate(raw_parts):
            if not isinstance(entry, dict):
                raise SchemaError(f'field "parts[{i}]" must be an object')
            entry = dict(entry)
            w = _as_number(_pop(entry, "weight", context), f"parts[{i}].weight")
            rel = _pop(entry, "path", context)
            _no_leftovers(entry, f'{context}, field "parts[{i}]"')
            parts.append((w, load_classical(rel, f"parts[{i}].path")))
        l_max = _as_int(_pop(data, "max_level", context), "max_level")
        raw_tol = _pop_optional(data, "tol_rel")
        tol_rel = 1e-9 if raw_tol is None else _as_number(raw_tol, "tol_rel")
        _no_leftovers(data, context)
        return name, lambda: xp.run_additivity(parts, l_max, tol_rel, name=name)

    if kind == "semicontinuity":
        fam = _pop(data, "family", context)
        if not isinstance(fam, dict):
            raise SchemaError('field "family" must be an object with a "kind"')
        fam = dict(fam)
        fkind = _pop(fam, "kind", f'{context}, field "family"')
        grid = fam.pop("grid", None)
        if not isinstance(grid, list) or not grid:
            raise SchemaError('field "family.grid" must be a non-empty list of numbers')
        grid = [_as_number(t, "family.grid") for t in grid]
        if fkind == "mixture_weight":
            base = load_classical(_pop(fam, "base", context), "family.base")
            other = load_classical(_pop(fam, "other", context), "family.other")
            _no_leftovers(fam, f'{context}, field "family"')
            family = xp.mixture_weight_family(base, other, grid)
        elif fkind == "coalescing_bernoulli":
            center = _as_number(_pop(fam, "center", context), "family.center")
            _no_leftovers(fam, f'{context}, field "family"')
            family = xp.coalescing_bernoulli_family(center, grid)
        elif fkind == "markov_merge":
            _no_leftovers(fam, f'{context}, field "family"')
            family = xp.markov_merge_family(grid)
        else:
            raise SchemaError(f'unknown family kind {fkind!r} in {context}')
        l_max = _as_int(_pop(data, "max_level", context), "max_level")
        raw_tol = _pop_optional(data, "tol_rel")
        tol_rel = 1e-9 if raw_tol is None else _as_number(raw_tol, "tol_rel")
        _no_leftovers(data, context)
        return name, lambda: xp.run_semicontinuity(family, l_max, tol_rel, name=name)

    if kind == "upperbound":
        model = load_classical(_pop(data, "model", context), "model")
        l_p = _as_int(_pop(data, "past_length", context), "past_length")
        horizon = _as_int(_pop(data, "horizon", context), "horizon")
        l_max = _as_int(_pop(data, "max_level", context), "max_level")
        raw_tol = _pop_optional(data, "tol_rel")
        tol_rel = 1e-9 if raw_tol is None else _as_number(raw_tol, "tol_rel")
        raw_ct = _pop_optional(data, "cluster_tol")
        cluster_tol = 1e-8 if raw_ct is None else _as_number(raw_ct, "cluster_tol")
        _no_leftovers(data, context)
        return name, lambda: xp.run_upperbound(
            model, l_p, horizon, l_max, tol_rel=tol_rel, cluster_tol=cluster_tol, name=name
        )

    raise SchemaError(f"unknown experiment kind {kind!r} in {context}")


def _flatten(prefix: str, value, into: dict):
    if isinstance(value, Mapping):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, into)
    else:
        into[prefix] = value


def experiment_points_rows(report) -> tuple[list, list]:
    """Flatten per-point measurements to (header, rows) for CSV export."""
    flats = []
    for point in report.points:
        flat: dict = {}
        _flatten("", point, flat)
        flats.append(flat)
    header: list = []
    for flat in flats:
        for key in flat:
            if key not in header:
                header.append(key)
    rows = []
    for flat in flats:
        row = []
        for key in header:
            v = flat.get(key, "")
            if isinstance(v, bool):
                row.append("true" if v else "false")
            elif isinstance(v, float):
                row.append(format(v, ".17g"))
            else:
                row.append(str(v))
        rows.append(row)
    return header, rows
