"""Operator-algebra-valued models: the non-commutative generalisation.

A model here replaces the finite alphabet with a finite-dimensional block
matrix algebra (:mod:`oomlab.algebra`). The bilinear map taking an algebra
element ``a`` and a state vector to a new state vector is stored concretely:
one complex matrix per matrix-unit basis element, with ``T_a`` assembled by
linearity from the coefficients of ``a``. Evaluating the generated state on
an elementary tensor ``a1 (x) ... (x) an`` composes the operators with the
FIRST factor applied first, mirroring the classical word convention. Under
the reverse convention (available as a toggle where it matters) the defining
mass-preservation condition makes generated states translation invariant by
construction; under the convention used here it does not, which is what
:func:`nc_stationarity_check` probes.

Classical models embed via :func:`embed_classical` with the commutative
algebra whose basis elements are the symbol indicators; evaluation on
indicator tuples then reproduces word probabilities exactly and the two
notions of process dimension coincide.

Positivity of the generated state quantifies over all tuples of positive
algebra elements and is not finitely certifiable; validation spot-checks it
on seeded random tuples ``b* b``.

A note on the canonical state space: for two-sided translation-invariant
states one can alternatively span the conditionals induced by finite left
blocks rather than the iterated one-step images used here. The two spans can
differ only through limit points, so whenever the dimension computed here is
finite they coincide and nothing further is implemented for the alternative.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    CStarAlgebra,
    basis_elements,
    random_element,
    unit_element,
)
from .dimension import (
    DEFAULT_RANK_TOL,
    DimensionReport,
    HankelBlock,
    MAX_HANKEL_ENTRIES,
    numerical_rank,
)
from .errors import ResourceLimitError, ValidationError
from .oom import DEFAULT_CONDITION_TOL, DEFAULT_NEG_TOL, OomModel
from .words import word_count_up_to

DEFAULT_IMAG_TOL = 1e-9


@dataclass(eq=False)
class NcOomModel:
    """Model with operator-algebra output.

    ``op_per_basis[b]`` is the complex ``dim x dim`` operator attached to the
    b-th matrix-unit basis element of ``algebra``; the operator of a general
    element is the coefficient-weighted sum, so bilinearity is structural.
    """

    algebra: CStarAlgebra
    op_per_basis: Sequence
    init: np.ndarray
    eval: np.ndarray
    name: str | None = None
    description: str | None = None

    def __post_init__(self):
        v = np.array(self.init, dtype=complex).reshape(-1)
        l = np.array(self.eval, dtype=complex).reshape(-1)
        if v.size == 0:
            raise ValidationError("init vector is empty")
        if l.size != v.size:
            raise ValidationError(f"eval has length {l.size}, init has length {v.size}")
        d = v.size
        ops = np.array(self.op_per_basis, dtype=complex)
        expected = (self.algebra.total_dim, d, d)
        if ops.shape != expected:
            raise ValidationError(
                f"op_per_basis must have shape {expected} "
                f"(one {d}x{d} operator per basis element), got {ops.shape}"
            )
        ops.setflags(write=False)
        v.setflags(write=False)
        l.setflags(write=False)
        self.op_per_basis = ops
        self.init = v
        self.eval = l

    @property
    def dim(self) -> int:
        return self.init.size

    def operator_for(self, a: AlgebraElement) -> np.ndarray:
        """Assemble ``T_a`` from the element's basis coefficients."""
        if a.algebra != self.algebra:
            raise ValidationError("element belongs to a different algebra")
        return np.tensordot(a.coefficients(), self.op_per_basis, axes=(0, 0))

    @cached_property
    def unit_operator(self) -> np.ndarray:
        return self.operator_for(unit_element(self.algebra))

    def __repr__(self):
        return (
            f"NcOomModel(blocks={list(self.algebra.block_dims)}, dim={self.dim})"
        )


class NcState:
    """Evaluation oracle on elementary tensors, backed by a model."""

    def __init__(self, model: NcOomModel):
        self.model = model

    @property
    def algebra(self) -> CStarAlgebra:
        return self.model.algebra

    def value(self, factors: Sequence[AlgebraElement], reverse_order: bool = False) -> complex:
        return nc_evaluate(self.model, factors, reverse_order=reverse_order)


@dataclass
class NcValidationReport:
    condition1_residual: float
    condition2_residual: float
    worst_negative_real: float
    worst_imaginary: float
    checked_depth: int
    samples_per_depth: int
    seed: int
    neg_tol: float
    imag_tol: float
    condition_tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "condition1_residual": self.condition1_residual,
            "condition2_residual": self.condition2_residual,
            "worst_negative_real": self.worst_negative_real,
            "worst_imaginary": self.worst_imaginary,
            "checked_depth": self.checked_depth,
            "samples_per_depth": self.samples_per_depth,
            "seed": self.seed,
            "neg_tol": self.neg_tol,
            "imag_tol": self.imag_tol,
            "condition_tol": self.condition_tol,
            "passed": self.passed,
        }


@dataclass
class NcStationarityReport:
    residual: float
    level: int
    samples_per_depth: int
    seed: int
    tol: float
    reverse_order: bool
    stationary: bool

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "level": self.level,
            "samples_per_depth": self.samples_per_depth,
            "seed": self.seed,
            "tol": self.tol,
            "reverse_order": self.reverse_order,
            "stationary": self.stationary,
        }


def nc_evaluate(
    m: NcOomModel, factors: Sequence[AlgebraElement], reverse_order: bool = False
) -> complex:
    """Value of the generated state on an elementary tensor of factors.

    The first factor's operator is applied first; ``reverse_order`` flips
    this (the alternative composition convention). The empty tensor gives
    ``l(v)``, one for a valid model.
    """
    state = m.init
    ordered = reversed(factors) if reverse_order else factors
    for a in ordered:
        state = m.operator_for(a) @ state
    return complex(m.eval @ state)


def validate_ncoom(
    m: NcOomModel,
    l_val: int = 4,
    samples: int = 200,
    seed: int = 0,
    neg_tol: float = DEFAULT_NEG_TOL,
    imag_tol: float = DEFAULT_IMAG_TOL,
    condition_tol: float = DEFAULT_CONDITION_TOL,
) -> NcValidationReport:
    """Check the defining conditions, spot-checking positivity.

    Conditions one and two are exact residuals. Positivity of the generated
    state on tuples of positive elements is sampled: ``samples`` tuples of
    ``b* b`` elements (unit Frobenius norm) per depth up to ``l_val``; the
    worst negative real part and the worst imaginary magnitude are reported.
    Deterministic given ``seed``; a pass is necessary, not sufficient.
    """
    c1 = abs(complex(m.eval @ m.init) - 1.0)
    c2 = float(np.max(np.abs(m.eval @ m.unit_operator - m.eval)))
    rng = np.random.default_rng(seed)
    worst_real = np.inf
    worst_imag = 0.0
    for depth in range(1, l_val + 1):
        for _ in range(samples):
            factors = []
            for _ in range(depth):
                b = random_element(m.algebra, rng, normalize=True)
                factors.append(b.adjoint() * b)
            val = nc_evaluate(m, factors)
            worst_real = min(worst_real, val.real)
            worst_imag = max(worst_imag, abs(val.imag))
    if not np.isfinite(worst_real):
        worst_real = float(complex(m.eval @ m.init).real)
    passed = (
        c1 <= condition_tol
        and c2 <= condition_tol
        and worst_real >= -neg_tol
        and worst_imag <= imag_tol
    )
    return NcValidationReport(
        condition1_residual=float(c1),
        condition2_residual=c2,
        worst_negative_real=float(worst_real),
        worst_imaginary=float(worst_imag),
        checked_depth=l_val,
        samples_per_depth=samples,
        seed=seed,
        neg_tol=neg_tol,
        imag_tol=imag_tol,
        condition_tol=condition_tol,
        passed=passed,
    )


def embed_classical(m: OomModel) -> NcOomModel:
    """Embed a classical model over the commutative algebra of its alphabet.

    Basis elements of the size-one blocks are the symbol indicators in
    alphabet order, so the operator list is the complexified classical
    operator list and evaluation on indicator tuples reproduces the word
    probabilities exactly. The dimension is preserved.
    """
    algebra = CStarAlgebra(tuple(1 for _ in m.alphabet))
    ops = np.stack([m.operators[s].astype(complex) for s in m.alphabet])
    return NcOomModel(
        algebra=algebra,
        op_per_basis=ops,
        init=m.init.astype(complex),
        eval=m.eval.astype(complex),
        name=m.name,
        description=m.description,
    )


def indicator_factors(m: NcOomModel, alphabet: Sequence[str], word) -> list[AlgebraElement]:
    """Indicator tuple of a classical word inside a commutative algebra.

    Valid for models whose algebra has one size-one block per symbol of
    ``alphabet`` in matching order, as produced by :func:`embed_classical`.
    """
    if not m.algebra.is_commutative or m.algebra.n_blocks != len(alphabet):
        raise ValidationError(
            "indicator factors need a commutative algebra with one block per symbol"
        )
    basis = basis_elements(m.algebra)
    index = {s: i for i, s in enumerate(alphabet)}
    factors = []
    for s in word:
        if s not in index:
            raise ValueError(f"unknown symbol {s!r}; alphabet is {list(alphabet)}")
        factors.append(basis[index[s]])
    return factors


def _nc_state_levels(m: NcOomModel, depth: int) -> list[np.ndarray]:
    ops = m.op_per_basis
    levels = [m.init.reshape(1, -1)]
    for _ in range(depth):
        prev = levels[-1]
        nxt = np.einsum("kij,nj->nki", ops, prev)
        levels.append(nxt.reshape(-1, prev.shape[1]))
    return levels


def _nc_functional_levels(m: NcOomModel, depth: int) -> list[np.ndarray]:
    ops = m.op_per_basis
    levels = [m.eval.reshape(1, -1)]
    for _ in range(depth):
        prev = levels[-1]
        nxt = np.einsum("nj,kji->kni", prev, ops)
        levels.append(nxt.reshape(-1, prev.shape[1]))
    return levels


def _basis_tuples(total_dim: int, max_length: int) -> list[tuple]:
    out: list[tuple] = []
    from itertools import product

    for n in range(max_length + 1):
        out.extend(product(range(total_dim), repeat=n))
    return out


def nc_hankel(
    m: NcOomModel,
    l_past: int,
    l_future: int,
    max_entries: int = MAX_HANKEL_ENTRIES,
) -> HankelBlock:
    """Complex block of state values over basis-element tuples.

    Rows are tuples of basis indices of length <= l_past, columns tuples of
    length <= l_future (length-then-lexicographic); the entry is the state
    evaluated on the concatenated tensor, row factors first. For an embedded
    classical model this is entrywise the classical probability block.
    """
    if l_past < 0 or l_future < 0:
        raise ValueError("l_past and l_future must be nonnegative")
    td = m.algebra.total_dim
    n_rows = word_count_up_to(td, l_past)
    n_cols = word_count_up_to(td, l_future)
    if n_rows * n_cols > max_entries:
        raise ResourceLimitError(
            f"block would have {n_rows * n_cols} entries, guard is {max_entries}"
        )
    states = np.vstack(_nc_state_levels(m, l_past))
    functionals = np.vstack(_nc_functional_levels(m, l_future))
    h = states @ functionals.T
    sv = np.linalg.svd(h, compute_uv=False)
    return HankelBlock(
        pasts=_basis_tuples(td, l_past),
        futures=_basis_tuples(td, l_future),
        matrix=h,
        singular_values=sv,
    )


def nc_process_dimension(
    m: NcOomModel,
    l_max: int,
    tol_rel: float = DEFAULT_RANK_TOL,
    max_entries: int = MAX_HANKEL_ENTRIES,
) -> DimensionReport:
    """Rank ladder of square basis-tuple blocks, as in the classical case."""
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    ranks_with_zero = {}
    for level in range(l_max + 1):
        block = nc_hankel(m, level, level, max_entries=max_entries)
        ranks_with_zero[level] = numerical_rank(block.singular_values, tol_rel)
    stabilized = ranks_with_zero[l_max] == ranks_with_zero[l_max - 1]
    rank_by_level = {lvl: r for lvl, r in ranks_with_zero.items() if lvl >= 1}
    return DimensionReport(
        rank_by_level=rank_by_level,
        stabilized=stabilized,
        dimension=rank_by_level[l_max] if stabilized else None,
        tol_rel=tol_rel,
    )


def nc_mixture_direct_sum(parts: Sequence[tuple]) -> NcOomModel:
    """Convex mixture of models over one algebra, as a block-diagonal sum.

    The mixture's state values are the weighted sums of the parts' values on
    every elementary tensor, exactly by block structure.
    """
    if not parts:
        raise ValidationError("mixture needs at least one part")
    weights = np.array([float(w) for w, _ in parts])
    models = [m for _, m in parts]
    if np.any(weights <= 0):
        raise ValidationError("mixture weights must be positive")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValidationError(f"mixture weights sum to {weights.sum()!r}, not 1")
    algebra = models[0].algebra
    for m in models[1:]:
        if m.algebra != algebra:
            raise ValidationError("algebra mismatch between mixture parts")
    total = sum(m.dim for m in models)
    ops = np.zeros((algebra.total_dim, total, total), dtype=complex)
    init = np.zeros(total, dtype=complex)
    evalv = np.zeros(total, dtype=complex)
    pos = 0
    for w, m in zip(weights, models):
        sl = slice(pos, pos + m.dim)
        ops[:, sl, sl] = m.op_per_basis
        init[sl] = w * m.init
        evalv[sl] = m.eval
        pos += m.dim
    return NcOomModel(algebra=algebra, op_per_basis=ops, init=init, eval=evalv)


def nc_stationarity_check(
    m: NcOomModel,
    l: int = 3,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    reverse_order: bool = False,
) -> NcStationarityReport:
    """Probe translation invariance on seeded random tuples.

    Reports the max of ``|value(1 (x) a1 .. an) - value(a1 .. an)|`` over
    ``samples`` random normalized tuples per length up to ``l``. With
    ``reverse_order`` the residual vanishes up to the condition-two defect
    for any model, which is the alternative convention's built-in
    invariance.
    """
    rng = np.random.default_rng(seed)
    one = unit_element(m.algebra)
    residual = 0.0
    for n in range(1, l + 1):
        for _ in range(samples):
            factors = [random_element(m.algebra, rng, normalize=True) for _ in range(n)]
            shifted = nc_evaluate(m, [one] + factors, reverse_order=reverse_order)
            plain = nc_evaluate(m, factors, reverse_order=reverse_order)
            residual = max(residual, abs(shifted - plain))
    return NcStationarityReport(
        residual=float(residual),
        level=l,
        samples_per_depth=samples,
        seed=seed,
        tol=tol,
        reverse_order=reverse_order,
        stationary=residual <= tol,
    )
