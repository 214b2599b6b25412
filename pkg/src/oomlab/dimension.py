"""Process dimension via finite Hankel blocks, plus model minimization.

The dimension of a process is the dimension of the span of its conditioned
one-step images (its canonical model), which equals the rank of the infinite
past-by-future matrix of word probabilities ``H[u, w] = P(uw)``. Finite
truncations only ever bound that rank from below, so :func:`process_dimension`
climbs square blocks of growing depth and reports a dimension only when the
numerical rank is stable across the last two levels; stabilization is
evidence, not proof.

:func:`minimize_oom` produces an equivalent model of minimal dimension by
restricting to the reachable span of state images and then quotienting by the
joint kernel of the word functionals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .words import normalize_word, word_count_up_to, words_up_to
from .oom import (
    DEFAULT_NEG_TOL,
    OomModel,
    OomOracle,
    _functional_levels,
    _state_levels,
    as_oracle,
)

DEFAULT_RANK_TOL = 1e-9
MAX_HANKEL_ENTRIES = 1_000_000


@dataclass(eq=False)
class HankelBlock:
    """Finite past-by-future block of word probabilities with its spectrum.

    ``matrix[i, j]`` is the probability (or state value, in the operator-
    algebra setting, where entries are complex and index tuples enumerate
    basis elements) of the concatenation ``pasts[i] + futures[j]``.
    """

    pasts: list
    futures: list
    matrix: np.ndarray
    singular_values: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.matrix.shape


@dataclass
class DimensionReport:
    """Rank ladder over square blocks and the stabilization verdict.

    ``dimension`` is the final rank when the last two levels agree and None
    otherwise; serialized reports spell the latter out as "not stabilized".
    """

    rank_by_level: dict
    stabilized: bool
    dimension: int | None
    tol_rel: float

    def to_dict(self) -> dict:
        return {
            "rank_by_level": {str(k): int(v) for k, v in self.rank_by_level.items()},
            "stabilized": self.stabilized,
            "dimension": int(self.dimension) if self.stabilized else "not stabilized",
            "tol_rel": self.tol_rel,
        }


def apply_tau(m: OomModel, word) -> np.ndarray:
    """State image of a word: ``T_wn ... T_w1 v``.

    This is the coordinate representation of conditioning the process on the
    word (unnormalized); applying the evaluation covector gives the word's
    probability. The empty word returns the initial vector.
    """
    w = normalize_word(word, m.alphabet)
    state = m.init
    for s in w:
        state = m.operators[s] @ state
    return state


def _clamp_probabilities(h: np.ndarray, neg_tol: float) -> np.ndarray:
    worst = float(h.min()) if h.size else 0.0
    if worst < -neg_tol:
        raise ValidationError(
            f"Hankel entry {worst} below -neg_tol={-neg_tol}; "
            "the oracle does not yield a probability distribution"
        )
    return np.where(h < 0.0, 0.0, h)


def build_hankel(
    p,
    l_past: int,
    l_future: int,
    neg_tol: float = DEFAULT_NEG_TOL,
    max_entries: int = MAX_HANKEL_ENTRIES,
) -> HankelBlock:
    """Probability block over all pasts of length <= l_past and futures of
    length <= l_future, in length-then-lexicographic order, with its
    singular values.

    Model-backed oracles are filled by one matrix product between the state
    images of the pasts and the linear functionals of the futures; generic
    oracles are filled entrywise.
    """
    if l_past < 0 or l_future < 0:
        raise ValueError("l_past and l_future must be nonnegative")
    ora = as_oracle(p, neg_tol=neg_tol)
    k = len(ora.alphabet)
    n_rows = word_count_up_to(k, l_past)
    n_cols = word_count_up_to(k, l_future)
    if n_rows * n_cols > max_entries:
        raise ResourceLimitError(
            f"Hankel block would have {n_rows * n_cols} entries, guard is {max_entries}"
        )
    pasts = words_up_to(ora.alphabet, l_past)
    futures = words_up_to(ora.alphabet, l_future)
    if isinstance(ora, OomOracle):
        m = ora.model
        states = np.vstack(_state_levels(m, l_past))
        functionals = np.vstack(_functional_levels(m, l_future))
        h = states @ functionals.T
    else:
        h = np.empty((n_rows, n_cols))
        for i, u in enumerate(pasts):
            for j, w in enumerate(futures):
                h[i, j] = ora.probability(u + w)
    h = _clamp_probabilities(h, neg_tol)
    sv = np.linalg.svd(h, compute_uv=False)
    return HankelBlock(pasts=pasts, futures=futures, matrix=h, singular_values=sv)


def numerical_rank(singular_values, tol_rel: float = DEFAULT_RANK_TOL) -> int:
    """Count of singular values above ``tol_rel`` times the largest.

    A zero matrix has rank zero. The threshold is relative to the spectrum's
    own scale, which suits probability matrices whose entries are O(1).
    """
    sv = np.asarray(singular_values, dtype=float).reshape(-1)
    if sv.size == 0:
        return 0
    smax = float(sv[0])
    if smax <= 0.0:
        return 0
    return int(np.count_nonzero(sv > tol_rel * smax))


def process_dimension(
    p,
    l_max: int,
    tol_rel: float = DEFAULT_RANK_TOL,
    neg_tol: float = DEFAULT_NEG_TOL,
    max_entries: int = MAX_HANKEL_ENTRIES,
) -> DimensionReport:
    """Rank ladder of square Hankel blocks at depths 1..l_max.

    The run is declared stabilized when the ranks at the last two depths
    agree (depth 0, whose block is the single entry P(empty) = 1, anchors the
    comparison when l_max is 1); only then is a dimension reported.

    Examples
    --------
    >>> from oomlab.processes import bernoulli
    >>> process_dimension(bernoulli(0.3), 2).dimension
    1
    """
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    ranks_with_zero = {}
    for level in range(l_max + 1):
        block = build_hankel(
            p, level, level, neg_tol=neg_tol, max_entries=max_entries
        )
        ranks_with_zero[level] = numerical_rank(block.singular_values, tol_rel)
    stabilized = ranks_with_zero[l_max] == ranks_with_zero[l_max - 1]
    rank_by_level = {lvl: r for lvl, r in ranks_with_zero.items() if lvl >= 1}
    return DimensionReport(
        rank_by_level=rank_by_level,
        stabilized=stabilized,
        dimension=rank_by_level[l_max] if stabilized else None,
        tol_rel=tol_rel,
    )


def _closure_basis(seeds, operators, tol_rel: float, max_levels: int) -> np.ndarray:
    """Orthonormal basis of the smallest operator-invariant span of the seeds.

    Breadth-first: each level applies every operator to the vectors added at
    the previous level and keeps components orthogonal to the current span.
    Admission threshold is tol_rel times the running max candidate norm
    (floored at one, probabilities being O(1)).
    """
    dim = seeds[0].shape[0]
    basis: list[np.ndarray] = []
    scale = 1.0

    def try_add(vec: np.ndarray) -> bool:
        nonlocal scale
        scale = max(scale, float(np.linalg.norm(vec)))
        r = vec.astype(float, copy=True)
        for _ in range(2):  # two-pass Gram-Schmidt for numerical safety
            for b in basis:
                r -= (b @ r) * b
        nrm = float(np.linalg.norm(r))
        if nrm > tol_rel * scale:
            basis.append(r / nrm)
            return True
        return False

    frontier = [s for s in seeds if try_add(s)]
    level = 0
    while frontier:
        level += 1
        if level > max_levels:
            raise ValidationError("span enumeration failed to stabilize")
        new = []
        for vec in frontier:
            for op in operators:
                cand = op @ vec
                if try_add(cand):
                    new.append(cand)
        frontier = new
    if not basis:
        raise ValidationError("span enumeration produced an empty basis")
    return np.column_stack(basis)


def minimize_oom(m: OomModel, tol_rel: float = DEFAULT_RANK_TOL) -> OomModel:
    """Equivalent model of minimal dimension.

    First restricts to the span of the reachable state images (it is
    invariant under every operator), then quotients by the joint kernel of
    the word functionals. Both reductions preserve every word probability up
    to floating-point error; the result's dimension equals the process
    dimension of the generated process.
    """
    ops = [m.operators[s] for s in m.alphabet]
    q = _closure_basis([m.init], ops, tol_rel, max_levels=m.dim + 1)
    restricted = [q.T @ op @ q for op in ops]
    v1 = q.T @ m.init
    l1 = m.eval @ q
    w = _closure_basis([l1], [op.T for op in restricted], tol_rel, max_levels=q.shape[1] + 1)
    operators = {
        s: w.T @ restricted[i] @ w for i, s in enumerate(m.alphabet)
    }
    return OomModel(
        alphabet=m.alphabet,
        operators=operators,
        init=w.T @ v1,
        eval=l1 @ w,
        name=m.name,
        description=m.description,
    )


def equivalent(m1: OomModel, m2: OomModel, l: int, tol: float = 1e-9) -> bool:
    """Whether two models agree on every word of length at most ``l``.

    For minimal models this finite test is complete once ``l`` reaches the
    sum of the two dimensions (the standard equivalence bound for weighted
    automata); for non-minimal models it remains a sound necessary check.
    """
    if m1.alphabet != m2.alphabet:
        raise ValidationError("alphabet mismatch")
    worst = 0.0
    lv1 = _state_levels(m1, l)
    lv2 = _state_levels(m2, l)
    for a, b in zip(lv1, lv2):
        worst = max(worst, float(np.max(np.abs(a @ m1.eval - b @ m2.eval))))
    return worst <= tol
