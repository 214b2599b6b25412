"""Observable operator models over a finite alphabet.

An observable operator model (OOM) is a family of square real matrices
``T_d``, one per symbol, together with an initial vector ``v`` and an
evaluation covector ``l``. It assigns to a word ``d1 .. dn`` the number
``l @ T_dn @ ... @ T_d1 @ v``; the operator of the FIRST symbol acts first.
When the defining conditions hold (unit mass ``l(v) = 1``, mass preservation
``l o sum_d T_d = l``, nonnegativity of all word values) these numbers are the
cylinder probabilities of a stochastic process on one-sided sequences.

Nonnegativity cannot be certified by any finite check; :func:`validate_oom`
scans all words up to a depth and a pass is therefore necessary, not
sufficient. Values in ``[-neg_tol, 0)`` are treated as numerical noise and
clamped to zero where probabilities are consumed; anything below ``-neg_tol``
signals an invalid model and raises.

Hidden Markov models induce OOMs of the same size (:func:`hmm_to_oom`), and
convex mixtures of processes are realized structurally as direct sums
(:func:`mixture_direct_sum`).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .words import Word, normalize_word, words_up_to

DEFAULT_NEG_TOL = 1e-10
DEFAULT_CONDITION_TOL = 1e-12
_ENUMERATION_GUARD = 4_000_000


@dataclass(eq=False)
class OomModel:
    """Observable operator model ``(alphabet, T_d, v, l)``.

    Parameters
    ----------
    alphabet : sequence of str
        Symbol order; it fixes word enumeration order everywhere.
    operators : mapping symbol -> (dim, dim) array
        One observable operator per symbol.
    init : (dim,) array
        Initial vector ``v``.
    eval : (dim,) array
        Evaluation covector ``l``.

    Models are immutable after construction; evaluation and sampling are pure
    given (model, seed).
    """

    alphabet: tuple
    operators: Mapping
    init: np.ndarray
    eval: np.ndarray
    name: str | None = None
    description: str | None = None

    def __post_init__(self):
        self.alphabet = tuple(str(s) for s in self.alphabet)
        if not self.alphabet:
            raise ValidationError("alphabet is empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("alphabet contains duplicate symbols")
        v = np.array(self.init, dtype=float).reshape(-1)
        l = np.array(self.eval, dtype=float).reshape(-1)
        if v.size == 0:
            raise ValidationError("init vector is empty")
        if l.size != v.size:
            raise ValidationError(
                f"eval has length {l.size}, init has length {v.size}"
            )
        d = v.size
        ops = {}
        for s in self.alphabet:
            if s not in self.operators:
                raise ValidationError(f"missing operator for symbol {s!r}")
            m = np.array(self.operators[s], dtype=float)
            if m.shape != (d, d):
                raise ValidationError(
                    f"operator for {s!r} must be {d}x{d}, got {m.shape}"
                )
            m.setflags(write=False)
            ops[s] = m
        extra = set(self.operators) - set(self.alphabet)
        if extra:
            raise ValidationError(f"operators for symbols outside alphabet: {sorted(extra)}")
        v.setflags(write=False)
        l.setflags(write=False)
        self.operators = ops
        self.init = v
        self.eval = l

    @property
    def dim(self) -> int:
        return self.init.size

    @cached_property
    def operator_stack(self) -> np.ndarray:
        """Operators stacked in alphabet order, shape (n_symbols, dim, dim)."""
        return np.stack([self.operators[s] for s in self.alphabet])

    @cached_property
    def operator_sum(self) -> np.ndarray:
        return self.operator_stack.sum(axis=0)

    def __repr__(self):
        return f"OomModel(alphabet={list(self.alphabet)}, dim={self.dim})"


@dataclass(eq=False)
class HmmModel:
    """Hidden Markov model as symbol-labelled transition matrices.

    ``transition_emission[d][i, j]`` is the joint probability of moving from
    state i to state j while outputting symbol d, so the sum over symbols is
    the row-stochastic transition matrix.
    """

    alphabet: tuple
    transition_emission: Mapping
    init: np.ndarray
    name: str | None = None
    description: str | None = None

    def __post_init__(self):
        self.alphabet = tuple(str(s) for s in self.alphabet)
        if not self.alphabet:
            raise ValidationError("alphabet is empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("alphabet contains duplicate symbols")
        p = np.array(self.init, dtype=float).reshape(-1)
        n = p.size
        if n == 0:
            raise ValidationError("init vector is empty")
        mats = {}
        for s in self.alphabet:
            if s not in self.transition_emission:
                raise ValidationError(f"missing matrix for symbol {s!r}")
            m = np.array(self.transition_emission[s], dtype=float)
            if m.shape != (n, n):
                raise ValidationError(
                    f"matrix for {s!r} must be {n}x{n}, got {m.shape}"
                )
            m.setflags(write=False)
            mats[s] = m
        extra = set(self.transition_emission) - set(self.alphabet)
        if extra:
            raise ValidationError(f"matrices for symbols outside alphabet: {sorted(extra)}")
        p.setflags(write=False)
        self.transition_emission = mats
        self.init = p

    @property
    def n_states(self) -> int:
        return self.init.size

    def __repr__(self):
        return f"HmmModel(alphabet={list(self.alphabet)}, n_states={self.n_states})"


@dataclass
class ValidationReport:
    """Residuals of the three defining conditions plus the verdict."""

    condition1_residual: float
    condition2_residual: float
    most_negative_probability: float
    checked_depth: int
    neg_tol: float
    condition_tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "condition1_residual": self.condition1_residual,
            "condition2_residual": self.condition2_residual,
            "most_negative_probability": self.most_negative_probability,
            "checked_depth": self.checked_depth,
            "neg_tol": self.neg_tol,
            "condition_tol": self.condition_tol,
            "passed": self.passed,
        }


@dataclass
class HmmValidationReport:
    row_sum_residual: float
    init_sum_residual: float
    min_entry: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "row_sum_residual": self.row_sum_residual,
            "init_sum_residual": self.init_sum_residual,
            "min_entry": self.min_entry,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass
class StationarityReport:
    """Max residual of ``|P(w) - sum_d P(dw)|`` over words up to a length."""

    residual: float
    level: int
    tol: float
    stationary: bool

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "level": self.level,
            "tol": self.tol,
            "stationary": self.stationary,
        }


# ---------------------------------------------------------------------------
# Word-probability oracles


class ProcessOracle:
    """Anything that maps words to cylinder probabilities.

    Subclasses provide ``alphabet`` and :meth:`probability`. The empty word
    has probability one and probabilities are Kolmogorov-consistent,
    ``sum_d P(wd) = P(w)``; :func:`kolmogorov_residual` measures the latter.
    """

    alphabet: tuple

    def probability(self, word) -> float:
        raise NotImplementedError


class OomOracle(ProcessOracle):
    """Oracle backed by an :class:`OomModel` (negative noise clamped)."""

    def __init__(self, model: OomModel, neg_tol: float = DEFAULT_NEG_TOL):
        self.model = model
        self.alphabet = model.alphabet
        self.neg_tol = neg_tol

    def probability(self, word) -> float:
        w = normalize_word(word, self.alphabet)
        state = self.model.init
        for s in w:
            state = self.model.operators[s] @ state
        raw = float(self.model.eval @ state)
        if raw < -self.neg_tol:
            raise ValidationError(
                f"word {w!r} has probability {raw}, below -neg_tol={-self.neg_tol}; "
                "the model does not generate a probability distribution"
            )
        return 0.0 if raw < 0.0 else raw


class TableOracle(ProcessOracle):
    """Oracle backed by an explicit word -> probability table."""

    def __init__(self, alphabet: Sequence[str], table: Mapping):
        self.alphabet = tuple(alphabet)
        self.table = {normalize_word(k, self.alphabet): float(v) for k, v in table.items()}

    def probability(self, word) -> float:
        w = normalize_word(word, self.alphabet)
        if w not in self.table:
            raise KeyError(f"word {w!r} not in probability table")
        return self.table[w]


def as_oracle(p, neg_tol: float = DEFAULT_NEG_TOL) -> ProcessOracle:
    """Coerce a model or oracle to a :class:`ProcessOracle`."""
    if isinstance(p, ProcessOracle):
        return p
    if isinstance(p, OomModel):
        return OomOracle(p, neg_tol=neg_tol)
    if isinstance(p, HmmModel):
        return OomOracle(hmm_to_oom(p), neg_tol=neg_tol)
    raise TypeError(f"cannot interpret {type(p).__name__} as a process oracle")


# ---------------------------------------------------------------------------
# Breadth-first evaluation machinery (shared with the dimension module)


def _guard_enumeration(n_symbols: int, depth: int, guard: int = _ENUMERATION_GUARD):
    if n_symbols**depth > guard:
        raise ResourceLimitError(
            f"enumerating {n_symbols}^{depth} words exceeds the guard of {guard}"
        )


def _state_levels(model: OomModel, depth: int) -> list[np.ndarray]:
    """Level k holds the vectors ``T_w v`` for all |w| = k, in lex order."""
    _guard_enumeration(len(model.alphabet), depth)
    ops = model.operator_stack
    levels = [model.init.reshape(1, -1)]
    for _ in range(depth):
        prev = levels[-1]
        # (n, k, d) with word u*d at flat index u*K + k: u major, symbol minor
        nxt = np.einsum("kij,nj->nki", ops, prev)
        levels.append(nxt.reshape(-1, prev.shape[1]))
    return levels


def _functional_levels(model: OomModel, depth: int) -> list[np.ndarray]:
    """Level k holds the covectors ``l T_wk ... T_w1`` for all |w| = k.

    Built by prepending symbols: the functional of ``d w`` is the functional
    of ``w`` composed with ``T_d``, so flat index d*N + n keeps lex order.
    """
    _guard_enumeration(len(model.alphabet), depth)
    ops = model.operator_stack
    levels = [model.eval.reshape(1, -1)]
    for _ in range(depth):
        prev = levels[-1]
        nxt = np.einsum("nj,kji->kni", prev, ops)
        levels.append(nxt.reshape(-1, prev.shape[1]))
    return levels


def _probability_levels(model: OomModel, depth: int) -> list[np.ndarray]:
    return [lvl @ model.eval for lvl in _state_levels(model, depth)]


# ---------------------------------------------------------------------------
# Operations


def validate_oom(
    m: OomModel,
    l_val: int = 8,
    neg_tol: float = DEFAULT_NEG_TOL,
    condition_tol: float = DEFAULT_CONDITION_TOL,
) -> ValidationReport:
    """Check the three defining conditions up to word length ``l_val``.

    Returns the residual ``|l(v) - 1|``, the residual ``max |l sum_d T_d - l|``
    and the most negative word value over all words of length at most
    ``l_val``. The verdict passes iff the first two are within
    ``condition_tol`` and the scan found nothing below ``-neg_tol``. A pass
    certifies nonnegativity only up to the scanned depth.
    """
    c1 = abs(float(m.eval @ m.init) - 1.0)
    c2 = float(np.max(np.abs(m.eval @ m.operator_sum - m.eval)))
    most_negative = min(float(np.min(p)) for p in _probability_levels(m, l_val))
    passed = c1 <= condition_tol and c2 <= condition_tol and most_negative >= -neg_tol
    return ValidationReport(
        condition1_residual=c1,
        condition2_residual=c2,
        most_negative_probability=most_negative,
        checked_depth=l_val,
        neg_tol=neg_tol,
        condition_tol=condition_tol,
        passed=passed,
    )


def validate_hmm(h: HmmModel, tol: float = DEFAULT_CONDITION_TOL) -> HmmValidationReport:
    """Check row-stochasticity of the symbol sum and normalisation of init."""
    total = sum(h.transition_emission[s] for s in h.alphabet)
    row_res = float(np.max(np.abs(total.sum(axis=1) - 1.0)))
    init_res = abs(float(h.init.sum()) - 1.0)
    min_entry = float(
        min(h.init.min(), *(h.transition_emission[s].min() for s in h.alphabet))
    )
    passed = row_res <= tol and init_res <= tol and min_entry >= 0.0
    return HmmValidationReport(
        row_sum_residual=row_res,
        init_sum_residual=init_res,
        min_entry=min_entry,
        tol=tol,
        passed=passed,
    )


def word_probability(p, word, neg_tol: float = DEFAULT_NEG_TOL) -> float:
    """Probability of the cylinder of ``word`` under the process.

    For model-backed oracles this is ``l(T_wn ... T_w1 v)``; the empty word
    gives ``l(v)``, which is one for a valid model. Values below ``-neg_tol``
    raise :class:`ValidationError`; values in ``[-neg_tol, 0)`` are clamped
    to zero.

    Examples
    --------
    >>> from oomlab.processes import bernoulli
    >>> word_probability(bernoulli(0.5), "101")
    0.125
    >>> word_probability(bernoulli(0.5), "")
    1.0
    """
    return as_oracle(p, neg_tol=neg_tol).probability(word)


def kolmogorov_residual(p, depth: int) -> float:
    """Max of ``|sum_d P(wd) - P(w)|`` over all words with ``|w| < depth``."""
    ora = as_oracle(p)
    if isinstance(ora, OomOracle):
        m = ora.model
        extended = m.eval @ m.operator_sum
        worst = 0.0
        for lvl in _state_levels(m, depth - 1):
            worst = max(worst, float(np.max(np.abs(lvl @ extended - lvl @ m.eval))))
        return worst
    worst = 0.0
    for w in words_up_to(ora.alphabet, depth - 1):
        total = sum(ora.probability(w + (d,)) for d in ora.alphabet)
        worst = max(worst, abs(total - ora.probability(w)))
    return worst


def hmm_to_oom(h: HmmModel) -> OomModel:
    """The model induced by an HMM: transposed matrices acting on column
    state distributions, all-ones evaluation covector.

    The induced model generates exactly the HMM's word probabilities and has
    dimension equal to the number of hidden states.
    """
    report = validate_hmm(h)
    if not report.passed:
        raise ValidationError(
            "invalid HMM: row-sum residual "
            f"{report.row_sum_residual:.3e}, init-sum residual "
            f"{report.init_sum_residual:.3e}, min entry {report.min_entry:.3e}"
        )
    ops = {s: h.transition_emission[s].T.copy() for s in h.alphabet}
    return OomModel(
        alphabet=h.alphabet,
        operators=ops,
        init=h.init.copy(),
        eval=np.ones(h.n_states),
        name=h.name,
        description=h.description,
    )


def mixture_direct_sum(parts: Sequence[tuple]) -> OomModel:
    """Convex mixture of models, realized as a block-diagonal direct sum.

    Takes (weight, model) pairs over a shared alphabet with positive weights
    summing to one. The direct sum's word probabilities are the weighted sums
    of the parts' word probabilities, exactly by block structure.
    """
    if not parts:
        raise ValidationError("mixture needs at least one part")
    weights = np.array([float(w) for w, _ in parts])
    models = [m for _, m in parts]
    if np.any(weights <= 0):
        raise ValidationError("mixture weights must be positive")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValidationError(f"mixture weights sum to {weights.sum()!r}, not 1")
    alphabet = models[0].alphabet
    for m in models[1:]:
        if m.alphabet != alphabet:
            raise ValidationError("alphabet mismatch between mixture parts")
    total_dim = sum(m.dim for m in models)
    ops = {s: np.zeros((total_dim, total_dim)) for s in alphabet}
    init = np.zeros(total_dim)
    evalv = np.zeros(total_dim)
    pos = 0
    for w, m in zip(weights, models):
        sl = slice(pos, pos + m.dim)
        for s in alphabet:
            ops[s][sl, sl] = m.operators[s]
        init[sl] = w * m.init
        evalv[sl] = m.eval
        pos += m.dim
    return OomModel(alphabet=alphabet, operators=ops, init=init, eval=evalv)


def stationarity_check(m: OomModel, l: int = 6, tol: float = 1e-10) -> StationarityReport:
    """Test shift invariance of the generated process on observables.

    Reports ``max |P(w) - sum_d P(dw)|`` over all words of length at most
    ``l``. The algebraic condition ``(sum_d T_d) v = v`` is sufficient but not
    necessary; this observable criterion is the one actually tested.
    """
    shifted = m.init - m.operator_sum @ m.init
    residual = 0.0
    for lvl in _functional_levels(m, l):
        residual = max(residual, float(np.max(np.abs(lvl @ shifted))))
    return StationarityReport(residual=residual, level=l, tol=tol, stationary=residual <= tol)


def sample_trajectory(
    m: OomModel, length: int, seed: int, neg_tol: float = DEFAULT_NEG_TOL
) -> Word:
    """Draw a word of the given length from the generated process.

    Sampling walks sequential conditionals ``P(d | w) = P(wd) / P(w)`` with
    the state renormalized each step, so arbitrarily long trajectories stay
    numerically stable. Deterministic given ``seed``.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    rng = np.random.default_rng(seed)
    ops = m.operator_stack
    state = m.init.copy()
    mass = float(m.eval @ state)
    if abs(mass - 1.0) > 1e-6:
        raise ValidationError(f"initial mass is {mass}, expected 1")
    out = []
    for _ in range(length):
        cond = np.einsum("kij,j->ki", ops, state) @ m.eval
        if float(cond.min()) < -neg_tol:
            raise ValidationError(
                f"conditional mass {cond.min()} below -neg_tol while sampling; "
                "the model does not generate a probability distribution"
            )
        cond = np.clip(cond, 0.0, None)
        total = float(cond.sum())
        if total <= 0.0:
            raise ValidationError("no probability mass left while sampling")
        cond /= total
        u = rng.random()
        idx = min(int(np.searchsorted(np.cumsum(cond), u, side="right")), len(cond) - 1)
        sym = m.alphabet[idx]
        out.append(sym)
        state = m.operators[sym] @ state
        state /= float(m.eval @ state)
    return tuple(out)
