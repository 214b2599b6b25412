from fractions import Fraction

import numpy as np
import pytest

import oomlab as ol
from oomlab import ResourceLimitError, ValidationError

from curated import curated_suite, markov2, mixture_2bern
from oracles import (
    RationalBernoulli,
    RationalMixture,
    rational_hankel,
    rational_rank,
)


# ---------------------------------------------------------------------------
# tau images


def test_empty_word_gives_initial_vector():
    m = ol.bernoulli(0.3)
    assert np.array_equal(ol.apply_tau(m, ""), m.init)


def test_single_symbol_image():
    assert ol.apply_tau(ol.bernoulli(0.3), "1") == pytest.approx([0.3])


def test_eval_of_tau_image_is_word_probability():
    m = ol.hmm_to_oom(ol.random_hmm(4, ("0", "1", "2"), rng=2))
    rng = np.random.default_rng(8)
    for _ in range(200):
        n = int(rng.integers(0, 6))
        w = tuple(rng.choice(list(m.alphabet), size=n))
        lhs = float(m.eval @ ol.apply_tau(m, w))
        assert lhs == pytest.approx(ol.word_probability(m, w), abs=1e-12)


# ---------------------------------------------------------------------------
# Hankel blocks


def test_bernoulli_level_one_block():
    block = ol.build_hankel(ol.bernoulli(0.5), 1, 1)
    expected = np.array([[1, 0.5, 0.5], [0.5, 0.25, 0.25], [0.5, 0.25, 0.25]])
    assert np.allclose(block.matrix, expected, atol=1e-15)
    assert block.pasts[0] == () and block.pasts[1] == ("0",)


def test_first_row_is_future_marginals():
    m = ol.hmm_to_oom(markov2())
    block = ol.build_hankel(m, 2, 2)
    for j, w in enumerate(block.futures):
        assert block.matrix[0, j] == pytest.approx(ol.word_probability(m, w), abs=1e-14)


def test_mixture_entries_match_closed_form():
    mix = mixture_2bern(0.2, 0.7)
    block = ol.build_hankel(mix, 2, 2)
    for i, u in enumerate(block.pasts):
        for j, w in enumerate(block.futures):
            ones = sum(1 for s in u + w if s == "1")
            zeros = len(u + w) - ones
            expected = 0.5 * (0.2**ones * 0.8**zeros) + 0.5 * (0.7**ones * 0.3**zeros)
            assert block.matrix[i, j] == pytest.approx(expected, abs=1e-14)


def test_generic_oracle_path_matches_model_path():
    m = ol.hmm_to_oom(markov2())
    table = {w: ol.word_probability(m, w) for w in ol.words_up_to(m.alphabet, 4)}
    generic = ol.build_hankel(ol.TableOracle(m.alphabet, table), 2, 2)
    fast = ol.build_hankel(m, 2, 2)
    assert np.allclose(generic.matrix, fast.matrix, atol=1e-15)


def test_rectangular_blocks_for_diagnostics():
    m = ol.hmm_to_oom(markov2())
    block = ol.build_hankel(m, 3, 1)
    assert block.shape == (15, 3)
    assert block.matrix[0, 0] == pytest.approx(1.0)


def test_hankel_entry_guard():
    with pytest.raises(ResourceLimitError):
        ol.build_hankel(ol.bernoulli(0.5), 10, 10)


# ---------------------------------------------------------------------------
# numerical rank


def test_rank_ignores_tiny_tail():
    assert ol.numerical_rank([1.0, 1e-16], tol_rel=1e-9) == 1


def test_rank_of_zero_spectrum():
    assert ol.numerical_rank([0.0]) == 0


def test_rank_two_mixture_with_exact_oracle():
    mix = mixture_2bern(0.2, 0.7)
    block = ol.build_hankel(mix, 3, 3)
    assert ol.numerical_rank(block.singular_values) == 2
    assert block.singular_values[2] < 1e-12 * block.singular_values[0]
    exact = RationalMixture(
        [
            (Fraction(1, 2), RationalBernoulli(Fraction(2, 10))),
            (Fraction(1, 2), RationalBernoulli(Fraction(7, 10))),
        ]
    )
    assert rational_rank(rational_hankel(exact, 3, 3)) == 2


def test_rank_is_scale_free():
    sv = np.array([3.0, 2.0, 1e-12])
    assert ol.numerical_rank(sv) == ol.numerical_rank(10.0 * sv)


# ---------------------------------------------------------------------------
# process dimension


def test_iid_dimension_stabilizes_at_level_one():
    rep = ol.process_dimension(ol.bernoulli(0.3), 1)
    assert rep.stabilized and rep.dimension == 1
    assert rep.rank_by_level == {1: 1}


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_k_fold_bernoulli_mixture_has_dimension_k(k):
    params = [Fraction(1, 10), Fraction(3, 10), Fraction(5, 10), Fraction(7, 10), Fraction(9, 10)][:k]
    mix = ol.mixture_direct_sum([(1.0 / k, ol.bernoulli(float(p))) for p in params])
    rep = ol.process_dimension(mix, k + 1)
    assert rep.stabilized and rep.dimension == k
    exact = RationalMixture([(Fraction(1, k), RationalBernoulli(p)) for p in params])
    assert rational_rank(rational_hankel(exact, k + 1, k + 1)) == k


def test_period_two_has_dimension_two():
    rep = ol.process_dimension(ol.hmm_to_oom(ol.periodic(["0", "1"])), 3)
    assert rep.stabilized and rep.dimension == 2


def test_rank_ladder_monotone_on_curated_suite():
    for entry in curated_suite():
        rep = ol.process_dimension(entry.model, entry.l_max)
        ranks = [rep.rank_by_level[level] for level in sorted(rep.rank_by_level)]
        assert ranks == sorted(ranks), entry.name
        assert rep.stabilized and rep.dimension == entry.dim, entry.name


def test_dimension_never_exceeds_model_dimension():
    # canonical minimality: fifty random HMM-induced models
    for seed in range(50):
        n = 2 + seed % 3
        m = ol.hmm_to_oom(ol.random_hmm(n, ("0", "1"), rng=seed))
        rep = ol.process_dimension(m, 4)
        assert max(rep.rank_by_level.values()) <= n


def test_hankel_rank_bounded_by_model_dimension_each_level():
    for entry in curated_suite():
        for level in range(1, entry.l_max + 1):
            block = ol.build_hankel(entry.model, level, level)
            assert ol.numerical_rank(block.singular_values) <= entry.model.dim


def test_unstabilized_run_reports_no_dimension():
    mix = mixture_2bern(0.2, 0.7)
    rep = ol.process_dimension(mix, 1)  # rank jumps 1 -> 2 at the first level
    assert not rep.stabilized and rep.dimension is None
    assert rep.to_dict()["dimension"] == "not stabilized"


# ---------------------------------------------------------------------------
# minimization


def _junk_padded_bernoulli(p: float, junk_dim: int, seed: int) -> ol.OomModel:
    """Valid model with unobservable junk coordinates added to a coin."""
    rng = np.random.default_rng(seed)
    base = ol.bernoulli(p)
    d = 1 + junk_dim
    ops = {}
    for s in base.alphabet:
        m = np.zeros((d, d))
        m[:1, :1] = base.operators[s]
        m[1:, 1:] = rng.normal(size=(junk_dim, junk_dim)) / (2.0 * junk_dim)
        ops[s] = m
    init = np.zeros(d)
    init[0] = 1.0
    init[1:] = rng.normal(size=junk_dim)  # reachable junk, killed by eval = 0 there
    evalv = np.zeros(d)
    evalv[0] = 1.0
    return ol.OomModel(alphabet=base.alphabet, operators=ops, init=init, eval=evalv)


def test_padded_bernoulli_minimizes_to_dimension_one():
    padded = _junk_padded_bernoulli(0.5, 2, seed=3)
    assert ol.validate_oom(padded).passed
    mini = ol.minimize_oom(padded)
    assert mini.dim == 1
    assert ol.equivalent(padded, mini, padded.dim + mini.dim)


def test_duplicate_mixture_collapses():
    dup = ol.mixture_direct_sum([(0.5, ol.bernoulli(0.5)), (0.5, ol.bernoulli(0.5))])
    mini = ol.minimize_oom(dup)
    assert mini.dim == 1
    block = ol.build_hankel(dup, 2, 2)
    assert ol.numerical_rank(block.singular_values) == 1


def test_minimization_is_idempotent_and_preserves_probabilities():
    m = ol.hmm_to_oom(markov2())
    once = ol.minimize_oom(m)
    twice = ol.minimize_oom(once)
    assert once.dim == twice.dim == 2
    for w in ol.words_up_to(m.alphabet, 2 * (m.dim + 1)):
        assert ol.word_probability(once, w) == pytest.approx(
            ol.word_probability(m, w), abs=1e-12
        )


def test_minimized_model_still_validates():
    padded = _junk_padded_bernoulli(0.3, 3, seed=5)
    mini = ol.minimize_oom(padded)
    assert ol.validate_oom(mini).passed


# ---------------------------------------------------------------------------
# equivalence


def test_model_equivalent_to_itself():
    m = ol.hmm_to_oom(markov2())
    assert ol.equivalent(m, m, 4)


def test_model_equivalent_to_its_minimization():
    m = _junk_padded_bernoulli(0.7, 2, seed=11)
    mini = ol.minimize_oom(m)
    assert ol.equivalent(m, mini, m.dim + mini.dim)


def test_different_coins_not_equivalent():
    assert not ol.equivalent(ol.bernoulli(0.2), ol.bernoulli(0.3), 1, tol=1e-3)


def test_equivalence_needs_shared_alphabet():
    with pytest.raises(ValidationError, match="alphabet"):
        ol.equivalent(ol.bernoulli(0.2), ol.bernoulli(0.2, symbols=("a", "b")), 2)
