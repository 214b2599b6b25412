"""Process dimension: Hankel blocks, rank ladders, and model minimization."""

import numpy as np

import oomlab as ol

# The Hankel block of a process tabulates P(past + future). Its rank, once
# stable under growing depth, is the process dimension: the smallest state
# space any linear model of the process can have.
coin = ol.bernoulli(0.5)
block = ol.build_hankel(coin, 1, 1)
print("fair-coin block (pasts x futures up to length 1):")
print(block.matrix)
print("singular values:", block.singular_values)

# An i.i.d. process is rank one at every depth.
print("\ncoin dimension:", ol.process_dimension(coin, 3).to_dict())

# Mixing k distinct coins yields dimension exactly k.
for k, params in [(2, [0.2, 0.7]), (3, [0.2, 0.5, 0.9]), (4, [0.2, 0.5, 0.7, 0.9])]:
    mix = ol.mixture_direct_sum([(1.0 / k, ol.bernoulli(p)) for p in params])
    rep = ol.process_dimension(mix, k + 1)
    print(f"{k}-coin mixture: rank ladder {rep.rank_by_level} -> dimension {rep.dimension}")

# A run that has not stabilized refuses to commit to a number.
mix2 = ol.mixture_direct_sum([(0.5, ol.bernoulli(0.2)), (0.5, ol.bernoulli(0.7))])
print("\ntoo-shallow ladder:", ol.process_dimension(mix2, 1).to_dict())

# Minimization strips redundant coordinates. Pad a coin with junk the
# evaluation covector cannot see, then reduce it back.
rng = np.random.default_rng(0)
ops = {}
for s in coin.alphabet:
    m = np.zeros((4, 4))
    m[:1, :1] = coin.operators[s]
    m[1:, 1:] = rng.normal(size=(3, 3)) / 6.0
    ops[s] = m
padded = ol.OomModel(
    alphabet=coin.alphabet,
    operators=ops,
    init=np.concatenate([coin.init, rng.normal(size=3)]),
    eval=np.concatenate([coin.eval, np.zeros(3)]),
)
print("\npadded model valid?", ol.validate_oom(padded).passed, "dim:", padded.dim)
reduced = ol.minimize_oom(padded)
print("minimized dim:", reduced.dim)
print("same process?", ol.equivalent(padded, reduced, padded.dim + reduced.dim))

# Two identical mixture components collapse: distinctness is what adds ranks.
dup = ol.mixture_direct_sum([(0.5, ol.bernoulli(0.5)), (0.5, ol.bernoulli(0.5))])
print("\nduplicate mixture dim:", ol.process_dimension(dup, 2).dimension)
print("minimized duplicate dim:", ol.minimize_oom(dup).dim)
