"""Tour of the classical models: word probabilities, validation, HMM import,
mixtures, stationarity and sampling."""


import oomlab as ol

# A coin is the smallest model: one-dimensional, one operator per symbol.
coin = ol.bernoulli(0.5)
print("P(101) for a fair coin:", ol.word_probability(coin, "101"))
print("P(empty word):", ol.word_probability(coin, ""))

report = ol.validate_oom(coin)
print("validation:", report.to_dict())

# A Markov chain observed through its state labels. Emission happens before
# the move, so the first symbol is the starting state's label.
chain = ol.markov_chain([[0.9, 0.1], [0.2, 0.8]], init=[2 / 3, 1 / 3])
model = ol.hmm_to_oom(chain)
print("\nchain P(00):", ol.word_probability(model, "00"))
print("chain P(01):", ol.word_probability(model, "01"))
print("stationary?", ol.stationarity_check(model).to_dict())

# Operator order matters: the first symbol's operator acts first. A
# deterministic 2-cycle started in a fixed phase makes that visible.
cycle = ol.hmm_to_oom(ol.markov_chain([[0, 1], [1, 0]], labels=["A", "B"], init=[1, 0]))
print("\n2-cycle P(ABAB):", ol.word_probability(cycle, ("A", "B", "A", "B")))
print("2-cycle P(AA):  ", ol.word_probability(cycle, ("A", "A")))
print("fixed-phase start is stationary?", ol.stationarity_check(cycle).stationary)

# Mixtures are direct sums: block-diagonal operators, weighted initial vector.
mix = ol.mixture_direct_sum([(0.5, ol.bernoulli(0.2)), (0.5, ol.bernoulli(0.7))])
print("\nmixture P(1) = 0.5*0.2 + 0.5*0.7 =", ol.word_probability(mix, "1"))

# Sampling walks the sequential conditionals, renormalizing the state.
path = ol.sample_trajectory(model, 30, seed=0)
print("\n30 sampled symbols:", "".join(path))
freq = sum(1 for s in ol.sample_trajectory(coin, 100_000, seed=1) if s == "1") / 1e5
print("fair-coin frequency over 1e5 draws:", freq)

# Kolmogorov consistency holds for every valid model: extending a word by one
# symbol and summing returns the original probability.
print("\nconsistency residual (depth 8):", ol.kolmogorov_residual(model, 8))
