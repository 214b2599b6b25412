"""Causal states at a finite horizon: predictive distributions, statistical
complexity, and the dimension bound."""

import numpy as np

import oomlab as ol

chain = ol.hmm_to_oom(ol.markov_chain([[0.9, 0.1], [0.2, 0.8]], init=[2 / 3, 1 / 3]))

# Each past induces a distribution over futures; pasts predicting alike are
# one causal state.
for past in ["0", "1"]:
    pd = ol.predictive_distribution(chain, past, 1)
    print(f"after '{past}': next-symbol dist {pd.dist}, weight {pd.weight:.4f}")

partition = ol.enumerate_causal_states(chain, past_length=1, horizon=3)
print("\ncausal states:", partition.n_states, "weights:", partition.weights)
print("statistical complexity:", ol.statistical_complexity(partition), "bits")
print("expected closed form:   ", np.log2(3) - 2 / 3, "bits")
print("topological complexity:", ol.topological_complexity(partition), "bits")

# The span of the predictive rows recovers the process dimension: here both
# are two, so the bound log2(dim) <= log2(#states) is tight.
print("span rank:", ol.causal_span_rank(partition))
print("dimension:", ol.process_dimension(chain, 3).dimension)

# A mixture shows the bound with slack: at past length 3 the pasts split by
# their count statistics into four states, but the rows span only two
# dimensions.
mix = ol.mixture_direct_sum([(0.5, ol.bernoulli(0.2)), (0.5, ol.bernoulli(0.7))])
part = ol.enumerate_causal_states(mix, past_length=3, horizon=2)
print("\nmixture causal states at past length 3:", part.n_states)
for state in part.states:
    ones = sum(1 for s in state.representative_past if s == "1")
    print(f"  representative past {''.join(state.representative_past)} "
          f"({ones} ones), weight {state.weight:.4f}, members {len(state.member_pasts)}")
print("span rank:", ol.causal_span_rank(part), "vs dimension",
      ol.process_dimension(mix, 3).dimension)

# Periodic processes: each phase is a causal state of its own.
period3 = ol.hmm_to_oom(ol.periodic(["0", "1", "2"]))
p3 = ol.enumerate_causal_states(period3, past_length=1, horizon=3)
print("\nperiod-3 states:", p3.n_states,
      "statistical complexity:", ol.statistical_complexity(p3), "bits")
print("dimension:", ol.process_dimension(period3, 4).dimension)
