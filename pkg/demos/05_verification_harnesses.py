"""The three verification harnesses: additivity over distinct components,
lower semi-continuity along convergent families, and the causal-state bound."""

import oomlab as ol

# 1. Dimension is additive across distinct mixture components.
parts = [(0.25, ol.bernoulli(p)) for p in (0.2, 0.5, 0.7, 0.9)]
report = ol.run_additivity(parts, l_max=5)
print("additivity over four coins:", report.verdict)
for point in report.points:
    print(" ", point["point"], "->", point["dimension_report"]["dimension"])

# Identical components are refused: the sum formula needs distinctness.
try:
    ol.run_additivity([(0.5, ol.bernoulli(0.5)), (0.5, ol.bernoulli(0.5))], 3)
except ol.PreconditionError as e:
    print("identical parts refused:", e)

# 2. Dimension can only drop in a limit, never jump up. Three families:
families = [
    ol.mixture_weight_family(ol.bernoulli(0.5), ol.bernoulli(0.9), [0.4, 0.2, 0.1, 0.05]),
    ol.coalescing_bernoulli_family(0.5, [0.2, 0.1, 0.05]),
    ol.markov_merge_family([0.3, 0.2, 0.1]),
]
print()
for family in families:
    rep = ol.run_semicontinuity(family, l_max=3)
    dims = [p["dimension_report"]["dimension"] for p in rep.points]
    print(f"{family.description}: grid dims {dims[:-1]}, limit dim {dims[-1]} -> {rep.verdict}")

# 3. The number of causal states upper-bounds the dimension (log2 on both
# sides); the predictive-row span recovers the dimension exactly.
print()
chain = ol.hmm_to_oom(ol.markov_chain([[0.9, 0.1], [0.2, 0.8]], init=[2 / 3, 1 / 3]))
rep = ol.run_upperbound(chain, l_p=1, horizon=3, l_max=3)
point = rep.points[0]
print("two-state chain:", rep.verdict,
      "| dim", point["dimension_report"]["dimension"],
      "| #states", point["n_causal_states"],
      "| span rank", point["causal_span_rank"])

mix = ol.mixture_direct_sum([(0.5, ol.bernoulli(0.2)), (0.5, ol.bernoulli(0.7))])
rep = ol.run_upperbound(mix, l_p=3, horizon=2, l_max=3)
point = rep.points[0]
print("two-coin mixture:", rep.verdict,
      "| dim", point["dimension_report"]["dimension"],
      "| #states", point["n_causal_states"],
      "| span rank", point["causal_span_rank"])

# Growing finite sections of an uncountable mixture: the dimension grows
# without bound, one unit per distinct component.
print()
params = [0.1, 0.3, 0.5, 0.7, 0.9]
for k in range(1, 6):
    model = (
        ol.bernoulli(params[0])
        if k == 1
        else ol.mixture_direct_sum([(1.0 / k, ol.bernoulli(p)) for p in params[:k]])
    )
    print(f"k = {k} distinct coins -> dimension {ol.process_dimension(model, k + 1).dimension}")
