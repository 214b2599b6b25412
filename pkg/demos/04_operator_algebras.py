"""Models with operator-algebra output: block algebras, product states, the
classical embedding, and translation invariance."""

import numpy as np

import oomlab as ol

# The output side is a direct sum of full matrix blocks. [1,1] is the
# commutative algebra of a binary alphabet; [2] is the full 2x2 algebra.
alg = ol.construct_algebra([2])
print("algebra blocks:", alg.block_dims, "linear dimension:", alg.total_dim)
print("basis elements (matrix units):", len(ol.basis_elements(alg)))

# A product state over one qubit with density diag(0.8, 0.2): the model is
# one-dimensional and every factor contributes tr(rho a).
ops = np.array([[[0.8]], [[0.0]], [[0.0]], [[0.2]]], dtype=complex)
q = ol.NcOomModel(algebra=alg, op_per_basis=ops, init=[1.0], eval=[1.0])
print("\nvalidation:", ol.validate_ncoom(q).to_dict())

z = ol.AlgebraElement(alg, [np.diag([1.0, -1.0])])
print("value on Z:      ", ol.nc_evaluate(q, [z]).real, " (tr(rho Z) = 0.6)")
print("value on Z (x) Z:", ol.nc_evaluate(q, [z, z]).real, " (factorizes: 0.36)")
print("positivity of Z:", ol.is_positive(z), " of Z*Z:", ol.is_positive(z.adjoint() * z))
print("product-state dimension:", ol.nc_process_dimension(q, 3).dimension)

# Classical models embed over the commutative algebra; indicator tuples
# reproduce word probabilities and the dimension is unchanged.
coin = ol.bernoulli(0.5)
embedded = ol.embed_classical(coin)
factors = ol.indicator_factors(embedded, coin.alphabet, ("1", "0", "1"))
print("\nembedded value on indicators of 101:", ol.nc_evaluate(embedded, factors).real)
print("classical P(101):                    ", ol.word_probability(coin, "101"))

mix = ol.mixture_direct_sum([(0.5, ol.bernoulli(0.2)), (0.5, ol.bernoulli(0.7))])
print("mixture dims (classical, embedded):",
      ol.process_dimension(mix, 3).dimension,
      ol.nc_process_dimension(ol.embed_classical(mix), 3).dimension)

# Mixtures of distinct product states add their dimensions.
q1 = ol.NcOomModel(algebra=alg, op_per_basis=np.array(
    [[[0.9]], [[0.0]], [[0.0]], [[0.1]]], dtype=complex), init=[1.0], eval=[1.0])
q2 = ol.NcOomModel(algebra=alg, op_per_basis=np.array(
    [[[0.3]], [[0.0]], [[0.0]], [[0.7]]], dtype=complex), init=[1.0], eval=[1.0])
nc_mix = ol.nc_mixture_direct_sum([(0.5, q1), (0.5, q2)])
print("\nmixture of product states, value on Z:", ol.nc_evaluate(nc_mix, [z]).real)
print("its dimension:", ol.nc_process_dimension(nc_mix, 3).dimension)

# Translation invariance depends on the composition convention. With the
# first factor applied first, a phase-locked cycle is visibly not invariant;
# under the reverse convention invariance is automatic.
cycle = ol.hmm_to_oom(ol.markov_chain([[0, 1], [1, 0]], labels=["A", "B"], init=[1, 0]))
e = ol.embed_classical(cycle)
print("\nphase-locked cycle, our order:    ",
      ol.nc_stationarity_check(e).to_dict())
print("phase-locked cycle, reverse order:",
      ol.nc_stationarity_check(e, reverse_order=True).to_dict())
