"""
Expected reach, hits and thresholds
===================================

Evaluate the branching-process model for a few protocol settings.
"""

from gossipsearch import analytic, degree

ring = degree.DegreeDistribution.regular(2)
cubic = degree.DegreeDistribution.regular(3)

# On a ring, a gossip probability of 0.5 reaches three nodes on average.
print(analytic.expected_reach(ring, analytic.ProtocolParams(0.0, 0.5, 0)))

# Transmit probability grows with knowledge depth k when resources exist.
for k in range(4):
    print("k =", k, "tau =", analytic.transmit_probability(cubic, 0.1, 0.2, k))

# Above the critical transmit probability the mean reach is unbounded.
tau_c = analytic.critical_tau(cubic)
print("critical tau", tau_c)
res = analytic.analyze(cubic, analytic.ProtocolParams(0.0, 0.6, 0))
print(res)

# The full distribution of reach sizes, with the unresolved tail reported.
r = analytic.reach_distribution(cubic, analytic.ProtocolParams(0.0, 0.3, 0), 50)
print("P(reach = 1..5)", r.probs[:5].round(4), "tail", r.tail)
print("P(finite reach) at tau=0.8:", analytic.finite_reach_probability(cubic, analytic.ProtocolParams(0.0, 0.8, 0)))

# Smallest gossip probability for percolation, and for one expected hit.
aiello = degree.from_aiello(6, 1)[0]
for rho in (0.001, 0.01, 0.1):
    print(rho, analytic.min_gamma_percolation(aiello, rho, 1), analytic.min_gamma_one_hit(aiello, rho, 1))
