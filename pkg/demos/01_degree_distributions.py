"""
Degree distributions and generating functions
==============================================

Build the distributions used throughout the package and look at the
quantities the model needs from them.
"""

import numpy as np

from gossipsearch import degree

# A truncated power law: P(d) proportional to d**alpha on [min_degree, cutoff]
pl = degree.from_power_law(-2.5, 1, 100)
print("power law mean", degree.mean(pl), "second moment", degree.second_moment(pl))

# The Aiello construction puts floor(e**a / x**b) nodes at degree x.
dist, n, seq = degree.from_aiello(6, 1)
print("Aiello(6,1):", n, "nodes, max degree", seq.max(), "stubs", seq.sum())

# The excess distribution describes what lies behind a random edge.
q = degree.excess_distribution(dist)
m, m2 = degree.mean(dist), degree.second_moment(dist)
print("excess mean", degree.mean(q), "=", (m2 - m) / m)

# Generating functions are evaluated on [0, 1].
for x in (0.0, 0.5, 1.0):
    print(f"G({x}) = {degree.pgf_eval(dist, x):.6f}   G_excess({x}) = {degree.excess_pgf_eval(dist, x):.6f}")

# Distributions can also come from observed degree sequences.
empirical = degree.from_sequence(np.array([1, 1, 2, 3, 3, 3]))
print(list(empirical.entries))
