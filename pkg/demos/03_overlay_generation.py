"""
Wiring overlays
===============

Turn a degree sequence into a simple graph with the configuration model,
place resources, and inspect the result.
"""

import numpy as np

from gossipsearch import overlay
from gossipsearch.rng import stream

seq = overlay.aiello_sequence(6, 1)
g = overlay.wire_configuration(seq, stream(0, "graph", 0, 0))
print(g.node_count, "nodes,", g.edge_count, "edges")
print("unmatched stubs:", overlay.residual_stubs(seq, g))

n_comp, labels = overlay.component_labels(g)
print("components:", n_comp, "largest:", overlay.largest_component(g).size)

# Each node holds the resource independently with probability rho.
g = overlay.place_resources(g, 0.05, stream(0, "placement", 0, 0))
print("holders:", g.holder_count)

# A cheap diameter upper bound from a few BFS runs.
print("diameter bound:", overlay.diameter_bound(g))

# Sampled sequences for parametric laws.
from gossipsearch.degree import from_power_law

seq2 = overlay.sample_sequence(from_power_law(-2.5, 2, 50), 1000, np.random.default_rng(1))
g2 = overlay.wire_configuration(seq2, 1)
print("sampled overlay:", g2.node_count, g2.edge_count, np.bincount(g2.degrees())[:6])
