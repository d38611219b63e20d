"""
Running queries
===============

Build knowledge tables and disseminate queries, first one at a time with
a full trace, then in batches.
"""

from gossipsearch import overlay, sim
from gossipsearch.analytic import ProtocolParams, analyze
from gossipsearch.degree import from_sequence
from gossipsearch.rng import stream

g = overlay.wire_configuration(overlay.aiello_sequence(6, 1), stream(7, "graph", 0, 0))
g = overlay.place_resources(g, 0.02, stream(7, "placement", 0, 0))

# Holders within k hops of every node, with the next hop toward each.
table = sim.build_knowledge(g, 1)
node = next(n for n in range(g.node_count) if table.entries(n))
print("table of node", node, table.entries(node))

# One traced query: every delivery, including duplicates, is recorded.
params = ProtocolParams(0.02, 0.05, 1)
out = sim.disseminate(g, table, params, originator=node, rng_stream=1, trace=True)
print(out.hits, "hits,", out.reached, "reached,", out.messages, "messages")
for d in out.trace[:8]:
    print("  ", d.format())

# Batches: originators uniform, one child stream per query.
stats = sim.run_queries(g, table, params, 500, stream(7, "queries", 0, 0))
print("mean hits", stats.mean_hits, "mean reached", stats.mean_reached,
      "percolating", stats.percolation_fraction)

# The model's view of the same setting.
print(analyze(from_sequence(g.degrees()), params))
