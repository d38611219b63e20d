"""
Sweeps, threshold curves and graph files
========================================

The harness functions behind the command line tool.
"""

import os
import tempfile

from gossipsearch.harness import (
    ScenarioConfig,
    SweepSpec,
    TopologySpec,
    cmd_analytic,
    cmd_gen_graph,
    cmd_sweep,
    cmd_threshold,
    format_threshold,
    grid,
)

out = tempfile.mkdtemp()
topo = TopologySpec("aiello", a=6, b=1)

# A single analytic evaluation.
row = cmd_analytic(ScenarioConfig(topo, k=1, gamma=0.1, rho=0.05))
print(row.to_csv(row.ANALYTIC_COLUMNS))

# A small simulated sweep; rerunning it resumes instead of recomputing.
base = ScenarioConfig(topo, k=1, replicates=2, queries_per_replicate=50, master_seed=1)
sweep = SweepSpec.from_ranges(base, (0.05, 0.15, 0.05), (0.05, 0.10, 0.05))
path = os.path.join(out, "sweep.csv")
cmd_sweep(sweep, path)
print(open(path).read())
print("resumed rows:", len(cmd_sweep(sweep, path)))

# Minimum gossip probability curves for truncated power laws.
for cutoff in (10, 100, 403):
    curve = cmd_threshold(TopologySpec("power_law", alpha=-2.8, min_degree=1, cutoff=cutoff), 1,
                          grid(0.1, 0.5, 0.2), "percolation")
    print("cutoff", cutoff)
    print(format_threshold(curve))

# Write one overlay and its holders to disk.
summary = cmd_gen_graph(topo, 3, os.path.join(out, "g.txt"), rho=0.01,
                        holders_path=os.path.join(out, "g.holders"))
summary.pop("degree_histogram")
print(summary)
