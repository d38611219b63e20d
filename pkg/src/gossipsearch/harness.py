"""
Experiment harness: scenario configuration, seeded replicate simulation,
analytic/simulation comparison rows and sweep tables.

Every random stream is derived from ``master_seed`` with
:func:`gossipsearch.rng.stream`, labelled ``graph``, ``placement`` or
``queries`` and indexed by ``(scenario, replicate)``, so a table is a pure
function of its configuration.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analytic import (
    ProtocolParams,
    analyze,
    min_gamma_one_hit,
    min_gamma_percolation,
)
from .degree import DegreeDistribution, from_aiello, from_power_law, from_sequence
from .fileio import read_distribution, read_graph, write_graph, write_holders
from .overlay import (
    OverlayGraph,
    aiello_sequence,
    component_labels,
    place_resources,
    residual_stubs,
    sample_sequence,
    wire_configuration,
)
from .rng import stream
from .sim import QueryStats, build_knowledge, default_ttl, run_queries

INF_TOKEN = "INF"
NONE_TOKEN = "none"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TopologySpec:
    """Where overlays come from.

    ``kind`` is one of ``aiello`` (``a``, ``b``), ``power_law`` (``alpha``,
    ``min_degree``, ``cutoff``, ``nodes``), ``distribution_file`` (``path``,
    ``nodes``) or ``graph_file`` (``path``).

    ``analytic_input`` selects the distribution fed to the model: ``ideal``
    uses the parametric law, ``empirical`` the pooled degree histogram of the
    generated replicate graphs. Graph files always use their histogram.
    """

    kind: str
    a: float | None = None
    b: float | None = None
    alpha: float | None = None
    min_degree: int | None = None
    cutoff: int | None = None
    nodes: int | None = None
    path: str | None = None
    analytic_input: str = "ideal"

    def validate(self):
        need = {
            "aiello": ("a", "b"),
            "power_law": ("alpha", "min_degree", "cutoff"),
            "distribution_file": ("path",),
            "graph_file": ("path",),
        }
        if self.kind not in need:
            raise ConfigError(f"topology.kind: unknown kind {self.kind!r}")
        for name in need[self.kind]:
            if getattr(self, name) is None:
                raise ConfigError(f"topology.{name}: required for {self.kind} topologies")
        if self.analytic_input not in ("ideal", "empirical"):
            raise ConfigError(f"topology.analytic_input: must be 'ideal' or 'empirical', got {self.analytic_input!r}")
        if self.kind == "aiello":
            if not self.a >= 0:
                raise ConfigError(f"topology.a: must be >= 0, got {self.a}")
            if not self.b > 0:
                raise ConfigError(f"topology.b: must be > 0, got {self.b}")
        if self.kind == "power_law":
            if self.cutoff < 1:
                raise ConfigError(f"topology.cutoff: must be positive, got {self.cutoff}")
            if not 1 <= self.min_degree <= self.cutoff:
                raise ConfigError(f"topology.min_degree: must lie in [1, cutoff], got {self.min_degree}")
        if self.nodes is not None and self.nodes < 1:
            raise ConfigError(f"topology.nodes: must be positive, got {self.nodes}")

    @property
    def label(self) -> str:
        if self.kind == "aiello":
            return f"aiello({self.a:g},{self.b:g})"
        if self.kind == "power_law":
            return f"power_law({self.alpha:g},{self.min_degree},{self.cutoff})"
        return f"{self.kind}({os.path.basename(self.path)})"

    def ideal_distribution(self) -> DegreeDistribution:
        if self.kind == "aiello":
            return from_aiello(self.a, self.b)[0]
        if self.kind == "power_law":
            return from_power_law(self.alpha, self.min_degree, self.cutoff)
        if self.kind == "distribution_file":
            return read_distribution(self.path)
        return from_sequence(read_graph(self.path).degrees())

    def node_count(self) -> int:
        if self.kind == "aiello":
            return int(aiello_sequence(self.a, self.b).size)
        if self.kind == "graph_file":
            return read_graph(self.path).node_count
        if self.nodes is None:
            raise ConfigError(f"topology.nodes: required to build {self.kind} graphs")
        return int(self.nodes)

    def degree_sequence(self, rng) -> np.ndarray:
        if self.kind == "aiello":
            return aiello_sequence(self.a, self.b)
        return sample_sequence(self.ideal_distribution(), self.node_count(), rng)

    def build_graph(self, rng) -> tuple[OverlayGraph, np.ndarray]:
        """Return a fresh overlay and the degree sequence it was wired from."""
        if self.kind == "graph_file":
            g = read_graph(self.path)
            return g, g.degrees()
        seq = self.degree_sequence(rng)
        return wire_configuration(seq, rng), seq

    @classmethod
    def parse(cls, text: str, **extra) -> "TopologySpec":
        """Parse ``aiello:a,b``, ``power-law:alpha,min,cutoff``, ``dist:path`` or ``graph:path``."""
        kind, _, args = text.partition(":")
        kind = kind.strip().lower().replace("-", "_")
        try:
            if kind == "aiello":
                a, b = (float(x) for x in args.split(","))
                return cls("aiello", a=a, b=b, **extra)
            if kind == "power_law":
                alpha, lo, hi = args.split(",")
                return cls("power_law", alpha=float(alpha), min_degree=int(lo), cutoff=int(hi), **extra)
        except ValueError:
            raise ConfigError(f"topology: cannot parse {text!r}") from None
        if kind in ("dist", "distribution_file"):
            return cls("distribution_file", path=args, **extra)
        if kind in ("graph", "graph_file"):
            return cls("graph_file", path=args, **extra)
        raise ConfigError(f"topology: cannot parse {text!r}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if getattr(self, f.name) is not None}


@dataclass(frozen=True)
class ScenarioConfig:
    topology: TopologySpec
    k: int = 1
    gamma: float = 0.0
    rho: float = 0.0
    ttl: int | str = "auto"
    replicates: int = 5
    queries_per_replicate: int = 100
    master_seed: int = 0

    def validate(self):
        self.topology.validate()
        if not isinstance(self.k, int) or self.k < 0:
            raise ConfigError(f"k: must be a nonnegative integer, got {self.k!r}")
        for name in ("gamma", "rho"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name}: must lie in [0, 1], got {v!r}")
        if self.ttl != "auto" and (not isinstance(self.ttl, int) or self.ttl < 1):
            raise ConfigError(f"ttl: must be a positive integer or 'auto', got {self.ttl!r}")
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError(f"replicates: must be >= 1, got {self.replicates!r}")
        if not isinstance(self.queries_per_replicate, int) or self.queries_per_replicate < 1:
            raise ConfigError(f"queries_per_replicate: must be >= 1, got {self.queries_per_replicate!r}")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"master_seed: must be a 64-bit unsigned integer, got {self.master_seed!r}")
        return self

    def params(self, node_count: int | None = None) -> ProtocolParams:
        ttl = None
        if self.ttl != "auto":
            ttl = self.ttl
        elif node_count is not None:
            ttl = default_ttl(node_count)
        return ProtocolParams(self.rho, self.gamma, self.k, ttl)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["topology"] = self.topology.to_dict()
        return d


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isinf(x):
        return INF_TOKEN
    return format(float(x), ".12g")


@dataclass(frozen=True)
class ResultRow:
    """One scenario: analytic prediction and, optionally, simulation summary."""

    scenario: int
    topology: str
    analytic_input: str
    k: int
    gamma: float
    rho: float
    ttl: int | None
    tau: float
    mean_reach: float
    mean_hits: float
    percolates: bool
    replicates: int | None = None
    queries: int | None = None
    sim_hits_mean: float | None = None
    sim_hits_std: float | None = None
    sim_hits_sem: float | None = None
    sim_reached_mean: float | None = None
    sim_reached_std: float | None = None
    sim_messages_mean: float | None = None
    sim_messages_std: float | None = None
    sim_percolation_fraction: float | None = None

    ANALYTIC_COLUMNS = (
        "scenario", "topology", "analytic_input", "k", "gamma", "rho", "ttl",
        "tau", "mean_reach", "mean_hits", "percolates",
    )
    COLUMNS = ANALYTIC_COLUMNS + (
        "replicates", "queries", "sim_hits_mean", "sim_hits_std", "sim_hits_sem", "sim_reached_mean",
        "sim_reached_std", "sim_messages_mean", "sim_messages_std", "sim_percolation_fraction",
    )

    def values(self, columns=None) -> list[str]:
        return [_num(v) if k not in ("topology", "analytic_input") else v
                for k, v in ((c, getattr(self, c)) for c in (columns or self.COLUMNS))]

    def to_csv(self, columns=None) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="").writerow(self.values(columns))
        return buf.getvalue()

    def to_json(self, columns=None) -> str:
        cols = columns or self.COLUMNS
        obj = {}
        for c, s in zip(cols, self.values(cols)):
            v = getattr(self, c)
            obj[c] = s if s in (INF_TOKEN, "") or isinstance(v, str) else json.loads(s)
        return json.dumps(obj, sort_keys=False)


def _analytic_distribution(config: ScenarioConfig, graphs) -> DegreeDistribution:
    topo = config.topology
    if topo.kind == "graph_file" or (topo.analytic_input == "empirical" and graphs):
        return from_sequence(np.concatenate([g.degrees() for g in graphs]))
    return topo.ideal_distribution()


def cmd_analytic(config: ScenarioConfig, scenario: int = 0) -> ResultRow:
    """Evaluate the model for one configuration (analytic columns only)."""
    config.validate()
    topo = config.topology
    if topo.kind == "graph_file" or topo.analytic_input == "empirical":
        if topo.kind == "graph_file":
            graphs = [read_graph(topo.path)]
        else:
            graphs = [_replicate_graph(config, scenario, r) for r in range(config.replicates)]
        dist = _analytic_distribution(config, graphs)
    else:
        dist = topo.ideal_distribution()
    return _analytic_row(config, scenario, dist, _resolved_ttl(config))


def _resolved_ttl(config):
    if config.ttl != "auto":
        return config.ttl
    try:
        return default_ttl(config.topology.node_count())
    except ConfigError:
        return None


def _analytic_row(config, scenario, dist, ttl) -> ResultRow:
    res = analyze(dist, ProtocolParams(config.rho, config.gamma, config.k))
    return ResultRow(
        scenario=scenario,
        topology=config.topology.label,
        analytic_input="empirical" if config.topology.kind == "graph_file" else config.topology.analytic_input,
        k=config.k,
        gamma=config.gamma,
        rho=config.rho,
        ttl=math.inf if ttl is None else ttl,
        tau=res.tau,
        mean_reach=res.mean_reach,
        mean_hits=res.mean_hits,
        percolates=res.percolates,
    )


def _replicate_graph(config, scenario, replicate) -> OverlayGraph:
    graph, _ = config.topology.build_graph(stream(config.master_seed, "graph", scenario, replicate))
    return graph


def simulate_scenario(config: ScenarioConfig, scenario: int = 0, trace_sink=None) -> ResultRow:
    """Analytic prediction plus ``replicates`` x ``queries_per_replicate`` simulated queries."""
    config.validate()
    graphs, stats = [], []
    for r in range(config.replicates):
        graph = _replicate_graph(config, scenario, r)
        graph = place_resources(graph, config.rho, stream(config.master_seed, "placement", scenario, r))
        params = config.params(graph.node_count)
        table = build_knowledge(graph, config.k)
        stats.append(
            run_queries(
                graph, table, params, config.queries_per_replicate,
                stream(config.master_seed, "queries", scenario, r),
                trace_sink=trace_sink, query_offset=r * config.queries_per_replicate,
            )
        )
        graphs.append(graph)
    pooled = QueryStats.concat(stats)
    # replicates (fresh graph and placement each) are the independent units
    if config.replicates > 1:
        sem = float(np.std([s.mean_hits for s in stats], ddof=1)) / math.sqrt(config.replicates)
    else:
        sem = math.sqrt(pooled.var_hits / pooled.query_count)
    row = _analytic_row(config, scenario, _analytic_distribution(config, graphs), params.ttl)
    return dataclasses.replace(
        row,
        replicates=config.replicates,
        queries=config.queries_per_replicate,
        sim_hits_mean=pooled.mean_hits,
        sim_hits_std=math.sqrt(pooled.var_hits),
        sim_hits_sem=sem,
        sim_reached_mean=pooled.mean_reached,
        sim_reached_std=math.sqrt(pooled.var_reached),
        sim_messages_mean=pooled.mean_messages,
        sim_messages_std=math.sqrt(pooled.var_messages),
        sim_percolation_fraction=pooled.percolation_fraction,
    )


def cmd_simulate(config: ScenarioConfig, trace_path=None) -> ResultRow:
    if trace_path is None:
        return simulate_scenario(config)
    with open(trace_path, "w") as fh:
        fh.write("# query_id hop sender receiver kind\n")
        fh.write("# relay messages: one per distinct (sender, next hop); sender -1 marks the origin\n")
        return simulate_scenario(config, trace_sink=lambda d: fh.write(d.format() + "\n"))


def grid(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, values rounded to 10 decimals."""
    if not step > 0:
        raise ConfigError(f"step: must be positive, got {step!r}")
    if not 0.0 <= lo <= hi <= 1.0:
        raise ConfigError(f"range: need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    gammas: tuple
    rhos: tuple

    @classmethod
    def from_ranges(cls, base: ScenarioConfig, gamma_range, rho_range) -> "SweepSpec":
        return cls(base, tuple(grid(*gamma_range)), tuple(grid(*rho_range)))

    def scenarios(self) -> list[ScenarioConfig]:
        """Scenario configs in table order: gamma-major, rho-minor."""
        return [dataclasses.replace(self.base, gamma=g, rho=r) for g in self.gammas for r in self.rhos]

    def header(self) -> dict:
        return {
            "tool": f"gossipsearch {__version__}",
            "master_seed": self.base.master_seed,
            "config": {**self.base.to_dict(), "gammas": list(self.gammas), "rhos": list(self.rhos)},
        }


def _run_cell(args):
    config, index, simulate = args
    return simulate_scenario(config, index) if simulate else cmd_analytic(config, index)


def _read_header_and_rows(path, fmt, header_lines):
    with open(path) as fh:
        text = fh.read()
    lines = text.split("\n")
    complete = lines[:-1]  # text after the last newline is a torn row
    n_header = len(header_lines)
    if complete[:n_header] != header_lines:
        raise ConfigError(f"{path}: existing output was produced by a different configuration")
    rows = complete[n_header:]
    return rows


def cmd_sweep(
    sweep: SweepSpec,
    output_path,
    simulate: bool = True,
    fmt: str = "csv",
    workers: int = 1,
) -> list[ResultRow]:
    """Run every (gamma, rho) scenario and append rows to ``output_path``.

    An existing file with the same header is resumed: rows already present
    are kept and only the remaining scenarios run. Rows are always written in
    scenario order, whatever ``workers`` is.
    """
    sweep.base.validate()
    if fmt not in ("csv", "jsonl"):
        raise ConfigError(f"format: must be 'csv' or 'jsonl', got {fmt!r}")
    configs = sweep.scenarios()
    columns = ResultRow.COLUMNS if simulate else ResultRow.ANALYTIC_COLUMNS
    header = sweep.header()
    if fmt == "csv":
        header_lines = [
            f"# {header['tool']}",
            f"# master_seed={header['master_seed']}",
            "# config=" + json.dumps(header["config"], sort_keys=True),
            ",".join(columns),
        ]
    else:
        header_lines = [json.dumps({"header": header}, sort_keys=True)]

    done = 0
    parent = os.path.dirname(os.path.abspath(output_path))
    if not os.access(parent, os.W_OK):
        raise ConfigError(f"output: directory {parent} is not writable")
    if os.path.exists(output_path) and os.path.getsize(output_path) > 0:
        existing = _read_header_and_rows(output_path, fmt, header_lines)
        done = len(existing)
        with open(output_path, "w") as fh:
            fh.write("\n".join(header_lines + existing) + "\n")
    else:
        with open(output_path, "w") as fh:
            fh.write("\n".join(header_lines) + "\n")

    todo = [(c, i, simulate) for i, c in enumerate(configs) if i >= done]
    rows = []
    with open(output_path, "a") as fh:
        if workers > 1:
            pool = ProcessPoolExecutor(max_workers=workers)
            results = pool.map(_run_cell, todo)
        else:
            pool = None
            results = map(_run_cell, todo)
        try:
            for row in results:
                fh.write((row.to_csv(columns) if fmt == "csv" else row.to_json(columns)) + "\n")
                fh.flush()
                rows.append(row)
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    return rows


def cmd_threshold(
    topology: TopologySpec,
    k: int,
    rhos,
    mode: str,
) -> list[tuple[float, float | None]]:
    """Minimum gossip probability per rho: ``percolation`` or ``one_hit`` mode."""
    topology.validate()
    if mode not in ("percolation", "one_hit"):
        raise ConfigError(f"mode: must be 'percolation' or 'one_hit', got {mode!r}")
    if not isinstance(k, int) or k < 0:
        raise ConfigError(f"k: must be a nonnegative integer, got {k!r}")
    dist = topology.ideal_distribution()
    solver = min_gamma_percolation if mode == "percolation" else min_gamma_one_hit
    out = []
    for rho in rhos:
        if not 0.0 <= rho <= 1.0:
            raise ConfigError(f"rho: must lie in [0, 1], got {rho!r}")
        out.append((rho, solver(dist, rho, k)))
    return out


def format_threshold(curve) -> str:
    lines = ["rho,gamma_min"]
    for rho, g in curve:
        lines.append(f"{_num(rho)},{NONE_TOKEN if g is None else _num(g)}")
    return "\n".join(lines) + "\n"


def cmd_gen_graph(topology: TopologySpec, seed: int, output_path, rho: float | None = None, holders_path=None) -> dict:
    """Build one overlay, write it, and return a summary."""
    topology.validate()
    graph, seq = topology.build_graph(stream(seed, "graph", 0, 0))
    if rho is not None:
        graph = place_resources(graph, rho, stream(seed, "placement", 0, 0))
    write_graph(graph, output_path)
    if holders_path is not None:
        write_holders(graph, holders_path)
    n_comp, labels = component_labels(graph)
    hist = np.bincount(graph.degrees())
    return {
        "nodes": graph.node_count,
        "edges": graph.edge_count,
        "components": int(n_comp),
        "largest_component": int(np.bincount(labels).max()),
        "max_degree": int(graph.degrees().max()) if graph.node_count else 0,
        "residual_stubs": residual_stubs(seq, graph),
        "holders": graph.holder_count,
        "degree_histogram": {int(d): int(c) for d, c in enumerate(hist) if c},
    }
