"""Command line front end: ``gossipsearch <command> [options]``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .fileio import output_dir
from .harness import (
    ConfigError,
    ResultRow,
    ScenarioConfig,
    SweepSpec,
    TopologySpec,
    cmd_analytic,
    cmd_gen_graph,
    cmd_simulate,
    cmd_sweep,
    cmd_threshold,
    format_threshold,
    grid,
)

FULL_SCALE = {"replicates": 20, "queries_per_replicate": 400}


def _floats(text, n):
    parts = text.split(",")
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return [float(p) for p in parts]


def _topology_args(p):
    g = p.add_argument_group("topology")
    g.add_argument("--aiello", metavar="A,B", help="Aiello construction with parameters a, b")
    g.add_argument("--power-law", metavar="ALPHA,MIN,CUTOFF", help="truncated power law")
    g.add_argument("--distribution-file", metavar="PATH", help="'degree probability' file")
    g.add_argument("--graph-file", metavar="PATH", help="fixed overlay in 'N <count>' / 'u v' format")
    g.add_argument("--nodes", type=int, help="node count for sampled topologies")
    g.add_argument("--analytic-input", choices=("ideal", "empirical"))


def _scenario_args(p, with_point=True):
    p.add_argument("--config", metavar="JSON", help="configuration file; flags override its values")
    _topology_args(p)
    p.add_argument("--k", type=int)
    if with_point:
        p.add_argument("--gamma", type=float)
        p.add_argument("--rho", type=float)
    p.add_argument("--ttl", help="positive integer or 'auto'")
    p.add_argument("--replicates", type=int)
    p.add_argument("--queries", type=int, dest="queries_per_replicate")
    p.add_argument("--full-scale", action="store_true", help="20 replicates x 400 queries")
    p.add_argument("--seed", type=int, dest="master_seed")


def _load_file(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _topology_from(args, data) -> TopologySpec:
    topo = dict(data.get("topology", {}))
    given = [n for n in ("aiello", "power_law", "distribution_file", "graph_file") if getattr(args, n, None)]
    if len(given) > 1:
        raise ConfigError("topology: give only one of --aiello, --power-law, --distribution-file, --graph-file")
    if given:
        for key in ("a", "b", "alpha", "min_degree", "cutoff", "path"):
            topo.pop(key, None)
        if args.aiello:
            a, b = _floats(args.aiello, 2)
            topo.update(kind="aiello", a=a, b=b)
        elif args.power_law:
            alpha, lo, hi = _floats(args.power_law, 3)
            topo.update(kind="power_law", alpha=alpha, min_degree=int(lo), cutoff=int(hi))
        elif args.distribution_file:
            topo.update(kind="distribution_file", path=args.distribution_file)
        else:
            topo.update(kind="graph_file", path=args.graph_file)
    if args.nodes is not None:
        topo["nodes"] = args.nodes
    if args.analytic_input is not None:
        topo["analytic_input"] = args.analytic_input
    if "kind" not in topo:
        raise ConfigError("topology: one of --aiello, --power-law, --distribution-file, --graph-file is required")
    try:
        return TopologySpec(**topo)
    except TypeError as exc:
        raise ConfigError(f"topology: {exc}") from None


def _scenario_from(args, data=None) -> ScenarioConfig:
    data = _load_file(args.config) if data is None else data
    fields = {k: v for k, v in data.items() if k in ScenarioConfig.__dataclass_fields__ and k != "topology"}
    if getattr(args, "full_scale", False):
        fields.update(FULL_SCALE)
    for name in ("k", "gamma", "rho", "ttl", "replicates", "queries_per_replicate", "master_seed"):
        v = getattr(args, name, None)
        if v is not None:
            fields[name] = v
    if "ttl" in fields and fields["ttl"] != "auto":
        try:
            fields["ttl"] = int(fields["ttl"])
        except ValueError:
            raise ConfigError(f"ttl: must be a positive integer or 'auto', got {fields['ttl']!r}") from None
    return ScenarioConfig(topology=_topology_from(args, data), **fields).validate()


def _default_path(path, name):
    return path if path is not None else os.path.join(output_dir(), name)


def _print_row(row, columns, fmt):
    if fmt == "jsonl":
        print(row.to_json(columns))
    else:
        print(",".join(columns))
        print(row.to_csv(columns))


_VALUE_FLAGS = ("--aiello", "--power-law", "--gamma-range", "--rho-range")


def _join_values(argv):
    # "--power-law -3,1,10" would otherwise be read as an option
    out = []
    it = iter(argv)
    for a in it:
        if a in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gossipsearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="evaluate the generating-function model")
    _scenario_args(p)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p = sub.add_parser("simulate", help="one scenario: model plus simulation")
    _scenario_args(p)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--trace", metavar="PATH", help="write one line per delivery")

    p = sub.add_parser("sweep", help="grid over gamma and rho")
    _scenario_args(p, with_point=False)
    p.add_argument("--gamma-range", metavar="LO,HI,STEP")
    p.add_argument("--rho-range", metavar="LO,HI,STEP")
    p.add_argument("--output", "-o", metavar="PATH")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--analytic-only", action="store_true")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("threshold", help="minimum gossip probability curves")
    p.add_argument("--config", metavar="JSON")
    _topology_args(p)
    p.add_argument("--k", type=int)
    p.add_argument("--rho-range", metavar="LO,HI,STEP")
    p.add_argument("--mode", choices=("percolation", "one_hit"), default="percolation")
    p.add_argument("--output", "-o", metavar="PATH")

    p = sub.add_parser("gen-graph", help="generate one overlay graph file")
    p.add_argument("--config", metavar="JSON")
    _topology_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, help="also place resources and write a holder file")
    p.add_argument("--output", "-o", metavar="PATH")
    p.add_argument("--holders-output", metavar="PATH")

    args = parser.parse_args(_join_values(sys.argv[1:] if argv is None else argv))
    try:
        return _dispatch(args)
    except (ConfigError, argparse.ArgumentTypeError) as exc:
        print(f"gossipsearch {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gossipsearch {args.command}: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "analytic":
        row = cmd_analytic(_scenario_from(args))
        _print_row(row, ResultRow.ANALYTIC_COLUMNS, args.format)
        return 0

    if args.command == "simulate":
        row = cmd_simulate(_scenario_from(args), trace_path=args.trace)
        _print_row(row, ResultRow.COLUMNS, args.format)
        return 0

    if args.command == "sweep":
        data = _load_file(args.config)
        base = _scenario_from(args, data)
        gr = _floats(args.gamma_range, 3) if args.gamma_range else data.get("gamma_range", [0.01, 0.5, 0.01])
        rr = _floats(args.rho_range, 3) if args.rho_range else data.get("rho_range", [0.01, 0.5, 0.01])
        sweep = SweepSpec.from_ranges(base, gr, rr)
        out = _default_path(args.output, f"sweep.{args.format}")
        rows = cmd_sweep(sweep, out, simulate=not args.analytic_only, fmt=args.format, workers=args.workers)
        print(f"{len(rows)} new rows, {len(sweep.gammas) * len(sweep.rhos)} scenarios -> {out}")
        return 0

    if args.command == "threshold":
        data = _load_file(args.config)
        topo = _topology_from(args, data)
        k = args.k if args.k is not None else data.get("k", 1)
        rr = _floats(args.rho_range, 3) if args.rho_range else data.get("rho_range", [0.01, 0.5, 0.01])
        text = format_threshold(cmd_threshold(topo, k, grid(*rr), args.mode))
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0

    if args.command == "gen-graph":
        topo = _topology_from(args, _load_file(args.config))
        out = _default_path(args.output, "graph.txt")
        holders = args.holders_output
        if args.rho is not None and holders is None:
            holders = out + ".holders"
        summary = cmd_gen_graph(topo, args.seed, out, rho=args.rho, holders_path=holders)
        hist = summary.pop("degree_histogram")
        for key, value in summary.items():
            print(f"{key}: {value}")
        print("degree_histogram: " + " ".join(f"{d}:{c}" for d, c in hist.items()))
        return 0

    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
