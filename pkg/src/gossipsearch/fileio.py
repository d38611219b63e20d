"""
Plain-text formats.

Distribution file::

    # comment
    <degree> <probability>

Graph file: a header line ``N <count>`` followed by one ``u v`` edge per line
with ``u < v``. Holder file: one resource-holding node id per line.
Blank lines and ``#`` comments are ignored by every reader.
"""

from __future__ import annotations

import os

import numpy as np

from .degree import DegreeDistribution
from .overlay import OverlayGraph


def _data_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def read_distribution(path) -> DegreeDistribution:
    pairs = []
    for lineno, fields in _data_lines(path):
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'degree probability'")
        try:
            pairs.append((int(fields[0]), float(fields[1])))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: cannot parse {' '.join(fields)!r}") from None
    return DegreeDistribution.from_pairs(pairs)


def write_distribution(dist: DegreeDistribution, path):
    with open(path, "w") as fh:
        fh.write("# degree probability\n")
        for d, p in dist.entries:
            fh.write(f"{d} {p!r}\n")


def write_graph(graph: OverlayGraph, path):
    edges = graph.edges()
    with open(path, "w") as fh:
        fh.write(f"N {graph.node_count}\n")
        fh.writelines(f"{u} {v}\n" for u, v in edges.tolist())


def read_graph(path, holders_path=None) -> OverlayGraph:
    lines = _data_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ValueError(f"{path}: empty graph file") from None
    if len(header) != 2 or header[0] != "N":
        raise ValueError(f"{path}:{lineno}: expected header 'N <count>'")
    n = int(header[1])
    edges = []
    for lineno, fields in lines:
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'u v'")
        u, v = int(fields[0]), int(fields[1])
        if u >= v:
            raise ValueError(f"{path}:{lineno}: edges must be written with u < v")
        edges.append((u, v))
    holders = None if holders_path is None else read_holders(holders_path, n)
    return OverlayGraph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2), holders)


def write_holders(graph: OverlayGraph, path):
    with open(path, "w") as fh:
        fh.writelines(f"{i}\n" for i in np.flatnonzero(graph.holders).tolist())


def read_holders(path, node_count: int) -> np.ndarray:
    flags = np.zeros(node_count, dtype=bool)
    for lineno, fields in _data_lines(path):
        i = int(fields[0])
        if not 0 <= i < node_count:
            raise ValueError(f"{path}:{lineno}: node {i} out of range")
        flags[i] = True
    return flags


def output_dir() -> str:
    """Default directory for harness outputs (``GOSSIPSEARCH_OUTPUT_DIR`` or cwd)."""
    return os.environ.get("GOSSIPSEARCH_OUTPUT_DIR", os.getcwd())
