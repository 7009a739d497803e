"""Shared test utilities: random instances and brute-force oracles."""
from __future__ import annotations

import math

import numpy as np

from graphscan import Graph, build_graph, center


def random_connected_graph(rng: np.random.Generator, max_n: int = 12, min_n: int = 2) -> Graph:
    """Random spanning tree plus extra edges, with weights in [0.5, 2]."""
    n = int(rng.integers(min_n, max_n + 1))
    order = rng.permutation(n)
    edges = []
    for i in range(1, n):
        u = int(order[i])
        v = int(order[int(rng.integers(0, i))])
        edges.append((min(u, v), max(u, v), float(rng.uniform(0.5, 2.0))))
    have = {(u, v) for u, v, _ in edges}
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in have and rng.random() < 0.3:
                edges.append((u, v, float(rng.uniform(0.5, 2.0))))
    return build_graph(n, edges)


def draw_rho(rng: np.random.Generator, eigenvalues: np.ndarray) -> float:
    """Log-uniform rho between lambda_2 / 4 and 4 * lambda_n."""
    lo = math.log(eigenvalues[1] / 4.0)
    hi = math.log(4.0 * eigenvalues[-1])
    return float(np.exp(rng.uniform(lo, hi)))


def glr_brute_force(g: Graph, y: np.ndarray, rho: float = math.inf) -> float:
    """GLR by explicit subset enumeration; raises on an empty feasible class.

    The statistic of a bipartition is the same number for either side, so each
    bipartition is evaluated once through its positive-sum side (centered sums
    over complements agree only up to rounding). Sums accumulate in descending
    value order, the matched-rounding convention for comparing against
    prefix-sum scans.
    """
    n = g.n
    ytilde = center(y)
    best = None
    for mask in range(1, 2**n - 1):
        members = [v for v in range(n) if mask >> v & 1]
        k = len(members)
        if math.isfinite(rho):
            cut = sum(w for u, v, w in g.edges if (mask >> u & 1) != (mask >> v & 1))
            if n * cut / (k * (n - k)) > rho:
                continue
        total = 0.0
        for value in sorted((ytilde[v] for v in members), reverse=True):
            total += value
        if total < 0.0:
            continue  # the complement carries this bipartition
        stat = n * total**2 / (k * (n - k))
        if best is None or stat > best:
            best = stat
    if best is None:
        raise ValueError("empty feasible class")
    return best
