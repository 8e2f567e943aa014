"""Random graph ensembles and their sparsity characterization.

A graph distribution is (mu, K, rho)-sparse when, with probability at least
1 - rho, a sampled graph has no more than K nodes of degree above mu. Uniform
labeled trees are sampled through Prufer sequences: a uniform sequence of
length n-2 over the node set decodes to a uniform spanning tree of K_n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .graphs import Graph, read_graph_csv

ENSEMBLE_KINDS = ("uniform-tree", "erdos-renyi", "star", "chain", "fixed")


@dataclass(frozen=True)
class SparsityProfile:
    """(mu, K, rho) triple: at most K nodes above degree mu, except with prob rho."""

    mu: int
    K: int
    rho: float

    def __post_init__(self):
        if self.mu < 0 or self.K < 0:
            raise ConfigError("mu and K must be non-negative")
        if not (0.0 <= self.rho <= 1.0):
            raise ConfigError(f"rho must lie in [0,1], got {self.rho}")


@dataclass(frozen=True)
class EnsembleSpec:
    """Which graph family to sample from."""

    kind: str
    n: int
    p: float | None = None
    graph: Graph | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ConfigError(f"unknown ensemble kind {self.kind!r}; choose from {ENSEMBLE_KINDS}")
        if self.n < 2:
            raise ConfigError("ensembles require n >= 2")
        if self.kind == "erdos-renyi":
            if self.p is None or not (0.0 < self.p <= 1.0):
                raise ConfigError("erdos-renyi requires an edge probability p in (0, 1]")
        if self.kind == "fixed":
            if self.graph is None:
                raise ConfigError("fixed ensemble requires a graph")
            if self.graph.n != self.n:
                raise ConfigError("fixed graph node count disagrees with spec n")

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        if self.p is not None:
            out["p"] = self.p
        if self.seed is not None:
            out["seed"] = self.seed
        if self.graph is not None:
            out["edges"] = [[i + 1, j + 1] for i, j in self.graph.sorted_edges()]
        return out

    @staticmethod
    def from_json(obj: dict | str) -> "EnsembleSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        graph = None
        if "graph_file" in obj:
            graph, _ = read_graph_csv(obj["graph_file"], n=obj.get("n"))
        elif "edges" in obj:
            graph = Graph.from_edges(obj["n"], [(i - 1, j - 1) for i, j in obj["edges"]])
        return EnsembleSpec(
            kind=obj["kind"],
            n=int(obj["n"]),
            p=obj.get("p"),
            graph=graph,
            seed=obj.get("seed"),
        )


def decode_prufer(seq: np.ndarray, n: int) -> Graph:
    """Decode a Prufer sequence (length n-2, labels 0..n-1) into its tree.

    Bijective: running this over all n^(n-2) sequences enumerates every
    labeled tree on n nodes exactly once.
    """
    seq = np.asarray(seq, dtype=np.int64)
    if n == 2:
        if seq.size != 0:
            raise ConfigError("n=2 requires an empty sequence")
        return Graph(2, frozenset({(0, 1)}))
    if seq.shape != (n - 2,):
        raise ConfigError(f"sequence length must be n-2={n - 2}")
    if seq.size and (seq.min() < 0 or seq.max() >= n):
        raise ConfigError("sequence labels out of range")

    degree = np.ones(n, dtype=np.int64)
    for x in seq:
        degree[x] += 1
    edges = []
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append((min(leaf, int(x)), max(leaf, int(x))))
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = int(x)
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n - 1))
    return Graph(n, frozenset(edges))


def sample(spec: EnsembleSpec, rng: np.random.Generator) -> Graph:
    """Draw one graph from the ensemble."""
    n = spec.n
    if spec.kind == "uniform-tree":
        return decode_prufer(rng.integers(0, n, size=n - 2), n)
    if spec.kind == "erdos-renyi":
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < spec.p
        return Graph(n, frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))
    if spec.kind == "star":
        return Graph.star(n)
    if spec.kind == "chain":
        return Graph.chain(n)
    if spec.kind == "fixed":
        return spec.graph
    raise ConfigError(f"unknown ensemble kind {spec.kind!r}")


def in_sparsity_class(g: Graph, mu: int, K: int) -> bool:
    """True iff at most K nodes of g have degree strictly above mu."""
    return int(np.sum(g.degrees() > mu)) <= K


class RhoEstimate(NamedTuple):
    rho_hat: float
    half_width: float
    trials: int
    failures: int


def estimate_rho(
    spec: EnsembleSpec, mu: int, K: int, trials: int, rng: np.random.Generator
) -> RhoEstimate:
    """Monte-Carlo estimate of P(G outside the (mu, K) class).

    The half-width is the 95% normal-approximation binomial interval.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    failures = sum(
        0 if in_sparsity_class(sample(spec, rng), mu, K) else 1 for _ in range(trials)
    )
    p_hat = failures / trials
    half = 1.96 * math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return RhoEstimate(p_hat, half, trials, failures)
