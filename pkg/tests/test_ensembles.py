import itertools
import math

import numpy as np
import pytest

from gmrec import (
    ConfigError,
    EnsembleSpec,
    Graph,
    decode_prufer,
    er_sparsity_profile,
    estimate_rho,
    in_sparsity_class,
    sample,
    stream,
)


def _is_connected_tree(g: Graph) -> bool:
    if g.num_edges != g.n - 1:
        return False
    seen = {0}
    frontier = [0]
    adj = {v: [] for v in range(g.n)}
    for i, j in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    while frontier:
        v = frontier.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return len(seen) == g.n


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_prufer_bijection_exhaustive(n):
    # Decoding all n^(n-2) sequences must enumerate each labeled tree once.
    seen = set()
    for seq in itertools.product(range(n), repeat=n - 2):
        g = decode_prufer(np.array(seq, dtype=np.int64), n)
        assert _is_connected_tree(g)
        key = frozenset(g.edges)
        assert key not in seen
        seen.add(key)
    assert len(seen) == n ** (n - 2)


def test_uniform_tree_frequencies_n3():
    # Three labeled trees on 3 nodes, each with empirical frequency 1/3 +- 0.02.
    rng = stream(314)
    spec = EnsembleSpec(kind="uniform-tree", n=3)
    counts = {}
    trials = 10_000
    for _ in range(trials):
        g = sample(spec, rng)
        counts[frozenset(g.edges)] = counts.get(frozenset(g.edges), 0) + 1
    assert len(counts) == 3
    for c in counts.values():
        assert abs(c / trials - 1 / 3) < 0.02


def test_uniform_tree_shape():
    rng = stream(59)
    spec = EnsembleSpec(kind="uniform-tree", n=37)
    for _ in range(25):
        g = sample(spec, rng)
        assert _is_connected_tree(g)


def test_er_extremes_and_density():
    rng = stream(4)
    complete = sample(EnsembleSpec(kind="erdos-renyi", n=6, p=1.0), rng)
    assert complete.num_edges == 15
    p = 0.2
    n = 30
    spec = EnsembleSpec(kind="erdos-renyi", n=n, p=p)
    total_pairs = n * (n - 1) // 2
    trials = 200
    edges = sum(sample(spec, rng).num_edges for _ in range(trials))
    density = edges / (trials * total_pairs)
    se = math.sqrt(p * (1 - p) / (trials * total_pairs))
    assert abs(density - p) < 3 * se


def test_fixed_star_chain():
    rng = stream(1)
    assert sample(EnsembleSpec(kind="chain", n=4), rng).edges == {(0, 1), (1, 2), (2, 3)}
    star = sample(EnsembleSpec(kind="star", n=6), rng)
    assert star.degrees()[0] == 5
    g = Graph.from_edges(3, [(0, 2)])
    assert sample(EnsembleSpec(kind="fixed", n=3, graph=g), rng) is g


def test_spec_validation():
    with pytest.raises(ConfigError):
        EnsembleSpec(kind="erdos-renyi", n=5)
    with pytest.raises(ConfigError):
        EnsembleSpec(kind="nope", n=5)
    with pytest.raises(ConfigError):
        EnsembleSpec(kind="fixed", n=5)


def test_spec_json_roundtrip():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    spec = EnsembleSpec(kind="fixed", n=4, graph=g, seed=9)
    again = EnsembleSpec.from_json(spec.to_json())
    assert again.graph.edges == g.edges
    er = EnsembleSpec.from_json({"kind": "erdos-renyi", "n": 8, "p": 0.3})
    assert er.p == 0.3


def test_in_sparsity_class():
    star = Graph.star(10)
    assert in_sparsity_class(star, 2, 1)
    assert not in_sparsity_class(star, 2, 0)
    assert in_sparsity_class(Graph(7), 0, 0)


def test_estimate_rho_star_deterministic():
    est = estimate_rho(EnsembleSpec(kind="star", n=10), 2, 1, 50, stream(3))
    assert est.rho_hat == 0.0 and est.half_width == 0.0


def test_estimate_rho_trees_lemma_bound():
    # Uniform trees are (mu, K, 1/K)-sparse for any mu >= 1.
    est = estimate_rho(EnsembleSpec(kind="uniform-tree", n=50), 5, 10, 2000, stream(8))
    assert est.rho_hat <= 1 / 10 + est.half_width


def test_estimate_rho_er_lemma_bound():
    n, p, K = 40, 0.05, 5
    prof = er_sparsity_profile(n, p, K)
    est = estimate_rho(EnsembleSpec(kind="erdos-renyi", n=n, p=p), prof.mu, K, 2000, stream(21))
    assert est.rho_hat <= prof.rho + est.half_width


def test_estimate_rho_needs_trials():
    with pytest.raises(ConfigError):
        estimate_rho(EnsembleSpec(kind="star", n=5), 1, 1, 0, stream(0))
