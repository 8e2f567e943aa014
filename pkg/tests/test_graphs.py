import numpy as np
import pytest

from gmrec import (
    ConfigError,
    Field,
    Graph,
    build_admittance,
    build_graph_matrix,
    degree_profile,
    read_graph_csv,
    read_matrix_csv,
    stream,
    support,
    write_graph_csv,
    write_matrix_csv,
)


def test_graph_validation():
    with pytest.raises(ConfigError):
        Graph(3, frozenset({(1, 1)}))
    with pytest.raises(ConfigError):
        Graph(3, frozenset({(0, 3)}))
    with pytest.raises(ConfigError):
        Graph.from_edges(4, [(2, 2)])
    g = Graph.from_edges(4, [(2, 0), (0, 2), (1, 3)])
    assert g.edges == {(0, 2), (1, 3)}


def test_star_chain_degrees():
    star = Graph.star(5)
    assert sorted(star.degrees().tolist()) == [1, 1, 1, 1, 4]
    chain = Graph.chain(4)
    assert chain.edges == {(0, 1), (1, 2), (2, 3)}
    assert int(chain.degrees().sum()) == 2 * chain.num_edges


def test_build_graph_matrix_edgeless_and_single_edge():
    rng = stream(1)
    zero = build_graph_matrix(Graph(3), rng, field_tag=Field.REAL)
    off = zero.values[~np.eye(3, dtype=bool)]
    assert np.all(off == 0)

    g2 = Graph.from_edges(2, [(0, 1)])
    gm = build_graph_matrix(g2, weights={(0, 1): 1.0}, diagonal=np.zeros(2))
    assert np.array_equal(gm.values, np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_build_graph_matrix_star_support_counts():
    g = Graph.star(5, hub=0)
    gm = build_graph_matrix(g, stream(7), field_tag=Field.COMPLEX)
    nz = np.abs(gm.values) > 0
    off = nz & ~np.eye(5, dtype=bool)
    assert off[:, 0].sum() == 4
    for j in range(1, 5):
        assert off[:, j].sum() == 1


def test_support_roundtrip_and_threshold():
    g = Graph.from_edges(6, [(0, 3), (1, 2), (4, 5)])
    gm = build_graph_matrix(g, stream(3), field_tag=Field.COMPLEX)
    # default sampler keeps |w| >= 1, far above any sane threshold
    assert support(gm.values, 1e-5).edges == g.edges
    assert support(np.zeros((4, 4)), 1e-5).edges == frozenset()
    x = np.zeros((3, 3))
    x[0, 1] = x[1, 0] = 1e-6
    assert support(x, 1e-5).edges == frozenset()
    x[0, 1] = x[1, 0] = 1e-5
    assert support(x, 1e-5).edges == {(0, 1)}


def test_support_asymmetric_uses_max_magnitude():
    x = np.zeros((3, 3))
    x[0, 1] = 1.0  # only one triangle entry set
    assert support(x, 0.5).edges == {(0, 1)}


def test_build_admittance_examples():
    g = Graph.from_edges(2, [(0, 1)])
    Y = build_admittance(g, {(0, 1): 1.0}, np.zeros(2), field_tag=Field.REAL)
    assert np.allclose(Y.values, [[1.0, -1.0], [-1.0, 1.0]])

    chain = Graph.chain(3)
    Y3 = build_admittance(chain, {(0, 1): 1.0, (1, 2): 1.0}, np.zeros(3), field_tag=Field.REAL)
    assert np.allclose(np.diag(Y3.values), [1.0, 2.0, 1.0])
    assert Y3.values[0, 1] == -1.0 and Y3.values[1, 2] == -1.0 and Y3.values[0, 2] == 0.0

    edgeless = Graph(3)
    v = np.array([1.0, 2.0, 3.0])
    Yd = build_admittance(edgeless, {}, v, field_tag=Field.REAL)
    assert np.array_equal(Yd.values, np.diag(v))


def test_build_admittance_errors():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ConfigError):
        build_admittance(g, {}, np.zeros(3))
    with pytest.raises(ConfigError):
        build_admittance(g, {(0, 1): 1.0, (1, 2): 2.0}, np.zeros(3))
    with pytest.raises(ConfigError):
        build_admittance(g, {(0, 1): 0.0}, np.zeros(3))


def test_admittance_zero_rowsum_invariant():
    g = Graph.from_edges(5, [(0, 1), (0, 4), (2, 3), (1, 2)])
    rng = stream(11)
    adm = {e: complex(rng.uniform(1, 5), rng.uniform(-2, 2)) for e in g.sorted_edges()}
    Y = build_admittance(g, adm, np.zeros(5))
    rows = np.abs(Y.values.sum(axis=1))
    assert np.all(rows <= 1e-12 * np.abs(Y.values).max())


def test_rowsum_diagonal_default_matches_admittance_sign_flip():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    gm = build_graph_matrix(g, stream(5), field_tag=Field.REAL)
    assert np.allclose(gm.values.sum(axis=1), 0.0, atol=1e-12 * np.abs(gm.values).max())


def test_degree_profile():
    star = Graph.star(5)
    prof = degree_profile(star, 1)
    assert prof.large_count == 1
    chain = Graph.chain(5)
    assert degree_profile(chain, 2).large_count == 0
    assert degree_profile(Graph(4), 0).large_count == 0
    with pytest.warns(UserWarning):
        clamped = degree_profile(chain, 99)
    assert clamped.mu == 3


def test_degree_profile_monotone_in_mu():
    g = Graph.from_edges(7, [(0, 1), (0, 2), (0, 3), (1, 2), (4, 5)])
    counts = [degree_profile(g, mu).large_count for mu in range(6)]
    assert counts == sorted(counts, reverse=True)


def test_graph_csv_roundtrip(tmp_path):
    g = Graph.from_edges(5, [(0, 4), (1, 2)])
    w = {(0, 4): complex(1.5, -2.25), (1, 2): complex(-3.0, 0.125)}
    path = tmp_path / "g.csv"
    write_graph_csv(g, path, w)
    g2, w2 = read_graph_csv(path)
    assert g2.edges == g.edges and g2.n == 5
    assert w2 == w


def test_graph_csv_is_one_indexed(tmp_path):
    path = tmp_path / "g.csv"
    path.write_text("i,j,re,im\n1,2,1,0\n")
    g, _ = read_graph_csv(path)
    assert g.edges == {(0, 1)}


def test_graph_csv_diagnostics(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("i,j,re,im\n1,1,1,0\n")
    with pytest.raises(ConfigError, match="self-loop"):
        read_graph_csv(bad)
    bad.write_text("i,j,re,im\n1,2,x,0\n")
    with pytest.raises(ConfigError, match=":2"):
        read_graph_csv(bad)
    bad.write_text("a,b\n")
    with pytest.raises(ConfigError, match="header"):
        read_graph_csv(bad)


def test_matrix_csv_roundtrip_exact(tmp_path):
    rng = stream(9)
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    M *= 987.654321
    path = tmp_path / "m.csv"
    write_matrix_csv(M, path)
    M2 = read_matrix_csv(path, Field.COMPLEX)
    assert np.array_equal(M, M2)

    R = rng.normal(size=(3, 5))
    write_matrix_csv(R, path)
    R2 = read_matrix_csv(path, Field.REAL)
    assert np.array_equal(R, R2)
    assert R2.dtype == np.float64
