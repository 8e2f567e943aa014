import numpy as np
import pytest

from gmrec import (
    ConfigError,
    Field,
    Graph,
    MeasurementSet,
    NominalModel,
    build_admittance,
    build_graph_matrix,
    extract_perturbation,
    load_measurements,
    power_flow_like,
    sample_generator,
    save_measurements,
    stream,
    synthesize,
)


def test_generator_moments_real():
    B = sample_generator(200, 200, Field.REAL, 1.0, stream(5))
    assert abs(B.mean()) < 3 / np.sqrt(200 * 200)
    assert abs(B.var() - 1.0) < 0.05


def test_generator_complex_mean_shift():
    B = sample_generator(150, 150, Field.COMPLEX, 1.0, stream(6), mean_re=1.0)
    assert abs(B.real.mean() - 1.0) < 0.05
    assert abs(B.imag.mean()) < 0.05
    assert abs(B.real.var() - 1.0) < 0.1


def test_generator_rejects_bad_sigma():
    with pytest.raises(ConfigError):
        sample_generator(3, 3, Field.REAL, 0.0, stream(0))


def test_synthesize_identity_noiseless():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    Y = build_graph_matrix(g, stream(2), field_tag=Field.REAL)
    ms = synthesize(np.eye(4), Y, 0.0)
    assert np.array_equal(ms.A, Y.values)


def test_synthesize_pure_noise_norm():
    Y = build_graph_matrix(Graph(40), stream(1), field_tag=Field.REAL)  # zero matrix
    sigma = 0.7
    ms = synthesize(np.eye(40), Y, sigma, stream(3))
    avg = np.linalg.norm(ms.A) ** 2 / (40 * 40)
    assert abs(avg - sigma**2) < 0.1 * sigma**2


def test_synthesize_hand_example():
    g = Graph.from_edges(2, [(0, 1)])
    Y = build_admittance(g, {(0, 1): 1.0}, np.zeros(2), field_tag=Field.REAL)
    ms = synthesize(np.array([[1.0, 0.0]]), Y, 0.0)
    assert np.allclose(ms.A, [[1.0, -1.0]])


def test_synthesize_shape_checks():
    Y = build_graph_matrix(Graph.chain(3), stream(0), field_tag=Field.REAL)
    with pytest.raises(ConfigError):
        synthesize(np.zeros((2, 4)), Y, 0.0)
    with pytest.raises(ConfigError):
        synthesize(np.zeros((5, 3)), Y, 0.0)  # m > n refused at synthesis


def test_noiseless_consistency_invariant():
    g = Graph.from_edges(6, [(0, 1), (1, 4), (2, 5)])
    Y = build_graph_matrix(g, stream(12), field_tag=Field.COMPLEX)
    B = sample_generator(4, 6, Field.COMPLEX, 1.0, stream(13))
    ms = synthesize(B, Y, 0.0)
    assert np.linalg.norm(ms.A - B @ Y.values) <= 1e-12 * np.linalg.norm(ms.A)


def test_power_flow_like_rank_one_and_conservation():
    g = Graph.from_edges(2, [(0, 1)])
    Y = build_admittance(g, {(0, 1): complex(2.0, -1.0)}, np.zeros(2))
    v_nom = np.array([1.0 + 0j, 0.9 + 0.1j])
    ms = power_flow_like(Y, v_nom, 0.0, 5, 0.0, stream(4))
    assert np.linalg.matrix_rank(ms.A) == 1
    assert np.allclose(ms.A[0], v_nom @ Y.values)

    ms2 = power_flow_like(Y, v_nom, 0.05, 8, 0.0, stream(5))
    # one line, zero self-admittance: injected currents cancel
    assert np.allclose(ms2.A[:, 0], -ms2.A[:, 1])


def test_power_flow_noise_on_b_keeps_ohms_law():
    g = Graph.chain(4)
    Y = build_admittance(g, {e: 1.0 + 0j for e in g.sorted_edges()}, np.zeros(4))
    ms = power_flow_like(Y, np.ones(4, dtype=complex), 0.03, 6, 0.001, stream(6), noise_on="B")
    # currents computed exactly from the perturbed voltages
    assert np.allclose(ms.A, ms.B @ Y.values)
    ms2 = power_flow_like(Y, np.ones(4, dtype=complex), 0.03, 6, 0.001, stream(6), noise_on="A")
    assert not np.allclose(ms2.A, ms2.B @ Y.values)


def test_extract_perturbation():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    Y = build_graph_matrix(g, stream(7), field_tag=Field.REAL)
    nom = NominalModel.from_graph_matrix(Y, np.array([1.0, 2.0, 3.0, 0.5]))
    B_t = sample_generator(3, 4, Field.REAL, 1.0, stream(8))
    B_shift = B_t + nom.B_bar_row[None, :]
    ms = synthesize(B_shift, Y, 0.0)
    pert = extract_perturbation(ms, nom)
    assert np.allclose(pert.B, B_t)
    # extracted pair satisfies the linear model again
    assert np.linalg.norm(pert.A - pert.B @ Y.values) <= 1e-10 * (1 + np.linalg.norm(pert.A))

    zero_nom = NominalModel(A_bar_row=np.zeros(4), B_bar_row=np.zeros(4))
    same = extract_perturbation(ms, zero_nom)
    assert np.array_equal(same.A, ms.A) and np.array_equal(same.B, ms.B)


def test_seed_determinism():
    g = Graph.chain(5)
    Y = build_graph_matrix(g, stream(30), field_tag=Field.COMPLEX)
    a = synthesize(sample_generator(4, 5, Field.COMPLEX, 1.0, stream(31)), Y, 0.1, stream(32))
    b = synthesize(sample_generator(4, 5, Field.COMPLEX, 1.0, stream(31)), Y, 0.1, stream(32))
    assert np.array_equal(a.A, b.A) and np.array_equal(a.B, b.B)


def test_manifest_roundtrip(tmp_path):
    g = Graph.from_edges(5, [(0, 2), (3, 4)])
    Y = build_graph_matrix(g, stream(9), field_tag=Field.COMPLEX)
    B = sample_generator(3, 5, Field.COMPLEX, 1.0, stream(10))
    ms = synthesize(B, Y, 0.25, stream(11))
    manifest = save_measurements(ms, tmp_path, prefix="t_", seed=11)
    again = load_measurements(manifest)
    assert np.array_equal(again.B, ms.B)
    assert np.array_equal(again.A, ms.A)
    assert again.sigma_N == 0.25 and again.field_tag is Field.COMPLEX


def test_manifest_shape_mismatch(tmp_path):
    g = Graph.from_edges(4, [(0, 1)])
    Y = build_graph_matrix(g, stream(14), field_tag=Field.REAL)
    ms = synthesize(sample_generator(3, 4, Field.REAL, 1.0, stream(15)), Y, 0.0)
    manifest = save_measurements(ms, tmp_path, seed=0)
    text = manifest.read_text().replace('"m": 3', '"m": 2')
    manifest.write_text(text)
    with pytest.raises(ConfigError, match="shape"):
        load_measurements(manifest)


def test_measurement_set_is_immutable():
    ms = MeasurementSet(B=np.eye(3), A=np.eye(3), field_tag=Field.REAL)
    with pytest.raises(ValueError):
        ms.A[0, 0] = 5.0
