import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toboggan.qmetric import (MAX_DIM, MetricError, Pencil, assemble_theta, completeness_residual,
                              matrix_from_json, metric_weights, random_dyson_pencil,
                              solve_biorthogonal, spectral_residuals)


def _metric(p, **kw):
    return assemble_theta(solve_biorthogonal(p, **kw))


def test_triangular_hand_case():
    p = Pencil(np.array([[1, 1], [0, 2]]), np.eye(2))
    b = _metric(p, right_scale="peak")
    assert np.allclose(b.eigenvalues, [1, 2])
    assert np.allclose(b.theta, [[1, -1], [-1, 2]], atol=1e-14)
    assert b.positivity > 0


def test_hermitian_definite_hand_case():
    p = Pencil(np.array([[0, 1], [1, 0]]), np.diag([1.0, 2.0]))
    b = _metric(p)
    assert np.allclose(b.eigenvalues, [-2 ** -0.5, 2 ** -0.5], atol=1e-14)
    assert max(b.dieudonne_residuals) < 1e-14
    assert b.positivity > 0


def test_hermitian_operator_gives_identity():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    b = _metric(Pencil(a + a.conj().T, np.eye(5)))
    assert np.allclose(b.theta, np.eye(5), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2 ** 31))
def test_dyson_pencils(dim, seed):
    p = random_dyson_pencil(dim, seed)
    sys = solve_biorthogonal(p)
    b = assemble_theta(sys)
    assert np.abs(b.eigenvalues.imag).max() < 1e-8 * (1 + np.abs(b.eigenvalues).max())
    assert max(b.dieudonne_residuals) < 1e-10
    assert b.hermiticity < 1e-10
    assert b.orthogonality < 1e-10
    assert b.positivity > 0
    assert completeness_residual(sys) < 1e-10
    assert max(spectral_residuals(sys)) < 1e-10


def test_metric_is_dyson_gram_up_to_scale():
    p, omega = random_dyson_pencil(6, seed=11, return_omega=True)
    theta = _metric(p).theta
    gram = omega.conj().T @ omega
    c = np.vdot(gram, theta) / np.vdot(gram, gram)
    assert np.linalg.norm(theta - c * gram) < 1e-9 * np.linalg.norm(theta)


def test_untwisted_dyson_map_gives_identity():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((4, 4))
    b = _metric(Pencil(a + a.T, np.eye(4)))
    assert np.allclose(b.theta, np.eye(4), atol=1e-12)


def test_weights_trivial_for_unit_weight():
    sys = solve_biorthogonal(Pencil(np.array([[1, 2], [0, 3]]), np.eye(2)))
    assert np.allclose(metric_weights(sys), 1.0)


def test_dropping_a_pair_breaks_completeness():
    sys = solve_biorthogonal(random_dyson_pencil(6, seed=2))
    for k in range(6):
        assert completeness_residual(sys.drop(k)) >= 1 - 1e-12


def test_degenerate_spectrum_rejected():
    with pytest.raises(MetricError):
        solve_biorthogonal(Pencil(np.eye(3), np.eye(3)))


def test_singular_weight_rejected():
    with pytest.raises(MetricError):
        solve_biorthogonal(Pencil(np.diag([1.0, 2.0]), np.diag([1.0, 0.0])))


def test_shape_validation():
    with pytest.raises(MetricError):
        Pencil(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(MetricError):
        Pencil(np.eye(MAX_DIM + 1), np.eye(MAX_DIM + 1))
    with pytest.raises(MetricError):
        solve_biorthogonal(Pencil(np.array([[1, 1], [0, 2]]), np.eye(2)), right_scale="max")


def test_json_round_trip():
    p = random_dyson_pencil(3, seed=1)
    q = Pencil.from_json(p.to_json())
    assert np.array_equal(p.H, q.H) and np.array_equal(p.W, q.W)
    only_h = Pencil.from_dict({"H": json.loads(p.to_json())["H"]})
    assert np.array_equal(only_h.W, np.eye(3))
    with pytest.raises(MetricError):
        Pencil.from_dict({"H": [], "X": []})
    with pytest.raises(MetricError):
        matrix_from_json([[1, 2]])


def test_report_is_json_serializable():
    b = _metric(random_dyson_pencil(4, seed=9))
    rep = json.loads(json.dumps(b.report()))
    assert rep["positive_definite"] is True
    assert len(rep["eigenvalues"]) == 4
