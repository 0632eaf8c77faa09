import json
import os

import numpy as np
import pytest

from nkcurves import s3s3
from nkcurves.exceptions import PreconditionError

TABLES = os.path.join(os.path.dirname(__file__), "..", "tables")


def test_committed_structure_constants_match():
    with open(os.path.join(TABLES, "s3s3_structure_constants.json")) as fh:
        c = np.array(json.load(fh)["constants"])
    for i in range(6):
        assert np.allclose(c[i], s3s3.dxi_tensor(i))


def test_maurer_cartan_d_squared():
    for i in range(6):
        xi = np.zeros(6)
        xi[i] = 1.0
        ddxi = s3s3.exterior_derivative_invariant(s3s3.dxi_tensor(i), 2)
        assert np.abs(ddxi).max() < 1e-14
    # also on a non-invariant-looking combination
    rng = np.random.default_rng(0)
    alpha = rng.standard_normal(6)
    d1 = s3s3.exterior_derivative_invariant(alpha, 1)
    assert np.abs(s3s3.exterior_derivative_invariant(d1, 2)).max() < 1e-13


def test_b0_is_the_swap_j():
    s = s3s3.s3s3_background(b=0.0)
    swap = np.zeros((6, 6))
    swap[3:, :3] = np.eye(3)       # J xi_i = xi'_i
    swap[:3, 3:] = -np.eye(3)      # J xi'_i = -xi_i
    # j_matrix acts on tangent coordinates; on the dual it is the transpose
    assert np.abs(s.j_matrix - swap.T).max() < 1e-14


def test_metric_j_invariance_across_family():
    for a, b in ((1.0, 0.0), (1.0, -0.5), (1.3, 0.4), (2.0, -1.2)):
        s = s3s3.s3s3_background(a=a, b=b)
        assert np.abs(s.j_matrix @ s.j_matrix + np.eye(6)).max() < 1e-12
        assert np.abs(s.j_matrix.T @ s.gram @ s.j_matrix - s.gram).max() < 1e-12
        assert np.abs(s.omega_tensor + s.omega_tensor.T).max() < 1e-12


def test_b0_fails_type_condition():
    assert s3s3.type_residual(0.0) > 0.01


def test_find_nk_metric():
    rep = s3s3.find_nk_metric()
    assert rep["achieved"]
    assert rep["residual"] < 1e-8
    assert rep["b_star"] == pytest.approx(-0.5, abs=1e-6)
    # determinism
    rep2 = s3s3.find_nk_metric()
    assert rep2["b_star"] == rep["b_star"]


def test_invalid_inputs():
    with pytest.raises(PreconditionError):
        s3s3.s3s3_background(a=1.0, b=1.5)    # not positive definite
    with pytest.raises(PreconditionError):
        s3s3.find_nk_metric(search=(0.5, 0.1))
