import numpy as np
import pytest

from nkcurves import backgrounds, forms, octonion

BG = backgrounds.s6_background()


def test_structure_invariants():
    inv = backgrounds.structure_invariants(BG, 200, seed=0)
    assert max(inv.values()) < 1e-12


def test_j_is_octonion_multiplication():
    p = np.eye(7)[0]                      # base point e1
    v = np.eye(7)[1]                      # e2
    assert np.allclose(BG.j_apply(p, v), np.eye(7)[2])   # J(e2) = e1 e2 = e3


def test_g2_equivariance():
    g = octonion.random_g2(seed=21)
    pts = BG.sample_points(50, seed=4)
    rng = np.random.default_rng(5)
    v = BG.dprojection(pts, rng.standard_normal((50, 3, 7)))
    gp = g.apply(pts)
    gv = np.stack([g.apply(v[:, i, :]) for i in range(3)], axis=1)
    w = np.abs(BG.omega.evaluator(pts, v[:, :2, :])
               - BG.omega.evaluator(gp, gv[:, :2, :])).max()
    r = np.abs(BG.re_omega.evaluator(pts, v)
               - BG.re_omega.evaluator(gp, gv)).max()
    assert w < 1e-10 and r < 1e-10


def test_domega_type():
    pts = BG.sample_points(10, seed=6)
    fracs = backgrounds.domega_type_fraction(BG, pts)
    assert fracs.max() < 1e-8


def test_lambda_and_structure_equations():
    rep = backgrounds.lambda_estimate(BG, n=10, seed=7)
    assert rep["lambda_mean"] == pytest.approx(BG.lambda_golden, abs=1e-8)
    assert rep["lambda_std"] < 1e-8
    assert rep["max_residual"] < 1e-8
    second = backgrounds.second_structure_equation_residual(
        BG, n=5, seed=8, lam=rep["lambda_mean"])
    assert second < 1e-8


def test_frame_is_adapted():
    p = BG.sample_points(1, seed=9)[0]
    frame, gram, j6 = BG.frame_at(p)
    assert np.abs(frame @ frame.T - np.eye(6)).max() < 1e-12
    assert np.abs(frame @ p).max() < 1e-12
    assert np.abs(j6 @ j6 + np.eye(6)).max() < 1e-12
