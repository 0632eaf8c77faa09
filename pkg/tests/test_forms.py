import math

import numpy as np
import pytest

from nkcurves import backgrounds, forms
from nkcurves.exceptions import PreconditionError

BG = backgrounds.torus_testbed()   # flat background for calculus checks


def covector_form(i):
    return forms.FormField(1, lambda p, v, i=i: v[:, 0, i])


def test_wedge_determinant_convention():
    dx1, dx2 = covector_form(0), covector_form(1)
    w = forms.wedge(dx1, dx2)
    p = np.zeros(6)
    u, v = np.eye(6)[0], np.eye(6)[1]
    assert w(p, np.stack([u, v])) == pytest.approx(1.0)
    assert w(p, np.stack([v, u])) == pytest.approx(-1.0)
    # (dx1 ^ dx2)(u, v) = u1 v2 - u2 v1 on general vectors
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((2, 6))
    assert w(p, np.stack([a, b])) == pytest.approx(a[0] * b[1] - a[1] * b[0])


def test_exterior_derivative_hand_oracle():
    # d(sin(x1) dx2) = cos(x1) dx1 ^ dx2
    alpha = forms.FormField(1, lambda p, v: np.sin(p[:, 0]) * v[:, 0, 1])
    p = np.array([0.3, 1.1, 0.0, 0.0, 0.0, 0.0])
    val = forms.exterior_derivative(alpha, BG, p, np.eye(6)[:2])
    assert val == pytest.approx(math.cos(0.3), abs=1e-10)
    # antisymmetry of the result
    val2 = forms.exterior_derivative(alpha, BG, p, np.eye(6)[:2][::-1])
    assert val2 == pytest.approx(-math.cos(0.3), abs=1e-10)


def test_d_squared_vanishes():
    alpha = forms.FormField(
        1, lambda p, v: np.sin(p[:, 0]) * np.cos(p[:, 4]) * v[:, 0, 1])

    def dalpha_eval(p, v):
        return forms.exterior_derivative_batch(alpha, BG, p, v)

    dalpha = forms.FormField(2, dalpha_eval)
    p = np.array([0.2, -0.4, 0.9, 0.0, 1.3, 0.5])
    vecs = np.random.default_rng(1).standard_normal((3, 6))
    val = forms.exterior_derivative(dalpha, BG, p, vecs)
    assert abs(val) < 1e-9


def test_unitary_coframe_preconditions():
    j = np.zeros((6, 6))
    with pytest.raises(PreconditionError):
        forms.UnitaryCoframe(j, np.eye(6))   # J^2 != -1
    j_good = backgrounds.TorusBackground.J0
    g_bad = np.diag([1.0, 2.0, 1, 1, 1, 1])  # not J-invariant
    with pytest.raises(PreconditionError):
        forms.UnitaryCoframe(j_good, g_bad)


def test_type_decomposition_of_omega():
    bg = backgrounds.s6_background()
    p = bg.sample_points(1, seed=3)[0]
    frame, gram, j6 = bg.frame_at(p)
    cof = forms.UnitaryCoframe(j6, gram)
    w = forms.form_tensor(bg.omega, bg, p, frame)
    spec = forms.type_decompose(w, cof)
    assert spec.fraction((1, 1)) == pytest.approx(1.0, abs=1e-12)
    assert spec.pythagoras_residual() < 1e-12
    assert spec.total == pytest.approx(math.sqrt(3.0), abs=1e-12)


def test_step_validation():
    alpha = forms.FormField(1, lambda p, v: v[:, 0, 0], smoothness_radius=0.5)
    with pytest.raises(PreconditionError):
        forms.exterior_derivative(alpha, BG, np.zeros(6), np.eye(6)[:2], step=0.7)


def test_unitary_coframe_invariants():
    bg = backgrounds.s6_background()
    p = bg.sample_points(1, seed=10)[0]
    frame, gram, j6 = bg.frame_at(p)
    cof = forms.build_unitary_coframe(j6, gram)
    rng = np.random.default_rng(11)
    v = rng.standard_normal(6)
    # theta(Jv) = i theta(v)
    assert np.abs(cof.theta(j6 @ v) - 1j * cof.theta(v)).max() < 1e-10
    # the three (1,0) tangent vectors are unitary: h(Z_a, Z_b) = delta/2
    h = cof.z @ cof.z.conj().T
    assert np.abs(h - np.eye(3) / 2.0).max() < 1e-10


def test_tangent_project():
    bg = backgrounds.s6_background()
    p = bg.sample_points(1, seed=12)[0]
    # radial direction dies
    assert np.abs(backgrounds.tangent_project(bg, p, p).vec).max() < 1e-14
    # idempotence
    v = np.random.default_rng(13).standard_normal(7)
    tv = backgrounds.tangent_project(bg, p, v)
    tv2 = backgrounds.tangent_project(bg, p, tv.vec)
    assert np.abs(tv2.vec - tv.vec).max() < 1e-14
    assert abs(np.dot(tv.vec, p)) < 1e-12
    with pytest.raises(PreconditionError):
        backgrounds.tangent_project(bg, 2.0 * p, v)


def test_type_decompose_coframe_independent():
    # same tensor, two different tangent bases at the same point
    bg = backgrounds.s6_background()
    p = bg.sample_points(1, seed=14)[0]
    frame, gram, j6 = bg.frame_at(p)
    dw = bg.domega_tensor(p)
    spec1 = forms.type_decompose(dw, forms.build_unitary_coframe(j6, gram))
    rng = np.random.default_rng(15)
    mix = np.linalg.qr(rng.standard_normal((6, 6)))[0]
    frame2 = mix.T @ frame
    j6b = np.einsum("in,jn->ij", frame2, bg.j_apply(p, frame2))
    spec2 = forms.type_decompose(_tensor_on(dw, frame, frame2),
                                 forms.build_unitary_coframe(j6b, np.eye(6)))
    for key in spec1.norms:
        assert abs(spec1.norms[key] - spec2.norms[key]) < 1e-9


def _tensor_on(tensor, frame_old, frame_new):
    # change of basis: components of the same form on the new frame
    m = frame_new @ frame_old.T    # new basis in old-frame coordinates
    t = tensor
    for _ in range(t.ndim):
        t = np.tensordot(t, m, axes=([0], [1]))
    return t
