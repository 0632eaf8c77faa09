import numpy as np
import pytest

from nkcurves import backgrounds, forms
from nkcurves.exceptions import PreconditionError, StructureNotApplicableError
from nkcurves.fields import TrigPolynomial


def test_field_parsing():
    f = TrigPolynomial.parse("sin(x5) + 2*cos(3*x1)")
    p = np.array([[0.4, 0, 0, 0, 1.1, 0]])
    assert f.value(p)[0] == pytest.approx(np.sin(1.1) + 2 * np.cos(1.2))
    g = f.gradient(p)[0]
    assert g[4] == pytest.approx(np.cos(1.1))
    assert g[0] == pytest.approx(-6 * np.sin(1.2))
    assert g[1] == 0.0


def test_field_rejections():
    for bad in ("sin(x5/2)", "exp(x1)", "x7", "sin(x1*x2)", "sin(x1 + 1)"):
        with pytest.raises(PreconditionError):
            TrigPolynomial.parse(bad)


def test_kahler_torus():
    bg = backgrounds.torus_testbed()
    inv = backgrounds.structure_invariants(bg, 100, seed=0)
    assert max(inv.values()) == 0.0
    rep = backgrounds.lambda_estimate(bg, n=5, seed=1)
    assert rep["lambda_mean"] == 0.0 and rep["max_residual"] == 0.0
    with pytest.raises(StructureNotApplicableError):
        backgrounds.second_structure_equation_residual(bg, n=2)


def test_testbed_violates_hypothesis():
    bg = backgrounds.torus_testbed("sin(x5)")
    pts = bg.sample_points(10, seed=2)
    fracs = backgrounds.domega_type_fraction(bg, pts)
    # d omega = e^f df ^ omega_0 with df along x5: fully (2,1)+(1,2)
    assert fracs.min() > 0.99


def test_exact_domega_matches_finite_differences():
    bg = backgrounds.torus_testbed("sin(x5) + cos(2*x1)")
    p = bg.sample_points(1, seed=3)[0]
    frame, _, _ = bg.frame_at(p)
    exact = forms.form_tensor(bg.exact_domega, bg, p, frame)
    fd = forms.d_form_tensor(bg.omega, bg, p, frame)
    assert np.abs(exact - fd).max() < 1e-9
