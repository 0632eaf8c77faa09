"""Acceptance criteria, one test per criterion, with printed pass/fail lines.

Frozen golden values, derived once from independent oracles and pinned here:
  LAMBDA_GOLDEN = -1.0       structure constant in d omega = 3 lambda Re(Omega)
                             on the unit S6 with J_p v = p v and omega = g(., J.)
  B_STAR = -0.5              nearly Kähler coupling in the S3 x S3 metric family
                             g = a (xi^2 + xi'^2) + b (xi xi' + xi' xi), a = 1
"""

import json
import math
import os
import time

import numpy as np
from scipy.integrate import quad

from nkcurves import backgrounds, cli, curves, moduli, octonion, s3s3

LAMBDA_GOLDEN = -1.0     # [DERIVED] frozen; re-derived below from quadratures
B_STAR = -0.5            # [DERIVED] frozen; golden-section search must agree

E7 = np.eye(7)
TRIPLE = (E7[0], E7[1], E7[2])


def check(criterion, name, value, bound, comparison="<"):
    ok = value < bound if comparison == "<" else value > bound
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {criterion}] {name}: {value:.3e} {comparison} "
          f"{bound:.1e} ... {status}")
    assert ok, f"criterion {criterion}: {name}"


def test_criterion_1_octonion_suite():
    t0 = time.time()
    rng = np.random.default_rng(100)
    x = rng.standard_normal((10_000, 8))
    y = rng.standard_normal((10_000, 8))
    z = rng.standard_normal((10_000, 8))
    mul = octonion.oct_mul
    nx, ny, nz = (octonion.oct_norm(v) for v in (x, y, z))

    r_norm = np.abs(octonion.oct_norm(mul(x, y)) - nx * ny) / (nx * ny)
    check(1, "norm multiplicativity", float(r_norm.max()), 1e-12)

    r_alt = np.linalg.norm(mul(mul(x, x), y) - mul(x, mul(x, y)), axis=1) \
        / (nx ** 2 * ny)
    check(1, "alternativity", float(r_alt.max()), 1e-12)

    r_mou = np.linalg.norm(mul(mul(mul(x, y), x), z)
                           - mul(x, mul(y, mul(x, z))), axis=1) \
        / (nx ** 2 * ny * nz)
    check(1, "Moufang identity", float(r_mou.max()), 1e-12)

    e = np.eye(8)
    witness = np.abs(mul(mul(e[1], e[2]), e[4])
                     - mul(e[1], mul(e[2], e[4]))).max()
    check(1, "non-associativity witness", float(witness), 1.0, ">")
    check(1, "runtime [s]", time.time() - t0, 5.0)


def test_criterion_2_s6_structure():
    bg = backgrounds.s6_background()
    inv = backgrounds.structure_invariants(bg, 1000, seed=0)
    check(2, "J^2 = -id", inv["j_squared"], 1e-10)
    check(2, "metric compatibility", inv["metric_compat"], 1e-10)
    check(2, "omega = g(., J.)", inv["omega_consistency"], 1e-10)

    g = octonion.random_g2(seed=200)
    pts = bg.sample_points(200, seed=1)
    v = bg.dprojection(pts, np.random.default_rng(2).standard_normal((200, 3, 7)))
    gp, gv = g.apply(pts), np.stack([g.apply(v[:, i, :]) for i in range(3)], axis=1)
    r_w = np.abs(bg.omega.evaluator(pts, v[:, :2, :])
                 - bg.omega.evaluator(gp, gv[:, :2, :])).max()
    r_ro = np.abs(bg.re_omega.evaluator(pts, v)
                  - bg.re_omega.evaluator(gp, gv)).max()
    check(2, "G2-equivariance of omega", float(r_w), 1e-10)
    check(2, "G2-equivariance of Re(Omega)", float(r_ro), 1e-10)


def test_criterion_3_theorem_hypothesis_on_s6():
    t0 = time.time()
    bg = backgrounds.s6_background()
    pts = bg.sample_points(100, seed=3)
    fracs = backgrounds.domega_type_fraction(bg, pts)
    check(3, "(2,1)+(1,2) fraction of d-omega (100 pts)",
          float(fracs.max()), 1e-6)

    lam = backgrounds.lambda_estimate(bg, points=pts[:50])
    check(3, "lambda_std / lambda_mean",
          lam["lambda_std"] / abs(lam["lambda_mean"]), 1e-5)
    check(3, "d omega = 3 lambda Re(Omega) residual", lam["max_residual"], 1e-5)
    check(3, "|lambda - golden(-1)|",
          abs(lam["lambda_mean"] - LAMBDA_GOLDEN), 1e-8)

    second = backgrounds.second_structure_equation_residual(
        bg, points=pts[:20], lam=lam["lambda_mean"])
    check(3, "d Im(Omega) = -2 lambda omega^2 residual", second, 1e-5)
    check(3, "runtime [s]", time.time() - t0, 60.0)


def test_criterion_4_s3s3():
    t0 = time.time()
    dd = max(np.abs(s3s3.exterior_derivative_invariant(
        s3s3.dxi_tensor(i), 2)).max() for i in range(6))
    check(4, "Maurer-Cartan d^2 = 0", float(dd), 1e-14)
    check(4, "b = 0 type residual", s3s3.type_residual(0.0), 0.01, ">")
    rep = s3s3.find_nk_metric()
    check(4, "search residual at b*", rep["residual"], 1e-8)
    check(4, "|b* - golden(-1/2)|", abs(rep["b_star"] - B_STAR), 1e-6)
    check(4, "runtime [s]", time.time() - t0, 10.0)


def test_criterion_5_curves():
    m5 = curves.great_sphere_curve(TRIPLE, 5)
    check(5, "great-sphere CR residual (level 5)",
          curves.cr_residual(m5).max, 1e-8)

    m6 = curves.great_sphere_curve(TRIPLE, 6)
    vol6 = curves.curve_volume(m6)
    check(5, "volume vs 4*pi (level 6)",
          abs(vol6 - 4 * math.pi) / (4 * math.pi), 1e-5)

    m3 = curves.great_sphere_curve(TRIPLE, 3)
    err3 = abs(curves.curve_volume(m3) - 4 * math.pi)
    err6 = abs(vol6 - 4 * math.pi)
    order = math.log(err3 / err6) / math.log(8.0)
    check(5, "observed convergence order", order, 2.0, ">")

    area = curves.riemannian_area(m3)
    vol = curves.curve_volume(m3)
    check(5, "Wirtinger equality on holomorphic curve",
          abs(area - vol) / area, 1e-5)
    rng = np.random.default_rng(7)
    mp = m3.with_vertices(m3.background.project(
        m3.vertices + 0.05 * rng.standard_normal(m3.vertices.shape)))
    gap = (curves.riemannian_area(mp) - curves.curve_volume(mp)) \
        / curves.riemannian_area(mp)
    check(5, "Wirtinger strict inequality gap (perturbed)", gap, 1e-3, ">")


def test_criterion_6_main_theorem_at_desk_scale():
    t0 = time.time()
    # (a) isometric G2-orbit family
    base = curves.great_sphere_curve(TRIPLE, 3)
    orbit = moduli.g2_orbit_family(base, steps=20)
    drift = moduli.volume_drift(orbit)
    check(6, "(a) G2-orbit relative drift (20 steps)",
          drift["relative_drift"], 1e-8)

    # (b) continued non-isometric family
    base2 = curves.great_sphere_curve(TRIPLE, 2)
    drive = moduli.random_normal_drive(1e-2, seed=600)
    res = moduli.continue_curve(base2, drive, steps=20, residual_budget=1e-6)
    assert res.converged, res.message
    drift2 = moduli.volume_drift(res.path)
    check(6, "(b) continued-family relative drift",
          drift2["relative_drift"], 1e-4)

    # (c) hypothesis-violating torus family, against independent oracles
    bg = backgrounds.torus_testbed("sin(x5)")
    fam = moduli.subtorus_exact_family(bg, np.eye(6)[4], steps=128,
                                       resolution=12, t_max=0.25)
    drift3 = moduli.volume_drift(fam)
    check(6, "(c) counterexample relative drift",
          drift3["relative_drift"], 1e-2, ">")
    rep = moduli.stokes_check(fam)
    # oracle 1: closed-form volume function Vol(t) = (2 pi)^2 exp(sin(pi t / 2))
    lhs_oracle = (2 * math.pi) ** 2 * (math.e - 1.0)
    check(6, "(c) lhs vs closed-form oracle",
          abs(rep.lhs - lhs_oracle) / lhs_oracle, 1e-12)
    # oracle 2: dense quadrature of the chain integral in the x5 coordinate
    rhs_oracle = (2 * math.pi) ** 2 * quad(
        lambda s: math.exp(math.sin(s)) * math.cos(s), 0.0, math.pi / 2)[0]
    check(6, "(c) rhs vs dense-quadrature oracle",
          abs(rep.rhs - rhs_oracle) / abs(rhs_oracle), 1e-4)
    check(6, "(c) Stokes identity |lhs - rhs| / |lhs|",
          rep.residual / abs(rep.lhs), 1e-5)

    # (d) pushforward vanishing on S6: the chain integral itself
    s6rep = moduli.stokes_check(res.path)
    check(6, "(d) |chain integral| / Vol scale",
          abs(s6rep.rhs) / s6rep.volume_scale, 1e-5)
    check(6, "runtime [s]", time.time() - t0, 300.0)


def test_criterion_7_hausdorff():
    rng = np.random.default_rng(700)
    worst = 0.0
    for _ in range(1000):
        x, y, z = (rng.standard_normal((rng.integers(1, 7), 7))
                   for _ in range(3))
        dxy = moduli.hausdorff_distance(x, y)
        assert dxy == moduli.hausdorff_distance(y, x) >= 0.0
        assert moduli.hausdorff_distance(x, x) == 0.0
        slack = moduli.hausdorff_distance(x, z) - dxy \
            - moduli.hausdorff_distance(y, z)
        worst = max(worst, slack)
    check(7, "triangle inequality slack (1000 triples)", worst, 1e-12)

    # fully orthogonal associative 3-planes do not exist in Im O (the cross
    # product of two vectors orthogonal to a quaternion algebra lands back in
    # it), so the second sphere uses the maximally orthogonal triple e1,e4,e5
    a = curves.great_sphere_curve(TRIPLE, 3)
    b = curves.great_sphere_curve((E7[0], E7[3], E7[4]), 3)
    fast = moduli.hausdorff_distance(a, b)
    sup_ab = max(min(float(np.linalg.norm(p - q)) for q in b.vertices)
                 for p in a.vertices)
    sup_ba = max(min(float(np.linalg.norm(p - q)) for q in a.vertices)
                 for p in b.vertices)
    check(7, "|fast - brute-force double loop|",
          abs(fast - max(sup_ab, sup_ba)), 1e-12)


def test_criterion_8_reproducibility(tmp_path):
    cases = [
        (["verify-structure", "--background", "s6", "--samples", "20"],
         "verify-structure"),
        (["find-nk-metric"], "find-nk-metric"),
        (["family", "--drive", "g2-orbit", "--steps", "4",
          "--resolution", "2"], "family"),
    ]
    for argv, command in cases:
        first = str(tmp_path / f"{command}-1")
        second = str(tmp_path / f"{command}-2")
        assert cli.main(argv + ["--out", first]) == 0
        assert cli.rerun_from_report(
            os.path.join(first, f"{command}.json"), out=second) == 0
        with open(os.path.join(first, f"{command}.json")) as fh:
            a = json.load(fh)
        with open(os.path.join(second, f"{command}.json")) as fh:
            b = json.load(fh)
        for rep in (a, b):
            rep.pop("generated_at")
            rep["config"].pop("out")
        same = a == b
        print(f"[criterion 8] {command}: regenerated report identical "
              f"apart from timestamp ... {'PASS' if same else 'FAIL'}")
        assert same
