"""Families of pseudoholomorphic curves.

A family is a path in moduli space sampled at finitely many times, with all
meshes sharing one set of faces.  The module measures volume drift along
families (the constancy theorem), checks the Stokes identity
Vol(end) - Vol(start) = integral of d-omega over the swept 3-chain, and
continues curves through the moduli space by damped least-squares projection
onto the discrete pseudoholomorphic locus.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import sparse
from scipy.optimize import least_squares
from scipy.spatial.distance import cdist

from . import curves as curves_mod
from . import forms, octonion
from .backgrounds import S6Background
from .exceptions import PreconditionError


# -- Hausdorff distance -----------------------------------------------------

def _point_sample(x):
    if isinstance(x, curves_mod.CurveMesh):
        return x.vertices
    return np.atleast_2d(np.asarray(x, dtype=float))


def hausdorff_distance(x, y):
    """Hausdorff distance between finite point samples (chordal metric).

    d_H(X, Y) = max(sup_x inf_y d(x,y), sup_y inf_x d(x,y)).
    """
    xs, ys = _point_sample(x), _point_sample(y)
    if xs.size == 0 or ys.size == 0:
        raise PreconditionError("Hausdorff distance needs nonempty samples")
    d = cdist(xs, ys)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# -- family paths -----------------------------------------------------------

@dataclass
class FamilyPath:
    times: np.ndarray
    curves: list
    provenance: str            # "exact-family" | "continued"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.curves):
            raise PreconditionError("times and curves disagree in length")
        if len(self.curves) >= 2 and not np.all(np.diff(self.times) > 0):
            raise PreconditionError("times must be strictly increasing")
        faces0 = self.curves[0].faces
        for c in self.curves[1:]:
            if not np.array_equal(c.faces, faces0):
                raise PreconditionError("family curves must share mesh faces")

    @property
    def background(self):
        return self.curves[0].background

    def volumes(self):
        return np.array([curves_mod.curve_volume(c) for c in self.curves])

    def residuals(self):
        return np.array([curves_mod.cr_residual(c).l2 for c in self.curves])

    def hausdorff_steps(self):
        return np.array([
            hausdorff_distance(a, b) for a, b in zip(self.curves, self.curves[1:])
        ])

    def validate(self, residual_budget=None, step_bound=None):
        if residual_budget is not None:
            worst = self.residuals().max()
            if worst > residual_budget:
                raise PreconditionError(
                    f"family residual {worst:.2e} exceeds budget {residual_budget:.0e}")
        if step_bound is not None and len(self.curves) >= 2:
            worst = self.hausdorff_steps().max()
            if worst > step_bound:
                raise PreconditionError(
                    f"Hausdorff step {worst:.2e} exceeds bound {step_bound:.0e}")


def volume_drift(path: FamilyPath):
    vols = path.volumes()
    drift = float(np.abs(vols - vols[0]).max())
    scale = abs(vols[0])
    return {
        "times": path.times.tolist(),
        "volumes": vols.tolist(),
        "max_drift": drift,
        "relative_drift": drift / scale if scale > 0 else drift,
    }


# -- exact families ---------------------------------------------------------

def g2_orbit_path(t):
    """One-parameter G2 path through the identity, rotating e1 toward e7."""
    f1 = math.cos(t) * octonion.STANDARD_TRIPLE[0] + math.sin(t) * np.eye(7)[6]
    return octonion.basic_triple_automorphism(
        f1, octonion.STANDARD_TRIPLE[1], octonion.STANDARD_TRIPLE[2])


def g2_orbit_family(base_curve, steps=20, angle=math.pi / 4):
    """Isometric family: the G2 orbit of a curve on S6."""
    if not isinstance(base_curve.background, S6Background):
        raise PreconditionError("G2 orbits require an S6 background")
    times = np.linspace(0.0, 1.0, steps + 1)
    meshes = [base_curve.transformed(g2_orbit_path(angle * t)) for t in times]
    return FamilyPath(times, meshes, "exact-family")


def subtorus_exact_family(background, shift_direction, steps=64, resolution=16,
                          t_max=1.0):
    """Translated subtorus family on a torus testbed (exactly holomorphic)."""
    times = np.linspace(0.0, 1.0, steps + 1)
    meshes = [
        curves_mod.subtorus_family(t_max * t, background, shift_direction,
                                   resolution)
        for t in times
    ]
    return FamilyPath(times, meshes, "exact-family")


# -- continuation -----------------------------------------------------------

def random_normal_drive(magnitude, seed=0):
    """A fixed random smooth ambient vector field, scaled to `magnitude`.

    Returns drive(t, mesh) -> per-vertex displacement for one unit of time.
    """
    rng = np.random.default_rng(seed)
    const = rng.standard_normal(7)
    lin = rng.standard_normal((7, 7))

    def drive(t, mesh):
        v = mesh.vertices
        field = const[None, :] + np.sin(v) @ lin.T
        field = mesh.background.dprojection(v, field)   # tangent part only
        scale = np.linalg.norm(field, axis=1).max()
        return magnitude * field / max(scale, 1e-300)

    return drive


def _vertex_adjacency(mesh):
    """Sparsity pattern: residual components vs vertex coordinates."""
    nf, nv = len(mesh.faces), len(mesh.vertices)
    n = mesh.background.ambient_dim
    rows, cols = [], []
    for fi, f in enumerate(mesh.faces):
        for comp in range(n):
            for vi in f:
                for c in range(n):
                    rows.append(fi * n + comp)
                    cols.append(vi * n + c)
    for vi in range(nv):
        for c in range(n):
            rows.append(nf * n + vi)
            cols.append(vi * n + c)
    data = np.ones(len(rows), dtype=np.int8)
    return sparse.coo_matrix((data, (rows, cols)),
                             shape=(nf * n + nv, nv * n)).tocsr()


def _cr_residual_vector(mesh):
    """Per-face CR defect sqrt(w) * (J t1 + t2), flattened (n comps/face)."""
    bg = mesh.background
    e1, e2 = mesh.face_edges()
    centroid = mesh.corners()[0] + (e1 + e2) / 3.0
    proj = bg.project(centroid)
    w = bg.dprojection(centroid, np.stack([e1, e2], axis=1))
    u1, u2 = w[:, 0, :], w[:, 1, :]
    n1 = np.maximum(np.linalg.norm(u1, axis=1), 1e-300)
    t1 = u1 / n1[:, None]
    u2p = u2 - np.einsum("fn,fn->f", u2, t1)[:, None] * t1
    n2 = np.maximum(np.linalg.norm(u2p, axis=1), 1e-300)
    t2 = u2p / n2[:, None]
    defect = bg.j_apply(proj, t1) + t2
    return (np.sqrt(mesh.face_weights)[:, None] * defect).ravel()


def project_to_holomorphic(mesh, residual_budget, max_iter=60):
    """Damped least-squares projection onto the discrete CR locus.

    Unknowns are raw ambient vertex coordinates; the residual is evaluated on
    the retracted (projected-to-manifold) mesh, plus small penalty terms
    pinning the off-manifold directions.  Returns (mesh, converged, residual).
    """
    bg = mesh.background
    shape = mesh.vertices.shape

    def assemble(x):
        return mesh.with_vertices(bg.project(x.reshape(shape)))

    def fun(x):
        m = assemble(x)
        anchor = np.linalg.norm(x.reshape(shape), axis=1) - \
            np.linalg.norm(mesh.vertices, axis=1)
        return np.concatenate([_cr_residual_vector(m), 1e-3 * anchor])

    sp = _vertex_adjacency(mesh)
    res = least_squares(fun, mesh.vertices.ravel(), jac_sparsity=sp,
                        method="trf", tr_solver="lsmr", max_nfev=max_iter,
                        xtol=1e-14, ftol=1e-14, gtol=1e-14)
    out = assemble(res.x)
    achieved = curves_mod.cr_residual(out).l2
    return out, bool(achieved < residual_budget), achieved


@dataclass
class ContinuationResult:
    path: FamilyPath
    converged: bool
    message: str
    steps_completed: int


def continue_curve(start, drive, steps=20, residual_budget=1e-6,
                   hausdorff_step_bound=0.2, max_bisections=4, gn_max_iter=60):
    """Continue a curve along a drive, staying on the pseudoholomorphic locus.

    drive: either callable(t) -> G2Element (exact isometric path, no
    correction applied) or callable(t, mesh) -> per-vertex displacement per
    unit time.  Returns a ContinuationResult; a stall yields converged=False
    with the partial path, not an exception.
    """
    start_res = curves_mod.cr_residual(start).l2
    if start_res > residual_budget / 10.0:
        raise PreconditionError(
            f"seed residual {start_res:.2e} above budget/10")

    times = [0.0]
    meshes = [start]
    t = 0.0
    dt = 1.0 / steps
    while t < 1.0 - 1e-12:
        step = min(dt, 1.0 - t)
        accepted = False
        for _ in range(max_bisections + 1):
            t_next = t + step
            if _is_g2_path(drive):
                cand = start.transformed(drive(t_next))
                ok, achieved = True, curves_mod.cr_residual(cand).l2
            else:
                moved = meshes[-1].with_vertices(
                    meshes[-1].background.project(
                        meshes[-1].vertices + step * drive(t, meshes[-1])))
                cand, ok, achieved = project_to_holomorphic(
                    moved, residual_budget, max_iter=gn_max_iter)
            if ok and achieved <= residual_budget and \
                    hausdorff_distance(meshes[-1], cand) <= hausdorff_step_bound:
                accepted = True
                break
            step /= 2.0
        if not accepted:
            return ContinuationResult(
                FamilyPath(np.array(times), meshes, "continued"),
                False,
                f"stalled at t={t:.4f}: residual {achieved:.2e} "
                f"over budget {residual_budget:.0e}",
                len(times) - 1,
            )
        t = t_next
        times.append(t)
        meshes.append(cand)
    provenance = "exact-family" if _is_g2_path(drive) else "continued"
    return ContinuationResult(
        FamilyPath(np.array(times), meshes, provenance), True, "completed",
        len(times) - 1)


def _is_g2_path(drive):
    return getattr(drive, "is_g2_path", False)


def g2_path_drive(angle=math.pi / 4):
    """Drive wrapper for `continue_curve`: t -> G2 element along the orbit."""

    def drive(t):
        return g2_orbit_path(angle * t)

    drive.is_g2_path = True
    return drive


# -- the Stokes identity ----------------------------------------------------

# prism (bottom 0,1,2; top 3,4,5 matching) split into three tetrahedra whose
# signed volumes sum to the prism's for consistent orientation
_PRISM_TETS = ((0, 1, 2, 3), (1, 2, 3, 4), (2, 3, 4, 5))


@dataclass
class StokesReport:
    lhs: float
    rhs: float
    residual: float
    per_step: list
    volume_scale: float

    def to_dict(self):
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "volume_scale": self.volume_scale,
            "per_step": self.per_step,
        }


def _domega_eval(bg, pts, vecs, step=None):
    """Batched d-omega of the projection-pullback extension at ambient points."""
    if bg.exact_domega is not None:
        return forms.extended_eval(bg.exact_domega, bg, pts, vecs)
    return forms.exterior_derivative_batch(bg.omega, bg, pts, vecs, step)


def _chain_integral(mesh_a, mesh_b):
    """Integral of d-omega over the prism chain swept between two meshes.

    Midpoint quadrature per tetrahedron: vol-form factor 1/6, edges from the
    tet's first vertex, chain oriented as (surface orientation) x (time).
    """
    bg = mesh_a.background
    p0 = mesh_a.corners()[0]
    ea1, ea2 = mesh_a.face_edges()
    q0 = mesh_b.corners()[0]
    eb1, eb2 = mesh_b.face_edges()
    d0 = curves_mod._wrap_edges(bg, q0 - p0)
    # six prism corners in the chart of the bottom base vertex
    corners = np.stack([
        np.zeros_like(p0), ea1, ea2,
        d0, d0 + eb1, d0 + eb2,
    ], axis=1)                                          # (F, 6, n)
    total = 0.0
    for tet in _PRISM_TETS:
        v0 = corners[:, tet[0], :]
        edges = np.stack([corners[:, tet[i], :] - v0 for i in (1, 2, 3)], axis=1)
        center = p0 + v0 + edges.sum(axis=1) / 4.0
        vals = _domega_eval(bg, center, edges)
        total += float(vals.sum()) / 6.0
    return total


def stokes_check(path: FamilyPath, tolerance=None):
    """Verify Vol(end) - Vol(start) = integral of d-omega over the swept chain."""
    if len(path.curves) < 2:
        raise PreconditionError("stokes_check needs at least two curves")
    vols = path.volumes()
    lhs = float(vols[-1] - vols[0])
    per_step = []
    rhs = 0.0
    for k in range(len(path.curves) - 1):
        contrib = _chain_integral(path.curves[k], path.curves[k + 1])
        rhs += contrib
        per_step.append({
            "t0": float(path.times[k]),
            "t1": float(path.times[k + 1]),
            "chain_integral": contrib,
            "volume_increment": float(vols[k + 1] - vols[k]),
        })
    scale = float(np.abs(vols).max())
    return StokesReport(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
                        per_step=per_step, volume_scale=scale)
