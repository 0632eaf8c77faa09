"""Discrete pseudoholomorphic curves as quadrature meshes.

A curve is a triangle mesh: domain parameters (unit sphere for genus 0, the
flat square torus for genus 1), image points on a background manifold, and
per-face domain-area weights.  Integrals over the curve pull the background's
forms back through the nearest-point projection, so for meshes inscribed in a
smooth surface the only integration error is the triangle quadrature rule's.

Meshes are oriented so that the integral of omega is positive; on a
positively oriented pseudoholomorphic face the projected orthonormal tangent
pair (t1, t2) satisfies J t1 = -t2.
"""

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backgrounds as bg_mod
from . import octonion
from .exceptions import MeshQualityError, PreconditionError
from .fields import TrigPolynomial

SCHEMA_VERSION = 1

# 3-point edge-midpoint rule, exact for quadratics on the reference triangle
_GAUSS_BARY = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
_GAUSS_W = np.array([1.0, 1.0, 1.0]) / 3.0


@dataclass
class CurveMesh:
    background: object
    genus: int
    domain_points: np.ndarray   # (V, 3) unit vectors or (V, 2) torus params
    vertices: np.ndarray        # (V, ambient_dim)
    faces: np.ndarray           # (F, 3) int
    face_weights: np.ndarray    # (F,) domain areas

    def __post_init__(self):
        self.domain_points = np.asarray(self.domain_points, dtype=float)
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.faces = np.asarray(self.faces, dtype=int)
        self.face_weights = np.asarray(self.face_weights, dtype=float)

    # -- invariants ---------------------------------------------------------
    def on_manifold_residual(self):
        proj = self.background.project(self.vertices)
        return float(np.abs(proj - self.vertices).max())

    def euler_characteristic(self):
        edges = set()
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                edges.add((min(a, b), max(a, b)))
        return len(self.vertices) - len(edges) + len(self.faces)

    def reference_domain_area(self):
        return 4.0 * math.pi if self.genus == 0 else (2.0 * math.pi) ** 2

    def validate(self, tol=1e-10):
        r = self.on_manifold_residual()
        if r > tol:
            raise MeshQualityError(f"image points off the manifold by {r:.2e}")
        chi = self.euler_characteristic()
        want = 2 if self.genus == 0 else 0
        if chi != want:
            raise MeshQualityError(f"Euler characteristic {chi}, expected {want}")
        if abs(self.face_weights.sum() - self.reference_domain_area()) > 1e-12 * self.reference_domain_area():
            raise MeshQualityError("domain weights do not sum to the domain area")

    # -- helpers ------------------------------------------------------------
    def corners(self):
        v = self.vertices
        return v[self.faces[:, 0]], v[self.faces[:, 1]], v[self.faces[:, 2]]

    def face_edges(self):
        """Edge vectors (p1-p0, p2-p0), wrapped to the minimal image on
        periodic backgrounds so faces crossing the seam stay small."""
        p0, p1, p2 = self.corners()
        return _wrap_edges(self.background, p1 - p0), \
            _wrap_edges(self.background, p2 - p0)

    def flipped(self):
        faces = self.faces[:, [0, 2, 1]].copy()
        return CurveMesh(self.background, self.genus, self.domain_points,
                         self.vertices, faces, self.face_weights)

    def with_vertices(self, vertices):
        return CurveMesh(self.background, self.genus, self.domain_points,
                         np.asarray(vertices, dtype=float), self.faces,
                         self.face_weights)

    def transformed(self, g2_element):
        """Image of the mesh under a G2 element (S6 backgrounds)."""
        return self.with_vertices(g2_element.apply(self.vertices))

    # -- serialization ------------------------------------------------------
    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "background": background_descriptor(self.background),
            "genus": int(self.genus),
            "domain_points": self.domain_points.tolist(),
            "vertices": self.vertices.tolist(),
            "faces": self.faces.tolist(),
            "face_weights": self.face_weights.tolist(),
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def from_dict(cls, data, background=None):
        if background is None:
            background = background_from_descriptor(data["background"])
        return cls(background, data["genus"], np.array(data["domain_points"]),
                   np.array(data["vertices"]), np.array(data["faces"]),
                   np.array(data["face_weights"]))

    @classmethod
    def from_json(cls, path, background=None):
        with open(path) as fh:
            return cls.from_dict(json.load(fh), background)


def background_descriptor(bg):
    if isinstance(bg, bg_mod.S6Background):
        return {"name": "s6"}
    if isinstance(bg, bg_mod.TorusBackground):
        return {"name": "torus", "field": str(bg.field.expr)}
    raise PreconditionError(f"cannot serialize background {bg!r}")


def background_from_descriptor(desc):
    if desc["name"] == "s6":
        return bg_mod.s6_background()
    if desc["name"] == "torus":
        return bg_mod.torus_testbed(TrigPolynomial.parse(desc.get("field", "0")))
    raise PreconditionError(f"unknown background {desc['name']!r}")


# -- icosphere domain -------------------------------------------------------

@lru_cache(maxsize=None)
def icosphere(level):
    """Subdivided icosahedron on the unit sphere: (vertices, faces)."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=int)
    verts = list(map(tuple, verts))
    for _ in range(level):
        verts, faces = _subdivide(verts, faces)
    v = np.array(verts)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v, faces


def _subdivide(verts, faces):
    verts = list(verts)
    cache = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            m = np.array(verts[i]) + np.array(verts[j])
            m /= np.linalg.norm(m)
            cache[key] = len(verts)
            verts.append(tuple(m))
        return cache[key]

    out = []
    for a, b, c in faces:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
    return verts, np.array(out, dtype=int)


def spherical_face_areas(domain_points, faces):
    """Spherical triangle areas by l'Huilier's formula (unit sphere)."""
    p = np.asarray(domain_points)
    a_v, b_v, c_v = p[faces[:, 0]], p[faces[:, 1]], p[faces[:, 2]]

    def arc(u, v):
        return 2.0 * np.arcsin(np.clip(np.linalg.norm(u - v, axis=1) / 2.0, 0, 1))

    a, b, c = arc(b_v, c_v), arc(a_v, c_v), arc(a_v, b_v)
    s = (a + b + c) / 2.0
    t = np.sqrt(np.clip(
        np.tan(s / 2) * np.tan((s - a) / 2) * np.tan((s - b) / 2) * np.tan((s - c) / 2),
        0.0, None))
    return 4.0 * np.arctan(t)


# -- seed curves ------------------------------------------------------------

def great_sphere_curve(triple, resolution=4, orient_positive=True):
    """Totally geodesic 2-sphere in S6 cut out by an associative 3-plane.

    triple: three orthonormal vectors in Im O whose span is closed under the
    cross product (e.g. (e1, e2, e3)).
    """
    f1, f2, f3 = (np.asarray(t, dtype=float) for t in triple)
    basis = np.stack([f1, f2, f3])
    gram_resid = float(np.abs(basis @ basis.T - np.eye(3)).max())
    if gram_resid > 1e-10:
        raise PreconditionError(f"triple not orthonormal (residual {gram_resid:.1e})")
    # closure under cross: each pairwise cross must stay in the span
    for u, v in ((f1, f2), (f2, f3), (f1, f3)):
        w = octonion.cross(u, v)
        resid = float(np.linalg.norm(w - basis.T @ (basis @ w)))
        if resid > 1e-10:
            raise PreconditionError(
                f"span is not associative: cross leaves it by {resid:.1e}")
    dom_v, faces = icosphere(resolution)
    verts = dom_v @ basis
    weights = spherical_face_areas(dom_v, faces)
    bg = bg_mod.s6_background()
    mesh = CurveMesh(bg, 0, dom_v, verts, faces, weights)
    if orient_positive and curve_volume(mesh) < 0:
        mesh = mesh.flipped()
    return mesh


def torus_grid(resolution):
    """Uniform triangulated grid on [0, 2pi)^2: (params (V,2), faces)."""
    m = resolution
    s = np.arange(m) * (2.0 * math.pi / m)
    pu, pv = np.meshgrid(s, s, indexing="ij")
    params = np.stack([pu.ravel(), pv.ravel()], axis=1)
    idx = lambda i, j: (i % m) * m + (j % m)
    faces = []
    for i in range(m):
        for j in range(m):
            faces.append([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)])
            faces.append([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)])
    return params, np.array(faces, dtype=int)


def subtorus_family(t, background, shift_direction=None, resolution=16,
                    orient_positive=True):
    """Flat subtorus in coordinates (x1, x2), shifted by t * 2pi * direction.

    Exactly pseudoholomorphic for the testbed's constant J at any resolution.
    """
    if not isinstance(background, bg_mod.TorusBackground):
        raise PreconditionError("subtorus curves live on a torus background")
    if shift_direction is None:
        shift_direction = np.zeros(6)
    shift = np.asarray(shift_direction, dtype=float)
    params, faces = torus_grid(resolution)
    verts = np.zeros((len(params), 6))
    verts[:, 0] = params[:, 0]
    verts[:, 1] = params[:, 1]
    verts += t * 2.0 * math.pi * shift
    weights = np.full(len(faces), 0.5 * (2.0 * math.pi / resolution) ** 2)
    mesh = CurveMesh(background, 1, params, verts, faces, weights)
    if orient_positive and curve_volume(mesh) < 0:
        mesh = mesh.flipped()
    return mesh


# -- curve functionals ------------------------------------------------------

def _wrap_edges(bg, e):
    period = getattr(bg, "period", None)
    if period is None:
        return e
    return e - period * np.round(e / period)


def _gauss_points(mesh):
    """Quadrature points and edge vectors: (Q (G, F, n), E1, E2)."""
    p0 = mesh.corners()[0]
    e1, e2 = mesh.face_edges()
    q = (p0[None] + _GAUSS_BARY[:, 1][:, None, None] * e1
         + _GAUSS_BARY[:, 2][:, None, None] * e2)          # (G, F, n)
    return q, e1, e2


def _check_degenerate(mesh, e1, e2):
    g11 = np.einsum("fn,fn->f", e1, e1)
    g22 = np.einsum("fn,fn->f", e2, e2)
    g12 = np.einsum("fn,fn->f", e1, e2)
    area2 = g11 * g22 - g12 * g12
    if area2.min() < 1e-28:
        raise MeshQualityError("degenerate face (area < 1e-14)")


def curve_volume(mesh):
    """Signed integral of the Hermitian form over the curve.

    Quadrature of the projection pullback of omega over the flat faces; for a
    mesh inscribed in a smooth surface this integrates the projected curved
    triangles, so the error is the quadrature rule's only.
    """
    q, e1, e2 = _gauss_points(mesh)
    _check_degenerate(mesh, e1, e2)
    bg = mesh.background
    total = 0.0
    for g in range(len(_GAUSS_W)):
        pts = q[g]
        vv = np.stack([e1, e2], axis=1)
        vals = bg.omega.evaluator(bg.project(pts), bg.dprojection(pts, vv))
        total += _GAUSS_W[g] * vals.sum()
    return 0.5 * total


def riemannian_area(mesh):
    """Induced Riemannian area of the curve (same quadrature as curve_volume)."""
    q, e1, e2 = _gauss_points(mesh)
    _check_degenerate(mesh, e1, e2)
    bg = mesh.background
    total = 0.0
    for g in range(len(_GAUSS_W)):
        pts = q[g]
        proj = bg.project(pts)
        w = bg.dprojection(pts, np.stack([e1, e2], axis=1))
        t1, t2 = w[:, 0, :], w[:, 1, :]
        g11 = bg.metric(proj, t1, t1)
        g22 = bg.metric(proj, t2, t2)
        g12 = bg.metric(proj, t1, t2)
        total += _GAUSS_W[g] * np.sqrt(np.clip(g11 * g22 - g12 * g12, 0.0, None)).sum()
    return 0.5 * total


@dataclass(frozen=True)
class CRResidualReport:
    l2: float
    max: float


def cr_residual(mesh):
    """Cauchy-Riemann residual: failure of tangent planes to be J-invariant.

    Per face, the affine tangent plane is projected onto the manifold's
    tangent space and orthonormalized to (t1, t2); the pointwise residual is
    |J t1 + t2| / 2, which vanishes exactly on positively oriented
    pseudoholomorphic faces.
    """
    _, e1, e2 = _gauss_points(mesh)
    _check_degenerate(mesh, e1, e2)
    bg = mesh.background
    centroid = mesh.corners()[0] + (e1 + e2) / 3.0
    proj = bg.project(centroid)
    w = bg.dprojection(centroid, np.stack([e1, e2], axis=1))
    u1, u2 = w[:, 0, :], w[:, 1, :]
    n1 = np.linalg.norm(u1, axis=1)
    if n1.min() < 1e-14:
        raise MeshQualityError("degenerate projected face")
    t1 = u1 / n1[:, None]
    u2p = u2 - np.einsum("fn,fn->f", u2, t1)[:, None] * t1
    n2 = np.linalg.norm(u2p, axis=1)
    if n2.min() < 1e-14:
        raise MeshQualityError("degenerate projected face")
    t2 = u2p / n2[:, None]
    resid = 0.5 * np.linalg.norm(bg.j_apply(proj, t1) + t2, axis=1)
    wsum = mesh.face_weights.sum()
    l2 = float(np.sqrt(np.sum(mesh.face_weights * resid**2) / wsum))
    return CRResidualReport(l2=l2, max=float(resid.max()))
