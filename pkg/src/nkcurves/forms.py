"""Pointwise calculus on differential forms: evaluation, wedge products,
finite-difference exterior derivatives, and Hodge (p,q)-type decomposition
with respect to an almost complex structure.

Forms are evaluated on explicit tangent vectors; a degree-k field is a
function (point, k vectors) -> real.  Off-manifold evaluation extends the
field by pullback along the background's nearest-point projection, which is
what makes finite differencing in flat ambient coordinates legitimate.

Wedge products use the determinant convention: (dx ^ dy)(u, v) = u_x v_y - u_y v_x,
with no 1/k! factor.
"""

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .exceptions import PreconditionError


@dataclass(frozen=True)
class FormField:
    """Degree-k alternating multilinear evaluator on a background manifold.

    evaluator(P, V) is batched: P has shape (m, n) of on-manifold points,
    V has shape (m, k, n) of tangent vectors, the result has shape (m,).
    """

    degree: int
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    smoothness_radius: float = 1.0

    def __call__(self, p, vectors):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        v = np.asarray(vectors, dtype=float)
        single = v.ndim == 2
        if single:
            v = v[None]
        out = self.evaluator(p, v)
        return float(out[0]) if single else out


def extended_eval(field, background, q, vectors):
    """Evaluate the projection-pullback extension of `field` at ambient points.

    q: (m, n) arbitrary ambient points near the manifold, vectors: (m, k, n).
    """
    p = background.project(q)
    w = background.dprojection(q, vectors)
    return field.evaluator(p, w)


def exterior_derivative_batch(field, background, p, vectors, step=None):
    """d(field) at points p evaluated on (k+1)-tuples of vectors, batched.

    Uses central finite differences of the projection-pullback extension at
    steps h and h/2 with Richardson extrapolation.  p may be off-manifold
    (the result is then d of the extended form).
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(vectors, dtype=float)
    m, kp1, n = v.shape
    h = step if step is not None else 1e-3 * field.smoothness_radius
    if not 0.0 < h < field.smoothness_radius:
        raise PreconditionError(f"step {h} outside (0, {field.smoothness_radius})")

    shifts = np.array([h, -h, h / 2, -h / 2])
    # batch: for every slot i and shift s, evaluate field at p + s*v_i on the
    # remaining k vectors
    qs, ws = [], []
    keep = [[j for j in range(kp1) if j != i] for i in range(kp1)]
    for i in range(kp1):
        rest = v[:, keep[i], :]
        for s in shifts:
            qs.append(p + s * v[:, i, :])
            ws.append(rest)
    vals = extended_eval(field, background, np.concatenate(qs), np.concatenate(ws))
    vals = vals.reshape(kp1, 4, m)
    d_h = (vals[:, 0] - vals[:, 1]) / (2 * h)
    d_h2 = (vals[:, 2] - vals[:, 3]) / h
    deriv = (4.0 * d_h2 - d_h) / 3.0
    signs = np.array([(-1.0) ** i for i in range(kp1)])
    return np.einsum("i,im->m", signs, deriv)


def exterior_derivative(field, background, p, vectors, step=None):
    """Scalar convenience wrapper around `exterior_derivative_batch`."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    v = np.asarray(vectors, dtype=float)[None]
    return float(exterior_derivative_batch(field, background, p, v, step)[0])


def wedge(a: FormField, b: FormField) -> FormField:
    """Wedge product of two form fields (determinant convention)."""
    k, l = a.degree, b.degree
    if k + l > 6:
        raise PreconditionError(f"wedge degree {k + l} exceeds 6")
    subsets = list(itertools.combinations(range(k + l), k))
    signs = []
    for s in subsets:
        comp = [j for j in range(k + l) if j not in s]
        perm = list(s) + comp
        signs.append(_perm_sign(perm))

    def evaluator(p, v):
        out = np.zeros(v.shape[0])
        for s, sgn in zip(subsets, signs):
            comp = [j for j in range(k + l) if j not in s]
            out += sgn * a.evaluator(p, v[:, list(s), :]) * b.evaluator(p, v[:, comp, :])
        return out

    return FormField(k + l, evaluator, min(a.smoothness_radius, b.smoothness_radius))


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, cyc = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cyc += 1
        if cyc % 2 == 0:
            sign = -sign
    return sign


def form_tensor(field, background, p, frame):
    """Fully antisymmetric component tensor of `field` at p on a 6-frame.

    frame: (6, n) tangent basis rows.  Returns an array of shape (6,)*k with
    T[i1..ik] = field(p, (frame[i1], .., frame[ik])).
    """
    k = field.degree
    combos = list(itertools.combinations(range(6), k))
    pts = np.repeat(np.asarray(p, dtype=float)[None], len(combos), axis=0)
    vecs = np.stack([frame[list(c)] for c in combos])
    vals = field.evaluator(pts, vecs)
    return _antisymmetric_fill(vals, combos, k)


def d_form_tensor(field, background, p, frame, step=None):
    """Antisymmetric tensor of d(field) at p on a 6-frame, by finite differences."""
    k1 = field.degree + 1
    combos = list(itertools.combinations(range(6), k1))
    pts = np.repeat(np.asarray(p, dtype=float)[None], len(combos), axis=0)
    vecs = np.stack([frame[list(c)] for c in combos])
    vals = exterior_derivative_batch(field, background, pts, vecs, step)
    return _antisymmetric_fill(vals, combos, k1)


def _antisymmetric_fill(vals, combos, k):
    t = np.zeros((6,) * k)
    for val, combo in zip(vals, combos):
        for perm in itertools.permutations(range(k)):
            idx = tuple(combo[perm[j]] for j in range(k))
            t[idx] = _perm_sign(list(perm)) * val
    return t


def tensor_norm(tensor, k):
    """Frobenius norm over increasing index tuples (orthonormal frame assumed)."""
    total = 0.0
    for combo in itertools.combinations(range(6), k):
        total += tensor[combo] ** 2
    return math.sqrt(total)


class UnitaryCoframe:
    """Three complex covectors spanning the (1,0) cotangent space at a point.

    Constructed from the matrices of J and g on an arbitrary tangent basis.
    The basis is first orthonormalized (Cholesky of the Gram matrix), then an
    adapted frame v1, Jv1, v3, Jv3, v5, Jv5 is built by deterministic
    Gram-Schmidt starting from the smallest-index basis vectors.
    """

    def __init__(self, j_matrix, gram, tol=1e-8):
        j_matrix = np.asarray(j_matrix, dtype=float)
        gram = np.asarray(gram, dtype=float)
        if np.abs(j_matrix @ j_matrix + np.eye(6)).max() > tol:
            raise PreconditionError("J^2 != -id at this point")
        if np.abs(j_matrix.T @ gram @ j_matrix - gram).max() > tol:
            raise PreconditionError("metric is not J-invariant at this point")
        ell = np.linalg.cholesky(gram)
        self._to_ortho = ell.T                    # y = L^T x
        self._from_ortho = np.linalg.inv(ell.T)   # x = L^-T y
        jy = self._to_ortho @ j_matrix @ self._from_ortho

        frame = np.zeros((6, 6))
        used = 0
        for e_idx in range(6):
            if used == 6:
                break
            w = np.zeros(6)
            w[e_idx] = 1.0
            for i in range(used):
                w -= np.dot(w, frame[i]) * frame[i]
            if np.linalg.norm(w) < 1e-6:
                continue
            v = w / np.linalg.norm(w)
            frame[used] = v
            frame[used + 1] = jy @ v
            used += 2
        self.jy = jy
        self.adapted = frame                      # rows, orthonormal, y-coords
        # dual (1,0) tangent vectors Z_a = (v_{2a-1} - i v_{2a})/2
        self.z = np.array(
            [(frame[2 * a] - 1j * frame[2 * a + 1]) / 2.0 for a in range(3)]
        )

    def theta(self, v):
        """The three (1,0) covectors applied to a tangent coordinate vector."""
        y = self._to_ortho @ np.asarray(v, dtype=float)
        return np.array(
            [self.adapted[2 * a] @ y + 1j * (self.adapted[2 * a + 1] @ y) for a in range(3)]
        )

    def tensor_to_ortho(self, tensor, k):
        """Transform a tensor on the original basis to the orthonormal basis."""
        t = tensor
        for axis in range(k):
            t = np.tensordot(t, self._from_ortho, axes=([0], [0]))
        return t


def build_unitary_coframe(j_matrix, gram, tol=1e-8):
    """Unitary coframe from the matrices of J and g on a tangent basis."""
    return UnitaryCoframe(j_matrix, gram, tol)


@dataclass
class TypeSpectrum:
    """Per-(p,q) norms of a k-form at a point, in a unitary coframe."""

    degree: int
    norms: dict
    total: float

    def fraction(self, *types):
        if self.total == 0.0:
            return 0.0
        return math.sqrt(sum(self.norms[t] ** 2 for t in types)) / self.total

    def pythagoras_residual(self):
        s = math.sqrt(sum(v * v for v in self.norms.values()))
        scale = max(self.total, 1e-300)
        return abs(s - self.total) / scale

    def to_record(self, point=None):
        rec = {
            "degree": self.degree,
            "norms": {f"{p},{q}": v for (p, q), v in self.norms.items()},
            "total": self.total,
        }
        if point is not None:
            rec["point"] = list(np.asarray(point, dtype=float))
        return rec


def type_decompose(tensor, coframe: UnitaryCoframe) -> TypeSpectrum:
    """Hodge (p,q)-type spectrum of an antisymmetric k-tensor at a point.

    The tensor lives on the same tangent basis the coframe was built from.
    Norms are unitary-invariant: 2^k times the sum of squared monomial
    coefficients, which reproduces the orthonormal-frame Frobenius norm.
    """
    k = tensor.ndim
    if k > 4:
        raise PreconditionError("type decomposition supports degree <= 4")
    ty = coframe.tensor_to_ortho(tensor, k)
    z = coframe.z
    zbar = z.conj()
    norms = {}
    for p in range(k + 1):
        q = k - p
        acc = 0.0
        for a_set in itertools.combinations(range(3), p):
            for b_set in itertools.combinations(range(3), q):
                args = [z[a] for a in a_set] + [zbar[b] for b in b_set]
                c = ty.astype(complex)
                for vec in args:
                    c = np.tensordot(c, vec, axes=([0], [0]))
                acc += abs(c) ** 2
        norms[(p, q)] = math.sqrt((2.0 ** k) * acc)
    total = tensor_norm(ty, k)
    return TypeSpectrum(k, norms, total)
