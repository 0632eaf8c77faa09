"""Octonion algebra over R^8, cross products on the imaginary part, and
automorphisms built from basic triples.

Basis convention (Cayley-Dickson doubling of the quaternions):
    1, e1, e2, e3  --  the quaternions, with e1*e2 = e3;
    e4             --  the doubling unit;
    e5 = e1*e4, e6 = e2*e4, e7 = e3*e4.

The full multiplication is generated by the doubling rule
(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)) on quaternion pairs.
"""

import json

import numpy as np

from .exceptions import PreconditionError

# quaternion structure tensor: (i*j)_k coefficient, basis 1,i,j,k
_QT = np.zeros((4, 4, 4))
_QT[0, :, :] = np.eye(4)
_QT[:, 0, :] = np.eye(4)
for _i in range(1, 4):
    _QT[_i, _i, 0] = -1.0
for _i, _j, _k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
    _QT[_i, _j, _k] = 1.0
    _QT[_j, _i, _k] = -1.0


def _quat_mul(a, b):
    return np.einsum("i,j,ijk->k", a, b, _QT)


def _quat_conj(a):
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def _build_table():
    """8x8x8 structure tensor T with e_i e_j = sum_k T[i,j,k] e_k."""
    table = np.zeros((8, 8, 8))
    basis = np.eye(8)
    for i in range(8):
        for j in range(8):
            a, b = basis[i, :4], basis[i, 4:]
            c, d = basis[j, :4], basis[j, 4:]
            lo = _quat_mul(a, c) - _quat_mul(_quat_conj(d), b)
            hi = _quat_mul(d, a) + _quat_mul(b, _quat_conj(c))
            table[i, j] = np.concatenate([lo, hi])
    return table

MUL_TABLE = _build_table()
MUL_TABLE.setflags(write=False)


def oct_mul(a, b):
    """Octonion product of 8-vectors (batched over leading axes)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.einsum("...i,...j,ijk->...k", a, b, MUL_TABLE)


def oct_conj(a):
    a = np.asarray(a, dtype=float)
    out = -a.copy()
    out[..., 0] = a[..., 0]
    return out


def oct_norm(a):
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def imag_embed(u):
    """Im O coordinates (e1..e7) -> full 8-vector."""
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape[:-1] + (8,))
    out[..., 1:] = u
    return out


def imag_part(a):
    return np.asarray(a, dtype=float)[..., 1:]


def cross(u, v):
    """Cross product on Im O: (uv - vu)/2, reported in e1..e7 coordinates.

    Equals Im(uv) when u and v are imaginary and orthogonal.
    """
    a, b = imag_embed(u), imag_embed(v)
    return imag_part(0.5 * (oct_mul(a, b) - oct_mul(b, a)))


def imag_mul(u, v):
    """Full octonion product of two imaginary octonions (8-vector result)."""
    return oct_mul(imag_embed(u), imag_embed(v))


# standard basic triple generating the algebra
STANDARD_TRIPLE = (np.eye(7)[0], np.eye(7)[1], np.eye(7)[3])  # e1, e2, e4


class G2Element:
    """7x7 orthogonal matrix acting on Im O as an algebra automorphism."""

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=float)
        self.matrix.setflags(write=False)

    def apply(self, u):
        """Apply to vectors in Im O coordinates, batched over leading axes."""
        return np.asarray(u, dtype=float) @ self.matrix.T

    def orthogonality_residual(self):
        return float(np.abs(self.matrix.T @ self.matrix - np.eye(7)).max())

    def automorphism_residual(self, n_pairs=100, seed=0):
        rng = np.random.default_rng(seed)
        u = rng.standard_normal((n_pairs, 7))
        v = rng.standard_normal((n_pairs, 7))
        lhs = self.apply(cross(u, v))
        rhs = cross(self.apply(u), self.apply(v))
        return float(np.abs(lhs - rhs).max())

    def __matmul__(self, other):
        return G2Element(self.matrix @ other.matrix)


def basic_triple_automorphism(f1, f2, f3, tol=1e-8):
    """G2 element mapping the standard triple (e1, e2, e4) to (f1, f2, f3).

    Requires f1, f2, f3 unit, f2 orthogonal to f1, and f3 orthogonal to
    f1, f2 and f1*f2.
    """
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    f3 = np.asarray(f3, dtype=float)
    f12 = cross(f1, f2)
    resid = max(
        abs(np.dot(f1, f1) - 1.0),
        abs(np.dot(f2, f2) - 1.0),
        abs(np.dot(f3, f3) - 1.0),
        abs(np.dot(f1, f2)),
        abs(np.dot(f3, f1)),
        abs(np.dot(f3, f2)),
        abs(np.dot(f3, f12)),
    )
    if resid > tol:
        raise PreconditionError(
            f"not a basic triple: orthonormality residual {resid:.3e} > {tol:.1e}"
        )
    cols = np.empty((7, 7))
    cols[:, 0] = f1                  # e1
    cols[:, 1] = f2                  # e2
    cols[:, 2] = f12                 # e3 = e1 e2
    cols[:, 3] = f3                  # e4
    cols[:, 4] = cross(f1, f3)       # e5 = e1 e4
    cols[:, 5] = cross(f2, f3)       # e6 = e2 e4
    cols[:, 6] = cross(f12, f3)      # e7 = e3 e4
    return G2Element(cols)


def random_g2(seed):
    """Deterministic random G2 element from a random basic triple."""
    rng = np.random.default_rng(seed)
    while True:
        v = rng.standard_normal((3, 7))
        gram = v @ v.T
        if abs(np.linalg.det(gram)) < 1e-6:
            continue  # near-degenerate draw, resample
        f1 = v[0] / np.linalg.norm(v[0])
        w2 = v[1] - np.dot(v[1], f1) * f1
        if np.linalg.norm(w2) < 1e-6:
            continue
        f2 = w2 / np.linalg.norm(w2)
        f12 = cross(f1, f2)
        w3 = v[2]
        for b in (f1, f2, f12):
            w3 = w3 - np.dot(w3, b) * b
        if np.linalg.norm(w3) < 1e-6:
            continue
        f3 = w3 / np.linalg.norm(w3)
        return basic_triple_automorphism(f1, f2, f3)


def signed_index_table():
    """7x7 signed-index matrix for the imaginary units.

    Entry (i, j) is +-k (1-based) with e_i e_j = +-e_k; the diagonal is 0,
    standing for e_i e_i = -1.
    """
    out = np.zeros((7, 7), dtype=int)
    for i in range(7):
        for j in range(7):
            if i == j:
                continue
            row = MUL_TABLE[i + 1, j + 1]
            k = int(np.argmax(np.abs(row)))
            out[i, j] = int(np.sign(row[k])) * k  # k >= 1 here
    return out


def export_multiplication_table(path):
    """Write the imaginary-unit multiplication table as JSON."""
    payload = {
        "description": "e_i * e_j = sign(entry) * e_{|entry|}; 0 on the "
        "diagonal means e_i * e_i = -1. Basis: e1,e2,e3 quaternionic "
        "(e1 e2 = e3), e4 doubling unit, e5=e1e4, e6=e2e4, e7=e3e4.",
        "signed_index": signed_index_table().tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
