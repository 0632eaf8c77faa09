"""Left-invariant almost Hermitian structures on S^3 x S^3.

Everything is expressed on the coframe (xi_1, xi_2, xi_3, xi'_1, xi'_2, xi'_3)
of left-invariant 1-forms, with the SU(2) structure equations fixed as
d xi_i = -xi_j ^ xi_k (cyclic), identically on the primed factor.  Exterior
derivatives are exact consequences of these equations; no finite differencing
happens in this module.

The metric family is g = a * sum(xi_i^2 + xi'_i^2) + b * sum(xi_i (x) xi'_i +
xi'_i (x) xi_i).  The almost complex structure is obtained from the reference
2-form sum xi_i ^ xi'_i by the metric polar construction, which makes g
J-invariant for every admissible (a, b); at b = 0 it reduces exactly to the
map xi_i -> xi'_i, xi'_i -> -xi_i.
"""

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import forms
from .exceptions import PreconditionError


@dataclass(frozen=True)
class S3S3MetricParams:
    a: float = 1.0
    b: float = 0.0

    def gram(self):
        g = np.zeros((6, 6))
        g[:3, :3] = self.a * np.eye(3)
        g[3:, 3:] = self.a * np.eye(3)
        g[:3, 3:] = self.b * np.eye(3)
        g[3:, :3] = self.b * np.eye(3)
        return g

    def validate(self):
        eig = np.linalg.eigvalsh(self.gram())
        if eig.min() <= 0.0:
            raise PreconditionError(
                f"metric params a={self.a}, b={self.b} are not positive definite"
            )


def _covector(i):
    out = np.zeros(6)
    out[i] = 1.0
    return out


def _wedge_tensor(covectors):
    """Antisymmetric tensor of a decomposable wedge (determinant convention)."""
    k = len(covectors)
    t = np.zeros((6,) * k)
    for perm in itertools.permutations(range(k)):
        term = covectors[perm[0]]
        for idx in perm[1:]:
            term = np.multiply.outer(term, covectors[idx])
        t += forms._perm_sign(list(perm)) * term
    return t


def dxi_tensor(i):
    """d xi_i = -xi_j ^ xi_k with (i, j, k) cyclic; i in 0..5 (primed >= 3)."""
    base = 3 * (i // 3)
    j, k = base + (i + 1) % 3, base + (i + 2) % 3
    return -_wedge_tensor([_covector(j), _covector(k)])


def exterior_derivative_invariant(tensor, k):
    """Exact d of a left-invariant k-form given by its coframe tensor.

    d(sum c_I xi_I) expands via the Leibniz rule into the structure equations.
    """
    out = np.zeros((6,) * (k + 1))
    for combo in itertools.combinations(range(6), k):
        c = tensor[combo]
        if c == 0.0:
            continue
        for slot in range(k):
            rest = [_covector(combo[m]) for m in range(k) if m != slot]
            dxi = dxi_tensor(combo[slot])
            # d xi is a sum of decomposable pieces; expand its combos
            for pair in itertools.combinations(range(6), 2):
                coef = dxi[pair]
                if coef == 0.0:
                    continue
                covs = [_covector(pair[0]), _covector(pair[1])] + rest
                out += ((-1.0) ** slot) * c * coef * _wedge_tensor(covs)
    return out


class S3S3Structure:
    """Homogeneous almost Hermitian data at the identity coset."""

    name = "s3s3"

    def __init__(self, params: S3S3MetricParams):
        params.validate()
        self.params = params
        self.gram = params.gram()
        a, b = params.a, params.b
        w0 = np.zeros((6, 6))
        for i in range(3):
            w0[i, i + 3] = 1.0
            w0[i + 3, i] = -1.0
        scale = math.sqrt(a * a - b * b)
        # polar construction: A = g^-1 omega_0 satisfies A^2 = -1/(a^2-b^2)
        self.j_matrix = scale * np.linalg.solve(self.gram, w0)
        self.omega_tensor = self.gram @ self.j_matrix        # antisymmetric
        self.domega_tensor = exterior_derivative_invariant(self.omega_tensor, 2)

    def coframe(self):
        return forms.UnitaryCoframe(self.j_matrix, self.gram)

    def type_residual(self):
        """(2,1)+(1,2) fraction of the exact d-omega."""
        spec = forms.type_decompose(self.domega_tensor, self.coframe())
        return spec.fraction((2, 1), (1, 2))

    def type_spectrum(self):
        return forms.type_decompose(self.domega_tensor, self.coframe())

    def descriptor(self):
        return {
            "name": self.name,
            "params": {"a": self.params.a, "b": self.params.b},
            "structure_equations": "d xi_i = -xi_j ^ xi_k (cyclic), both factors",
            "j_matrix": self.j_matrix.tolist(),
        }


def s3s3_background(params=None, a=1.0, b=0.0):
    if params is None:
        params = S3S3MetricParams(a=a, b=b)
    return S3S3Structure(params)


def type_residual(b, a=1.0):
    return s3s3_background(a=a, b=b).type_residual()


def find_nk_metric(search=(-0.95, -0.01), tol=1e-8, a=1.0, max_iter=200):
    """Golden-section search for the coupling b minimizing the type residual.

    Returns a report dict; `achieved` records whether the residual dropped
    below `tol` (a search-failure report, not an exception, otherwise).
    """
    lo, hi = float(search[0]), float(search[1])
    if not (lo < hi and abs(lo) < a and abs(hi) < a):
        raise PreconditionError(f"invalid search interval {search} for a={a}")
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = type_residual(x1, a), type_residual(x2, a)
    samples = [(x1, f1), (x2, f2)]
    for _ in range(max_iter):
        if hi - lo < 1e-13:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = type_residual(x1, a)
            samples.append((x1, f1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = type_residual(x2, a)
            samples.append((x2, f2))
    b_star, residual = min(samples, key=lambda s: s[1])
    return {
        "b_star": float(b_star),
        "residual": float(residual),
        "achieved": bool(residual < tol),
        "tolerance": tol,
        "a": a,
        "n_evaluations": len(samples),
    }


def export_structure_constants(path):
    """Write the coframe structure equations as a machine-readable table."""
    payload = {
        "description": "d xi_i = sum_{j<k} c[i][j][k] xi_j ^ xi_k on the "
        "coframe (xi1,xi2,xi3,xi1',xi2',xi3'), determinant wedge convention",
        "constants": [
            [[float(dxi_tensor(i)[j, k]) for k in range(6)] for j in range(6)]
            for i in range(6)
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
