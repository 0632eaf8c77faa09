"""Trigonometric-polynomial scalar fields on the flat 6-torus.

The testbed's conformal factors are restricted to finite trigonometric
polynomials so that every integral appearing downstream has an exact or
cheaply computable oracle.  Expressions are limited to +, -, *, numeric
literals, and sin/cos of an integer multiple of a single coordinate x1..x6.
"""

import numpy as np
import sympy as sp

from .exceptions import PreconditionError

COORDS = sp.symbols("x1:7")


class TrigPolynomial:
    """A validated trig polynomial f(x1..x6) with value and gradient."""

    def __init__(self, expr):
        expr = sp.expand_trig(sp.sympify(expr))
        _validate(expr)
        self.expr = expr
        self._val = sp.lambdify(COORDS, expr, modules="numpy")
        self._grad = [sp.lambdify(COORDS, sp.diff(expr, c), modules="numpy") for c in COORDS]

    @classmethod
    def parse(cls, text):
        local = {f"x{i}": COORDS[i - 1] for i in range(1, 7)}
        local.update(sin=sp.sin, cos=sp.cos)
        try:
            expr = sp.sympify(text, locals=local, rational=False)
        except (sp.SympifyError, SyntaxError, TypeError) as exc:
            raise PreconditionError(f"cannot parse field {text!r}: {exc}") from None
        return cls(expr)

    @classmethod
    def zero(cls):
        return cls(sp.Integer(0))

    def value(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = self._val(*[p[:, i] for i in range(6)])
        return np.broadcast_to(np.asarray(out, dtype=float), (p.shape[0],)).copy()

    def gradient(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        cols = []
        for g in self._grad:
            c = np.asarray(g(*[p[:, i] for i in range(6)]), dtype=float)
            cols.append(np.broadcast_to(c, (p.shape[0],)))
        return np.stack(cols, axis=-1)

    def is_zero(self):
        return self.expr == 0

    def __str__(self):
        return str(self.expr)


def _validate(expr):
    bad = expr.free_symbols - set(COORDS)
    if bad:
        raise PreconditionError(f"unknown symbols in field: {bad}")
    for fn in expr.atoms(sp.Function):
        if not isinstance(fn, (sp.sin, sp.cos)):
            raise PreconditionError(f"only sin/cos allowed, got {fn.func}")
        arg = fn.args[0]
        poly = arg.as_poly(*COORDS)
        ok = (
            poly is not None
            and poly.total_degree() == 1
            and all(c.is_integer for c in poly.coeffs())
            and sp.simplify(arg.subs({c: 0 for c in COORDS})) == 0
        )
        if not ok:
            raise PreconditionError(
                f"trig argument {arg} is not an integer multiple of coordinates"
            )
