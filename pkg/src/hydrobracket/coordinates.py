"""Local changes of the field coordinates u -> w(u).

A change is given by its forward map ``w^i(u)``.  Objects transformed by it
are first produced in pullback form (as functions of the source coordinates
u); when an inverse map ``u^i(w)`` is supplied they can be re-expressed in w.
New coordinates reuse the source names unless told otherwise, so a bracket
in w is written with the same variable names as the bracket in u.
"""

from __future__ import annotations

import functools
import itertools
import random
from fractions import Fraction

import numpy as np

from .errors import DegenerateMetric, NonInvertibleChange, ShapeError
from .symexpr import Expr, parse, substitute
from .tensor import det, invert_array


class CoordinateChange:
    """Forward map ``w^i = forward[i](u)`` with an optional inverse ``u^i = inverse[i](w)``."""

    def __init__(self, forward, coordinates, inverse=None, new_coordinates=None):
        self.coordinates = tuple(coordinates)
        self.new_coordinates = tuple(new_coordinates) if new_coordinates is not None else self.coordinates
        N = len(self.coordinates)
        if len(forward) != N or len(self.new_coordinates) != N:
            raise ShapeError(f"a change of {N} coordinates needs {N} component functions")
        self.forward = tuple(_as_expr(e, self.coordinates) for e in forward)
        if inverse is not None:
            if len(inverse) != N:
                raise ShapeError(f"inverse has {len(inverse)} components, expected {N}")
            inverse = tuple(_as_expr(e, self.new_coordinates) for e in inverse)
        self.inverse = inverse
        if self.jacobian_det.is_zero():
            raise NonInvertibleChange("Jacobian determinant vanishes identically")
        if inverse is not None:
            self._check_inverse()

    @classmethod
    def from_strings(cls, forward, coordinates, inverse=None, new_coordinates=None):
        coordinates = tuple(coordinates)
        new = tuple(new_coordinates) if new_coordinates is not None else coordinates
        fw = [parse(s, coordinates) for s in forward]
        inv = None if inverse is None else [parse(s, new) for s in inverse]
        return cls(fw, coordinates, inv, new)

    @classmethod
    def identity(cls, coordinates):
        coordinates = tuple(coordinates)
        syms = [Expr.symbol(c, coordinates) for c in coordinates]
        return cls(syms, coordinates, syms, coordinates)

    @property
    def N(self):
        return len(self.coordinates)

    @functools.cached_property
    def jacobian(self):
        """``J[i, p]`` = dw^i/du^p."""
        N = self.N
        J = np.empty((N, N), dtype=object)
        for i, p in itertools.product(range(N), repeat=2):
            J[i, p] = self.forward[i].diff(self.coordinates[p])
        J.flags.writeable = False
        return J

    @functools.cached_property
    def jacobian_det(self):
        return det(self.jacobian)

    @functools.cached_property
    def inverse_jacobian(self):
        """``K[s, k]`` = du^s/dw^k as functions of u."""
        try:
            K = invert_array(self.jacobian)
        except DegenerateMetric:
            raise NonInvertibleChange("Jacobian determinant vanishes identically") from None
        K.flags.writeable = False
        return K

    @functools.cached_property
    def hessians(self):
        """``H[j, q, s]`` = d^2 w^j / du^q du^s."""
        N = self.N
        J = self.jacobian
        H = np.empty((N, N, N), dtype=object)
        for j, q in itertools.product(range(N), repeat=2):
            for s in range(q, N):
                H[j, q, s] = H[j, s, q] = J[j, q].diff(self.coordinates[s])
        return H

    def d_new(self, e, k):
        """d e / dw^k for ``e`` given as a function of u (chain rule through K)."""
        K = self.inverse_jacobian
        acc = e.zero_like()
        for s, name in enumerate(self.coordinates):
            if not K[s, k].is_zero():
                acc = acc + K[s, k] * e.diff(name)
        return acc

    def pull(self, e):
        """Compose an expression in the new coordinates with the forward map."""
        return substitute(e.lift(self.new_coordinates), dict(zip(self.new_coordinates, self.forward)), self.coordinates)

    def push(self, e):
        """Re-express a pullback-form expression (function of u) in the new coordinates."""
        if self.inverse is None:
            raise NonInvertibleChange("no inverse map supplied")
        return substitute(e, dict(zip(self.coordinates, self.inverse)), self.new_coordinates)

    def _check_inverse(self):
        # forward(inverse(w)) must be w identically
        for i, f in enumerate(self.forward):
            back = substitute(f, dict(zip(self.coordinates, self.inverse)), self.new_coordinates)
            if back != Expr.symbol(self.new_coordinates[i], self.new_coordinates):
                raise NonInvertibleChange(f"supplied inverse does not invert component {i + 1}")

    def compose(self, other):
        """The change ``other`` applied after ``self``: u -> w = self(u) -> other(w).

        ``other`` must be written over ``self.new_coordinates``.
        """
        if other.coordinates != self.new_coordinates:
            raise ShapeError("changes are not composable (coordinate names differ)")
        fw = [substitute(e, dict(zip(other.coordinates, self.forward)), self.coordinates) for e in other.forward]
        inv = None
        if self.inverse is not None and other.inverse is not None:
            inv = [substitute(e, dict(zip(self.new_coordinates, other.inverse)), other.new_coordinates)
                   for e in self.inverse]
        return CoordinateChange(fw, self.coordinates, inv, other.new_coordinates)

    def strings(self):
        out = {"forward": [str(e) for e in self.forward]}
        if self.inverse is not None:
            out["inverse"] = [str(e) for e in self.inverse]
        return out

    def __repr__(self):
        return f"CoordinateChange({[str(e) for e in self.forward]})"


def _as_expr(e, variables):
    if isinstance(e, Expr):
        return e.lift(variables)
    if isinstance(e, str):
        return parse(e, variables)
    return Expr.constant(e, variables)


def random_triangular_change(coordinates, rng=None, *, max_degree=2, coeff_range=2):
    """Random invertible change ``w_i = a_i u_i + p_i(u_1..u_{i-1}) + c_i``.

    ``a_i`` are nonzero rationals and ``p_i`` random polynomials of degree at
    most ``max_degree``; the polynomial inverse is built by back-substitution.
    """
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    coordinates = tuple(coordinates)
    N = len(coordinates)
    u = [Expr.symbol(c, coordinates) for c in coordinates]
    forward, inverse = [], []
    for i in range(N):
        a = Fraction(rng.choice([1, 2, 3, -1, -2]), rng.choice([1, 1, 2]))
        tail = Expr.constant(rng.randint(-coeff_range, coeff_range), coordinates)
        earlier = list(range(i))
        for deg in range(1, max_degree + 1):
            for mono in itertools.combinations_with_replacement(earlier, deg):
                c = rng.randint(-coeff_range, coeff_range)
                if c:
                    term = Expr.constant(c, coordinates)
                    for m in mono:
                        term = term * u[m]
                    tail = tail + term
        forward.append(u[i] * a + tail)
        # u_i = (w_i - tail(u_<i(w))) / a, with u_<i(w) already known
        tail_w = substitute(tail, dict(zip(coordinates[:i], inverse)), coordinates) if i else tail
        inverse.append((u[i] - tail_w) * (1 / a))
    return CoordinateChange(forward, coordinates, inverse, coordinates)


def random_linear_change(coordinates, rng=None, coeff_range=3):
    """Random invertible linear change with rational inverse."""
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    coordinates = tuple(coordinates)
    N = len(coordinates)
    u = [Expr.symbol(c, coordinates) for c in coordinates]
    while True:
        A = [[rng.randint(-coeff_range, coeff_range) for _ in range(N)] for _ in range(N)]
        Ae = np.array([[Expr.constant(x, coordinates) for x in row] for row in A], dtype=object)
        if not det(Ae).is_zero():
            break
    Ainv = invert_array(Ae)
    fw = [sum((u[j] * A[i][j] for j in range(N)), Expr.constant(0, coordinates)) for i in range(N)]
    inv = [sum((u[j] * Ainv[i, j] for j in range(N)), Expr.constant(0, coordinates)) for i in range(N)]
    return CoordinateChange(fw, coordinates, inv, coordinates)
