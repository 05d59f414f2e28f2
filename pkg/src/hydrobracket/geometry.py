"""Pseudo-Riemannian machinery for one contravariant metric g^{ij}(u).

Conventions (fixed for the whole package):

* ``gamma[k, i, j]`` is the Levi-Civita symbol Gamma^k_{ij}.
* ``R[i, j, k, l]`` is R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
  + Gamma^i_{ks} Gamma^s_{lj} - Gamma^i_{ls} Gamma^s_{kj}.
* ``b[i, j, k]`` is b^{ij}_k = -g^{is} Gamma^j_{sk}.

A metric is degenerate only if its determinant vanishes identically; a
determinant vanishing on a subvariety is ignored (all checks are identities
of rational functions).
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

import numpy as np

from .errors import DegenerateMetric, EngineInconsistency, ShapeError
from .symexpr import Expr
from .tensor import det, expr_array, invert_array

_HALF = Fraction(1, 2)


def _variables_of(arr):
    return next(iter(arr.flat)).variables


def _as_array(g):
    arr = g.entries if hasattr(g, "entries") else np.asarray(g, dtype=object)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError("metric must be a square matrix")
    return arr


class MetricData:
    """A contravariant metric with its derived objects computed on demand.

    ``coordinates`` names the variables the metric is a function of; the
    entries may live over a larger variable list (pencil parameters).
    """

    def __init__(self, g_upper, coordinates=None):
        arr = _as_array(g_upper)
        n = arr.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                if arr[i, j] != arr[j, i]:
                    raise ShapeError(f"metric is not symmetric at ({i + 1},{j + 1})")
        self.g_upper = arr
        self.coordinates = tuple(coordinates) if coordinates is not None else _variables_of(arr)
        if len(self.coordinates) != n:
            raise ShapeError(f"{n}x{n} metric over {len(self.coordinates)} coordinates")

    @property
    def N(self):
        return self.g_upper.shape[0]

    @functools.cached_property
    def determinant(self):
        return det(self.g_upper)

    @property
    def nondegenerate(self):
        return not self.determinant.is_zero()

    @functools.cached_property
    def g_lower(self):
        if self.determinant.is_zero():
            raise DegenerateMetric()
        return invert_array(self.g_upper)

    @functools.cached_property
    def christoffel(self):
        return levi_civita(self.g_upper, self.coordinates, g_lower=self.g_lower)

    @functools.cached_property
    def curvature(self):
        return curvature(self.christoffel, self.coordinates)

    @functools.cached_property
    def b(self):
        return b_from_metric(self.g_upper, self.coordinates, gamma=self.christoffel)

    def is_flat(self):
        return all(e.is_zero() for e in self.curvature.flat)


def levi_civita(g_upper, coordinates=None, *, g_lower=None, check=True):
    """Gamma^k_{ij} = 1/2 g^{ks}(d_i g_{sj} + d_j g_{si} - d_s g_{ij}).

    Symmetry in (i, j) holds by construction; metricity of the lower metric
    is verified symbolically before returning.
    """
    g_upper = _as_array(g_upper)
    n = g_upper.shape[0]
    coords = tuple(coordinates) if coordinates is not None else _variables_of(g_upper)
    if g_lower is None:
        if det(g_upper).is_zero():
            raise DegenerateMetric()
        g_lower = invert_array(g_upper)
    dgl = np.empty((n, n, n), dtype=object)  # dgl[s, i, j] = d_s g_{ij}
    for s in range(n):
        for i in range(n):
            for j in range(i, n):
                dgl[s, i, j] = dgl[s, j, i] = g_lower[i, j].diff(coords[s])
    first = np.empty((n, n, n), dtype=object)  # first[s, i, j] = Gamma_{s,ij}
    for s in range(n):
        for i in range(n):
            for j in range(i, n):
                first[s, i, j] = first[s, j, i] = (dgl[i, s, j] + dgl[j, s, i] - dgl[s, i, j]) * _HALF
    gamma = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = g_upper[k, 0] * first[0, i, j]
                for s in range(1, n):
                    acc = acc + g_upper[k, s] * first[s, i, j]
                gamma[k, i, j] = gamma[k, j, i] = acc
    if check:
        for k, i, j in itertools.product(range(n), repeat=3):
            if j < i:
                continue
            r = dgl[k, i, j]
            for s in range(n):
                r = r - gamma[s, k, i] * g_lower[s, j] - gamma[s, k, j] * g_lower[i, s]
            if not r.is_zero():
                raise EngineInconsistency(f"metricity fails at k={k + 1}, i={i + 1}, j={j + 1}")
    return gamma


def christoffel_derivatives(gamma, coordinates):
    """``dgamma[m, i, j, s] = d_s Gamma^m_{ij}``."""
    n = gamma.shape[0]
    out = np.empty((n, n, n, n), dtype=object)
    for m, i in itertools.product(range(n), repeat=2):
        for j in range(n):
            for s in range(n):
                out[m, i, j, s] = gamma[m, i, j].diff(coordinates[s])
    return out


def curvature(gamma, coordinates=None):
    """R^i_{jkl} for a connection ``gamma[k, i, j]``; antisymmetric in (k, l)."""
    n = gamma.shape[0]
    coords = tuple(coordinates) if coordinates is not None else _variables_of(gamma)
    dg = christoffel_derivatives(gamma, coords)
    zero = gamma[0, 0, 0].zero_like()
    R = np.empty((n, n, n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        for k in range(n):
            R[i, j, k, k] = zero
            for l in range(k + 1, n):
                acc = dg[i, l, j, k] - dg[i, k, j, l]
                for s in range(n):
                    acc = acc + gamma[i, k, s] * gamma[s, l, j] - gamma[i, l, s] * gamma[s, k, j]
                R[i, j, k, l] = acc
                R[i, j, l, k] = -acc
    return R


def is_flat(g_upper, coordinates=None):
    return MetricData(g_upper, coordinates).is_flat()


def b_from_metric(g_upper, coordinates=None, *, gamma=None, check=True):
    """b^{ij}_k = -g^{is} Gamma^j_{sk}, checked against d_k g^{ij} = b^{ij}_k + b^{ji}_k."""
    g_upper = _as_array(g_upper)
    n = g_upper.shape[0]
    coords = tuple(coordinates) if coordinates is not None else _variables_of(g_upper)
    if gamma is None:
        gamma = levi_civita(g_upper, coords)
    b = np.empty((n, n, n), dtype=object)
    for i, j, k in itertools.product(range(n), repeat=3):
        acc = g_upper[i, 0] * gamma[j, 0, k]
        for s in range(1, n):
            acc = acc + g_upper[i, s] * gamma[j, s, k]
        b[i, j, k] = -acc
    if check:
        for i, j, k in itertools.product(range(n), repeat=3):
            if g_upper[i, j].diff(coords[k]) != b[i, j, k] + b[j, i, k]:
                raise EngineInconsistency(f"b does not reproduce dg at ({i + 1},{j + 1},{k + 1})")
    return b


def connection_from_b(g_lower, b):
    """Gamma^k_{ij} = -g_{is} b^{sk}_j for a bracket's own b coefficients."""
    n = g_lower.shape[0]
    gamma = np.empty((n, n, n), dtype=object)
    for k, i, j in itertools.product(range(n), repeat=3):
        acc = g_lower[i, 0] * b[0, k, j]
        for s in range(1, n):
            acc = acc + g_lower[i, s] * b[s, k, j]
        gamma[k, i, j] = -acc
    return gamma


def covariant_derivative_3up(T, gamma, coordinates=None):
    """``out[i, j, k, r]`` = nabla_r T^{ijk}."""
    n = gamma.shape[0]
    coords = tuple(coordinates) if coordinates is not None else _variables_of(gamma)
    T = np.asarray(T.entries if hasattr(T, "entries") else T, dtype=object)
    if T.shape != (n, n, n):
        raise ShapeError(f"expected an {n}x{n}x{n} tensor")
    out = np.empty((n, n, n, n), dtype=object)
    for i, j, k in itertools.product(range(n), repeat=3):
        t = T[i, j, k]
        for r in range(n):
            acc = t.diff(coords[r])
            for s in range(n):
                acc = (acc + gamma[i, r, s] * T[s, j, k] + gamma[j, r, s] * T[i, s, k]
                       + gamma[k, r, s] * T[i, j, s])
            out[i, j, k, r] = acc
    return out


def pushforward_metric(g_upper, jacobian):
    """J g J^T for a contravariant metric."""
    n = g_upper.shape[0]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            acc = None
            for p in range(n):
                if jacobian[i, p].is_zero():
                    continue
                for q in range(n):
                    t = jacobian[i, p] * g_upper[p, q] * jacobian[j, q]
                    acc = t if acc is None else acc + t
            out[i, j] = out[j, i] = acc if acc is not None else g_upper[0, 0].zero_like()
    return out


def constant_metric(rows, variables):
    """Metric with rational constant entries over ``variables``."""
    rows = [list(r) for r in rows]
    n = len(rows)
    arr = expr_array((n, n), variables)
    for i in range(n):
        for j in range(n):
            arr[i, j] = Expr.constant(rows[i][j], variables)
    return arr
