"""Compatibility of pairs of metrics.

A pair is almost compatible when its obstruction tensor satisfies (b1) and
compatible when it satisfies (b1) and (b3); the tensor is built from the two
Levi-Civita connections.  The direct definition (linearity of the pencil's
connection and curvature in the pencil parameters) is checked independently
by :func:`pencil_direct_check`, treating the parameters as extra variables.

Pencil eigenvalues are the roots of ``det(g1 - lambda g2)``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .bracket import RelationReport, _scan_pairs, b1_residual, b3_residual, pair_obstruction
from .errors import DegenerateMetric, DegeneratePencil, ShapeError
from .geometry import MetricData, levi_civita, curvature, pushforward_metric
from .symexpr import Expr
from .tensor import det, matmul

LAMBDA = "lambda"
PENCIL_PARAMETERS = ("lambda1", "lambda2")


class MetricPair:
    """Two contravariant metrics ``g1``, ``g2`` over the same coordinates."""

    def __init__(self, g1, g2, coordinates=None):
        self.first = MetricData(g1, coordinates)
        self.second = MetricData(g2, self.first.coordinates)
        if self.first.N != self.second.N:
            raise ShapeError("metrics of a pair must have the same size")

    @property
    def g1(self):
        return self.first.g_upper

    @property
    def g2(self):
        return self.second.g_upper

    @property
    def coordinates(self):
        return self.first.coordinates

    @property
    def N(self):
        return self.first.N

    def require_nondegenerate(self):
        for k, md in enumerate((self.first, self.second), start=1):
            if not md.nondegenerate:
                raise DegenerateMetric(direction=k)

    @functools.cached_property
    def affinor(self):
        """``v[i, j]`` = v^i_j = g1^{is} g2_{sj}."""
        if not self.second.nondegenerate:
            raise DegenerateMetric(direction=2)
        return matmul(self.g1, self.second.g_lower)

    @functools.cached_property
    def obstruction(self):
        """``(T_mixed, T_up)`` with alpha = first metric, beta = second."""
        self.require_nondegenerate()
        return pair_obstruction(self.first.christoffel, self.second.christoffel, self.g1, self.g2)


def compatibility_report(p):
    """(b1) and (b3) verdicts for the pair; labels use alpha = 1, beta = 2."""
    T_mixed, T_up = p.obstruction
    report = RelationReport()
    report.verdicts["b1"] = _scan_pairs("b1", {(0, 1): b1_residual(T_up)}, 2)
    report.verdicts["b3"] = _scan_pairs("b3", {(0, 1): b3_residual(T_up, T_mixed)}, 2)
    return report


def is_almost_compatible(p):
    T_mixed, T_up = p.obstruction
    return all(e.is_zero() for e in b1_residual(T_up).flat)


def is_compatible(p):
    if not is_almost_compatible(p):
        return False
    T_mixed, T_up = p.obstruction
    return all(e.is_zero() for e in b3_residual(T_up, T_mixed).flat)


def _raise_first(g_upper, gamma):
    """``out[i, j, k]`` = g^{is} Gamma^j_{sk}."""
    N = g_upper.shape[0]
    out = np.empty((N, N, N), dtype=object)
    for i, j, k in itertools.product(range(N), repeat=3):
        acc = g_upper[i, 0] * gamma[j, 0, k]
        for s in range(1, N):
            acc = acc + g_upper[i, s] * gamma[j, s, k]
        out[i, j, k] = acc
    return out


def _raise_curvature(g_upper, R):
    """``out[i, j, k, l]`` = g^{is} R^j_{skl}."""
    N = g_upper.shape[0]
    out = np.empty((N, N, N, N), dtype=object)
    for i, j, k, l in itertools.product(range(N), repeat=4):
        acc = g_upper[i, 0] * R[j, 0, k, l]
        for s in range(1, N):
            acc = acc + g_upper[i, s] * R[j, s, k, l]
        out[i, j, k, l] = acc
    return out


def pencil_direct_check(p):
    """Linearity of the raised connection and curvature along the pencil.

    The pencil ``lambda1 g1 + lambda2 g2`` is formed with the two parameters
    as honest polynomial variables; the identities are checked in
    ``(lambda1, lambda2, u)``.
    """
    p.require_nondegenerate()
    coords = p.coordinates
    ext = coords + PENCIL_PARAMETERS
    N = p.N
    l1 = Expr.symbol(PENCIL_PARAMETERS[0], ext)
    l2 = Expr.symbol(PENCIL_PARAMETERS[1], ext)
    pencil = np.empty((N, N), dtype=object)
    for i, j in itertools.product(range(N), repeat=2):
        pencil[i, j] = l1 * p.g1[i, j].lift(ext) + l2 * p.g2[i, j].lift(ext)
    if det(pencil).is_zero():
        raise DegeneratePencil("det(lambda1 g1 + lambda2 g2) vanishes identically")
    gamma = levi_civita(pencil, coords)
    R = curvature(gamma, coords)
    lifted = []
    for md in (p.first, p.second):
        G = _raise_first(md.g_upper, md.christoffel)
        RR = _raise_curvature(md.g_upper, md.curvature)
        lifted.append((G, RR))
    G = _raise_first(pencil, gamma)
    for idx in np.ndindex(*G.shape):
        expected = l1 * lifted[0][0][idx].lift(ext) + l2 * lifted[1][0][idx].lift(ext)
        if G[idx] != expected:
            return False
    RR = _raise_curvature(pencil, R)
    for idx in np.ndindex(*RR.shape):
        expected = l1 * lifted[0][1][idx].lift(ext) + l2 * lifted[1][1][idx].lift(ext)
        if RR[idx] != expected:
            return False
    return True


def nijenhuis(p):
    """``N[k, i, j]`` = N^k_{ij} of the affinor, exactly as in the Nijenhuis formula."""
    v = p.affinor
    coords = p.coordinates
    N = p.N
    dv = np.empty((N, N, N), dtype=object)  # dv[a, b, s] = d_s v^a_b
    for a, b, s in itertools.product(range(N), repeat=3):
        dv[a, b, s] = v[a, b].diff(coords[s])
    zero = v[0, 0].zero_like()
    out = np.empty((N, N, N), dtype=object)
    for k, i, j in itertools.product(range(N), repeat=3):
        acc = zero
        for s in range(N):
            acc = acc + v[s, i] * dv[k, j, s] - v[s, j] * dv[k, i, s] + v[k, s] * (dv[s, i, j] - dv[s, j, i])
        out[k, i, j] = acc
    return out


def nijenhuis_vanishes(p):
    return all(e.is_zero() for e in nijenhuis(p).flat)


@dataclass
class PencilAnalysis:
    char_poly: Expr  # over coordinates + (lambda,)
    coefficients: list  # Expr coefficients in u, ascending powers of lambda
    discriminant: Expr
    nonsingular: bool
    repeated_roots: list = field(default_factory=list)  # (root Expr or None, multiplicity)
    eigenvalue_multiplicity_note: str = ""


def char_poly(p):
    """``det(g1 - lambda g2)`` as an expression over ``coordinates + ('lambda',)``."""
    coords = p.coordinates
    if LAMBDA in coords:
        raise ShapeError(f"coordinate name {LAMBDA!r} is reserved for the pencil variable")
    ext = coords + (LAMBDA,)
    lam = Expr.symbol(LAMBDA, ext)
    N = p.N
    m = np.empty((N, N), dtype=object)
    for i, j in itertools.product(range(N), repeat=2):
        m[i, j] = p.g1[i, j].lift(ext) - lam * p.g2[i, j].lift(ext)
    return det(m)


def pencil_analysis(p):
    if not p.second.nondegenerate:
        raise DegenerateMetric(direction=2)
    coords = p.coordinates
    P = char_poly(p)
    li = len(coords)
    num = P.num  # the denominator of P does not involve lambda
    dnum = num.derivative(li)
    if num.degrees()[li] <= 1:
        disc_poly = num.context().constant(1)
    else:
        disc_poly = num.resultant(dnum, LAMBDA)
    disc = Expr.from_poly(disc_poly).lift(coords)
    nonsingular = not disc.is_zero()
    repeated = []
    _, factors = num.factor()
    for f, mult in factors:
        if mult < 2 or f.degrees()[li] == 0:
            continue
        fe = Expr.from_poly(f)
        if f.degrees()[li] == 1:
            c0, c1 = fe.coefficients_in(LAMBDA)
            repeated.append(((-c0 / c1).lift(coords), mult))
        else:
            repeated.append((None, mult))
    if nonsingular:
        note = "all eigenvalues distinct as functions (nonsingular pair)"
    elif repeated:
        parts = []
        for root, mult in repeated:
            parts.append(f"lambda = {root} (multiplicity {mult})" if root is not None
                         else f"nonlinear repeated factor (multiplicity {mult})")
        note = "coinciding eigenvalues: " + "; ".join(parts)
    else:
        note = "coinciding eigenvalues"
    return PencilAnalysis(P, P.coefficients_in(LAMBDA), disc, nonsingular, repeated, note)


def verify_diagonal_form(p, change):
    """Check the diagonal normal form ``g2 = g^i delta^{ij}``, ``g1 = f^i(u^i) g^i delta^{ij}`` after ``change``.

    Both metrics are pushed forward in pullback form; derivatives with
    respect to the new coordinates go through the inverse Jacobian.
    """
    J = change.jacobian
    h1 = pushforward_metric(p.g1, J)
    h2 = pushforward_metric(p.g2, J)
    N = p.N
    for i, j in itertools.product(range(N), repeat=2):
        if i != j and not (h1[i, j].is_zero() and h2[i, j].is_zero()):
            return False
    for i in range(N):
        if h2[i, i].is_zero():
            return False
        ratio = h1[i, i] / h2[i, i]
        for j in range(N):
            if j != i and not change.d_new(ratio, j).is_zero():
                return False
    return True
