"""Floating-point cross-checks of the symbolic geometry.

Everything here is recomputed from second-order jets of the input entries
with plain numpy linear algebra, so it shares no code path with the exact
engine beyond reading the input expressions.  Symbolic results are compared
entry by entry after exact evaluation at seeded random rational points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PoleError
from .symexpr import eval_jet


def oracle_points(N, count=20, seed=0, low=-3, high=3):
    """Seeded random rational points with small denominators."""
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        pts.append(tuple(Fraction(rng.randint(low * 8, high * 8), rng.choice([2, 4, 8, 3])) for _ in range(N)))
    return pts


def jets_of(arr, point):
    """Value, gradient and Hessian arrays of an object array of Expr."""
    x = [float(p) for p in point]
    N = len(x)
    val = np.empty(arr.shape)
    grad = np.empty(arr.shape + (N,))
    hess = np.empty(arr.shape + (N, N))
    for idx in np.ndindex(*arr.shape):
        j = eval_jet(arr[idx], x)
        val[idx], grad[idx], hess[idx] = j.value, j.gradient, j.hessian
    return val, grad, hess


def _require_regular(G):
    if np.linalg.cond(G) > 1e8:
        raise PoleError("metric is numerically degenerate at the sample point")


def numeric_levi_civita(g_upper, point):
    """``(gamma, dgamma)`` with gamma[k, i, j] and dgamma[k, i, j, t] = d_t Gamma^k_{ij}."""
    G, dG, ddG = jets_of(g_upper, point)
    _require_regular(G)
    L = np.linalg.inv(G)
    # derivatives of the lower metric; dG[a, b, s] = d_s g^{ab}
    dL = -np.einsum("ia,abs,bj->ijs", L, dG, L)
    ddL = (
        -np.einsum("iat,abs,bj->ijst", dL, dG, L)
        - np.einsum("ia,abst,bj->ijst", L, ddG, L)
        - np.einsum("ia,abs,bjt->ijst", L, dG, dL)
    )
    # first kind: F[s, i, j] = 1/2 (d_i g_{sj} + d_j g_{si} - d_s g_{ij})
    F = 0.5 * (np.einsum("sji->sij", dL) + dL - np.einsum("ijs->sij", dL))
    gamma = np.einsum("ks,sij->kij", G, F)
    dF = 0.5 * (
        np.einsum("sjit->sijt", ddL) + ddL - np.einsum("ijst->sijt", ddL)
    )
    dgamma = np.einsum("kst,sij->kijt", dG, F) + np.einsum("ks,sijt->kijt", G, dF)
    return gamma, dgamma


def numeric_connection_from_b(g_upper, b, point):
    """Gamma^k_{ij} = -g_{is} b^{sk}_j with its first derivatives."""
    G, dG, _ = jets_of(g_upper, point)
    Bv, dB, _ = jets_of(b, point)
    _require_regular(G)
    L = np.linalg.inv(G)
    dL = -np.einsum("ia,abs,bj->ijs", L, dG, L)
    gamma = -np.einsum("is,skj->kij", L, Bv)
    dgamma = -np.einsum("ist,skj->kijt", dL, Bv) - np.einsum("is,skjt->kijt", L, dB)
    return gamma, dgamma


def numeric_curvature(gamma, dgamma):
    """R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{ks} Gamma^s_{lj} - Gamma^i_{ls} Gamma^s_{kj}."""
    return (
        np.einsum("iljk->ijkl", dgamma)
        - np.einsum("ikjl->ijkl", dgamma)
        + np.einsum("iks,slj->ijkl", gamma, gamma)
        - np.einsum("ils,skj->ijkl", gamma, gamma)
    )


def _curvature_ref(gamma, dgamma):
    return _mag(dgamma) + _mag(gamma) ** 2


def numeric_obstruction(gamma_a, gamma_b, G_a, G_b):
    T_mixed = gamma_b - gamma_a
    T_up = np.einsum("ks,ir,jrs->ijk", G_b, G_a, T_mixed)
    return T_mixed, T_up


def numeric_nijenhuis(g1, g2, point, with_reference=False):
    G1, dG1, _ = jets_of(g1, point)
    G2, dG2, _ = jets_of(g2, point)
    _require_regular(G2)
    L2 = np.linalg.inv(G2)
    dL2 = -np.einsum("ia,abs,bj->ijs", L2, dG2, L2)
    v = G1 @ L2
    dv = np.einsum("ias,aj->ijs", dG1, L2) + np.einsum("ia,ajs->ijs", G1, dL2)  # dv[a, b, s] = d_s v^a_b
    N = (
        np.einsum("si,kjs->kij", v, dv)
        - np.einsum("sj,kis->kij", v, dv)
        + np.einsum("ks,sij->kij", v, dv)
        - np.einsum("ks,sji->kij", v, dv)
    )
    return (N, _mag(v) * _mag(dv)) if with_reference else N


def exact_values(arr, point):
    out = np.empty(arr.shape)
    for idx in np.ndindex(*arr.shape):
        out[idx] = float(arr[idx].evaluate(point))
    return out


def _mag(a):
    return float(np.max(np.abs(a), initial=0.0))


def scaled_error(symbolic, numeric, reference=0.0):
    """Largest |s - x| / max(|s|, scale).

    ``scale`` is the larger of the tensor's own magnitude and ``reference``,
    the magnitude of the terms it is built from.  Without the reference a
    tensor that cancels to zero (a flat curvature) would be compared against
    its own rounding noise.
    """
    scale = max(_mag(symbolic), reference) or 1.0
    denom = np.maximum(np.abs(symbolic), scale)
    return float(np.max(np.abs(symbolic - numeric) / denom, initial=0.0))


@dataclass
class OracleResult:
    max_error: float
    points_used: int
    checked: list  # names of the compared objects

    def ok(self, rtol=1e-9):
        return self.points_used > 0 and self.max_error <= rtol


def _record(result, name, symbolic_values, numeric_arr, reference=0.0):
    result.max_error = max(result.max_error, scaled_error(symbolic_values, numeric_arr, reference))
    if name not in result.checked:
        result.checked.append(name)


_SKIP = (PoleError, ZeroDivisionError, np.linalg.LinAlgError)


def crosscheck_metric(md, points):
    """Gamma and R of one metric against their jet evaluations."""
    res = OracleResult(0.0, 0, [])
    for pt in points:
        try:
            gamma, dgamma = numeric_levi_civita(md.g_upper, pt)
            pairs = [
                ("Gamma", exact_values(md.christoffel, pt), gamma, 0.0),
                ("R", exact_values(md.curvature, pt), numeric_curvature(gamma, dgamma), _curvature_ref(gamma, dgamma)),
            ]
        except _SKIP:
            continue
        for name, sym, num, ref in pairs:
            _record(res, name, sym, num, ref)
        res.points_used += 1
    return res


def crosscheck_bracket(B, points):
    """Per-direction Gamma (from b) and R, and T for every ordered pair."""
    from .bracket import derive_geometry, obstructions

    geo = derive_geometry(B, check=False)
    obs = obstructions(B)
    res = OracleResult(0.0, 0, [])
    for pt in points:
        try:
            nums = [numeric_connection_from_b(B.g[a], B.b[a], pt) for a in range(B.n)]
            Gs = [jets_of(B.g[a], pt)[0] for a in range(B.n)]
            pairs = []
            for x, (gamma, dgamma) in zip(geo, nums):
                pairs.append(("Gamma", exact_values(x.connection, pt), gamma, 0.0))
                pairs.append(("R", exact_values(x.metric.curvature, pt), numeric_curvature(gamma, dgamma),
                              _curvature_ref(gamma, dgamma)))
            for (a, c) in obs.pairs():
                Tm, Tu = numeric_obstruction(nums[a][0], nums[c][0], Gs[a], Gs[c])
                ref = _mag(nums[a][0]) + _mag(nums[c][0])
                pairs.append(("T_mixed", exact_values(obs.T_mixed[(a, c)], pt), Tm, ref))
                pairs.append(("T_up", exact_values(obs.T_up[(a, c)], pt), Tu, ref * _mag(Gs[a]) * _mag(Gs[c])))
        except _SKIP:
            continue
        for name, sym, num, ref in pairs:
            _record(res, name, sym, num, ref)
        res.points_used += 1
    return res


def crosscheck_nijenhuis(pair, points):
    from .compat import nijenhuis

    sym = nijenhuis(pair)
    res = OracleResult(0.0, 0, [])
    for pt in points:
        try:
            num, ref = numeric_nijenhuis(pair.g1, pair.g2, pt, with_reference=True)
            exact = exact_values(sym, pt)
        except _SKIP:
            continue
        _record(res, "Nijenhuis", exact, num, ref)
        res.points_used += 1
    return res
