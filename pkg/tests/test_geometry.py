import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import U2, U3, as_sympy, matrix
from hydrobracket.coordinates import random_triangular_change
from hydrobracket.errors import ShapeError
from hydrobracket.geometry import (
    MetricData,
    b_from_metric,
    connection_from_b,
    constant_metric,
    covariant_derivative_3up,
    curvature,
    levi_civita,
    pushforward_metric,
)
from hydrobracket.oracle import crosscheck_metric, numeric_curvature, numeric_levi_civita, oracle_points
from hydrobracket.symexpr import parse

HYPERBOLIC = [["u2^2", "0"], ["0", "u2^2"]]  # inverse of (du1^2 + du2^2)/u2^2


def sympy_christoffel(g_upper, names):
    xs = sympy.symbols(" ".join(names))
    G = sympy.Matrix(len(names), len(names), [as_sympy(e) for e in g_upper.flat])
    L = G.inv()
    n = len(names)
    return [[[sympy.cancel(sum(G[k, l] * (sympy.diff(L[l, j], xs[i]) + sympy.diff(L[l, i], xs[j])
                                          - sympy.diff(L[i, j], xs[l])) for l in range(n)) / 2)
              for j in range(n)] for i in range(n)] for k in range(n)]


def test_levi_civita_matches_sympy():
    g = matrix([["u1^2 + 1", "u1*u2"], ["u1*u2", "u2 + 3"]])
    gamma = levi_civita(g, U2)
    expected = sympy_christoffel(g, U2)
    for k, i, j in itertools.product(range(2), repeat=3):
        assert sympy.cancel(as_sympy(gamma[k, i, j]) - expected[k][i][j]) == 0


def test_hyperbolic_plane_not_flat():
    md = MetricData(matrix(HYPERBOLIC), U2)
    assert not md.is_flat()
    gamma, dgamma = numeric_levi_civita(md.g_upper, (1, 1))
    R = numeric_curvature(gamma, dgamma)
    assert np.max(np.abs(R)) > 1e-6
    # sectional curvature -1: R^1_{212} = -1 at u2 = 1
    assert md.curvature[0, 1, 0, 1].evaluate([1, 1]) == -1


@pytest.mark.parametrize("seed", range(5))
def test_pushforward_of_constant_metric_is_flat(seed):
    g0 = constant_metric([[1, 0], [0, -1]] if seed % 2 else [[2, 1], [1, 3]], U2)
    change = random_triangular_change(U2, seed)
    g = np.vectorize(change.push, otypes=[object])(pushforward_metric(g0, change.jacobian))
    md = MetricData(g, U2)
    assert md.nondegenerate
    assert md.is_flat()


def _random_metric(seed):
    rng = np.random.default_rng(seed)
    c = [int(x) for x in rng.integers(-2, 3, size=5)]
    return matrix([[f"u1^2 + {abs(c[0]) + 1}", f"{c[1]}*u2 + {c[2]}"],
                   [f"{c[1]}*u2 + {c[2]}", f"u2^2 + {c[3]}*u1 + {abs(c[4]) + 2}"]])


@settings(max_examples=8)
@given(st.integers(0, 10_000))
def test_first_bianchi_identity(seed):
    R = curvature(levi_civita(_random_metric(seed), U2), U2)
    for i, j, k, l in itertools.product(range(2), repeat=4):
        assert (R[i, j, k, l] + R[i, k, l, j] + R[i, l, j, k]).is_zero()


@settings(max_examples=8)
@given(st.integers(0, 10_000))
def test_lowered_curvature_antisymmetric(seed):
    md = MetricData(_random_metric(seed), U2)
    R, L = md.curvature, md.g_lower
    low = np.empty((2, 2, 2, 2), dtype=object)
    for a, j, k, l in itertools.product(range(2), repeat=4):
        low[a, j, k, l] = L[a, 0] * R[0, j, k, l] + L[a, 1] * R[1, j, k, l]
    for a, j, k, l in itertools.product(range(2), repeat=4):
        assert low[a, j, k, l] == -low[j, a, k, l]
        assert low[a, j, k, l] == -low[a, j, l, k]


def test_b_from_metric_reproduces_derivative_and_connection():
    g = _random_metric(7)
    md = MetricData(g, U2)
    b = b_from_metric(g, U2)
    for i, j, k in itertools.product(range(2), repeat=3):
        assert g[i, j].diff(U2[k]) == b[i, j, k] + b[j, i, k]
    gamma = connection_from_b(md.g_lower, b)
    assert all(x == y for x, y in zip(gamma.flat, md.christoffel.flat))


def test_covariant_derivative_flat_coordinates_is_partial():
    g = constant_metric([[1, 0, 0], [0, 2, 0], [0, 0, -1]], U3)
    gamma = levi_civita(g, U3)
    T = np.empty((3, 3, 3), dtype=object)
    for idx in np.ndindex(3, 3, 3):
        T[idx] = parse(f"u1^{idx[0]}*u2 + {idx[1]}*u3*u1 - {idx[2]}", U3)
    D = covariant_derivative_3up(T, gamma, U3)
    for i, j, k, r in itertools.product(range(3), repeat=4):
        assert D[i, j, k, r] == T[i, j, k].diff(U3[r])


def test_metric_checks():
    with pytest.raises(ShapeError):
        MetricData(matrix([["1", "u1"], ["0", "1"]]), U2)
    assert not MetricData(matrix([["u1", "u1"], ["u1", "u1"]]), U2).nondegenerate


def test_metric_oracle():
    for g in (matrix(HYPERBOLIC), _random_metric(3), matrix([["u1", "1"], ["1", "u2"]])):
        res = crosscheck_metric(MetricData(g, U2), oracle_points(2))
        assert res.ok(), res
        assert res.points_used >= 15
