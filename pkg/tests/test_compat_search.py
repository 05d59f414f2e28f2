"""Search harness for almost compatible but not compatible metric pairs.

Two samplers:

* flat pairs: a constant metric against ``J^{-1} C J^{-T}``, the constant
  metric ``C`` written in coordinates ``u`` with ``w = F(u)`` flat for a random
  polynomial map ``F``;
* singular pairs in three components: ``eta`` = antidiag(1, 1, 1) against
  ``L eta`` with ``L`` an upper-triangular Toeplitz (Jordan-type) affinor.

Every sampled pair is checked against the cross-criterion invariants; pairs
with (b1) passing and (b3) failing are retained.  The fixture
``almost_compatible_pair`` is one of them.  Run this file as a script for a
longer search:  ``python3 tests/test_compat_search.py --family jordan --budget 500``.
"""

import argparse
import itertools
import random

import numpy as np

from hydrobracket.compat import (
    MetricPair,
    compatibility_report,
    is_almost_compatible,
    is_compatible,
    nijenhuis_vanishes,
    pencil_analysis,
    pencil_direct_check,
)
from hydrobracket.errors import DegenerateMetric
from hydrobracket.geometry import MetricData, constant_metric
from hydrobracket.io import load_bracket
from hydrobracket.symexpr import Expr
from hydrobracket.tensor import invert_array, matmul


def _constant(rng, N):
    C = [[0] * N for _ in range(N)]
    for i in range(N):
        C[i][i] = rng.choice([1, -1, 2])
        for j in range(i):
            C[i][j] = C[j][i] = rng.choice([0, 0, 1, -1])
    return C


def _polynomial(rng, u, degree, weights):
    acc = u[0].zero_like()
    for d in range(degree + 1):
        for mono in itertools.combinations_with_replacement(range(len(u)), d):
            c = rng.choice(weights)
            if c:
                term = Expr.constant(c, u[0].variables)
                for m in mono:
                    term = term * u[m]
                acc = acc + term
    return acc


def flat_pairs(rng, N=2, degree=2):
    """Random pairs of flat metrics (first constant)."""
    coords = tuple(f"u{i + 1}" for i in range(N))
    u = [Expr.symbol(c, coords) for c in coords]
    while True:
        F = [u[i] + _polynomial(rng, u, degree, [0, 0, 0, 1, -1]) for i in range(N)]
        J = np.array([[F[i].diff(c) for c in coords] for i in range(N)], dtype=object)
        try:
            K = invert_array(J)
        except (DegenerateMetric, ZeroDivisionError):
            continue
        g2 = matmul(matmul(K, constant_metric(_constant(rng, N), coords)), K.T)
        g1 = constant_metric(_constant(rng, N), coords)
        yield MetricPair(g1, g2, coords)


def jordan_pairs(rng, degree=1):
    """Singular pairs (L eta, eta) in three components, L = [[p, q, r], [0, p, q], [0, 0, p]]."""
    coords = ("u1", "u2", "u3")
    u = [Expr.symbol(c, coords) for c in coords]
    zero, one = Expr.constant(0, coords), Expr.constant(1, coords)
    eta = np.array([[zero, zero, one], [zero, one, zero], [one, zero, zero]], dtype=object)
    while True:
        p, q, r = (_polynomial(rng, u, degree, [0, 0, 0, 1, -1]) for _ in range(3))
        g1 = np.array([[r, q, p], [q, p, zero], [p, zero, zero]], dtype=object)
        yield MetricPair(g1, eta, coords)


def search(pairs, budget, direct_every=5):
    """Check invariants on ``budget`` nondegenerate pairs; return (counts, retained).

    The (slow) direct pencil check runs on every almost compatible pair and on
    every ``direct_every``-th pair otherwise.
    """
    counts = {"sampled": 0, "almost": 0, "compatible": 0}
    retained = []
    for p in pairs:
        if counts["sampled"] == budget:
            break
        if not (p.first.nondegenerate and p.second.nondegenerate):
            continue
        counts["sampled"] += 1
        almost = is_almost_compatible(p)
        compatible = is_compatible(p)
        assert not compatible or almost
        # for any pair, almost compatibility is the vanishing of the Nijenhuis tensor
        assert almost == nijenhuis_vanishes(p)
        if almost or counts["sampled"] % direct_every == 1:
            assert compatible == pencil_direct_check(p)
        counts["almost"] += almost
        counts["compatible"] += compatible
        if almost and not compatible:
            retained.append(p)
    return counts, retained


def test_flat_pairs_invariants():
    for N, budget in ((2, 40), (3, 8)):
        counts, retained = search(flat_pairs(random.Random(N)), budget)
        assert counts["sampled"] == budget
        # none found so far among flat pairs; a hit would become a new fixture
        assert retained == []


def test_jordan_family_retains_counterexamples():
    counts, retained = search(jordan_pairs(random.Random(1)), 60)
    assert counts["compatible"] > 0
    assert retained
    for p in retained:
        rep = compatibility_report(p)
        assert rep["b1"].passed and not rep["b3"].passed
        assert not pencil_analysis(p).nonsingular


def test_almost_compatible_fixture():
    B = load_bracket("almost_compatible_pair")
    for p in (MetricPair(B.g[1], B.g[0], B.coordinates), MetricPair(B.g[0], B.g[1], B.coordinates)):
        rep = compatibility_report(p)
        assert rep["b1"].passed
        assert not rep["b3"].passed
        assert rep["b3"].residual == Expr.constant(1, B.coordinates) / (4 * Expr.symbol("u1", B.coordinates))
        assert is_almost_compatible(p) and not is_compatible(p)
        assert nijenhuis_vanishes(p) and not pencil_direct_check(p)
        assert not pencil_analysis(p).nonsingular
    assert MetricData(B.g[0], B.coordinates).is_flat()
    assert not MetricData(B.g[1], B.coordinates).is_flat()


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", choices=["flat", "jordan"], default="flat")
    parser.add_argument("--components", type=int, default=2, help="N for the flat family")
    parser.add_argument("--budget", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--direct-every", type=int, default=1, help="run the direct pencil check on every k-th pair")
    args = parser.parse_args(argv)
    rng = random.Random(args.seed)
    pairs = flat_pairs(rng, args.components) if args.family == "flat" else jordan_pairs(rng)
    counts, retained = search(pairs, args.budget, args.direct_every)
    print(counts)
    for p in retained:
        print("g1 =", [[str(e) for e in row] for row in p.g1])
        print("g2 =", [[str(e) for e in row] for row in p.g2])


if __name__ == "__main__":
    main()
