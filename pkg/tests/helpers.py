"""Strategies and small builders shared by the test modules."""

import random
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from hydrobracket.compat import MetricPair
from hydrobracket.coordinates import random_triangular_change
from hydrobracket.geometry import pushforward_metric
from hydrobracket.io import fixture_path, load_bracket
from hydrobracket.symexpr import Expr, parse

U2 = ("u1", "u2")
U3 = ("u1", "u2", "u3")

small_ints = st.integers(min_value=-4, max_value=4)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def _monomial(variables, coef, exps):
    e = Expr.constant(coef, variables)
    for name, k in zip(variables, exps):
        if k:
            e = e * Expr.symbol(name, variables) ** k
    return e


def polys(variables=U2, max_terms=4, max_degree=3):
    term = st.tuples(small_ints, st.tuples(*[st.integers(0, max_degree)] * len(variables)))
    return st.lists(term, min_size=0, max_size=max_terms).map(
        lambda ts: sum((_monomial(variables, c, ex) for c, ex in ts), Expr.constant(0, variables))
    )


def nonzero_polys(variables=U2, **kw):
    return polys(variables, **kw).filter(lambda e: not e.is_zero())


def exprs(variables=U2):
    """Rational functions num/den with small random polynomials."""
    return st.tuples(polys(variables), nonzero_polys(variables, max_terms=3, max_degree=2)).map(
        lambda p: p[0] / p[1]
    )


def points(n, count=None):
    pt = st.tuples(*[rationals] * n)
    return pt if count is None else st.lists(pt, min_size=count, max_size=count)


def matrix(rows, variables=U2):
    return np.array([[parse(str(s), variables) for s in r] for r in rows], dtype=object)


def fixture(name):
    return load_bracket(fixture_path(name))


def as_sympy(e):
    import sympy

    return sympy.sympify(str(e).replace("^", "**"))


def exact_at(e, pt):
    return e.evaluate([Fraction(x) for x in pt])


# ---------------------------------------------------------------------------
# Nonsingular metric pairs in diagonal form and their pushforwards
# ---------------------------------------------------------------------------

def _one_variable(rng, name):
    a, b, c = rng.choice([1, 2, -1, 3]), rng.randint(-2, 2), rng.randint(0, 1)
    return f"({a}*{name} + {b} + {c}*{name}^2)"


def diagonal_pair(seed, compatible=True):
    """g2 = diag(g^i), g1 = diag(f^i g^i); f^1 also depends on u2 when ``compatible`` is false."""
    rng = random.Random(seed)
    f1 = _one_variable(rng, "u1")
    f2 = _one_variable(rng, "u2")
    if not compatible:
        f1 = f"({f1} + {rng.choice([1, -1, 2])}*u2)"
    g = [f"(u1 + {rng.randint(1, 3)}*u2 + {rng.randint(1, 4)})", f"(u1*u2 + {rng.randint(1, 3)})"]
    g2 = matrix([[g[0], "0"], ["0", g[1]]])
    g1 = matrix([[f"{f1}*{g[0]}", "0"], ["0", f"{f2}*{g[1]}"]])
    return MetricPair(g1, g2, U2)


def pushed(p, change):
    push = np.vectorize(change.push, otypes=[object])
    J = change.jacobian
    return MetricPair(push(pushforward_metric(p.g1, J)), push(pushforward_metric(p.g2, J)), U2)


def nonsingular_pair_suite():
    pairs = []
    for seed in range(6):
        for compatible in (True, False):
            p = diagonal_pair(seed, compatible)
            pairs.append((f"diag-{seed}-{compatible}", p))
            if seed < 3:
                pairs.append((f"push-{seed}-{compatible}", pushed(p, random_triangular_change(U2, 100 + seed, max_degree=1))))
    return pairs
