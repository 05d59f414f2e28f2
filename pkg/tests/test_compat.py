import pytest

from helpers import U2, U3, diagonal_pair, fixture, matrix, pushed, nonsingular_pair_suite
from hydrobracket.compat import (
    MetricPair,
    char_poly,
    compatibility_report,
    is_almost_compatible,
    is_compatible,
    nijenhuis,
    nijenhuis_vanishes,
    pencil_analysis,
    pencil_direct_check,
    verify_diagonal_form,
)
from hydrobracket.coordinates import CoordinateChange, random_triangular_change
from hydrobracket.errors import DegenerateMetric, ShapeError
from hydrobracket.oracle import crosscheck_nijenhuis, oracle_points
from hydrobracket.symexpr import Expr, parse


def canonical_pair():
    # pencil det(g2 - lambda g1) of the canonical bracket
    B = fixture("canonical_c6")
    return MetricPair(B.g[1], B.g[0], U2)


def test_canonical_pair_pencil():
    p = canonical_pair()
    lam = Expr.symbol("lambda", U2 + ("lambda",))
    u1, u2 = (Expr.symbol(v, U2 + ("lambda",)) for v in U2)
    P = char_poly(p)
    assert P == -((lam - (u2 - u1)) ** 2)
    pa = pencil_analysis(p)
    assert pa.discriminant.is_zero()
    assert not pa.nonsingular
    assert pa.repeated_roots == [(parse("u2 - u1", U2), 2)]
    assert is_compatible(p)
    assert pencil_direct_check(p)


def test_identical_metrics_compatible():
    g = matrix([["u1", "1"], ["1", "u2"]])
    p = MetricPair(g, g, U2)
    assert is_compatible(p)
    assert pencil_direct_check(p)
    assert nijenhuis_vanishes(p)
    assert not pencil_analysis(p).nonsingular


def test_derived_incompatible_pair():
    B = fixture("incompatible_flat_pair")
    for p in (MetricPair(B.g[0], B.g[1], U2), MetricPair(B.g[1], B.g[0], U2)):
        rep = compatibility_report(p)
        assert not rep["b1"].passed
        assert not rep["b1"].residual.is_zero()
        assert not is_almost_compatible(p)
        assert not is_compatible(p)
        assert not pencil_direct_check(p)
        assert not nijenhuis_vanishes(p)
        assert pencil_analysis(p).nonsingular


def test_degenerate_inputs():
    g = matrix([["u1", "u1"], ["u1", "u1"]])
    h = matrix([["1", "0"], ["0", "1"]])
    with pytest.raises(DegenerateMetric):
        MetricPair(h, g, U2).affinor
    with pytest.raises(DegenerateMetric):
        pencil_analysis(MetricPair(h, g, U2))
    with pytest.raises(ShapeError):
        char_poly(MetricPair(h, h, ("u1", "lambda")))


def test_nijenhuis_formula_on_known_affinor():
    # v = diag(u2, u1): only the off-diagonal derivatives contribute
    g1 = matrix([["u2", "0"], ["0", "u1"]])
    g2 = matrix([["1", "0"], ["0", "1"]])
    N = nijenhuis(MetricPair(g1, g2, U2))
    assert N[0, 0, 1] == parse("u2 - u1", U2)
    assert N[1, 0, 1] == parse("u2 - u1", U2)
    assert (N[0, 0, 1] + N[0, 1, 0]).is_zero()


# ---------------------------------------------------------------------------
# Nonsingular pairs: compatibility, the Nijenhuis tensor and the pencil check
# ---------------------------------------------------------------------------

SUITE = nonsingular_pair_suite()


@pytest.mark.parametrize("label,p", SUITE, ids=[s[0] for s in SUITE])
def test_nonsingular_pair_criteria_agree(label, p):
    assert pencil_analysis(p).nonsingular
    compatible = is_compatible(p)
    assert compatible == nijenhuis_vanishes(p)
    assert compatible == pencil_direct_check(p)
    assert compatible == label.endswith("True")


def test_nonsingular_pair_suite_size():
    nonsingular = [p for _, p in SUITE if pencil_analysis(p).nonsingular]
    assert len(nonsingular) >= 10
    assert any(is_compatible(p) for p in nonsingular) and not all(is_compatible(p) for p in nonsingular)


def test_diagonal_form_fixture():
    B = fixture("diagonal_form_pair")
    p = MetricPair(B.g[1], B.g[0], U2)
    assert is_compatible(p) and nijenhuis_vanishes(p) and pencil_analysis(p).nonsingular
    assert verify_diagonal_form(p, CoordinateChange.identity(U2))


def test_diagonal_form_recovered_after_change():
    p = diagonal_pair(4)
    change = random_triangular_change(U2, 9, max_degree=1)
    q = pushed(p, change)
    assert not verify_diagonal_form(q, CoordinateChange.identity(U2))
    back = CoordinateChange(change.inverse, U2, change.forward, U2)
    assert verify_diagonal_form(q, back)


def test_diagonal_form_rejects_mixed_ratio():
    assert not verify_diagonal_form(diagonal_pair(2, compatible=False), CoordinateChange.identity(U2))


def test_three_component_pair():
    g2 = matrix([["u1 + 2", "0", "0"], ["0", "u2 + 3", "0"], ["0", "0", "u3^2 + 1"]], U3)
    g1 = matrix([["u1*(u1 + 2)", "0", "0"], ["0", "2*u2*(u2 + 3)", "0"], ["0", "0", "(u3 - 1)*(u3^2 + 1)"]], U3)
    p = MetricPair(g1, g2, U3)
    assert pencil_analysis(p).nonsingular
    assert is_compatible(p) and nijenhuis_vanishes(p) and pencil_direct_check(p)


@pytest.mark.parametrize("label,p", SUITE[:6], ids=[s[0] for s in SUITE[:6]])
def test_nijenhuis_oracle(label, p):
    res = crosscheck_nijenhuis(p, oracle_points(2, seed=2))
    assert res.ok(), res
