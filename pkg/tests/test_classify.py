import itertools
from fractions import Fraction

import numpy as np
import pytest

from helpers import U2, fixture
from hydrobracket.bracket import obstructions, verify_poisson
from hydrobracket.classify import (
    CONSTANT_REDUCIBLE,
    OBSTRUCTED,
    UNDECIDED,
    ClassificationVerdict,
    classify_one_component,
    is_constant_reducible,
    matches_pullback,
    metric_definiteness,
    reducibility_by_nonsingularity,
    transform,
    two_component_verdict,
)
from hydrobracket.coordinates import CoordinateChange, random_linear_change, random_triangular_change
from hydrobracket.errors import DegenerateMetric, EngineInconsistency, NotAPoissonBracket
from hydrobracket.io import fixture_path, load_change

QUAD = ["(u1^2 - u2^2)/2", "(u1 + u2)/2"]
RAT = ["u2 + u1/(2*u2)", "u2 - u1/(2*u2)"]
SUITE = ["torus_n2", "canonical_c6", "constant_pair", "constant_flat"]


def test_identity_transform():
    B = fixture("torus_n2")
    assert transform(B, CoordinateChange.identity(U2)) == B


def test_canonical_form_change():
    torus, c6 = fixture("torus_n2"), fixture("canonical_c6")
    quad = CoordinateChange.from_strings(QUAD, U2, RAT)
    # c6 in u becomes the torus bracket in w = quad(u), as a pullback identity
    assert matches_pullback(transform(c6, quad, express_in_new=False), torus, quad)
    assert transform(c6, quad) == torus
    rat = CoordinateChange.from_strings(RAT, U2, QUAD)
    assert matches_pullback(transform(torus, rat, express_in_new=False), c6, rat)
    assert transform(torus, rat) == c6


def test_transform_without_inverse_is_pullback_form():
    c6 = fixture("canonical_c6")
    quad = CoordinateChange.from_strings(QUAD, U2)
    out = transform(c6, quad)
    assert out.pullback_of is quad
    assert matches_pullback(out, fixture("torus_n2"), quad)


def test_quadratic_change_applied_to_torus_is_not_canonical():
    # the other direction does not reproduce the canonical bracket
    quad = CoordinateChange.from_strings(QUAD, U2, RAT)
    assert not matches_pullback(transform(fixture("torus_n2"), quad, express_in_new=False),
                                fixture("canonical_c6"), quad)


@pytest.mark.parametrize("seed", range(3))
def test_random_linear_round_trip(seed):
    B = fixture("canonical_c6")
    c = random_linear_change(U2, seed)
    back = CoordinateChange(c.inverse, U2, c.forward, U2)
    assert transform(transform(B, c), back) == B


@pytest.mark.parametrize("name", ["torus_n2", "canonical_c6"])
@pytest.mark.parametrize("seed", range(2))
def test_transform_functorial(name, seed):
    B = fixture(name)
    a = random_triangular_change(U2, 10 + seed, max_degree=1)
    b = random_triangular_change(U2, 20 + seed, max_degree=2)
    assert transform(transform(B, a), b) == transform(B, a.compose(b))


def _jacobian_transformed(T, J):
    N = J.shape[0]
    out = np.empty_like(T)
    for i, j, k in itertools.product(range(N), repeat=3):
        acc = T[0, 0, 0].zero_like()
        for a, b, c in itertools.product(range(N), repeat=3):
            if not (T[a, b, c].is_zero() or J[i, a].is_zero() or J[j, b].is_zero() or J[k, c].is_zero()):
                acc = acc + J[i, a] * J[j, b] * J[k, c] * T[a, b, c]
        out[i, j, k] = acc
    return out


@pytest.mark.parametrize("name", SUITE)
@pytest.mark.parametrize("seed", range(5))
def test_invariance_under_changes(name, seed):
    B = fixture(name)
    change = random_triangular_change(U2, seed)
    C = transform(B, change)
    assert verify_poisson(C).overall == verify_poisson(B).overall
    ob, oc = obstructions(B), obstructions(C)
    assert ob.vanishes() == oc.vanishes()
    assert is_constant_reducible(C).kind == is_constant_reducible(B).kind
    # T^{ijk} is a contravariant tensor: compare in pullback form
    pull = np.vectorize(change.pull, otypes=[object])
    for key in ob.pairs():
        expected = _jacobian_transformed(ob.T_up[key], change.jacobian)
        assert all(x == y for x, y in zip(pull(oc.T_up[key]).flat, expected.flat))


def test_constant_bracket_reducible():
    v = is_constant_reducible(fixture("constant_pair"))
    assert v.kind == CONSTANT_REDUCIBLE and v.witness is None
    assert reducibility_by_nonsingularity(fixture("constant_pair")).kind == CONSTANT_REDUCIBLE


@pytest.mark.parametrize("name,value", [("torus_n2", "u1"), ("canonical_c6", "1")])
def test_obstructed_witness(name, value):
    v = is_constant_reducible(fixture(name))
    assert v.kind == OBSTRUCTED
    assert str(v.witness.value) == value
    assert v.witness.describe() == f"T^{{112,12}} = T^{{211,12}} = {value}"


def test_obstructed_needs_witness():
    with pytest.raises(EngineInconsistency):
        ClassificationVerdict(OBSTRUCTED)


def test_nonsingularity_consistency():
    # whenever the nonsingular-pair test concludes, the direct test agrees
    for name in SUITE:
        B = fixture(name)
        if reducibility_by_nonsingularity(B).kind == CONSTANT_REDUCIBLE:
            assert is_constant_reducible(B).kind == CONSTANT_REDUCIBLE
    assert reducibility_by_nonsingularity(fixture("torus_n2")).kind == UNDECIDED


def test_two_component_verdicts():
    assert two_component_verdict(fixture("torus_n2")).kind == "canonical class"
    assert two_component_verdict(fixture("canonical_c6")).kind == "canonical class"
    tc = two_component_verdict(fixture("constant_pair"))
    assert tc.kind == "constant class"
    assert tc.definite == ["positive", "positive"]


def test_definiteness_sampling():
    B = fixture("canonical_c6")
    assert metric_definiteness(B.g[0], U2) is None  # diag(1, -1)
    assert metric_definiteness(-fixture("constant_pair").g[0], U2) == "negative"


def test_one_component():
    res = classify_one_component(fixture("one_component_n3"))
    assert res.verdict.kind == CONSTANT_REDUCIBLE
    assert res.constants == [Fraction(1), Fraction(2), Fraction(3)]
    assert res.reference == 1
    res = classify_one_component(fixture("torus_n1"))
    assert res.verdict.kind == CONSTANT_REDUCIBLE and res.constants == [1]


def test_not_poisson_rejected():
    for name in ("one_component_nonproportional", "broken_a2"):
        with pytest.raises(NotAPoissonBracket) as err:
            if name.startswith("one"):
                classify_one_component(fixture(name))
            else:
                is_constant_reducible(fixture(name))
        assert not err.value.report.overall


def test_degenerate_rejected():
    with pytest.raises(DegenerateMetric):
        is_constant_reducible(fixture("torus_n3"))


def test_change_fixtures_load():
    for name in ("torus_to_canonical", "canonical_to_torus", "identity_change"):
        c = load_change(fixture_path(name), U2)
        assert c.inverse is not None
