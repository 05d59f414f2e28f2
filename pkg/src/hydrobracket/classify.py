"""Coordinate changes of brackets and the reducibility classification."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bracket import HydroBracket, obstructions, verify_poisson
from .compat import MetricPair, pencil_analysis
from .errors import EngineInconsistency, NotAPoissonBracket, PoleError, ShapeError
from .geometry import pushforward_metric
from .tensor import det

CONSTANT_REDUCIBLE = "ConstantReducible"
OBSTRUCTED = "Obstructed"
UNDECIDED = "Undecided"


def transform(B, change, *, express_in_new=True):
    """Coefficients of ``B`` in the coordinates ``w = change(u)``.

    ``g' = J g J^T`` and ``b'^{ij}_k = (J^i_p J^j_q b^{pq}_s + J^i_p g^{pq} d_q d_s w^j) K^s_k``
    with ``K = J^{-1}``.  Without an inverse map (or with
    ``express_in_new=False``) the result is in pullback form: a bracket over
    the source names whose entries are functions of u, with
    ``pullback_of`` set to the change.
    """
    if change.coordinates != B.coordinates:
        raise ShapeError("change and bracket use different coordinate names")
    N = B.N
    J, K, H = change.jacobian, change.inverse_jacobian, change.hessians
    zero = B.zero()
    g_new, b_new = [], []
    for g, b in zip(B.g, B.b):
        gp = pushforward_metric(g, J)
        # Jg[i, q] = J^i_p g^{pq}
        Jg = np.empty((N, N), dtype=object)
        for i, q in itertools.product(range(N), repeat=2):
            Jg[i, q] = _dot((J[i, p], g[p, q]) for p in range(N))
        # inner[i, j, s] before contracting with K
        Jb = np.empty((N, N, N), dtype=object)  # Jb[i, q, s] = J^i_p b^{pq}_s
        for i, q, s in itertools.product(range(N), repeat=3):
            Jb[i, q, s] = _dot((J[i, p], b[p, q, s]) for p in range(N))
        inner = np.empty((N, N, N), dtype=object)
        for i, j, s in itertools.product(range(N), repeat=3):
            acc = zero
            for q in range(N):
                if not J[j, q].is_zero():
                    acc = acc + J[j, q] * Jb[i, q, s]
                if not H[j, q, s].is_zero():
                    acc = acc + Jg[i, q] * H[j, q, s]
            inner[i, j, s] = acc
        bp = np.empty((N, N, N), dtype=object)
        for i, j, k in itertools.product(range(N), repeat=3):
            bp[i, j, k] = _dot((inner[i, j, s], K[s, k]) for s in range(N))
        g_new.append(gp)
        b_new.append(bp)
    if express_in_new and change.inverse is not None:
        push = np.vectorize(change.push, otypes=[object])
        out = HydroBracket([push(m) for m in g_new], [push(t) for t in b_new], change.new_coordinates)
        out.pullback_of = None
        return out
    out = HydroBracket(g_new, b_new, B.coordinates)
    out.pullback_of = change
    return out


def _dot(pairs):
    """Sum of products, skipping zero factors."""
    pairs = list(pairs)
    acc = pairs[0][0].zero_like()
    for a, b in pairs:
        if not (a.is_zero() or b.is_zero()):
            acc = acc + a * b
    return acc


def pull_bracket(B, change):
    """Compose every coefficient of ``B`` (written in the new coordinates) with the forward map."""
    pull = np.vectorize(change.pull, otypes=[object])
    return HydroBracket([pull(m) for m in B.g], [pull(t) for t in B.b], change.coordinates)


def matches_pullback(transformed, target, change):
    """``transform(B, change)`` in pullback form equals ``target`` composed with the forward map."""
    if transformed.coordinates != change.coordinates:
        raise ShapeError("transformed bracket must be in pullback form")
    return transformed == pull_bracket(target, change)


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

@dataclass
class Witness:
    pair: tuple  # 1-based (alpha, beta)
    index: tuple  # 1-based (i, j, k) of T^{ijk alpha beta}
    value: object
    partner: tuple | None = None  # (k, j, i) when it carries the same value

    def describe(self):
        a, b = self.pair
        name = lambda idx: "T^{%s,%d%d}" % ("".join(map(str, idx)), a, b)
        text = name(self.index)
        if self.partner is not None and self.partner != self.index:
            text += " = " + name(self.partner)
        return f"{text} = {self.value}"


@dataclass
class ClassificationVerdict:
    kind: str
    witness: Witness | None = None
    note: str = ""

    def __post_init__(self):
        if self.kind == OBSTRUCTED and (self.witness is None or self.witness.value.is_zero()):
            raise EngineInconsistency("an obstructed verdict needs a nonzero witness")


def _complexity(e):
    terms = len(e.num.monoms()) + (0 if e.den.is_one() else len(e.den.monoms()))
    return (0 if e.is_constant() else 1, sum(e.total_degree()), terms)


def pick_witness(obs):
    """Simplest nonzero T^{ijk alpha beta} over alpha < beta, then lowest index."""
    entries = obs.nonzero_up()
    if not entries:
        return None
    pair, idx, value = min(entries, key=lambda t: (_complexity(t[2]), t[0], t[1]))
    T = obs.T_up[(pair[0] - 1, pair[1] - 1)]
    partner = (idx[2], idx[1], idx[0])
    same = T[tuple(i - 1 for i in partner)] == value
    return Witness(pair, idx, value, partner if same else None)


def _require_poisson(B):
    report = verify_poisson(B)
    if not report.overall:
        raise NotAPoissonBracket(report)
    return report


def is_constant_reducible(B):
    B.require_nondegenerate()
    _require_poisson(B)
    obs = obstructions(B)
    if obs.vanishes():
        return ClassificationVerdict(CONSTANT_REDUCIBLE, note="all obstruction tensors vanish identically")
    return ClassificationVerdict(
        OBSTRUCTED, pick_witness(obs), note="a nonzero obstruction tensor forbids reduction to constant form"
    )


@dataclass
class OneComponentResult:
    verdict: ClassificationVerdict
    reference: int | None  # 1-based direction with g not identically zero
    constants: list  # c^alpha with g^alpha = c^alpha g^reference
    normalizing_change: str


def classify_one_component(B):
    if B.N != 1:
        raise ShapeError("one-component classification needs N = 1")
    _require_poisson(B)
    gs = [m[0, 0] for m in B.g]
    ref = next((a for a, g in enumerate(gs) if not g.is_zero()), None)
    if ref is None:
        constants = [Fraction(0)] * B.n
        quad = "every metric vanishes; the bracket is zero"
    else:
        constants = []
        for a, g in enumerate(gs):
            ratio = g / gs[ref]
            if not ratio.is_constant():
                raise EngineInconsistency(f"direction {a + 1} is not proportional to direction {ref + 1}")
            constants.append(ratio.constant_value())
        quad = f"w = integral of du / sqrt(|{gs[ref]}|) brings g^{ref + 1} to the constant sign(g^{ref + 1})"
    verdict = ClassificationVerdict(
        CONSTANT_REDUCIBLE, note="one-component brackets reduce to constant form; metrics are proportional"
    )
    return OneComponentResult(verdict, None if ref is None else ref + 1, constants, quad)


def reducibility_by_nonsingularity(B):
    """Constant form when one metric forms nonsingular pairs with all others; otherwise undecided."""
    B.require_nondegenerate()
    _require_poisson(B)
    for a0 in range(B.n):
        if all(
            pencil_analysis(MetricPair(B.g[b], B.g[a0], B.coordinates)).nonsingular
            for b in range(B.n) if b != a0
        ):
            if not obstructions(B).vanishes():
                raise EngineInconsistency(
                    f"direction {a0 + 1} forms nonsingular pairs but the obstruction tensors do not vanish"
                )
            return ClassificationVerdict(
                CONSTANT_REDUCIBLE,
                note=f"metric {a0 + 1} forms nonsingular pairs with all other metrics; obstructions confirmed zero",
            )
    return ClassificationVerdict(UNDECIDED, note="no metric forms nonsingular pairs with all the others")


@dataclass
class TwoComponentVerdict:
    kind: str  # "constant class" or "canonical class"
    text: str
    definite: list = field(default_factory=list)  # per direction: "positive", "negative" or None
    notes: list = field(default_factory=list)


def metric_definiteness(g, coordinates, samples=8, seed=0):
    """Sign pattern of the leading principal minors at seeded sample points.

    Returns "positive" or "negative" when every sample agrees, else ``None``.
    Informational only: sign conditions are not identities.
    """
    N = g.shape[0]
    minors = [det(g[:k, :k]) for k in range(1, N + 1)]
    if any(m.is_zero() for m in minors):
        return None
    rng = random.Random(seed)
    kinds = set()
    taken = 0
    while taken < samples:
        pt = [Fraction(rng.randint(-40, 40), rng.randint(1, 10)) for _ in coordinates]
        try:
            vals = [m.evaluate(pt) for m in minors]
        except PoleError:
            continue
        if any(v == 0 for v in vals):
            continue
        taken += 1
        if all(v > 0 for v in vals):
            kinds.add("positive")
        elif all((v > 0) == (k % 2 == 0) for k, v in enumerate(vals, start=1)):
            kinds.add("negative")
        else:
            kinds.add(None)
    return kinds.pop() if len(kinds) == 1 else None


def two_component_verdict(B, seed=0):
    if (B.N, B.n) != (2, 2):
        raise ShapeError("the two-component verdict needs N = n = 2")
    B.require_nondegenerate()
    _require_poisson(B)
    definite = [metric_definiteness(m, B.coordinates, seed=seed) for m in B.g]
    if obstructions(B).vanishes():
        kind, text = "constant class", "all obstruction tensors vanish; reducible to a constant bracket"
    else:
        kind = "canonical class"
        text = ("canonical class: generated by the vector fields on the 2-torus; "
                "normal form g1 = diag(1, -1), g2 = [[2u2, u1 + u2], [u1 + u2, 2u1]]")
    notes = []
    for a, d in enumerate(definite, start=1):
        if d is not None:
            notes.append(f"metric {a} is {d} definite at all sample points; definite metrics force the constant class")
            if kind != "constant class":
                notes.append("definiteness sampling disagrees with the obstruction verdict")
    return TwoComponentVerdict(kind, text, definite, notes)
