"""Field-linear brackets and Lie algebras of hydrodynamic type.

Constant data ``b0[alpha][i, j, k]`` = b^{ij alpha}_k and ``g0[alpha][i, j]``
define the bracket with ``g^{ij alpha}(u) = (b^{ij alpha}_k + b^{ji alpha}_k) u^k + g0^{ij alpha}``
and the operation ``[xi, eta]_k = b^{ij alpha}_k ((eta_i)_alpha xi_j - eta_j (xi_i)_alpha)``
on covector fields over the n-torus.  Jacobi and cocycle questions are
answered by the coefficient relation engine; the spectral oracle is an
independent numeric check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import flint
import numpy as np

from .bracket import HydroBracket, RelationReport, verify_poisson
from .errors import ShapeError
from .symexpr import Expr, substitute


def default_coordinates(N):
    return tuple(f"u{i}" for i in range(1, N + 1))


def _fraction_array(a, shape):
    arr = np.empty(shape, dtype=object)
    src = np.asarray(a, dtype=object)
    if src.shape != shape:
        raise ShapeError(f"expected shape {shape}, got {src.shape}")
    for idx in np.ndindex(*shape):
        arr[idx] = Fraction(src[idx])
    arr.flags.writeable = False
    return arr


class LinearBracketData:
    """Structure constants of a field-linear bracket (possibly with a constant part g0)."""

    def __init__(self, b0, g0=None):
        b0 = list(b0)
        if not b0:
            raise ShapeError("need at least one direction")
        N = np.asarray(b0[0], dtype=object).shape[0]
        self.b0 = [_fraction_array(t, (N, N, N)) for t in b0]
        if g0 is None:
            g0 = [np.zeros((N, N), dtype=int) for _ in b0]
        g0 = list(g0)
        if len(g0) != len(b0):
            raise ShapeError(f"{len(b0)} b-arrays but {len(g0)} constant metrics")
        self.g0 = [_fraction_array(m, (N, N)) for m in g0]

    @property
    def N(self):
        return self.b0[0].shape[0]

    @property
    def n(self):
        return len(self.b0)

    def homogeneous(self):
        return LinearBracketData(self.b0)

    def with_g0(self, g0):
        return LinearBracketData(self.b0, g0)

    def symmetric_part(self, alpha):
        """``S[i, j, k]`` = b^{ij alpha}_k + b^{ji alpha}_k (0-based alpha)."""
        b = self.b0[alpha]
        return b + np.transpose(b, (1, 0, 2))

    def __eq__(self, other):
        if not isinstance(other, LinearBracketData):
            return NotImplemented
        return (self.N, self.n) == (other.N, other.n) and all(
            np.array_equal(a, b) for a, b in zip(self.b0 + self.g0, other.b0 + other.g0)
        )

    def __repr__(self):
        return f"LinearBracketData(N={self.N}, n={self.n})"


def vector_field_data(n):
    """Constants b^{ij alpha}_k = delta^i_k delta^{j alpha} of the vector-field algebra on T^n (N = n)."""
    b0 = []
    for a in range(n):
        t = np.zeros((n, n, n), dtype=int)
        for i in range(n):
            t[i, a, i] = 1
        b0.append(t)
    return LinearBracketData(b0)


def to_bracket(L, coordinates=None):
    coordinates = tuple(coordinates) if coordinates is not None else default_coordinates(L.N)
    N = L.N
    u = [Expr.symbol(c, coordinates) for c in coordinates]
    g, b = [], []
    for a in range(L.n):
        S = L.symmetric_part(a)
        m = np.empty((N, N), dtype=object)
        for i, j in itertools.product(range(N), repeat=2):
            acc = Expr.constant(L.g0[a][i, j], coordinates)
            for k in range(N):
                if S[i, j, k]:
                    acc = acc + u[k] * S[i, j, k]
            m[i, j] = acc
        t = np.empty((N, N, N), dtype=object)
        for idx in np.ndindex(N, N, N):
            t[idx] = Expr.constant(L.b0[a][idx], coordinates)
        g.append(m)
        b.append(t)
    return HydroBracket(g, b, coordinates)


def check_linear_form(B):
    """Extract the constants if ``B`` is field-linear, else ``None``."""
    N = B.N
    b0, g0 = [], []
    for a in range(B.n):
        bt = np.empty((N, N, N), dtype=object)
        for idx in np.ndindex(N, N, N):
            e = B.b[a][idx]
            if not e.is_constant():
                return None
            bt[idx] = e.constant_value()
        S = bt + np.transpose(bt, (1, 0, 2))
        gm = np.empty((N, N), dtype=object)
        for i, j in itertools.product(range(N), repeat=2):
            rest = B.g[a][i, j]
            for k, name in enumerate(B.coordinates):
                if S[i, j, k]:
                    rest = rest - Expr.symbol(name, B.coordinates) * S[i, j, k]
            if not rest.is_constant():
                return None
            gm[i, j] = rest.constant_value()
        b0.append(bt)
        g0.append(gm)
    return LinearBracketData(b0, g0)


def jacobi_check(L):
    """(a1)-(a7) for the homogeneous bracket: skew-symmetry and Jacobi of the operation."""
    return verify_poisson(to_bracket(L.homogeneous()))


@dataclass
class CocycleReport:
    skew: bool
    closed: bool
    coboundary: list | None  # shift constants c^k, or None when not a coboundary
    report: RelationReport

    @property
    def is_coboundary(self):
        return self.coboundary is not None


def solve_coboundary(L):
    """Solve (b^{ij alpha}_k + b^{ji alpha}_k) c^k = g0^{ij alpha} over the rationals.

    Returns the list ``c`` (free parameters set to zero) or ``None`` if the
    system is infeasible.
    """
    N = L.N
    rows = []
    for a in range(L.n):
        S = L.symmetric_part(a)
        for i, j in itertools.product(range(N), repeat=2):
            rows.append([S[i, j, k] for k in range(N)] + [L.g0[a][i, j]])
    M = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in r] for r in rows])
    R, rank = M.rref()
    c = [Fraction(0)] * N
    for r in range(rank):
        lead = next(k for k in range(N + 1) if R[r, k] != 0)
        if lead == N:
            return None  # row 0 = nonzero
        c[lead] = Fraction(int(R[r, N].p), int(R[r, N].q))
    return c


def cocycle_check(L):
    report = verify_poisson(to_bracket(L))
    skew = report["a1"].passed and report["a2"].passed
    closed = all(report[name].passed for name in ("a3", "a4", "a5", "a6", "a7"))
    c = solve_coboundary(L) if (skew and closed) else None
    return CocycleReport(skew, closed, c, report)


def shift_bracket(B, c):
    """The bracket after u^k -> u^k - c^k (coefficients composed with the shift)."""
    coords = B.coordinates
    bindings = {name: Expr.symbol(name, coords) - ck for name, ck in zip(coords, c)}
    g = [np.vectorize(lambda e: substitute(e, bindings, coords), otypes=[object])(m) for m in B.g]
    b = [np.vectorize(lambda e: substitute(e, bindings, coords), otypes=[object])(t) for t in B.b]
    return HydroBracket(g, b, coords)


def multiply(L, alpha, x, y):
    """``x o_alpha y`` with ``e^i o_alpha e^j = b^{ij alpha}_k e^k``; ``alpha`` is 1-based."""
    if not 1 <= alpha <= L.n:
        raise ShapeError(f"direction {alpha} out of range 1..{L.n}")
    b = L.b0[alpha - 1]
    N = L.N
    out = [Fraction(0)] * N
    for i, j in itertools.product(range(N), repeat=2):
        xy = x[i] * y[j]
        if xy:
            for k in range(N):
                out[k] += xy * b[i, j, k]
    return out


def lie_bracket_symbolic(L, xi, eta, space):
    """Operation on covector fields given as Exprs over the space variables ``space``."""
    N, n = L.N, L.n
    out = []
    for k in range(N):
        acc = xi[0].zero_like()
        for a in range(n):
            b = L.b0[a]
            for i, j in itertools.product(range(N), repeat=2):
                c = b[i, j, k]
                if c:
                    acc = acc + (eta[i].diff(space[a]) * xi[j] - eta[j] * xi[i].diff(space[a])) * c
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# Spectral functional oracle
# ---------------------------------------------------------------------------

def _spectral_derivatives(f, wavenumbers):
    """All n partial derivatives of a periodic grid function."""
    F = np.fft.fftn(f)
    return [np.real(np.fft.ifftn(1j * k * F)) for k in wavenumbers]


def _random_field(rng, N, n, grid, harmonics):
    """N trigonometric polynomials of harmonic degree <= ``harmonics`` on the grid."""
    axes = np.meshgrid(*[2 * np.pi * np.arange(grid) / grid] * n, indexing="ij")
    modes = list(itertools.product(range(-harmonics, harmonics + 1), repeat=n))
    scale = 1.0 / np.sqrt(2 * len(modes))  # keeps field values of order one
    comps = []
    for _ in range(N):
        f = np.zeros((grid,) * n)
        for m in modes:
            phase = sum(mk * x for mk, x in zip(m, axes))
            f = f + scale * (rng.normal() * np.cos(phase) + rng.normal() * np.sin(phase))
        comps.append(f)
    return comps


def _numeric_bracket(b0, xi, eta, wavenumbers):
    N, n = len(xi), len(wavenumbers)
    d_xi = [_spectral_derivatives(f, wavenumbers) for f in xi]
    d_eta = [_spectral_derivatives(f, wavenumbers) for f in eta]
    out = []
    for k in range(N):
        acc = np.zeros_like(xi[0])
        for a in range(n):
            b = b0[a]
            for i, j in itertools.product(range(N), repeat=2):
                c = b[i, j, k]
                if c:
                    acc = acc + c * (d_eta[i][a] * xi[j] - eta[j] * d_xi[i][a])
        out.append(acc)
    return out


def functional_oracle(L, trials=3, seed=0, grid=16, harmonics=2):
    """Maximum pointwise Jacobi residual of the operation on random trigonometric fields.

    Fields of harmonic degree <= 2 keep every product within the band a
    16-point grid resolves, so spectral derivatives are exact up to rounding.
    """
    N, n = L.N, L.n
    b0 = [np.asarray(t, dtype=float) for t in L.b0]
    k1 = np.fft.fftfreq(grid, d=1.0 / grid)
    wavenumbers = []
    for a in range(n):
        shape = [1] * n
        shape[a] = grid
        wavenumbers.append(k1.reshape(shape))
    worst = 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        xi, eta, zeta = (_random_field(rng, N, n, grid, harmonics) for _ in range(3))
        br = lambda p, q: _numeric_bracket(b0, p, q, wavenumbers)
        terms = [br(xi, br(eta, zeta)), br(eta, br(zeta, xi)), br(zeta, br(xi, eta))]
        for k in range(N):
            r = terms[0][k] + terms[1][k] + terms[2][k]
            worst = max(worst, float(np.max(np.abs(r))))
    return worst
