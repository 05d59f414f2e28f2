"""Dense multi-index arrays of :class:`~hydrobracket.symexpr.Expr`.

Every slot carries an :class:`Index` tag: its range kind (``coordinate``
indices run over the N field components, ``spatial`` ones over the n
independent variables), its variance and its dimension.  Contractions and
the pairwise/cyclic operations refuse to mix incompatible slots.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetric, ShapeError
from .symexpr import Expr

COORDINATE = "coordinate"
SPATIAL = "spatial"
UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class Index:
    dim: int
    variance: str = UPPER
    kind: str = COORDINATE

    def dual(self):
        return Index(self.dim, LOWER if self.variance == UPPER else UPPER, self.kind)


def up(n, kind=COORDINATE):
    return Index(n, UPPER, kind)


def down(n, kind=COORDINATE):
    return Index(n, LOWER, kind)


def expr_array(shape, variables, fill=0):
    """Object array of the given shape filled with a constant expression."""
    arr = np.empty(shape, dtype=object)
    c = Expr.constant(fill, variables)
    for idx in np.ndindex(*shape):
        arr[idx] = c
    return arr


class TensorField:
    """An immutable dense tensor with tagged slots."""

    __slots__ = ("entries", "indices")

    def __init__(self, entries, indices):
        entries = np.asarray(entries, dtype=object) if not isinstance(entries, np.ndarray) else entries
        indices = tuple(indices)
        if entries.ndim != len(indices):
            raise ShapeError(f"rank {entries.ndim} entries but {len(indices)} index tags")
        for ax, ix in enumerate(indices):
            if entries.shape[ax] != ix.dim:
                raise ShapeError(f"slot {ax} has length {entries.shape[ax]}, tag says {ix.dim}")
        entries = entries.copy()
        entries.flags.writeable = False
        self.entries = entries
        self.indices = indices

    @classmethod
    def zeros(cls, indices, variables):
        indices = tuple(indices)
        return cls(expr_array(tuple(ix.dim for ix in indices), variables), indices)

    @classmethod
    def from_nested(cls, nested, indices):
        arr = np.empty(tuple(ix.dim for ix in indices), dtype=object)
        for idx in np.ndindex(*arr.shape):
            v = nested
            for i in idx:
                v = v[i]
            arr[idx] = v
        return cls(arr, indices)

    @property
    def rank(self):
        return len(self.indices)

    @property
    def shape(self):
        return self.entries.shape

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return self.indices == other.indices and all(
            a == b for a, b in zip(self.entries.flat, other.entries.flat)
        )

    def __add__(self, other):
        _same_slots(self, other)
        return TensorField(self.entries + other.entries, self.indices)

    def __sub__(self, other):
        _same_slots(self, other)
        return TensorField(self.entries - other.entries, self.indices)

    def __neg__(self):
        return TensorField(-self.entries, self.indices)

    def scale(self, c):
        return TensorField(self.entries * c, self.indices)

    def is_zero(self):
        return all(e.is_zero() for e in self.entries.flat)

    def nonzero(self):
        """``(index tuple, Expr)`` pairs for the nonzero entries, in lexicographic order."""
        return [(idx, self.entries[idx]) for idx in np.ndindex(*self.shape) if not self.entries[idx].is_zero()]

    def map(self, fn):
        out = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(*self.shape):
            out[idx] = fn(self.entries[idx])
        return TensorField(out, self.indices)

    def transpose(self, axes):
        return TensorField(self.entries.transpose(axes), [self.indices[a] for a in axes])

    def __repr__(self):
        tags = ",".join(("^" if ix.variance == UPPER else "_") + str(ix.dim) for ix in self.indices)
        return f"TensorField[{tags}]"


def _same_slots(a, b):
    if a.indices != b.indices:
        raise ShapeError("tensors have different index structure")


def _check_pair(t, a, b, *, opposite):
    ia, ib = t.indices[a], t.indices[b]
    if ia.dim != ib.dim or ia.kind != ib.kind:
        raise ShapeError(f"slots {a} and {b} range over different index sets")
    if opposite and ia.variance == ib.variance:
        raise ShapeError(f"slots {a} and {b} have the same variance; cannot contract")
    if not opposite and ia.variance != ib.variance:
        raise ShapeError(f"slots {a} and {b} have different variance")


def outer(a, b):
    out = np.empty(a.shape + b.shape, dtype=object)
    for i in np.ndindex(*a.shape):
        x = a.entries[i]
        for j in np.ndindex(*b.shape):
            out[i + j] = x * b.entries[j]
    return TensorField(out, a.indices + b.indices)


def contract(t, slot_a, slot_b):
    """Sum over a pair of slots with equal range and opposite variance."""
    _check_pair(t, slot_a, slot_b, opposite=True)
    arr = t.entries
    a, b = sorted((slot_a, slot_b))
    moved = np.moveaxis(arr, (a, b), (-2, -1))
    rest = moved.shape[:-2]
    n = moved.shape[-1]
    out = np.empty(rest, dtype=object)
    for idx in np.ndindex(*rest):
        acc = moved[idx + (0, 0)]
        for s in range(1, n):
            acc = acc + moved[idx + (s, s)]
        out[idx] = acc
    keep = [ix for k, ix in enumerate(t.indices) if k not in (a, b)]
    return TensorField(out, keep)


def cyclic_sum(t, slots):
    """``t + shift(t) + shift^2(t)`` over three slots: entries (i,j,k), (j,k,i), (k,i,j) are added."""
    a, b, c = slots
    _check_pair(t, a, b, opposite=False)
    _check_pair(t, b, c, opposite=False)
    perm1 = list(range(t.rank))
    perm1[b], perm1[c], perm1[a] = a, b, c
    s1 = t.entries.transpose(perm1)
    s2 = s1.transpose(perm1)
    return TensorField(t.entries + s1 + s2, t.indices)


def symmetrize_pair(t, slot_a, slot_b):
    _check_pair(t, slot_a, slot_b, opposite=False)
    return TensorField(t.entries + np.swapaxes(t.entries, slot_a, slot_b), t.indices)


def antisymmetrize_pair(t, slot_a, slot_b):
    _check_pair(t, slot_a, slot_b, opposite=False)
    return TensorField(t.entries - np.swapaxes(t.entries, slot_a, slot_b), t.indices)


def kronecker(n, variables, kind=COORDINATE):
    """delta^i_j as a mixed tensor."""
    arr = expr_array((n, n), variables)
    one = Expr.constant(1, variables)
    for i in range(n):
        arr[i, i] = one
    return TensorField(arr, (Index(n, UPPER, kind), Index(n, LOWER, kind)))


# ---------------------------------------------------------------------------
# Square matrices of expressions.  These work on plain object arrays so that
# the geometry layer can use them without wrapping every intermediate.
# ---------------------------------------------------------------------------

def _as_matrix(m):
    arr = m.entries if isinstance(m, TensorField) else np.asarray(m, dtype=object)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError("expected a square matrix")
    return arr


def _det_cofactor(arr):
    n = arr.shape[0]
    if n == 1:
        return arr[0, 0]
    if n == 2:
        return arr[0, 0] * arr[1, 1] - arr[0, 1] * arr[1, 0]
    total = None
    for j in range(n):
        if arr[0, j].is_zero():
            continue
        minor = np.delete(np.delete(arr, 0, axis=0), j, axis=1)
        term = arr[0, j] * _det_cofactor(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else arr[0, 0].zero_like()


def _det_bareiss(arr):
    """Fraction-free elimination; every division is exact."""
    a = arr.copy()
    n = a.shape[0]
    sign = 1
    prev = a[0, 0].const_like(1)
    for k in range(n - 1):
        if a[k, k].is_zero():
            swap = next((r for r in range(k + 1, n) if not a[r, k].is_zero()), None)
            if swap is None:
                return a[0, 0].zero_like()
            a[[k, swap]] = a[[swap, k]]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * a[k, k] - a[i, k] * a[k, j]) / prev
        prev = a[k, k]
    d = a[n - 1, n - 1]
    return d if sign > 0 else -d


def det(m):
    """Exact determinant: cofactor expansion up to 4x4, Bareiss beyond."""
    arr = _as_matrix(m)
    if arr.shape[0] <= 4:
        return _det_cofactor(arr)
    return _det_bareiss(arr)


def matmul(a, b):
    a = _as_matrix(a) if a.ndim == 2 and a.shape[0] == a.shape[1] else a
    n, m = a.shape[0], b.shape[1]
    out = np.empty((n, m), dtype=object)
    for i in range(n):
        for j in range(m):
            acc = a[i, 0] * b[0, j]
            for s in range(1, a.shape[1]):
                acc = acc + a[i, s] * b[s, j]
            out[i, j] = acc
    return out


def invert_array(arr):
    """Inverse of a square object array: adjugate over determinant.

    Raises :class:`DegenerateMetric` when the determinant is identically zero.
    """
    arr = _as_matrix(arr)
    n = arr.shape[0]
    d = det(arr)
    if d.is_zero():
        raise DegenerateMetric()
    inv_d = 1 / d
    if n == 1:
        return np.array([[inv_d]], dtype=object)
    if n > 4:
        return _gauss_jordan_inverse(arr)
    out = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        minor = np.delete(np.delete(arr, j, axis=0), i, axis=1)
        c = det(minor)
        if (i + j) % 2:
            c = -c
        out[i, j] = c * inv_d
    return out


def _gauss_jordan_inverse(arr):
    n = arr.shape[0]
    zero = arr[0, 0].zero_like()
    one = zero.const_like(1)
    a = np.empty((n, 2 * n), dtype=object)
    a[:, :n] = arr
    for i in range(n):
        for j in range(n):
            a[i, n + j] = one if i == j else zero
    for k in range(n):
        piv = next((r for r in range(k, n) if not a[r, k].is_zero()), None)
        if piv is None:
            raise DegenerateMetric()
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
        p = 1 / a[k, k]
        a[k] = [x * p for x in a[k]]
        for r in range(n):
            if r != k and not a[r, k].is_zero():
                f = a[r, k]
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
    return a[:, n:].copy()


def invert(m):
    """Inverse of a rank-2 tensor; slot variances flip."""
    arr = invert_array(_as_matrix(m))
    if isinstance(m, TensorField):
        return TensorField(arr, [ix.dual() for ix in m.indices])
    return arr


def identity_array(n, variables):
    arr = expr_array((n, n), variables)
    one = Expr.constant(1, variables)
    for i in range(n):
        arr[i, i] = one
    return arr


def is_identity(arr):
    n = arr.shape[0]
    return all(arr[i, j] == (1 if i == j else 0) for i in range(n) for j in range(n))
