"""Exact rational functions in a fixed list of coordinates.

An :class:`Expr` is a reduced fraction ``num/den`` of multivariate
polynomials over the rationals.  The pair is kept canonical: the gcd of
numerator and denominator is 1 and the denominator is monic in graded-lex
order (so its leading coefficient is positive).  Equality of expressions is
therefore equality of representations, and zero testing is a syntactic check.

Polynomials are python-flint ``fmpq_mpoly`` objects; everything above the
polynomial ring (normal form, parsing, printing, substitution, jets) lives here.
"""

from __future__ import annotations

import functools
import math
import re
from fractions import Fraction
from numbers import Rational as _RationalABC

import flint
import numpy as np

from .errors import ExprZeroDivisionError, ParseError, PoleError, UnknownVariable

__all__ = [
    "Expr",
    "Jet2",
    "parse",
    "arith",
    "diff",
    "substitute",
    "is_zero",
    "eval_jet",
    "context",
    "symbols",
    "format_expr",
]

_ORDER = "deglex"


@functools.lru_cache(maxsize=None)
def context(names):
    """Polynomial context for the ordered tuple of variable ``names``."""
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate variable names: {names}")
    return flint.fmpq_mpoly_ctx.get(names, _ORDER)


def _to_fmpq(value):
    if isinstance(value, flint.fmpq):
        return value
    if isinstance(value, (int, flint.fmpz)):
        return flint.fmpq(value)
    if isinstance(value, _RationalABC):
        return flint.fmpq(value.numerator, value.denominator)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def _fraction(q):
    return Fraction(int(q.p), int(q.q))


class Expr:
    """Canonical rational function ``num/den``.

    Instances are immutable.  Arithmetic accepts other expressions (the
    variable lists are merged when they differ) and Python integers or
    ``Fraction`` values.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, _normalized=False):
        ctx = num.context()
        if den is None:
            den = ctx.constant(1)
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- construction -------------------------------------------------

    @classmethod
    def constant(cls, value, variables=()):
        ctx = context(tuple(variables))
        return cls(ctx.constant(_to_fmpq(value)), ctx.constant(1), _normalized=True)

    @classmethod
    def symbol(cls, name, variables):
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariable(name)
        ctx = context(variables)
        return cls(ctx.gens()[variables.index(name)], ctx.constant(1), _normalized=True)

    @classmethod
    def from_poly(cls, poly):
        return cls(poly, poly.context().constant(1), _normalized=True)

    def zero_like(self):
        ctx = self.num.context()
        return Expr(ctx.constant(0), ctx.constant(1), _normalized=True)

    def const_like(self, value):
        ctx = self.num.context()
        return Expr(ctx.constant(_to_fmpq(value)), ctx.constant(1), _normalized=True)

    # -- inspection ---------------------------------------------------

    @property
    def variables(self):
        return tuple(self.num.context().names())

    @property
    def ctx(self):
        return self.num.context()

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_one()

    def is_constant(self):
        return self.den.is_one() and self.num.is_constant()

    def constant_value(self):
        """The value as a ``Fraction``; raises ``ValueError`` if not constant."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        if self.num.is_zero():
            return Fraction(0)
        return _fraction(self.num.leading_coefficient())

    def free_variables(self):
        # the zero polynomial reports degree -1 in every variable
        used = [max(a, b) > 0 for a, b in zip(self.num.degrees(), self.den.degrees())]
        return tuple(name for name, flag in zip(self.variables, used) if flag)

    def depends_on(self, name):
        i = self.variables.index(name)
        return max(self.num.degrees()[i], self.den.degrees()[i]) > 0

    def total_degree(self):
        return (self.num.total_degree(), self.den.total_degree())

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Expr):
            if other.num.context() is self.num.context():
                return self, other
            return _unify(self, other)
        try:
            q = _to_fmpq(other)
        except TypeError:
            return None
        return self, self.const_like(q)

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return _add(*pair)

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return _add(a, -b)

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return _add(b, -a)

    def __neg__(self):
        return Expr(-self.num, self.den, _normalized=True)

    def __pos__(self):
        return self

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return _mul(*pair)

    __rmul__ = __mul__

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return _mul(a, b.inverse())

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return _mul(b, a.inverse())

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        # (n/d)^k is already reduced when n/d is
        return Expr(self.num**k, self.den**k, _normalized=True)

    def inverse(self):
        if self.num.is_zero():
            raise ExprZeroDivisionError("division by an expression that is identically zero")
        num, den = self.den, self.num
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return Expr(num, den, _normalized=True)

    # -- equality -----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Expr):
            if other.num.context() is not self.num.context():
                a, b = _unify(self, other)
                return a.num == b.num and a.den == b.den
            return self.num == other.num and self.den == other.den
        try:
            q = _to_fmpq(other)
        except TypeError:
            return NotImplemented
        return self.den.is_one() and self.num == self.num.context().constant(q)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                used = self.free_variables()
                self._hash = hash((used, str(self.lift(used))))
        return self._hash

    # -- calculus and substitution -----------------------------------

    def diff(self, var):
        """Partial derivative with respect to the variable name or index ``var``."""
        i = self._var_index(var)
        n, d = self.num, self.den
        dn = n.derivative(i)
        if d.is_one():
            return Expr(dn, d, _normalized=True)
        dd = d.derivative(i)
        if dd.is_zero():
            if dn.is_zero():
                return self.zero_like()
            return Expr(dn, d)
        return Expr(dn * d - n * dd, d * d)

    def _var_index(self, var):
        if isinstance(var, int):
            if not 0 <= var < len(self.variables):
                raise UnknownVariable(var)
            return var
        try:
            return self.variables.index(var)
        except ValueError:
            raise UnknownVariable(var) from None

    def subs(self, bindings, variables=None):
        """Simultaneously replace variables by expressions.

        ``bindings`` maps variable names to :class:`Expr` or rationals.  The
        result lives over ``variables`` if given, otherwise over the union of
        the untouched variables and the variables of the bound values.
        """
        return substitute(self, bindings, variables)

    def lift(self, variables):
        """Re-express over a different variable list that contains every used variable."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = [v for v in self.free_variables() if v not in variables]
        if missing:
            raise UnknownVariable(missing[0])
        ctx = context(variables)
        if not self.free_variables():
            return Expr(ctx.constant(self.num.leading_coefficient() if not self.num.is_zero() else 0),
                        ctx.constant(1), _normalized=True)
        used = self.free_variables()
        # drop unused generators first so projection never meets an unknown name
        src = context(used)
        num = self.num.project_to_context(src).project_to_context(ctx)
        den = self.den.project_to_context(src).project_to_context(ctx)
        return Expr(num, den, _normalized=True)

    def coefficients_in(self, var):
        """Coefficients ``[c0, c1, ...]`` of ``self`` as a polynomial in ``var``.

        Requires the denominator not to involve ``var``.
        """
        i = self._var_index(var)
        if self.den.degrees()[i]:
            raise ValueError(f"denominator depends on {self.variables[i]}")
        deg = self.num.degrees()[i]
        ctx = self.num.context()
        parts = [ctx.constant(0) for _ in range(deg + 1)]
        for mon, c in self.num.terms():
            k = mon[i]
            reduced = list(mon)
            reduced[i] = 0
            parts[k] += ctx.term(exp_vec=tuple(reduced), coeff=c)
        return [Expr(p, self.den) for p in parts]

    # -- numeric evaluation -------------------------------------------

    def evaluate(self, point):
        """Exact value at a rational point (sequence aligned with ``variables`` or dict)."""
        args = self._point_args(point, exact=True)
        d = self.den(*args) if args else self.den.leading_coefficient()
        if d == 0:
            raise PoleError(f"denominator of {self} vanishes at {point}")
        n = self.num(*args) if args else (self.num.leading_coefficient() if not self.num.is_zero() else flint.fmpq(0))
        return _fraction(n / d)

    def __float__(self):
        return float(self.constant_value())

    def _point_args(self, point, exact):
        names = self.variables
        if isinstance(point, dict):
            try:
                vals = [point[v] for v in names]
            except KeyError as exc:
                raise UnknownVariable(exc.args[0]) from None
        else:
            vals = list(point)
            if len(vals) != len(names):
                raise ValueError(f"point has {len(vals)} coordinates, expected {len(names)}")
        if exact:
            return [_to_fmpq(v) for v in vals]
        return [float(v) for v in vals]

    def jet(self, point):
        return eval_jet(self, point)

    # -- printing -----------------------------------------------------

    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return f"Expr({format_expr(self)!r})"


def _normalize(num, den):
    if den.is_zero():
        raise ExprZeroDivisionError("zero denominator")
    ctx = num.context()
    if num.is_zero():
        return ctx.constant(0), ctx.constant(1)
    if den.is_constant():
        c = den.leading_coefficient()
        if c != 1:
            num = num / c
        return num, ctx.constant(1)
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _add(a, b):
    an, ad, bn, bd = a.num, a.den, b.num, b.den
    if an.is_zero():
        return b
    if bn.is_zero():
        return a
    if ad.is_one() and bd.is_one():
        return Expr(an + bn, ad, _normalized=True)
    if ad == bd:
        return Expr(an + bn, ad)
    if ad.is_one():
        return Expr(an * bd + bn, bd, _normalized=True)
    if bd.is_one():
        return Expr(an + bn * ad, ad, _normalized=True)
    g = ad.gcd(bd)
    if g.is_one():
        return Expr(an * bd + bn * ad, ad * bd, _normalized=True)
    ad1 = ad / g
    bd1 = bd / g
    t = an * bd1 + bn * ad1
    if t.is_zero():
        return a.zero_like()
    g2 = t.gcd(g)
    if not g2.is_one():
        t = t / g2
        bd = bd / g2
    den = ad1 * bd
    lc = den.leading_coefficient()
    if lc != 1:
        t = t / lc
        den = den / lc
    return Expr(t, den, _normalized=True)


def _mul(a, b):
    an, ad, bn, bd = a.num, a.den, b.num, b.den
    if an.is_zero():
        return a
    if bn.is_zero():
        return b
    if ad.is_one() and bd.is_one():
        return Expr(an * bn, ad, _normalized=True)
    if not ad.is_one():
        g = bn.gcd(ad)
        if not g.is_one():
            bn = bn / g
            ad = ad / g
    if not bd.is_one():
        g = an.gcd(bd)
        if not g.is_one():
            an = an / g
            bd = bd / g
    num = an * bn
    den = ad * bd
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return Expr(num, den, _normalized=True)


def _unify(a, b):
    va, vb = a.variables, b.variables
    merged = va + tuple(v for v in vb if v not in va)
    return a.lift(merged), b.lift(merged)


def symbols(variables):
    """Coordinate expressions ``u1, u2, ...`` for a variable list."""
    variables = tuple(variables)
    return [Expr.symbol(v, variables) for v in variables]


def expr_sum(terms, variables=None):
    """Sum of an iterable of expressions; empty sums need ``variables``."""
    total = None
    for t in terms:
        total = t if total is None else total + t
    if total is None:
        return Expr.constant(0, variables or ())
    return total


# ---------------------------------------------------------------------------
# Operations in the functional form used throughout the engine
# ---------------------------------------------------------------------------

def arith(lhs, rhs, op):
    """Exact ``add``, ``sub``, ``mul`` or ``div`` of two expressions."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown operation {op!r}")


def diff(e, var):
    return e.diff(var)


def is_zero(e):
    return e.is_zero()


def substitute(e, bindings, variables=None):
    """Compose ``e`` with the simultaneous substitution ``bindings``.

    Raises :class:`ExprZeroDivisionError` if the composed denominator
    vanishes identically.
    """
    bound = {}
    for name, value in bindings.items():
        if name not in e.variables:
            raise UnknownVariable(name)
        if not isinstance(value, Expr):
            value = Expr.constant(value, ())
        bound[name] = value
    if variables is None:
        kept = tuple(v for v in e.variables if v not in bound)
        merged = list(kept)
        for value in bound.values():
            for v in value.variables:
                if v not in merged:
                    merged.append(v)
        variables = tuple(merged)
    variables = tuple(variables)
    ctx = context(variables)
    # image of every source generator, as (numerator, denominator) polys in ctx
    images = []
    for name in e.variables:
        if name in bound:
            val = bound[name].lift(variables)
            images.append((val.num, val.den))
        else:
            if name not in variables:
                raise UnknownVariable(name)
            images.append((ctx.gens()[variables.index(name)], ctx.constant(1)))

    num_hom, num_deg = _compose_homogenized(e.num, images, ctx)
    den_hom, den_deg = _compose_homogenized(e.den, images, ctx)
    # e = num_hom / prod b^num_deg  /  (den_hom / prod b^den_deg)
    top, bottom = num_hom, den_hom
    for (_, b), dn, dd in zip(images, num_deg, den_deg):
        if b.is_one():
            continue
        if dd > dn:
            top = top * b ** (dd - dn)
        elif dn > dd:
            bottom = bottom * b ** (dn - dd)
    if bottom.is_zero():
        raise ExprZeroDivisionError("substitution makes the denominator vanish identically")
    return Expr(top, bottom)


def _compose_homogenized(poly, images, ctx):
    """``poly`` evaluated at ``a_i/b_i`` and multiplied by ``prod b_i^deg_i``."""
    degs = poly.degrees()
    if poly.is_zero():
        return ctx.constant(0), degs
    if all(b.is_one() for _, b in images):
        return poly.compose(*[a for a, _ in images], ctx=ctx), degs
    cache = {}

    def power(i, k, which):
        key = (i, k, which)
        if key not in cache:
            base = images[i][which]
            cache[key] = base**k
        return cache[key]

    out = ctx.constant(0)
    for mon, c in poly.terms():
        t = ctx.constant(c)
        for i, k in enumerate(mon):
            if k:
                t = t * power(i, k, 0)
            rest = degs[i] - k
            if rest and not images[i][1].is_one():
                t = t * power(i, rest, 1)
        out += t
    return out, degs


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped, text)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            if "." in m.group(1):
                raise ParseError("decimal literals are not exact; write p/q", start, text)
            tokens.append(("num", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("id", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.variables = tuple(variables)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if kind != "op" or val != value:
            raise ParseError(f"expected {value!r}", pos, self.text)

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos, self.text)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                if val == "*":
                    e = e * rhs
                else:
                    if rhs.is_zero():
                        raise ExprZeroDivisionError(f"division by zero at position {pos}")
                    e = e / rhs
            else:
                return e

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            e = self.unary()
            return -e if val == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, k, pos = self.take()
            if kind == "op" and k == "(":
                kind, k, pos = self.take()
                if kind != "num":
                    raise ParseError("exponent must be a non-negative integer", pos, self.text)
                self.expect(")")
            elif kind != "num":
                raise ParseError("exponent must be a non-negative integer", pos, self.text)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "^":
                raise ParseError("chained exponents are ambiguous; use parentheses", nxt[2], self.text)
            return base**k
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Expr.constant(val, self.variables)
        if kind == "id":
            if val not in self.variables:
                raise UnknownVariable(val)
            return Expr.symbol(val, self.variables)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of expression", pos, self.text)
        raise ParseError(f"unexpected token {val!r}", pos, self.text)


def parse(text, variables):
    """Parse ``text`` into a canonical :class:`Expr` over ``variables``.

    >>> str(parse("(1/2)*((u1)^2-(u2)^2)", ["u1", "u2"]))
    '(u1^2 - u2^2)/2'
    """
    if isinstance(text, int):
        return Expr.constant(text, variables)
    return _Parser(str(text), variables).parse()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _integer_pair(e):
    """Scale num/den to coprime integer coefficients with a positive leading denominator term."""
    coeffs = list(e.num.coeffs()) + list(e.den.coeffs())
    lcm = 1
    for c in coeffs:
        q = int(c.q)
        lcm = lcm * q // math.gcd(lcm, q)
    content = 0
    for c in coeffs:
        content = math.gcd(content, int(c.p) * (lcm // int(c.q)))
    scale = flint.fmpq(lcm, content or 1)
    return e.num * scale, e.den * scale


def _format_poly(poly, names):
    if poly.is_zero():
        return "0", 1
    parts = []
    for mon, c in poly.terms():
        c = int(c.p)  # integer after scaling
        factors = []
        for name, k in zip(names, mon):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        parts.append((c < 0, body))
    out = ("-" if parts[0][0] else "") + parts[0][1]
    for neg, body in parts[1:]:
        out += (" - " if neg else " + ") + body
    return out, len(parts)


def format_expr(e):
    """Deterministic text: expanded numerator ``/`` expanded denominator, graded-lex order."""
    if e.num.is_zero():
        return "0"
    names = e.variables
    num, den = _integer_pair(e)
    ns, nterms = _format_poly(num, names)
    if den.is_one():
        return ns
    ds, dterms = _format_poly(den, names)
    if nterms > 1:
        ns = f"({ns})"
    if dterms > 1 or "*" in ds:
        ds = f"({ds})"
    return f"{ns}/{ds}"


# ---------------------------------------------------------------------------
# Order-2 truncated Taylor arithmetic
# ---------------------------------------------------------------------------

class Jet2:
    """Value, gradient and Hessian of a function at one point.

    Arithmetic propagates all three exactly up to float rounding, so no
    finite-difference step is involved.  The Hessian is kept symmetric by
    construction.
    """

    __slots__ = ("value", "gradient", "hessian")

    def __init__(self, value, gradient, hessian):
        self.value = float(value)
        self.gradient = np.asarray(gradient, dtype=float)
        self.hessian = np.asarray(hessian, dtype=float)

    @classmethod
    def constant(cls, c, n):
        return cls(c, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def variable(cls, x, i, n):
        g = np.zeros(n)
        g[i] = 1.0
        return cls(x, g, np.zeros((n, n)))

    @property
    def n(self):
        return self.gradient.shape[0]

    def _lift(self, other):
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(float(other), self.n)

    def __add__(self, other):
        o = self._lift(other)
        return Jet2(self.value + o.value, self.gradient + o.gradient, self.hessian + o.hessian)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = float(other)
            return Jet2(self.value * c, self.gradient * c, self.hessian * c)
        a, b = self, other
        cross = np.outer(a.gradient, b.gradient)
        return Jet2(
            a.value * b.value,
            a.value * b.gradient + b.value * a.gradient,
            a.value * b.hessian + b.value * a.hessian + cross + cross.T,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if v == 0.0:
            raise PoleError("reciprocal of a jet with zero value")
        g = self.gradient
        return Jet2(1.0 / v, -g / v**2, -self.hessian / v**2 + 2.0 * np.outer(g, g) / v**3)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        v = self.value
        g = self.gradient
        if k == 0:
            return Jet2.constant(1.0, self.n)
        d1 = k * v ** (k - 1)
        d2 = k * (k - 1) * v ** (k - 2) if k >= 2 else 0.0
        return Jet2(v**k, d1 * g, d1 * self.hessian + d2 * np.outer(g, g))

    def __repr__(self):
        return f"Jet2(value={self.value!r}, gradient={self.gradient.tolist()!r}, hessian={self.hessian.tolist()!r})"


def _poly_jet(poly, xs):
    n = len(xs)
    total = Jet2.constant(0.0, n)
    if poly.is_zero():
        return total
    degs = poly.degrees()
    powers = [[xs[i] ** k for k in range(degs[i] + 1)] for i in range(n)]
    for mon, c in poly.terms():
        t = None
        for i, k in enumerate(mon):
            if k:
                t = powers[i][k] if t is None else t * powers[i][k]
        c = float(c)
        total = total + (Jet2.constant(c, n) if t is None else t * c)
    return total


def eval_jet(e, point, pole_tol=1e-12):
    """Value, gradient and Hessian of ``e`` at ``point`` via truncated Taylor arithmetic."""
    vals = e._point_args(point, exact=False)
    n = len(vals)
    xs = [Jet2.variable(v, i, n) for i, v in enumerate(vals)]
    den = _poly_jet(e.den, xs)
    if abs(den.value) <= pole_tol:
        raise PoleError(f"denominator of {e} vanishes at {list(vals)}")
    num = _poly_jet(e.num, xs)
    if e.den.is_one():
        return num
    return num / den
