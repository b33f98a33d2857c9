"""Truncated formal power series over the rationals.

``UniSeries`` holds the coefficients of 1, y, ..., y**N; ``BiSeries`` holds
the coefficients of x**n y**k for n <= N_x, k <= N_y.  Every operation
truncates to the smaller order of its operands: nothing is ever padded, so a
result never claims more precision than its inputs carry.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, NonUnitError
from .exact import Rational, format_rational

_ZERO = Fraction(0)


class UniSeries:
    """Truncated power series sum_{k<=order} coeffs[k] y**k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational]):
        c = tuple(Fraction(v) for v in coeffs)
        if not c:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs = c

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, order: int) -> "UniSeries":
        return cls([_ZERO] * (order + 1))

    @classmethod
    def one(cls, order: int) -> "UniSeries":
        return cls.monomial(0, 1, order)

    @classmethod
    def monomial(cls, degree: int, coeff: Rational, order: int) -> "UniSeries":
        c = [_ZERO] * (order + 1)
        if degree <= order:
            c[degree] = Fraction(coeff)
        return cls(c)

    def truncate(self, order: int) -> "UniSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return UniSeries(self.coeffs[: order + 1])

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, UniSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniSeries([{', '.join(map(format_rational, self.coeffs))}])"

    def _coerce(self, other) -> "UniSeries":
        if isinstance(other, UniSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return UniSeries.monomial(0, other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        return UniSeries(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return UniSeries(-a for a in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return UniSeries(a * other for a in self.coeffs)
        if not isinstance(other, UniSeries):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            out.append(sum((a[i] * b[k - i] for i in range(k + 1) if a[i]), _ZERO))
        return UniSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise NonUnitError("division of a series by zero")
            return self * (1 / Fraction(other))
        if not isinstance(other, UniSeries):
            return NotImplemented
        return series_div_unit(self, other)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        out = UniSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def shift(self, d: int) -> "UniSeries":
        """Multiply by y**d (d >= 0), keeping the order."""
        if d < 0:
            raise ValueError("shift must be non-negative")
        return UniSeries(([_ZERO] * d + list(self.coeffs))[: self.order + 1])

    def scale_argument(self, c: Rational) -> "UniSeries":
        """Series of f(c y) given the series of f(y)."""
        c = Fraction(c)
        return UniSeries(a * c**k for k, a in enumerate(self.coeffs))

    def evaluate(self, y: Rational) -> Fraction:
        """Sum the stored coefficients at y (exact only for polynomials)."""
        y = Fraction(y)
        acc = _ZERO
        for a in reversed(self.coeffs):
            acc = acc * y + a
        return acc

    def to_json(self) -> list:
        return [format_rational(a) for a in self.coeffs]


def series_add(a: UniSeries, b) -> UniSeries:
    return a + b


def series_sub(a: UniSeries, b) -> UniSeries:
    return a - b


def series_mul(a: UniSeries, b) -> UniSeries:
    return a * b


def series_scale(a: UniSeries, c: Rational) -> UniSeries:
    return a * Fraction(c)


def series_div_unit(a: UniSeries, u: UniSeries) -> UniSeries:
    """Quotient q with q * u = a to the common truncation order.

    Raises NonUnitError when u has a zero constant term.
    """
    u0 = u.coeffs[0]
    if u0 == 0:
        raise NonUnitError("divisor series has zero constant term")
    n = min(a.order, u.order)
    q: list[Fraction] = []
    inv = 1 / u0
    for k in range(n + 1):
        s = a.coeffs[k]
        for i in range(1, k + 1):
            if u.coeffs[i]:
                s -= u.coeffs[i] * q[k - i]
        q.append(s * inv)
    return UniSeries(q)


def degen_exp_series(x: Rational, lam: Rational, order: int) -> UniSeries:
    """Series of e_lam^x(y): coefficient of y**n is (x)_{n,lam} / n!."""
    x, lam = Fraction(x), Fraction(lam)
    coeffs = [Fraction(1)]
    ff = Fraction(1)
    for n in range(1, order + 1):
        ff *= x - (n - 1) * lam
        coeffs.append(ff / math.factorial(n))
    return UniSeries(coeffs)


def tail_series(n: int, lam: Rational, order: int) -> UniSeries:
    """Series of T_n(y) = e_lam(y) minus its Taylor polynomial of degree n."""
    e = degen_exp_series(1, lam, order)
    return UniSeries(c if k > n else _ZERO for k, c in enumerate(e.coeffs))


def tail_weighted_sum_series(
    weights: Sequence[Rational], lam: Rational, order: int
) -> UniSeries:
    """Series of sum_n w_n T_n(y), truncated at y**order.

    Only T_0, ..., T_{order-1} reach degree <= order, and the coefficient of
    y**k collects them as ((1)_{k,lam} / k!) * (w_0 + ... + w_{k-1}).
    """
    if len(weights) < order:
        raise ValueError(f"need at least {order} weights for order {order}, got {len(weights)}")
    e = degen_exp_series(1, lam, order)
    coeffs = [_ZERO]
    partial = _ZERO
    for k in range(1, order + 1):
        partial += Fraction(weights[k - 1])
        coeffs.append(e.coeffs[k] * partial)
    return UniSeries(coeffs)


def unit_power_inverse(lam: Rational, power: int, order: int) -> UniSeries:
    """Series of (1 + lam y)**(-power) obtained by repeated unit division."""
    one_plus = UniSeries.one(order) + UniSeries.monomial(1, lam, order)
    return series_div_unit(UniSeries.one(order), one_plus**power)


class BiSeries:
    """Truncated series sum coeffs[n][k] x**n y**k, n <= order_x, k <= order_y."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        rows = tuple(tuple(Fraction(v) for v in row) for row in coeffs)
        if not rows or not rows[0]:
            raise ValueError("empty BiSeries")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("BiSeries rows must all have the same length")
        self.coeffs = rows

    @property
    def order_x(self) -> int:
        return len(self.coeffs) - 1

    @property
    def order_y(self) -> int:
        return len(self.coeffs[0]) - 1

    @classmethod
    def zero(cls, order_x: int, order_y: int) -> "BiSeries":
        return cls([[_ZERO] * (order_y + 1) for _ in range(order_x + 1)])

    def __getitem__(self, nk):
        n, k = nk
        return self.coeffs[n][k]

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"BiSeries(order_x={self.order_x}, order_y={self.order_y})"

    def _orders(self, other: "BiSeries"):
        return min(self.order_x, other.order_x), min(self.order_y, other.order_y)

    def __add__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        nx, ny = self._orders(other)
        return BiSeries(
            [[self.coeffs[n][k] + other.coeffs[n][k] for k in range(ny + 1)] for n in range(nx + 1)]
        )

    def __neg__(self):
        return BiSeries([[-v for v in row] for row in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BiSeries([[v * other for v in row] for row in self.coeffs])
        if not isinstance(other, BiSeries):
            return NotImplemented
        nx, ny = self._orders(other)
        out = [[_ZERO] * (ny + 1) for _ in range(nx + 1)]
        a, b = self.coeffs, other.coeffs
        for n1 in range(nx + 1):
            for k1 in range(ny + 1):
                c = a[n1][k1]
                if not c:
                    continue
                for n2 in range(nx + 1 - n1):
                    row_b = b[n2]
                    row_out = out[n1 + n2]
                    for k2 in range(ny + 1 - k1):
                        if row_b[k2]:
                            row_out[k1 + k2] += c * row_b[k2]
        return BiSeries(out)

    __rmul__ = __mul__

    def nonzero_entries(self):
        for n, row in enumerate(self.coeffs):
            for k, v in enumerate(row):
                if v:
                    yield n, k, v


def tail_generating_biseries(lam: Rational, order_x: int, order_y: int) -> BiSeries:
    """sum_n T_n(y) x**n: the [n][k] entry is (1)_{k,lam}/k! when k > n, else 0."""
    e = degen_exp_series(1, lam, order_y)
    return BiSeries(
        [[e.coeffs[k] if k > n else _ZERO for k in range(order_y + 1)] for n in range(order_x + 1)]
    )


def difference_quotient_biseries(lam: Rational, order_x: int, order_y: int) -> BiSeries:
    """Expansion of (e_lam(xy) - e_lam(y)) / (x - 1) about x = 0.

    Division by x - 1 is multiplication by -(1 + x + x**2 + ...), so this is
    computed as (e_lam(y) - e_lam(xy)) * sum_{m<=order_x} x**m.
    """
    e = degen_exp_series(1, lam, order_y)
    e_y = [[_ZERO] * (order_y + 1) for _ in range(order_x + 1)]
    e_y[0] = list(e.coeffs)
    e_xy = [[_ZERO] * (order_y + 1) for _ in range(order_x + 1)]
    for k in range(min(order_x, order_y) + 1):
        e_xy[k][k] = e.coeffs[k]
    geometric = [[_ZERO] * (order_y + 1) for _ in range(order_x + 1)]
    for m in range(order_x + 1):
        geometric[m][0] = Fraction(1)
    return (BiSeries(e_y) - BiSeries(e_xy)) * BiSeries(geometric)


def extract_stirling_from_gf(n_max: int, k: int, lam: Rational) -> list[Fraction]:
    """S2_lam(n, k) for n = 0..n_max read off (e_lam(t) - 1)**k / k!.

    The coefficient of t**n is multiplied by n! to undo the exponential
    normalisation.
    """
    if k < 0 or n_max < 0:
        raise DomainError("n_max and k must be non-negative")
    base = degen_exp_series(1, lam, n_max) - 1
    gf = base**k * Fraction(1, math.factorial(k))
    return [c * math.factorial(n) for n, c in enumerate(gf.coeffs)]


