"""Exact rational ground functions.

All values are :class:`fractions.Fraction`, which is always kept in lowest
terms with a positive denominator, so equality between results is
structural.  Integer arguments are accepted anywhere a rational is expected.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import DomainError

Rational = Union[int, Fraction]

# sample of lambda values used by the property suites: classical limit,
# reciprocals of integers (polynomial e_lambda), negatives and |lambda| > 1
SAMPLE_LAMBDAS = (
    Fraction(0),
    Fraction(1, 3),
    Fraction(1, 2),
    Fraction(-1, 2),
    Fraction(2),
    Fraction(-2, 3),
)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or an integer string into a canonical Fraction.

    Decimal and float notation is rejected so that exact inputs stay exact.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise DomainError(f"expected a rational string 'p/q', got {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise DomainError(f"malformed rational {text!r}; expected 'p/q' or an integer")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Rational) -> str:
    """Render as ``"p/q"`` (or ``"p"`` for integers); inverse of parse_rational."""
    return str(Fraction(q))


def gen_falling_factorial(x: Rational, n: int, lam: Rational) -> Fraction:
    """Generalized falling factorial x(x - lam)(x - 2 lam)...(x - (n-1) lam).

    The empty product (n = 0) is 1.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    x = Fraction(x)
    lam = Fraction(lam)
    out = Fraction(1)
    for i in range(n):
        out *= x - i * lam
        if not out:
            break
    return out


def falling_factorial(x: Rational, n: int) -> Fraction:
    """Ordinary falling factorial x(x-1)...(x-n+1), with (x)_0 = 1."""
    return gen_falling_factorial(x, n, 1)


def binomial(x: Rational, n: int) -> Fraction:
    """Binomial coefficient C(x, n) for rational x and integer n >= 0."""
    return falling_factorial(x, n) / math.factorial(n)


@lru_cache(maxsize=None)
def stirling2_classical(n: int, k: int) -> Fraction:
    """Classical Stirling number of the second kind via the alternating sum.

    Uses 0**0 = 1, so S(0, 0) = 1.  Returns 0 for k > n.
    """
    if n < 0 or k < 0:
        raise DomainError("n and k must be non-negative")
    if k > n:
        return Fraction(0)
    total = sum(math.comb(k, j) * (-1) ** (k - j) * j**n for j in range(k + 1))
    return Fraction(total, math.factorial(k))


def stirling2_degenerate_explicit(n: int, k: int, lam: Rational) -> Fraction:
    """Degenerate Stirling number S2_lam(n, k) from the alternating sum of (j)_{n,lam}."""
    if n < 0 or k < 0:
        raise DomainError("n and k must be non-negative")
    total = Fraction(0)
    for j in range(k + 1):
        total += math.comb(k, j) * (-1) ** (k - j) * gen_falling_factorial(j, n, lam)
    return total / math.factorial(k)


@dataclass(frozen=True)
class StirlingTable:
    """Triangle ``entries[n][k] = S2_lam(n, k)`` for 0 <= k <= n <= n_max."""

    lam: Fraction
    n_max: int
    entries: tuple

    def __getitem__(self, nk):
        n, k = nk
        if n < 0 or k < 0 or n > self.n_max:
            raise IndexError(nk)
        if k > n:
            return Fraction(0)
        return self.entries[n][k]

    def rows(self):
        """Yield ``(n, k, value)`` row by row."""
        for n, row in enumerate(self.entries):
            for k, v in enumerate(row):
                yield n, k, v


def stirling2_degenerate_recurrence(n_max: int, lam: Rational) -> StirlingTable:
    """Build the S2_lam triangle from S(n+1, k) = S(n, k-1) + (k - n lam) S(n, k).

    The recurrence follows from x (x)_k = (x)_{k+1} + k (x)_k applied to
    (x)_{n+1,lam} = (x - n lam)(x)_{n,lam}.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    lam = Fraction(lam)
    rows = [(Fraction(1),)]
    for n in range(n_max):
        prev = rows[-1]
        row = []
        for k in range(n + 2):
            left = prev[k - 1] if k >= 1 else Fraction(0)
            here = prev[k] if k <= n else Fraction(0)
            row.append(left + (k - n * lam) * here)
        rows.append(tuple(row))
    return StirlingTable(lam, n_max, tuple(rows))


def verify_basis_expansion(n: int, lam: Rational) -> bool:
    """Check (x)_{n,lam} = sum_k S2_lam(n, k) (x)_k at x = 0, 1, ..., n.

    Both sides are polynomials of degree n in x, so agreement at n + 1
    points is agreement as polynomials.
    """
    coeffs = [stirling2_degenerate_explicit(n, k, lam) for k in range(n + 1)]
    for x in range(n + 1):
        lhs = gen_falling_factorial(x, n, lam)
        rhs = sum(c * falling_factorial(x, k) for k, c in enumerate(coeffs))
        if lhs != rhs:
            return False
    return True


def bell_degenerate(n: int, lam: Rational, x: Rational) -> Fraction:
    """Degenerate Bell polynomial phi_{n,lam}(x) = sum_k S2_lam(n, k) x**k."""
    x = Fraction(x)
    table = stirling2_degenerate_recurrence(n, lam)
    return sum((v * x**k for k, v in enumerate(table.entries[n])), Fraction(0))


def terminating_degree(lam) -> int | None:
    """Return m when lam == 1/m for a positive integer m, else None.

    For such lam, (1)_{k,lam} vanishes for every k > m, so e_lam(t) is the
    polynomial (1 + t/m)**m and every tail T_n with n >= m is zero.  Floats
    are accepted with a relative tolerance of 1e-12 on 1/lam.
    """
    if isinstance(lam, (int, Fraction)):
        lam = Fraction(lam)
        if lam > 0 and lam.numerator == 1:
            return lam.denominator
        return None
    lam = float(lam)
    if lam <= 0:
        return None
    inv = 1.0 / lam
    m = round(inv)
    if m >= 1 and abs(inv - m) <= 1e-12 * m:
        return int(m)
    return None


def exact_power_exponent(x: Rational, lam: Rational) -> int | None:
    """Integer x/lam when lam != 0 and the ratio is integral, else None."""
    lam = Fraction(lam)
    if lam == 0:
        return None
    r = Fraction(x) / lam
    return r.numerator if r.denominator == 1 else None


def degen_exp_exact(x: Rational, lam: Rational, t: Rational) -> Fraction:
    """e_lam^x(t) = (1 + lam t)**(x/lam) when that power is rational.

    Available when x/lam is an integer (or t = 0, or x = 0).  Raises
    DomainError otherwise, or when a negative power meets 1 + lam t = 0.
    """
    x, lam, t = Fraction(x), Fraction(lam), Fraction(t)
    if t == 0 or x == 0:
        return Fraction(1)
    e = exact_power_exponent(x, lam)
    if e is None:
        raise DomainError(
            f"e_lambda^x(t) is not rational for x={x}, lambda={lam}, t={t}"
        )
    base = 1 + lam * t
    if base == 0 and e < 0:
        raise DomainError("1 + lambda*t = 0 with a negative exponent")
    return base**e
