"""Floating-point evaluation with explicit convergence guards.

Tails T_n(y) = sum_{k>n} (1)_{k,lam} y**k / k! and weighted sums
sum_n w_n T_n(y) are summed forward over the inner index k, never as a
closed form minus a partial sum (that subtraction cancels catastrophically
once n is large).  Every summation reports how many terms it used and a
bound on the discarded remainder.

Ratio bound used throughout: with a_k = (1)_{k,lam} y**k / k!,
|a_{j+1} / a_j| = |y| |1 - j lam| / (j + 1).  On each interval where
1 - j lam keeps its sign this is monotone in j with limit |lam y|, so for
every j >= k it is at most max(|y| |1 - k lam| / (k + 1), |lam y|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import BudgetExceededError, DomainError, NonConvergenceError
from .exact import (
    stirling2_classical,
    stirling2_degenerate_explicit,
    gen_falling_factorial,
    terminating_degree,
)

# margin kept from the boundary |lam y| = 1 of the convergence disc
DELTA = 1e-3
DEFAULT_TOL = 1e-12
DEFAULT_MAX_TERMS = 1000
# above this, integer powers are evaluated through log1p instead of exactly
_EXACT_POWER_LIMIT = 4096


@dataclass(frozen=True)
class SumResult:
    value: float
    terms_used: int
    tail_bound: float
    converged: bool


def _is_rational(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _integer_exponent(x, lam) -> int | None:
    if _is_rational(x) and _is_rational(lam):
        r = Fraction(x) / Fraction(lam)
        return r.numerator if r.denominator == 1 else None
    r = float(x) / float(lam)
    m = round(r)
    if abs(r - m) <= 1e-12 * max(1.0, abs(r)):
        return int(m)
    return None


def degen_exp(x, lam, t) -> float:
    """e_lam^x(t) = (1 + lam t)**(x / lam); e**(x t) when lam = 0.

    Raises DomainError if 1 + lam t <= 0 and x / lam is not an integer.
    """
    if lam == 0:
        return math.exp(float(x) * float(t))
    e = _integer_exponent(x, lam)
    if _is_rational(lam) and _is_rational(t):
        base_exact = 1 + Fraction(lam) * Fraction(t)
        if e is not None and abs(e) <= _EXACT_POWER_LIMIT:
            if base_exact == 0 and e < 0:
                raise DomainError("1 + lambda*t = 0 with a negative exponent")
            return float(base_exact**e)
        base = float(base_exact)
    else:
        base = 1.0 + float(lam) * float(t)
    if e is not None and (base <= 0 or abs(e) <= _EXACT_POWER_LIMIT):
        if base == 0 and e < 0:
            raise DomainError("1 + lambda*t = 0 with a negative exponent")
        return base**e
    if base <= 0:
        raise DomainError(
            f"degenerate exponential undefined: 1 + lambda*t = {base} <= 0 "
            f"with non-integer exponent x/lambda"
        )
    return math.exp(float(x) / float(lam) * math.log1p(float(lam) * float(t)))


def _terms(x, lam, t) -> Iterator[float]:
    """Yield (x)_{k,lam} t**k / k! for k = 0, 1, 2, ..."""
    x, lam, t = float(x), float(lam), float(t)
    a = 1.0
    k = 0
    while True:
        yield a
        a *= (x - k * lam) * t / (k + 1)
        k += 1


def degen_exp_partial(x, lam, t, n: int) -> float:
    """Taylor polynomial sum_{k<=n} (x)_{k,lam} t**k / k!."""
    if n < 0:
        raise DomainError("n must be non-negative")
    it = _terms(x, lam, t)
    return math.fsum(next(it) for _ in range(n + 1))


def cosh_deg(lam, x) -> float:
    """Degenerate hyperbolic cosine (e_lam(-x) + e_lam(x)) / 2."""
    return 0.5 * (degen_exp(1, lam, -x) + degen_exp(1, lam, x))


def _check_convergence(lam, y, growth: float) -> int | None:
    """Guard shared by every tail summation.

    Returns the terminating degree m (lam = 1/m) or None.  Raises
    NonConvergenceError when the summand ratio tends to |lam y| * growth
    and that limit is not safely below 1.
    """
    m = terminating_degree(lam)
    if m is not None or lam == 0 or y == 0:
        return m
    rate = abs(float(lam) * float(y)) * growth
    if not rate <= 1 - DELTA:
        raise NonConvergenceError(
            f"series diverges or converges too slowly: limiting term ratio "
            f"{rate:.6g} >= {1 - DELTA} (lambda={lam}, y={y})"
        )
    return m


def _ratio_sup(lam: float, y: float, k: int) -> float:
    return max(abs(y) * abs(1 - k * lam) / (k + 1), abs(lam * y))


def tail(lam, y, n: int, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS) -> SumResult:
    """T_n(y) = sum_{k=n+1}^inf (1)_{k,lam} y**k / k! by forward summation.

    Stops once |term| <= tol * max(1, |sum|) and the geometric remainder
    bound |term| * r / (1 - r) is at most tol.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    m = _check_convergence(lam, y, 1.0)
    lam_f, y_f = float(lam), float(y)
    # a_{n+1} directly
    a = 1.0
    for i in range(n + 1):
        a *= (1 - i * lam_f) * y_f / (i + 1)
    if m is not None and n + 1 > m:
        return SumResult(0.0, 0, 0.0, True)
    terms = []
    k = n + 1
    while True:
        if len(terms) >= max_terms:
            raise BudgetExceededError(f"tail T_{n} not converged after {max_terms} terms")
        terms.append(a)
        if m is not None:
            if k >= m:
                return SumResult(math.fsum(terms), len(terms), 0.0, True)
        elif a == 0.0:
            return SumResult(math.fsum(terms), len(terms), 0.0, True)
        else:
            r = _ratio_sup(lam_f, y_f, k)
            if r < 1:
                bound = abs(a) * r / (1 - r)
                s = math.fsum(terms)
                if abs(a) <= tol * max(1.0, abs(s)) and bound <= tol:
                    return SumResult(s, len(terms), bound, True)
        a *= (1 - k * lam_f) * y_f / (k + 1)
        k += 1


# ---------------------------------------------------------------- weights

WEIGHT_KINDS = (
    "one",
    "delta",
    "geometric",
    "binomial",
    "falling",
    "degenerate-falling",
    "stirling2",
    "stirling2-deg",
)


@dataclass(frozen=True)
class Weight:
    """A weight sequence w_n for sum_{n>=start} w_n T_n(y).

    ``param`` is x for "geometric", n0 for "delta", p for the binomial and
    falling kinds, and k for the Stirling kinds.  ``lam`` is only read by the
    degenerate kinds.
    """

    kind: str
    param: object = None
    lam: object = 0
    start: int = 0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise DomainError(f"unknown weight kind {self.kind!r}")
        if self.kind != "one" and self.param is None:
            raise DomainError(f"weight {self.kind!r} needs a parameter")
        if self.kind not in ("one", "geometric") and int(self.param) < 0:
            raise DomainError("weight parameter must be non-negative")

    def value(self, n: int):
        """w_n (exact for rational parameters); 0 below ``start``."""
        if n < self.start:
            return Fraction(0)
        kind, q = self.kind, self.param
        if kind == "one":
            return Fraction(1)
        if kind == "delta":
            return Fraction(int(n == q))
        if kind == "geometric":
            return q**n if _is_rational(q) else float(q) ** n
        if kind == "binomial":
            return Fraction(math.comb(n, q))
        if kind == "falling":
            return gen_falling_factorial(n, q, 1)
        if kind == "degenerate-falling":
            return gen_falling_factorial(n, q, self.lam)
        if kind == "stirling2":
            return stirling2_classical(n, q)
        return stirling2_degenerate_explicit(n, q, self.lam)

    def growth(self) -> float:
        """lim W(k+1) / W(k) for the partial sums W(k) = sum_{start<=n<k} w_n."""
        kind, q = self.kind, self.param
        if kind == "geometric":
            return max(1.0, abs(float(q)))
        if kind == "stirling2":
            return float(max(1, q))
        if kind == "stirling2-deg":
            if q == 0 or self.lam == 0:
                return float(max(1, q))
            # |S2_lam(n, k)| grows like n! |lam|**n for non-terminating lam
            return math.inf
        return 1.0

    def partial_sums(self) -> Iterator[float]:
        """Yield W(1), W(2), ... where W(k) = sum_{n=start}^{k-1} w_n."""
        kind, q, s = self.kind, self.param, self.start
        k = 1
        if kind == "one":
            while True:
                yield float(max(0, k - s))
                k += 1
        if kind == "geometric":
            x = float(q)
            while True:
                if k <= s:
                    yield 0.0
                elif x == 1.0:
                    yield float(k - s)
                else:
                    yield (x**s - x**k) / (1 - x)
                k += 1
        if kind in ("binomial", "falling"):
            scale = math.factorial(q) if kind == "falling" else 1
            base = math.comb(s, q + 1)
            while True:
                # hockey stick: sum_{n<k} C(n, p) = C(k, p+1)
                yield float(scale * (math.comb(k, q + 1) - base)) if k > s else 0.0
                k += 1
        acc = Fraction(0)
        n = 0
        while True:
            acc += self.value(n)
            yield float(acc)
            n += 1

    def log_bound(self, k: int) -> float:
        """log B(k) with |W(j)| <= B(j) and B(j+1)/B(j) non-increasing."""
        kind, q = self.kind, self.param
        if kind in ("one",):
            return math.log(k)
        if kind == "delta":
            return 0.0
        if kind == "geometric":
            ax = abs(float(q))
            if ax == 1.0:
                return math.log(k)
            if ax > 1.0:
                if k * math.log(ax) > 600:
                    return k * math.log(ax) - math.log(ax - 1)
                return math.log((ax**k - 1) / (ax - 1))
            if ax == 0.0:
                return 0.0
            return math.log((1 - ax**k) / (1 - ax))
        if kind in ("binomial", "falling"):
            c = math.comb(k, q + 1)
            if c == 0:
                return -math.inf
            scale = math.factorial(q) if kind == "falling" else 1
            return math.log(scale * c)
        if kind == "degenerate-falling":
            c = q * abs(float(self.lam))
            return math.log(k) + q * math.log(k + c)
        # stirling kinds: k! S2(n, kk) <= kk**n counts maps onto kk blocks
        kk = q
        if kk == 0:
            return 0.0
        if kk == 1:
            return math.log(k)
        return math.log(kk**k - 1) - math.log((kk - 1) * math.factorial(kk))

    def bound_ratio(self, k: int) -> float:
        """B(k+1) / B(k); an upper bound for B(j+1) / B(j) at every j >= k."""
        kind, q = self.kind, self.param
        if kind == "one":
            return (k + 1) / k
        if kind == "delta":
            return 1.0
        if kind == "geometric":
            ax = abs(float(q))
            if ax == 1.0:
                return (k + 1) / k
            if ax > 1.0:
                if k * math.log(ax) > 600:
                    return ax
                return ax + (ax - 1) / (ax**k - 1)
            return (1 - ax ** (k + 1)) / (1 - ax**k) if ax else 1.0
        if kind in ("binomial", "falling"):
            return (k + 1) / (k - q) if k > q else math.inf
        if kind == "degenerate-falling":
            c = q * abs(float(self.lam))
            return (k + 1) / k * ((k + 1 + c) / (k + c)) ** q
        kk = q
        if kk == 0:
            return 1.0
        if kk == 1:
            return (k + 1) / k
        return kk + (kk - 1) / (kk**k - 1)


def weighted_tail_sum(
    weight: Weight, lam, y, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> SumResult:
    """sum_{n>=start} w_n T_n(y), summed over the inner index k.

    Interchanging the order gives sum_{k>=1} a_k W(k) with
    a_k = (1)_{k,lam} y**k / k! and W(k) = sum_{start<=n<k} w_n, so each a_k
    is computed once.  Closed forms are used for W where they exist.
    """
    m = _check_convergence(lam, y, weight.growth())
    if y == 0:
        return SumResult(0.0, 0, 0.0, True)
    lam_f, y_f = float(lam), float(y)
    terms = []
    a = 1.0
    k = 0
    for W in weight.partial_sums():
        a *= (1 - k * lam_f) * y_f / (k + 1)
        k += 1
        if k > max_terms:
            raise BudgetExceededError(f"weighted tail sum not converged after {max_terms} terms")
        terms.append(a * W)
        if m is not None:
            if k >= m:
                return SumResult(math.fsum(terms), k, 0.0, True)
            continue
        lb = weight.log_bound(k)
        if lb == -math.inf or a == 0.0:
            continue
        r = _ratio_sup(lam_f, y_f, k) * weight.bound_ratio(k)
        if r >= 1:
            continue
        bound = math.exp(math.log(abs(a)) + lb) * r / (1 - r)
        s = math.fsum(terms)
        if abs(terms[-1]) <= tol * max(1.0, abs(s)) and bound <= tol:
            return SumResult(s, k, bound, True)
    raise AssertionError("unreachable")  # pragma: no cover


def bell_degenerate_dobinski(
    n: int, lam, x, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS
) -> SumResult:
    """phi_{n,lam}(x) = e**(-x) sum_k (k)_{n,lam} x**k / k!, adaptively truncated.

    Past k0 = (n-1) max(lam, 0) every factor k - i lam is positive and the
    term ratio x/(k+1) prod_i (k+1-i lam)/(k-i lam) decreases in k, which
    gives a geometric bound on the remainder.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    if x < 0:
        raise DomainError("x must be non-negative")
    lam_f, x_f = float(lam), float(x)
    if x_f == 0.0:
        return SumResult(1.0 if n == 0 else 0.0, 1, 0.0, True)
    k0 = (n - 1) * max(lam_f, 0.0)
    terms = []
    xk_over_fact = 1.0
    for k in range(max_terms):
        if k:
            xk_over_fact *= x_f / k
        ff = 1.0
        for i in range(n):
            ff *= k - i * lam_f
        t = ff * xk_over_fact
        terms.append(t)
        if k <= k0 or t == 0.0:
            continue
        g = x_f / (k + 1)
        for i in range(n):
            g *= (k + 1 - i * lam_f) / (k - i * lam_f)
        if g >= 1:
            continue
        s = math.fsum(terms)
        bound = abs(t) * g / (1 - g)
        scale = math.exp(-x_f)
        if scale * bound <= tol and scale * abs(t) <= tol * max(1.0, abs(scale * s)):
            return SumResult(scale * s, k + 1, scale * bound, True)
    raise BudgetExceededError(f"Dobinski series not converged after {max_terms} terms")
