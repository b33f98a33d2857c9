"""Verification harness for the truncated-exponential series identities.

Every identity has the shape  sum_{n>=start} w_n T_n(y) = closed form,
with T_n(y) = e_lam(y) - sum_{k<=n} (1)_{k,lam} y**k / k!.  A case can be
checked in two independent ways:

exact
    Both sides are expanded as truncated power series in y over the
    rationals and compared coefficient by coefficient (residual must be
    exactly 0).  When lam = 1/m, e_lam is a polynomial, every tail is a
    finite rational sum, and both sides are additionally evaluated at the
    given rational point.
numeric
    The left side is summed in floating point with a remainder bound; the
    right side is the closed form.  Pass means
    |lhs - rhs| <= tol * max(1, |rhs|).

Identity ids
------------
thm2.1a    sum_n T_n(y) x**n = (e(xy) - e(y)) / (x - 1)       (bivariate, exact only)
thm2.1b    sum_n T_n(y) = y e(y) / (1 + lam y)
cor2.2a    sum_{n>=1} T_n(1) x**n = (e(x) - x e(1)) / (x - 1) + 1
cor2.2b    sum_{n>=1} T_n(1) = 1 - lam e(1) / (1 + lam)
cor2.2c    sum_{n>=1} (-1)**n T_n(1) = 1 - cosh_lam(1)
thm2.3     sum_n C(n, p) T_n(y) = y**(p+1) (1)_{p+1,lam} (1 + lam y)**-(p+1) e(y) / (p+1)!
eq11       sum_n (n)_p T_n(y)   = the same with (p+1)! replaced by p+1
thm2.4     sum_n (n)_{p,lam} T_n(y) = sum_k S2_lam(p,k) y**(k+1) (1)_{k+1,lam} (1+lam y)**-(k+1) e(y) / (k+1)
thm2.5     sum_n S2(n, k) T_n(y) = (1/k!) sum_j C(k,j) (-1)**(k-j) (e(jy) - e(y)) / (j - 1)
remark2.6  sum_n S2_lam(n, k) T_n(y)                          (numeric exploration, no closed form)
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

from . import numeric
from .errors import DomainError, SeriesError
from .exact import (
    SAMPLE_LAMBDAS,
    degen_exp_exact,
    format_rational,
    gen_falling_factorial,
    stirling2_degenerate_explicit,
    terminating_degree,
)
from .numeric import SumResult, Weight
from .powerseries import (
    UniSeries,
    degen_exp_series,
    difference_quotient_biseries,
    tail_generating_biseries,
    tail_weighted_sum_series,
    unit_power_inverse,
)

IDENTITY_IDS = (
    "thm2.1a",
    "thm2.1b",
    "cor2.2a",
    "cor2.2b",
    "cor2.2c",
    "thm2.3",
    "eq11",
    "thm2.4",
    "thm2.5",
    "remark2.6",
)
MODES = ("exact", "numeric", "both")

DEFAULT_TOL = 1e-10
DEFAULT_ORDER = 32
DEFAULT_BIVARIATE_ORDER = 16
DEFAULT_MAX_TERMS = 1000

LIMIT_NOTE = "j=1 term taken as its limit y*e_lam(y)/(1+lam*y)"


@dataclass(frozen=True)
class IdentityCase:
    identity_id: str
    lam: Fraction
    y: Fraction = Fraction(1)
    x: Optional[Fraction] = None
    p: Optional[int] = None
    k: Optional[int] = None
    mode: str = "both"
    order: Optional[int] = None
    tol: float = DEFAULT_TOL
    max_terms: int = DEFAULT_MAX_TERMS
    expected: Optional[Fraction] = None

    def __post_init__(self):
        if self.identity_id not in IDENTITY_IDS:
            raise DomainError(f"unknown identity {self.identity_id!r}")
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.identity_id in ("thm2.3", "eq11", "thm2.4") and (self.p is None or self.p < 0):
            raise DomainError(f"{self.identity_id} needs p >= 0")
        if self.identity_id in ("thm2.5", "remark2.6") and (self.k is None or self.k < 0):
            raise DomainError(f"{self.identity_id} needs k >= 0")
        if self.identity_id == "cor2.2a" and self.x is None:
            raise DomainError("cor2.2a needs x")
        if self.identity_id.startswith("cor2.2") and self.y != 1:
            raise DomainError(f"{self.identity_id} is stated at y = 1")
        if self.order is not None and self.order < 0:
            raise DomainError("order must be non-negative")
        if not self.tol > 0:
            raise DomainError("tol must be positive")

    @property
    def effective_order(self) -> int:
        if self.order is not None:
            return self.order
        return DEFAULT_BIVARIATE_ORDER if self.identity_id == "thm2.1a" else DEFAULT_ORDER

    def params(self) -> dict:
        out = {"lambda": format_rational(self.lam), "y": format_rational(self.y)}
        if self.x is not None:
            out["x"] = format_rational(self.x)
        if self.p is not None:
            out["p"] = self.p
        if self.k is not None:
            out["k"] = self.k
        out["tol"] = self.tol
        out["max_terms"] = self.max_terms
        if self.expected is not None:
            out["expected"] = format_rational(self.expected)
        return out


@dataclass
class ModeResult:
    mode: str
    passed: bool
    residual: object
    lhs: object = None
    rhs: object = None
    terms_used: Optional[int] = None
    tail_bound: Optional[float] = None
    order: Optional[int] = None
    coefficients_checked: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "passed": self.passed,
            "lhs": _fmt(self.lhs),
            "rhs": _fmt(self.rhs),
            "residual": _fmt_residual(self.residual),
            "terms_used": self.terms_used,
            "tail_bound": None if self.tail_bound is None else repr(self.tail_bound),
            "order": self.order,
            "coefficients_checked": self.coefficients_checked,
        }


@dataclass
class IdentityReport:
    case: IdentityCase
    passed: bool
    mode_results: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    error: Optional[str] = None

    def result(self, mode: str) -> Optional[ModeResult]:
        for r in self.mode_results:
            if r.mode == mode:
                return r
        return None

    @property
    def residual(self):
        """Largest residual over the modes that ran (exact ones are Fractions)."""
        vals = [abs(r.residual) for r in self.mode_results if r.residual is not None]
        return max(vals, key=float) if vals else None

    def to_dict(self) -> dict:
        exact = self.result("exact")
        num = self.result("numeric")
        return {
            "identity_id": self.case.identity_id,
            "params": self.case.params(),
            "mode": self.case.mode,
            "passed": self.passed,
            "residual": _fmt_residual(self.residual),
            "terms_used": num.terms_used if num else None,
            "order": exact.order if exact else None,
            "notes": list(self.notes),
            "error": self.error,
            "results": [r.to_dict() for r in self.mode_results],
        }


def _fmt(v):
    if v is None:
        return None
    if isinstance(v, (int, Fraction)):
        return format_rational(v)
    return repr(float(v))


def _fmt_residual(v):
    if v is None:
        return None
    if isinstance(v, (int, Fraction)) and v == 0:
        return "0"
    return repr(float(v))


def numeric_pass(lhs: float, rhs: float, tol: float) -> bool:
    return abs(lhs - rhs) <= tol * max(1.0, abs(rhs))


# ----------------------------------------------------------- closed forms
#
# Each right-hand side is written once against a small "backend" so the same
# formula yields a float, an exact rational, or a truncated y-series.


class _FloatBackend:
    def __init__(self, lam):
        self.lam = lam

    def e(self, scale, y):
        return numeric.degen_exp(1, self.lam, Fraction(scale) * y)

    def y(self, y):
        return float(y)

    def unit_inv(self, y, power):
        base = 1 + float(self.lam) * float(y)
        if base == 0:
            raise DomainError("1 + lambda*y = 0")
        return base ** (-power)

    def lift(self, c):
        return float(c)


class _ExactBackend:
    def __init__(self, lam):
        self.lam = lam

    def e(self, scale, y):
        return degen_exp_exact(1, self.lam, Fraction(scale) * y)

    def y(self, y):
        return Fraction(y)

    def unit_inv(self, y, power):
        base = 1 + self.lam * y
        if base == 0:
            raise DomainError("1 + lambda*y = 0")
        return base ** (-power)

    def lift(self, c):
        return Fraction(c)


class _SeriesBackend:
    """Formal y-series of order N; the y argument passed in is ignored."""

    def __init__(self, lam, order):
        self.lam = lam
        self.order = order
        self._e = degen_exp_series(1, lam, order)

    def e(self, scale, y):
        return self._e.scale_argument(scale)

    def y(self, y):
        return UniSeries.monomial(1, 1, self.order)

    def unit_inv(self, y, power):
        return unit_power_inverse(self.lam, power, self.order)

    def lift(self, c):
        return UniSeries.monomial(0, c, self.order)


def _rhs_tail_sum(b, case):
    y = b.y(case.y)
    return y * b.e(1, case.y) * b.unit_inv(case.y, 1)


def _rhs_binomial(b, case, p, divisor):
    y = b.y(case.y)
    coef = gen_falling_factorial(1, p + 1, case.lam) / divisor
    return (y ** (p + 1)) * b.e(1, case.y) * b.unit_inv(case.y, p + 1) * b.lift(coef)


def _rhs_thm23(b, case):
    return _rhs_binomial(b, case, case.p, math.factorial(case.p + 1))


def _rhs_eq11(b, case):
    return _rhs_binomial(b, case, case.p, case.p + 1)


def _rhs_thm24(b, case):
    total = None
    for k in range(case.p + 1):
        s = stirling2_degenerate_explicit(case.p, k, case.lam)
        if s == 0:
            continue
        term = _rhs_binomial(b, case, k, k + 1) * b.lift(s)
        total = term if total is None else total + term
    return b.lift(0) if total is None else total


def _rhs_thm25(b, case):
    k = case.k
    total = b.lift(0)
    for j in range(k + 1):
        sign = math.comb(k, j) * (-1) ** (k - j)
        if j == 1:
            d = _rhs_tail_sum(b, case)
        else:
            d = (b.e(j, case.y) - b.e(1, case.y)) * b.lift(Fraction(1, j - 1))
        total = total + d * b.lift(sign)
    return total * b.lift(Fraction(1, math.factorial(k)))


def _rhs_cor22a(b, case):
    x = case.x
    if x == 1:
        raise DomainError("cor2.2a is undefined at x = 1")
    num = b.e(x, 1) - b.lift(x) * b.e(1, 1)
    return num * b.lift(1 / (Fraction(x) - 1)) + b.lift(1)


def _rhs_cor22b(b, case):
    lam = case.lam
    if lam == -1:
        raise DomainError("1 + lambda = 0")
    return b.lift(1) - b.lift(lam / (1 + lam)) * b.e(1, 1)


def _rhs_cor22c(b, case):
    return b.lift(1) - (b.e(-1, 1) + b.e(1, 1)) * b.lift(Fraction(1, 2))


@dataclass(frozen=True)
class _Identity:
    weight: Callable[[IdentityCase], Weight]
    rhs: Optional[Callable]
    series: bool  # whether an exact y-series comparison exists
    notes: tuple = ()


_IDENTITIES = {
    "thm2.1b": _Identity(lambda c: Weight("one"), _rhs_tail_sum, True),
    "cor2.2a": _Identity(
        lambda c: Weight("geometric", c.x, start=1),
        _rhs_cor22a,
        False,
        ("numeric domain taken as |lambda*x| < 1, x != 1",),
    ),
    "cor2.2b": _Identity(lambda c: Weight("one", start=1), _rhs_cor22b, False),
    "cor2.2c": _Identity(lambda c: Weight("geometric", Fraction(-1), start=1), _rhs_cor22c, False),
    "thm2.3": _Identity(lambda c: Weight("binomial", c.p), _rhs_thm23, True),
    "eq11": _Identity(lambda c: Weight("falling", c.p), _rhs_eq11, True),
    "thm2.4": _Identity(lambda c: Weight("degenerate-falling", c.p, c.lam), _rhs_thm24, True),
    "thm2.5": _Identity(lambda c: Weight("stirling2", c.k), _rhs_thm25, True, (LIMIT_NOTE,)),
    "remark2.6": _Identity(
        lambda c: Weight("stirling2-deg", c.k, c.lam),
        None,
        False,
        ("exploration only: no closed form is asserted",),
    ),
}


# ------------------------------------------------------------- exact mode


def exact_point_lhs(weight: Weight, lam: Fraction, y: Fraction) -> Fraction:
    """sum_n w_n T_n(y) for lam = 1/m, from the definition of T_n.

    Each T_n(y) is e_lam(y) minus its Taylor polynomial; for n >= m it is 0.
    """
    m = terminating_degree(lam)
    if m is None:
        raise DomainError("exact point evaluation needs lambda = 1/m")
    e_y = degen_exp_exact(1, lam, y)
    total = Fraction(0)
    partial = Fraction(0)
    term = Fraction(1)
    for n in range(m):
        if n:
            term = term * (1 - (n - 1) * lam) * y / n
        partial += term
        w = weight.value(n)
        if w:
            total += w * (e_y - partial)
    return total


def _check_exact(case: IdentityCase, entry: _Identity) -> ModeResult:
    weight = entry.weight(case)
    lam = case.lam
    order = case.effective_order
    passed = True
    residual = Fraction(0)
    checked = 0
    lhs_pt = rhs_pt = None
    ran = False
    if entry.series:
        weights = [weight.value(n) for n in range(order)]
        lhs = tail_weighted_sum_series(weights, lam, order)
        rhs = entry.rhs(_SeriesBackend(lam, order), case)
        diff = lhs - rhs
        residual = max((abs(c) for c in diff.coeffs), default=Fraction(0))
        checked = len(diff.coeffs)
        passed = residual == 0
        ran = True
    if terminating_degree(lam) is not None:
        lhs_pt = exact_point_lhs(weight, lam, case.y)
        rhs_pt = entry.rhs(_ExactBackend(lam), case)
        residual = max(residual, abs(lhs_pt - rhs_pt))
        passed = passed and lhs_pt == rhs_pt
        checked += 1
        ran = True
    if not ran:
        raise DomainError(
            f"exact mode for {case.identity_id} needs a terminating lambda = 1/m (got {lam})"
        )
    if case.expected is not None:
        if lhs_pt is None:
            raise DomainError("an expected value needs a terminating lambda in exact mode")
        passed = passed and lhs_pt == case.expected
        residual = max(residual, abs(lhs_pt - case.expected))
    return ModeResult(
        "exact", passed, residual, lhs_pt, rhs_pt, order=order, coefficients_checked=checked
    )


def _check_numeric(case: IdentityCase, entry: _Identity) -> ModeResult:
    weight = entry.weight(case)
    res = numeric.weighted_tail_sum(
        weight, case.lam, case.y, tol=case.tol * 1e-2, max_terms=case.max_terms
    )
    rhs = float(entry.rhs(_FloatBackend(case.lam), case))
    residual = abs(res.value - rhs)
    passed = res.converged and numeric_pass(res.value, rhs, case.tol)
    if case.expected is not None:
        exp = float(case.expected)
        passed = passed and numeric_pass(res.value, exp, case.tol)
        residual = max(residual, abs(res.value - exp))
    return ModeResult(
        "numeric", passed, residual, res.value, rhs, terms_used=res.terms_used, tail_bound=res.tail_bound
    )


# ------------------------------------------------------ public verifiers


def verify_generating_function(case: IdentityCase) -> IdentityReport:
    """sum_n T_n(y) x**n against (e(xy) - e(y))/(x - 1) as bivariate series."""
    if case.mode == "numeric":
        raise DomainError("thm2.1a has two free variables and is checked in exact mode only")
    n = case.effective_order
    lhs = tail_generating_biseries(case.lam, n, n)
    rhs = difference_quotient_biseries(case.lam, n, n)
    diff = lhs - rhs
    residual = max((abs(v) for _, _, v in diff.nonzero_entries()), default=Fraction(0))
    mr = ModeResult(
        "exact", residual == 0, residual, order=n, coefficients_checked=(n + 1) ** 2
    )
    notes = ["bivariate check in (x, y); numeric mode not applicable"] if case.mode == "both" else []
    return IdentityReport(case, mr.passed, [mr], notes)


def _verify(case: IdentityCase) -> IdentityReport:
    entry = _IDENTITIES[case.identity_id]
    notes = list(entry.notes)
    results = []
    if case.mode in ("exact", "both"):
        results.append(_check_exact(case, entry))
    if case.mode in ("numeric", "both"):
        results.append(_check_numeric(case, entry))
    return IdentityReport(case, all(r.passed for r in results), results, notes)


def verify_tail_sum(case):
    """sum_n T_n(y) = y e_lam(y) / (1 + lam y)."""
    return _verify(replace(case, identity_id="thm2.1b"))


def verify_tail_sum_y1(case):
    """The three y = 1 specialisations (x-weighted, plain, alternating)."""
    if not case.identity_id.startswith("cor2.2"):
        raise DomainError("expected one of cor2.2a, cor2.2b, cor2.2c")
    return _verify(case)


def verify_binomial_weighted(case):
    return _verify(replace(case, identity_id="thm2.3"))


def verify_falling_weighted(case):
    return _verify(replace(case, identity_id="eq11"))


def verify_degenerate_falling_weighted(case):
    return _verify(replace(case, identity_id="thm2.4"))


def verify_stirling_weighted(case):
    """Classical-Stirling weights; the j = 1 summand uses its limiting value."""
    return _verify(replace(case, identity_id="thm2.5"))


def explore_degenerate_stirling_sum(
    lam, y, k: int, tol: float = 1e-12, max_terms: int = DEFAULT_MAX_TERMS
) -> SumResult:
    """Numeric value of sum_n S2_lam(n, k) T_n(y).  No closed form is known.

    For lam not of the form 1/m and lam != 0 the weights grow factorially
    when k >= 1 and the series diverges; NonConvergenceError is raised.
    """
    return numeric.weighted_tail_sum(Weight("stirling2-deg", k, lam), lam, y, tol, max_terms)


def _explore(case: IdentityCase) -> IdentityReport:
    if case.mode == "exact":
        raise DomainError("remark2.6 has no closed form; use numeric mode")
    res = explore_degenerate_stirling_sum(
        case.lam, case.y, case.k, tol=case.tol * 1e-2, max_terms=case.max_terms
    )
    notes = list(_IDENTITIES["remark2.6"].notes)
    passed = res.converged
    residual = None
    if case.expected is not None:
        residual = abs(res.value - float(case.expected))
        passed = passed and numeric_pass(res.value, float(case.expected), case.tol)
    mr = ModeResult(
        "numeric", passed, residual, res.value, None, terms_used=res.terms_used, tail_bound=res.tail_bound
    )
    return IdentityReport(case, passed, [mr], notes)


def verify(case: IdentityCase) -> IdentityReport:
    """Dispatch a case to its verifier; domain errors propagate."""
    if case.identity_id == "thm2.1a":
        return verify_generating_function(case)
    if case.identity_id == "remark2.6":
        return _explore(case)
    return _verify(case)


def limit_term(lam, y) -> float:
    """lim_{j->1} (e_lam(j y) - e_lam(y)) / (j - 1) = y e_lam(y) / (1 + lam y)."""
    return float(y) * numeric.degen_exp(1, lam, y) / (1 + float(lam) * float(y))


def limit_term_probe(lam, y, h: float = 1e-6) -> float:
    """Forward difference (e_lam((1+h) y) - e_lam(y)) / h."""
    y_f = float(y)
    lam_f = float(lam)
    return (numeric.degen_exp(1, lam_f, (1 + h) * y_f) - numeric.degen_exp(1, lam_f, y_f)) / h


# ----------------------------------------------------------------- suite


def _safe_verify(case: IdentityCase) -> IdentityReport:
    try:
        return verify(case)
    except (SeriesError, ValueError, ZeroDivisionError, OverflowError) as exc:
        return IdentityReport(case, False, [], [], error=f"{type(exc).__name__}: {exc}")


def run_suite(cases, jobs: int = 1) -> list:
    """Verify every case, capturing per-case errors; output keeps input order."""
    cases = list(cases)
    if jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_safe_verify, cases, chunksize=8))
    return [_safe_verify(c) for c in cases]


def numeric_admissible(case: IdentityCase) -> bool:
    """Whether numeric mode can run: convergence guard and closed-form domain."""
    try:
        probe = replace(case, mode="numeric", expected=None)
        if case.identity_id == "thm2.1a":
            return False
        entry = _IDENTITIES[case.identity_id]
        numeric._check_convergence(case.lam, case.y, entry.weight(probe).growth())
        if entry.rhs is not None:
            entry.rhs(_FloatBackend(case.lam), probe)
    except (SeriesError, ValueError, ZeroDivisionError, OverflowError):
        return False
    return True


GRID_YS = (Fraction(1, 4), Fraction(1, 2), Fraction(1))
EXTRA_NUMERIC_LAMBDAS = (Fraction(-2, 5),)
DESK_CASES = (
    # lambda = 1/2, y = 1: e_lam(1) = 9/4, T_0(1) = 5/4, T_1(1) = 1/4, T_n(1) = 0 for n >= 2
    ("thm2.1b", {}, Fraction(3, 2)),
    ("cor2.2b", {}, Fraction(1, 4)),
    ("cor2.2c", {}, Fraction(-1, 4)),
    ("thm2.3", {"p": 1}, Fraction(1, 4)),
    ("eq11", {"p": 1}, Fraction(1, 4)),
    ("thm2.4", {"p": 2}, Fraction(1, 8)),
    ("thm2.5", {"k": 1}, Fraction(1, 4)),
    ("cor2.2a", {"x": Fraction(1, 3)}, Fraction(1, 12)),
)


def desk_cases(tol: float = 1e-12) -> list:
    half = Fraction(1, 2)
    return [
        IdentityCase(ident, half, mode="both", tol=tol, expected=val, **kw)
        for ident, kw, val in DESK_CASES
    ]


def default_grid(max_pk: int = 8) -> list:
    """The default suite: every case here is expected to pass."""
    cases = list(desk_cases())
    for lam in SAMPLE_LAMBDAS:
        cases.append(IdentityCase("thm2.1a", lam, mode="exact", order=DEFAULT_BIVARIATE_ORDER))
        cases.append(IdentityCase("thm2.1b", lam, mode="exact"))
        for p in range(max_pk + 1):
            for ident in ("thm2.3", "eq11", "thm2.4"):
                cases.append(IdentityCase(ident, lam, mode="exact", p=p))
            cases.append(IdentityCase("thm2.5", lam, mode="exact", k=p))
        if terminating_degree(lam) is not None:
            for ident in ("cor2.2b", "cor2.2c"):
                cases.append(IdentityCase(ident, lam, mode="exact"))
            for x in (Fraction(-1, 2), Fraction(1, 3), Fraction(2)):
                cases.append(IdentityCase("cor2.2a", lam, x=x, mode="exact"))
    numeric_cases = []
    for lam in SAMPLE_LAMBDAS + EXTRA_NUMERIC_LAMBDAS:
        for y in GRID_YS:
            numeric_cases.append(IdentityCase("thm2.1b", lam, y=y, mode="numeric"))
            for p in range(max_pk + 1):
                for ident in ("thm2.3", "eq11", "thm2.4"):
                    numeric_cases.append(IdentityCase(ident, lam, y=y, p=p, mode="numeric"))
                numeric_cases.append(IdentityCase("thm2.5", lam, y=y, k=p, mode="numeric"))
            for k in range(4):
                numeric_cases.append(IdentityCase("remark2.6", lam, y=y, k=k, mode="numeric"))
        for ident in ("cor2.2b", "cor2.2c"):
            numeric_cases.append(IdentityCase(ident, lam, mode="numeric"))
        for x in (Fraction(-1, 2), Fraction(1, 3), Fraction(2)):
            numeric_cases.append(IdentityCase("cor2.2a", lam, x=x, mode="numeric"))
    cases.extend(c for c in numeric_cases if numeric_admissible(c))
    return cases


def summarize(reports) -> dict:
    by_id: dict = {}
    for r in reports:
        d = by_id.setdefault(r.case.identity_id, {"total": 0, "passed": 0, "failed": 0, "errors": 0})
        d["total"] += 1
        if r.error is not None:
            d["errors"] += 1
        elif r.passed:
            d["passed"] += 1
        else:
            d["failed"] += 1
    return {
        "total": len(reports),
        "passed": sum(r.passed for r in reports),
        "failed": sum(not r.passed and r.error is None for r in reports),
        "errors": sum(r.error is not None for r in reports),
        "by_identity": {k: by_id[k] for k in IDENTITY_IDS if k in by_id},
    }
