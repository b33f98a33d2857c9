"""Acceptance gate: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""

import io
import json
import math
import time
from fractions import Fraction as F
from pathlib import Path

from degtail.cli import main
from degtail.errors import NonConvergenceError
from degtail.exact import (
    SAMPLE_LAMBDAS,
    bell_degenerate,
    stirling2_classical,
    stirling2_degenerate_explicit,
    stirling2_degenerate_recurrence,
    verify_basis_expansion,
)
from degtail.identities import (
    IdentityCase,
    desk_cases,
    limit_term,
    limit_term_probe,
    numeric_admissible,
    run_suite,
    verify,
)
from degtail.numeric import bell_degenerate_dobinski, degen_exp
from degtail.powerseries import extract_stirling_from_gf

FIXTURES = Path(__file__).parent / "fixtures"
GRID_YS = (F(1, 4), F(1, 2), F(1))


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return main(list(argv), out=out, err=err), out.getvalue(), err.getvalue()


def test_criterion_01_bivariate_generating_function(criterion):
    with criterion(1, "bivariate generating function exact at N=16 for all sample lambda, < 30 s"):
        t0 = time.perf_counter()
        for lam in SAMPLE_LAMBDAS:
            rep = verify(IdentityCase("thm2.1a", lam, mode="exact", order=16))
            assert rep.passed and rep.residual == 0, lam
            assert rep.result("exact").coefficients_checked == 17 * 17
        assert time.perf_counter() - t0 < 30


def test_criterion_02_exact_univariate_suite(criterion):
    with criterion(2, "exact univariate identities to order 32, p, k <= 8, residual 0"):
        cases = []
        for lam in SAMPLE_LAMBDAS:
            cases.append(IdentityCase("thm2.1b", lam, mode="exact", order=32))
            for p in range(9):
                for ident in ("thm2.3", "eq11", "thm2.4"):
                    cases.append(IdentityCase(ident, lam, p=p, mode="exact", order=32))
                cases.append(IdentityCase("thm2.5", lam, k=p, mode="exact", order=32))
        for rep in run_suite(cases):
            assert rep.error is None, rep.error
            r = rep.result("exact")
            assert rep.passed and r.residual == 0, rep.case
            assert r.coefficients_checked >= 33


def test_criterion_03_stirling_three_ways(criterion):
    with criterion(3, "Stirling numbers: explicit = recurrence = generating function, n <= 20"):
        for lam in SAMPLE_LAMBDAS:
            table = stirling2_degenerate_recurrence(20, lam)
            for k in range(21):
                gf = extract_stirling_from_gf(20, k, lam)
                for n in range(k, 21):
                    explicit = stirling2_degenerate_explicit(n, k, lam)
                    assert explicit == table[n, k] == gf[n], (lam, n, k)
            for n in range(21):
                assert verify_basis_expansion(n, lam), (lam, n)


def test_criterion_04_desk_cases(criterion):
    with criterion(4, "desk cases at lambda=1/2, y=1: exact residual 0, numeric within 1e-12"):
        expected = {
            "thm2.1b": F(3, 2),
            "cor2.2b": F(1, 4),
            "cor2.2c": F(-1, 4),
            "thm2.3": F(1, 4),
        }
        seen = set()
        for rep in run_suite(desk_cases(tol=1e-12)):
            assert rep.passed, rep.case
            ex, num = rep.result("exact"), rep.result("numeric")
            assert ex.residual == 0 and ex.lhs == ex.rhs == rep.case.expected
            assert abs(num.lhs - num.rhs) <= 1e-12
            assert abs(num.lhs - float(rep.case.expected)) <= 1e-12
            if rep.case.identity_id in expected:
                assert rep.case.expected == expected[rep.case.identity_id]
                seen.add(rep.case.identity_id)
        assert seen == set(expected)
        # the two closed forms quoted for the y = 1 sums
        half = F(1, 2)
        assert 1 - half / (1 + half) * F(9, 4) == F(1, 4)
        assert abs(1 - (degen_exp(1, half, 1) + degen_exp(1, half, -1)) / 2 - (-0.25)) <= 1e-12


def test_criterion_05_numeric_grid(criterion):
    with criterion(5, "numeric residual <= 1e-10, converged, terms <= 200 at lambda in {1/3, -2/5}"):
        cases = []
        for lam in (F(1, 3), F(-2, 5)):
            for y in GRID_YS:
                cases.append(IdentityCase("thm2.1b", lam, y=y, mode="numeric"))
                for p in range(9):
                    for ident in ("thm2.3", "eq11", "thm2.4"):
                        cases.append(IdentityCase(ident, lam, y=y, p=p, mode="numeric"))
                    cases.append(IdentityCase("thm2.5", lam, y=y, k=p, mode="numeric"))
            cases.append(IdentityCase("cor2.2b", lam, mode="numeric"))
            cases.append(IdentityCase("cor2.2c", lam, mode="numeric"))
            for x in (F(-1, 2), F(1, 3), F(2)):
                cases.append(IdentityCase("cor2.2a", lam, x=x, mode="numeric"))
        admissible = [c for c in cases if numeric_admissible(c)]
        skipped = {(c.identity_id, str(c.lam), str(c.y), c.k, str(c.x)) for c in cases if c not in admissible}
        # only Stirling weights with |lam| k y >= 1 and cor2.2a at |lam x| >= 1 fall outside the guard
        for ident, lam, y, k, x in skipped:
            if ident == "thm2.5":
                assert F(lam) == F(-2, 5) and abs(F(lam)) * k * F(y) >= 1 - F(1, 1000)
            else:
                assert ident == "cor2.2a" and abs(F(lam) * F(x)) >= 1 - F(1, 1000)
        assert len(admissible) > 200
        for rep in run_suite(admissible):
            assert rep.error is None, (rep.case, rep.error)
            r = rep.result("numeric")
            assert rep.passed, rep.case
            assert r.residual <= 1e-10 * max(1, abs(r.rhs))
            assert r.terms_used <= 200, (rep.case, r.terms_used)


def test_criterion_06_lambda_to_zero(criterion):
    with criterion(6, "lambda = 1e-8 recovers classical Stirling numbers and exp within 1e-6"):
        lam = F(1, 10**8)
        for n in range(13):
            for k in range(n + 1):
                s = stirling2_classical(n, k)
                assert abs(stirling2_degenerate_explicit(n, k, lam) - s) / max(1, s) <= F(1, 10**6)
        for t in (F(-1, 2), F(1, 2), F(1)):
            assert abs(degen_exp(1, lam, t) - math.exp(t)) <= 1e-6
            assert abs(degen_exp(1, 1e-8, float(t)) - math.exp(t)) <= 1e-6


def test_criterion_07_bell_two_definitions(criterion):
    with criterion(7, "degenerate Bell polynomials: series vs Stirling sum within 1e-10"):
        for lam in SAMPLE_LAMBDAS:
            for x in (F(1, 2), F(1), F(2)):
                for n in range(11):
                    ref = float(bell_degenerate(n, lam, x))
                    res = bell_degenerate_dobinski(n, lam, x, tol=1e-13)
                    assert res.converged
                    assert abs(res.value - ref) <= 1e-10 * max(1, abs(ref)), (lam, x, n)


def test_criterion_08_limit_term(criterion):
    with criterion(8, "j=1 limit term vs finite difference at h=1e-6 within 1e-4"):
        checked = 0
        for lam in SAMPLE_LAMBDAS:
            for y in GRID_YS:
                try:
                    a = limit_term(lam, y)
                    b = limit_term_probe(lam, y, h=1e-6)
                except (ValueError, ZeroDivisionError):
                    # base 1 + lam*y <= 0 with a non-integer exponent: outside the real domain
                    assert 1 + lam * y * F(1000001, 1000000) <= 0
                    continue
                assert abs(a - b) <= 1e-4, (lam, y)
                checked += 1
        assert checked >= 15
        # the full Stirling-weight checks use this interpretation
        rep = verify(IdentityCase("thm2.5", F(1, 3), y=F(1, 2), k=3, mode="both"))
        assert rep.passed and any("limit" in n for n in rep.notes)


def test_criterion_09_guard(criterion):
    with criterion(9, "|lambda y| >= 1 with non-terminating lambda: non-convergence, CLI exit 2"):
        for lam, y in [(F(2), F(1)), (F(-2, 3), F(2)), (F(-1), F(1)), (F(3, 2), F(1))]:
            try:
                verify(IdentityCase("thm2.1b", lam, y=y, mode="numeric"))
            except NonConvergenceError:
                pass
            else:
                raise AssertionError(f"no guard at lambda={lam}, y={y}")
            code, out, err = _cli("verify", "--identity", "thm2.1b", f"--lambda={lam}", "--y", str(y), "--mode", "numeric")
            assert code == 2 and out == "" and "converge" in err.lower()
        [rep] = run_suite([IdentityCase("thm2.1b", F(2), y=F(1), mode="numeric")])
        assert not rep.passed and "NonConvergenceError" in rep.error


def test_criterion_10_cli_contract(criterion, tmp_path):
    with criterion(10, "suite default exits 0; a corrupted expected value fails its case, exit 1"):
        code, out, _ = _cli("suite", "--no-metadata")
        assert code == 0 and json.loads(out)["summary"]["failed"] == 0
        fixture = json.loads((FIXTURES / "desk_cases.json").read_text())
        code, _, _ = _cli("suite", "--config", str(FIXTURES / "desk_cases.json"))
        assert code == 0
        for i, entry in enumerate(fixture["cases"]):
            if "expected" not in entry:
                continue
            bad = json.loads(json.dumps(fixture))
            bad["cases"][i]["expected"] = str(F(entry["expected"]) + F(1, 10**9))
            path = tmp_path / f"corrupt{i}.json"
            path.write_text(json.dumps(bad))
            code, out, _ = _cli("suite", "--config", str(path), "--no-metadata")
            reports = json.loads(out)["reports"]
            assert code == 1
            assert [j for j, r in enumerate(reports) if not r["passed"]] == [i]
