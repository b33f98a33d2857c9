"""Degenerate exponentials, degenerate Stirling numbers and series of truncated tails."""

from .errors import (
    BudgetExceededError,
    DomainError,
    NonConvergenceError,
    NonUnitError,
    SeriesError,
)
from .exact import (
    SAMPLE_LAMBDAS,
    StirlingTable,
    bell_degenerate,
    binomial,
    falling_factorial,
    format_rational,
    gen_falling_factorial,
    parse_rational,
    stirling2_classical,
    stirling2_degenerate_explicit,
    stirling2_degenerate_recurrence,
    verify_basis_expansion,
)
from .identities import IdentityCase, IdentityReport, default_grid, run_suite, verify
from .numeric import (
    SumResult,
    Weight,
    bell_degenerate_dobinski,
    cosh_deg,
    degen_exp,
    degen_exp_partial,
    tail,
    weighted_tail_sum,
)
from .powerseries import BiSeries, UniSeries, degen_exp_series

__version__ = "0.1.0"
