"""Random fragmentation chains.

Thin Python layer over the C++ library; see ``fragchain._fragchain``.
"""

from ._fragchain import (
    BudgetExceeded,
    ConvergenceError,
    DomainError,
    EventLog,
    InvalidConfigError,
    Kappa,
    Law,
    MergeEvent,
    PreconditionError,
    SimConfig,
    TruncationError,
    UnknownLawError,
    UnknownSuiteError,
    coalescent_merges,
    exit_density,
    lln_functional,
    make_law,
    moment_series,
    paintbox,
    rho_moments,
    run,
    run_replicas,
    run_suite,
    suite_ids,
    tagged_laplace,
)

__all__ = [name for name in dir() if not name.startswith("_")]
