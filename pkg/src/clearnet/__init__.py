"""Clearing payments and equity values in interbank networks with cross-holdings
and default charges."""

from .compare import ComparisonReport, compare_methods
from .equity import Bounds, compute_bounds, positive_fixpoint, solve_G, solve_Gplus
from .errors import (
    ClearnetError,
    ConvergenceError,
    InternalError,
    PreconditionError,
    ValidationError,
)
from .fixpoint import (
    ClearingSet,
    RegimeFixpoints,
    enumerate_clearing_set,
    eval_F,
    extreme_pairs,
    fixpoint_residual,
    max_fixpoint,
    min_fixpoint,
    phi_b,
    regime_fixpoints,
)
from .gaussian import GaussianResult, gaussian_max_clearing, gaussian_reduction
from .milp.clearing import (
    ObjectiveWeights,
    build_P1,
    build_P2,
    maximal_pair_via_milp,
    minimal_pair_via_milp,
)
from .network import (
    DEFAULT_TOL,
    AxiomReport,
    ClearingPair,
    FinancialNetwork,
    assets_x,
    assets_y,
    build_network,
    clearing_pair,
    relative_liabilities,
    verify_clearing_pair,
)
from .scenario import Scenario, gen_random_network, ingest

__version__ = "0.1.0"
