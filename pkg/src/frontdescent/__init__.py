"""Front-expanding steepest descent for smooth multi-objective optimization."""

__version__ = "0.1.0"

from .algorithms import (
    EvalCounters,
    RunTrace,
    SolverConfig,
    crowding_distances,
    fsd_run,
    ifsd_run,
    stopping_rule,
    write_trace_jsonl,
)
from .direction import (
    DirectionResult,
    DualSolveError,
    is_pareto_stationary,
    solve_direction,
    theta_and_v,
)
from .dominance import (
    Archive,
    ArchiveContractError,
    ArchiveFormatError,
    FrontMember,
    ObjectiveSubset,
    all_nonempty_subsets,
    dominates,
    leq,
    lt,
    read_archive_csv,
    restrict,
    write_archive_csv,
)
from .linesearch import (
    LineSearchError,
    LineSearchParams,
    armijo_front,
    armijo_single,
    nondominance_backtrack,
)
from .metrics import (
    FrontSet,
    MetricWarning,
    ProfileCurve,
    delta_spread,
    front_from_archive_csv,
    gamma_spread,
    hypervolume,
    hypervolume_reference_point,
    performance_profiles,
    purity,
    reference_front,
)
from .problems import Problem, initial_points, registry_get, registry_names
