"""Exact-arithmetic toolkit for Z_2^n abelian covers of surfaces with free
Picard lattice: building-data validation, numerical invariants, canonical-map
analysis, fiber genera, and exhaustive configuration search."""

from .building import (
    Assumptions,
    BuildingData,
    BundleSolveError,
    DivisibilityFailure,
    TrivialityFailure,
    ValidationReport,
    branch_sum,
    solve_bundles,
    total_branch,
    validate,
)
from .canonical import (
    CanonicalReport,
    DegenerateCanonicalError,
    QuotientCover,
    canonical_degree_report,
    contributing_characters,
    double_cover_node_count,
    quotient_cover,
    trivially_acting_subgroup,
)
from .fibration import (
    FiberRestriction,
    ProbeResult,
    elliptic_quotient_probe,
    fiber_genus,
    restrict_to_fiber,
)
from .groups import (
    Character,
    GroupElement,
    Subgroup,
    annihilator,
    char_eval,
    coset_image,
    span,
)
from .invariants import (
    InvariantSet,
    NegativeIrregularityError,
    ParityError,
    bmy_gate,
    compute_invariants,
    euler_characteristic,
    geometric_genus,
    irregularity,
    k_squared,
    positivity_gate,
    two_canonical_class,
)
from .picard import (
    BaseSurface,
    DivisibilityError,
    DivisorClass,
    format_class,
    h0,
    halve,
    intersect,
    parse_class,
    preset_p1xp1,
    preset_p2,
)
from .search import (
    BudgetExceededError,
    SearchResult,
    SearchSpec,
    SpecTooLargeError,
    canonicalize,
    enumerate_covers,
)

__version__ = "0.1.0"


def bundled_config_path() -> str:
    """Path of the packaged example configuration (degree-16 cover of the quadric)."""
    from importlib.resources import files

    return str(files("abelcov").joinpath("data/z2_4_degree16.toml"))
