"""Computational laboratory for nodal sets of Laplace eigenfunctions.

Explicit separable eigenfunctions on an interval, Dirichlet boxes, and flat
tori; exact oracles and grid estimators for tube volumes, nodal measure, and
nodal density; box-subdivision statistics; Diophantine approximation of
points by nodal sets; and a report harness whose pass/fail gates are pure
functions of the recorded numbers.
"""

from .boxes import (
    BoxStats,
    NodalBoxes,
    Subdivision,
    bad_proportion,
    classify_boxes,
    comparability_set,
    compute_box_stats,
    goodness_threshold,
    nodal_box_count,
    sign_ratio,
    subdivide,
)
from .cache import FieldCache
from .cfrac import ContinuedFractionExpansion, continued_fraction
from .components import component_inradii, sign_components
from .dioph import (
    ApproxEvent,
    ExponentEstimate,
    approx_events,
    borel_cantelli_sum,
    estimate_exponent,
    khinchin_check,
    modes_nodal_distance,
    nearest_nodal_distance,
)
from .distance import DistanceField, distance_field
from .errors import (
    EmptyNodalSetError,
    ResolutionError,
    ResourceGuardError,
    ValidationError,
)
from .grid import GridSample, ResolutionRule, sample_grid
from .harness import (
    GATE_BUILDERS,
    run_approx_theorem,
    run_comparability_scaling,
    run_density_check,
    run_dim2_checks,
    run_exponent_survey,
    run_tube_scaling,
    run_yau_check,
)
from .measures import McRefine, density_radius, nodal_measure, tube_volume
from .nodal import NodalApprox, extract_nodal
from .reports import (
    CODE_VERSION,
    CellResult,
    ExperimentReport,
    GateResult,
    gate,
    verify_report,
    write_report,
)
from .spectrum import (
    DomainSpec,
    EigenMode,
    ModeList,
    density_radius_exact,
    enumerate_modes,
    eval_mode,
    exact_nodal_description,
    nodal_distance_exact,
    nodal_measure_exact,
    tube_volume_exact,
    weyl_count,
)

__version__ = CODE_VERSION

__all__ = [
    "ApproxEvent",
    "BoxStats",
    "CODE_VERSION",
    "CellResult",
    "ContinuedFractionExpansion",
    "DistanceField",
    "DomainSpec",
    "EigenMode",
    "EmptyNodalSetError",
    "ExperimentReport",
    "ExponentEstimate",
    "FieldCache",
    "GATE_BUILDERS",
    "GateResult",
    "GridSample",
    "McRefine",
    "ModeList",
    "NodalApprox",
    "NodalBoxes",
    "ResolutionError",
    "ResolutionRule",
    "ResourceGuardError",
    "Subdivision",
    "ValidationError",
    "approx_events",
    "bad_proportion",
    "borel_cantelli_sum",
    "classify_boxes",
    "comparability_set",
    "component_inradii",
    "compute_box_stats",
    "continued_fraction",
    "density_radius",
    "density_radius_exact",
    "distance_field",
    "enumerate_modes",
    "estimate_exponent",
    "eval_mode",
    "exact_nodal_description",
    "extract_nodal",
    "gate",
    "goodness_threshold",
    "khinchin_check",
    "modes_nodal_distance",
    "nearest_nodal_distance",
    "nodal_box_count",
    "nodal_distance_exact",
    "nodal_measure",
    "nodal_measure_exact",
    "run_approx_theorem",
    "run_comparability_scaling",
    "run_density_check",
    "run_dim2_checks",
    "run_exponent_survey",
    "run_tube_scaling",
    "run_yau_check",
    "sample_grid",
    "sign_components",
    "sign_ratio",
    "subdivide",
    "tube_volume",
    "tube_volume_exact",
    "verify_report",
    "weyl_count",
    "write_report",
]
