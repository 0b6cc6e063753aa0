"""Rearrangements, radial comparison functions and Robin torsion on planar grids."""
from .grid import (
    PLANE,
    GridDomain,
    MeasureConstants,
    ScalarField,
    boundary_trace_integral,
    disk,
    field_from_function,
    field_to_samples,
    gradient_magnitude,
    l_shape,
    load_domain,
    polygon,
    rectangle,
    schwarz_radius,
    square,
)
from .rearrange import (
    LorentzParams,
    StepProfile,
    WeightedSamples,
    check_weight_condition,
    contraction_check,
    decreasing_rearrangement,
    distribution_function,
    hardy_littlewood_check,
    increasing_rearrangement,
    lorentz_norm,
    lp_norm,
    pseudo_rearrangement,
)
from .robin import (
    RobinProblem,
    TorsionResult,
    compare_torsion,
    exact_ball_solution,
    nonlinear_functional_eval,
    solve_robin,
    torsion_functional,
    torsion_rigidity,
    weighted_torsion_energy,
)
from .symmetrize import (
    ComparisonRecord,
    RadialFunction,
    build_ustar,
    essosc_check,
    gn_radial_solution,
    l1_compare,
    lorentz_compare,
    pointwise_bound_check,
    talenti_lorentz_formula,
    trace_lp_check,
    weighted_compare,
)

__version__ = "0.1.0"
