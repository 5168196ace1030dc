"""Exact optimal transport for finitely supported measures on the Heisenberg group.

The package computes p-Wasserstein distances and optimal plans under the
Koranyi metric, certifies transport maps (right translations, horizontal
dilations, lifted plane maps) through LP gaps and cyclical-monotonicity checks,
builds and verifies geodesic families, inverts the vertical Radon transform on
finitely supported measures, and runs the two-point rigidity computations on
vertical lines.  The ``heisot`` command exposes the same functionality from the
shell, including a seeded property-suite runner (``heisot verify``).
"""

from .geometry import (
    HeisenbergPoint,
    HorizontalVector,
    SeparatingHyperplane,
    VerticalLine,
    distance,
    group_inv,
    group_mul,
    horizontal_dilation,
    horizontally_aligned,
    koranyi_norm,
    origin,
    point,
    right_translate_horizontal,
    separating_hyperplane,
    vertical_project,
)
from .measures import (
    DiscreteMeasure,
    SignedDecomposition,
    add_measures,
    dirac,
    horizontal_p_moment,
    jordan_decomposition,
    make_measure,
    measures_equal,
    mix_measures,
    p_cost_to_point,
    push_forward,
    scale_measure,
    vertical_support_line,
)
from .transport import (
    Coupling,
    CycleCertificate,
    TransportResult,
    coupling_cost,
    cyclically_monotone,
    kr_dual_value,
    solve_wp,
    verify_map_optimality,
)
from .geodesics import (
    GeodesicCurve,
    W1Decomposition,
    branch_geodesics,
    dilation_ray,
    linear_interpolation,
    right_translation_curve,
    unique_w1_geodesic,
    verify_unit_speed,
)
from .radon import (
    RadonSample,
    generic_line,
    oracle_from_measure,
    project_measure,
    reconstruct,
)
from .lifting import (
    PlaneMap,
    certify_lift,
    lift_map,
    plane_dilation,
    plane_map_from_coupling,
    plane_map_from_pairs,
    plane_projection_measure,
    plane_translation,
    push_forward_plane,
)
from .rigidity import (
    Step4Report,
    TwoPointParams,
    exotic_action,
    s_plus_minus_sets,
    shape_flip_action,
    step4_certificate,
    two_point_measure,
    two_point_params,
    vertical_translation_gap,
)
from .harness import SuiteConfig, SuiteReport, export_curve, load_config, run_suite

__version__ = "0.1.0"
