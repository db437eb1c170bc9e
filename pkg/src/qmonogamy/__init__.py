"""Monogamy relations between quantum resources and entanglement.

Numerical evaluators for resource measures, their unitary-orbit suprema, the
entropies they induce, convex-roof entanglement monotones, and the monogamy
inequalities tying a subsystem's resource content to its entanglement with an
environment.
"""
from .convexroof import ConvexRoofConfig, Decomposition, RoofResult, convex_roof_search, estimate_convex_roof
from .entropies import (
    VON_NEUMANN,
    EntropyKind,
    binary_entropy,
    entropy,
    majorizes,
    mix_toward_uniform,
)
from .errors import *  # noqa: F401,F403
from .gbound import (
    EnvelopeFunction,
    HConfig,
    OrbitConfig,
    entropy_from_measure,
    g_analytic,
    g_numeric,
    g_orbit_sup,
    h_curve,
    h_of_y,
    lower_convex_envelope,
    negativity_envelope,
    orbit_search,
)
from .harness import (
    CampaignConfig,
    CampaignSummary,
    DephasingParams,
    dephasing_state,
    figure1_data,
    run_campaign,
)
from .measures import (
    MeasureDescriptor,
    concurrence,
    eof_wootters,
    neg_spectrum_G,
    negativity,
    negativity_entropy,
    nonuniformity,
    rel_ent_coherence,
    rotated_qubit_basis,
)
from .monogamy import (
    InequalityId,
    MonogamyReport,
    check_combined_n_party,
    check_entanglement_monogamy,
    check_negativity_g,
    check_resource_monogamy,
    check_usual_monogamy,
    find_crossover,
    saturate_resource,
    symmetric_family_scan,
    three_qubit_bounds,
)
from .qcore import (
    BipartiteSplit,
    DensityMatrix,
    Spectrum,
    partial_trace,
    partial_transpose,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    symmetric_three_qubit_pure,
)

__version__ = "0.1.0"
