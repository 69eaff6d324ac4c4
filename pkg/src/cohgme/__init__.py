"""Convex-roof GME and coherence measures, the coherence-to-GME conversion
unitary, and the Hardy-type nonlocality test for three-qubit X-states."""

from .core import (
    Bipartition,
    DensityMatrix,
    PureState,
    enumerate_bipartitions,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    schmidt_vector,
    tensor_product,
    validate_density_matrix,
)
from .measures import (
    ConcaveFunction,
    c_alpha,
    coherence_pure,
    coherence_vector,
    e_f_gamma_pure,
    e_min_gme_pure,
    eval_f,
    g_geo_gme_pure,
    l1_coherence,
    xstate_gme_concurrence,
)
from .roof import RoofConfig, RoofMeasure, RoofResult, brute_force_roof, convex_roof
from .uio import build_uio, check_theorem3, convert, permutation_operator
from .hardy import (
    XStateParams,
    build_xstate,
    gmnl_gms_flags,
    hardy_closed_form,
    hardy_from_state,
    maximize_hardy,
    sweep_hardy,
)

__version__ = "0.1.0"
