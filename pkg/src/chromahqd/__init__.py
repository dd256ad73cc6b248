"""Chromatic polynomials at negative integers, three independent ways,
and the quadratic-drop structures they count.

The library computes chi_G(-k) exactly by deletion and contraction, as a
count of compatible acyclic orientations of the boundary-augmented graph,
and as a Monte-Carlo average over random edge conductances; the agreement
of the three routes is the point.  On top sit the Dirichlet machinery
(harmonic extensions, transfer currents, the conductance-to-drop map and
its Jacobian), solvers and invariance checks for realization systems, and
AC circuit analysis where reactive power plays the quadratic-drop role.
"""

from ._kernels import BACKEND
from .chromatic import (
    CountReport,
    IntPolynomial,
    chi_at_negative,
    chromatic_polynomial,
    count_report,
    induced_interior,
    predicted_realizations,
    tutte_x_slice,
)
from .dirichlet import (
    DegenerateEdgeError,
    GreensFunction,
    HarmonicSolution,
    SingularSystemError,
    dz_dq_edge,
    greens_function,
    psi_jacobian_det,
    psi_map,
    solve_dirichlet,
    transfer_current,
)
from .graphs import (
    Edge,
    EdgeId,
    Graph,
    SelfLoopContractionError,
    UnknownEdgeError,
    augment_k,
    contract_edge,
    delete_edge,
    dump_graph,
    graph_from_json,
    graph_to_json,
    is_two_connected_to_boundary,
    load_graph,
    merge_multi_edges,
    reduce_degree2,
    validate,
    wire_boundary,
    wired_spanning_forest,
)
from .hqd import (
    MobiusTransform,
    PoleError,
    QAssignment,
    RankReport,
    Realization,
    ResidualReport,
    apply_mobius,
    balance_residuals,
    detect_solution_family,
    realization,
    realization_residuals,
    reattach_infinity,
    residuals,
    sample_balanced_q,
    send_boundary_to_infinity,
    solve_realizations,
)
from .integral import (
    IntegralEstimate,
    SimplexSample,
    boundary_value_invariance,
    estimate_chi,
    integrand,
    simplex_sample,
)
from .lc_circuit import (
    CircuitSingularError,
    EdgePower,
    ElementStack,
    PhasorDrive,
    PowerReport,
    ResonanceReport,
    TreePolynomial,
    impedance,
    laplacian_determinant,
    reactive_power_as_hqd,
    resonant_frequencies,
    solve_circuit,
    spanning_tree_polynomial,
)
from .orientations import (
    CapExceededError,
    Orientation,
    count_compatible,
    is_compatible,
    value_independence_check,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # graphs
    "Edge",
    "EdgeId",
    "Graph",
    "UnknownEdgeError",
    "SelfLoopContractionError",
    "validate",
    "delete_edge",
    "contract_edge",
    "merge_multi_edges",
    "reduce_degree2",
    "augment_k",
    "wire_boundary",
    "is_two_connected_to_boundary",
    "wired_spanning_forest",
    "graph_to_json",
    "graph_from_json",
    "load_graph",
    "dump_graph",
    # chromatic
    "IntPolynomial",
    "CountReport",
    "chromatic_polynomial",
    "tutte_x_slice",
    "chi_at_negative",
    "induced_interior",
    "predicted_realizations",
    "count_report",
    # dirichlet
    "SingularSystemError",
    "DegenerateEdgeError",
    "HarmonicSolution",
    "GreensFunction",
    "solve_dirichlet",
    "greens_function",
    "dz_dq_edge",
    "transfer_current",
    "psi_map",
    "psi_jacobian_det",
    # hqd
    "PoleError",
    "QAssignment",
    "Realization",
    "MobiusTransform",
    "ResidualReport",
    "RankReport",
    "balance_residuals",
    "realization_residuals",
    "residuals",
    "realization",
    "sample_balanced_q",
    "apply_mobius",
    "send_boundary_to_infinity",
    "reattach_infinity",
    "solve_realizations",
    "detect_solution_family",
    # integral
    "SimplexSample",
    "IntegralEstimate",
    "simplex_sample",
    "integrand",
    "estimate_chi",
    "boundary_value_invariance",
    # orientations
    "CapExceededError",
    "Orientation",
    "is_compatible",
    "count_compatible",
    "value_independence_check",
    # circuits
    "CircuitSingularError",
    "ElementStack",
    "PhasorDrive",
    "EdgePower",
    "PowerReport",
    "TreePolynomial",
    "ResonanceReport",
    "impedance",
    "solve_circuit",
    "reactive_power_as_hqd",
    "spanning_tree_polynomial",
    "laplacian_determinant",
    "resonant_frequencies",
]
