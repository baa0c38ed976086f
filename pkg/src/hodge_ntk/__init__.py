"""Hodge-Laplacian tangent kernels on simplicial complexes.

Edge signals on oriented complexes of dimension <= 2 propagate through
P = gamma*I + alpha*L_down + beta*L_up; the induced infinite-width kernel
recursion, its ridge-regression learning dynamics, and the associated
experiments (triangle-count regression, Hodge component recovery, spectral
diagnostics, triangle-flip stability, triad-closure prediction) live here.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("hodge-ntk")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .activations import ActivationKind, CovarianceView, phi, phi_dot
from .complexes import (
    BoundaryMatrices,
    SimplicialComplex,
    b2_on_candidates,
    boundary_matrices,
    cycle_chord_skeleton,
    dumps_complex,
    er_clique_complex,
    fill_candidates,
    flip_triangles,
    load_complex,
    loads_complex,
    new_complex,
    save_complex,
    three_cliques,
)
from .hodge import (
    HodgeBasis,
    HodgePropagator,
    build_propagator,
    build_propagator_opnorm,
    hodge_basis,
    laplacians,
    project,
    projector,
    spectral_norm,
    sym_operator_norm,
)
from .learn import (
    EigenDiagnostic,
    RidgeModel,
    eigen_diagnostic,
    fitted_values,
    kernel_gradient_flow,
    krr_fit,
    krr_predict,
)
from .ntk import (
    GramResult,
    KernelConfig,
    KernelState,
    KernelVariant,
    architecture_operator,
    batched_pooled_gram,
    constant_features,
    finite_width_ntk,
    gram_matrix,
    initial_covariance,
    kernel_recursion,
    ntk_pair,
    pooled_kernel,
    save_kernel_csv,
    self_kernel_recursion,
)

__all__ = [
    "__version__",
    "ActivationKind", "CovarianceView", "phi", "phi_dot",
    "BoundaryMatrices", "SimplicialComplex", "new_complex", "boundary_matrices",
    "cycle_chord_skeleton", "fill_candidates", "er_clique_complex",
    "flip_triangles", "three_cliques", "b2_on_candidates",
    "dumps_complex", "loads_complex", "save_complex", "load_complex",
    "HodgeBasis", "HodgePropagator", "build_propagator", "build_propagator_opnorm", "hodge_basis",
    "laplacians", "project", "projector", "spectral_norm", "sym_operator_norm",
    "EigenDiagnostic", "RidgeModel", "eigen_diagnostic", "fitted_values",
    "kernel_gradient_flow", "krr_fit", "krr_predict",
    "GramResult", "KernelConfig", "KernelState", "KernelVariant",
    "architecture_operator", "batched_pooled_gram", "constant_features",
    "finite_width_ntk", "gram_matrix", "initial_covariance", "kernel_recursion",
    "ntk_pair", "pooled_kernel", "save_kernel_csv", "self_kernel_recursion",
]
