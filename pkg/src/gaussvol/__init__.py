"""Fisher-Rao volumes of classical, quantum, separable, and entangled
two-mode Gaussian state families.

Covariance-matrix algebra and classification live in ``states``, the metric
and its Monte Carlo oracle in ``metric``, the two regularizers in
``regularizers``, the standard-form chart and closed forms in ``twomode``,
and the seeded volume integrals and sweeps in ``integrate``.
"""

from .errors import (
    AsymmetricMatrixError,
    DomainError,
    InvalidArgumentError,
    MatrixParseError,
    NumericError,
)
from .integrate import (
    DOMAIN_ORDER,
    Box,
    IntegrationRequest,
    IntegrationResult,
    JointVolumes,
    SweepRow,
    SweepTable,
    mc_joint_volumes,
    mc_volume,
    phi_box,
    regularizer_values,
    sweep,
    upsilon_box,
)
from .metric import (
    BoundMatrix,
    MetricAtPoint,
    ParamChart,
    bound_matrix,
    det_bound_holds,
    full_chart,
    metric_closed_form,
    metric_mc_oracle,
    param_index,
    volume_element,
)
from .regularizers import RegKind, RegularizerSpec, log1p_det_pow, phi, upsilon
from .states import (
    DEFAULT_TOL,
    StateClass,
    adjugate,
    apply_congruence,
    classify,
    dim_modes,
    is_classical,
    is_quantum,
    is_separable_two_mode,
    is_symplectic,
    mode_permutation_matrix,
    partial_transpose_two_mode,
    random_symplectic,
    require_covariance,
    symplectic_eigenvalues,
    symplectic_form,
    trace_adjugate,
)
from .twomode import (
    CanonicalPoint,
    DomainBounds,
    DomainTag,
    SimonInvariants,
    canonical_chart,
    canonical_det,
    canonical_embed,
    canonical_extract,
    canonical_trace_adjugate,
    closed_form_metric,
    domain_bounds,
    domain_mask,
    in_domain,
    metric_components,
    simon_invariants,
)

__version__ = "0.1.0"

__all__ = [
    "AsymmetricMatrixError",
    "DomainError",
    "InvalidArgumentError",
    "MatrixParseError",
    "NumericError",
    "DOMAIN_ORDER",
    "Box",
    "IntegrationRequest",
    "IntegrationResult",
    "JointVolumes",
    "SweepRow",
    "SweepTable",
    "mc_joint_volumes",
    "mc_volume",
    "phi_box",
    "regularizer_values",
    "sweep",
    "upsilon_box",
    "BoundMatrix",
    "MetricAtPoint",
    "ParamChart",
    "bound_matrix",
    "det_bound_holds",
    "full_chart",
    "metric_closed_form",
    "metric_mc_oracle",
    "param_index",
    "volume_element",
    "RegKind",
    "RegularizerSpec",
    "log1p_det_pow",
    "phi",
    "upsilon",
    "DEFAULT_TOL",
    "StateClass",
    "adjugate",
    "apply_congruence",
    "classify",
    "dim_modes",
    "is_classical",
    "is_quantum",
    "is_separable_two_mode",
    "is_symplectic",
    "mode_permutation_matrix",
    "partial_transpose_two_mode",
    "random_symplectic",
    "require_covariance",
    "symplectic_eigenvalues",
    "symplectic_form",
    "trace_adjugate",
    "CanonicalPoint",
    "DomainBounds",
    "DomainTag",
    "SimonInvariants",
    "canonical_chart",
    "canonical_det",
    "canonical_embed",
    "canonical_extract",
    "canonical_trace_adjugate",
    "closed_form_metric",
    "domain_bounds",
    "domain_mask",
    "in_domain",
    "metric_components",
    "simon_invariants",
    "__version__",
]
