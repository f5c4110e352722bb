"""Indefinite-metric (Pontryagin / Krein) numerical linear algebra.

Computes and certifies invariant maximal non-positive subspaces of
J-dissipative matrices, implements the Mobius geometry of the operator
ball, finds common fixed points of bounded groups of fractional-linear
maps, unitarizes bounded J-unitary representations with an explicit
condition-number bound, and decomposes quasi-positive-definite functions
on finite groups.
"""

from .spaces import (
    IndefiniteSpace,
    BlockOperator,
    BallPoint,
    Subspace,
    Inertia,
    OperatorClasses,
    NotAGraphError,
    build_space,
    indefinite_product,
    j_adjoint,
    classify_operator,
    graph_of,
    graph_from_subspace,
    subspace_signature,
    invariance_residual,
    operator_norm,
)
from .ball import (
    BoundaryError,
    MapUndefinedError,
    MobiusNormBounds,
    mobius_apply,
    mobius_matrix,
    fractional_linear,
    hyperbolic_distance,
    mobius_norm,
    radius_from_norm,
)
from .mnps import (
    NotDissipativeError,
    SpectrumOnAxisError,
    MnpsReport,
    LadderReport,
    VerifyReport,
    strongify,
    spectral_split,
    mnps_strong,
    mnps,
    approximation_ladder,
    verify_mnps,
)
from .groups import (
    GroupStructureError,
    FiniteGroup,
    cyclic,
    dihedral,
    symmetric,
    quaternion,
    direct_product,
    named_group,
)
from .fixpoint import (
    DegeneratePencilError,
    GroupRep,
    FixedPointReport,
    UnitarizationReport,
    rep_validate,
    orbit_radius,
    group_average_metric,
    word_average_metric,
    common_fixed_point,
    common_fixed_point_words,
    invariant_dual_pair,
    unitarize,
    fixture_conjugated_rep,
    fixture_double_rep,
    doubled_form_matrix,
)
from .qpd import (
    GroupFunction,
    GnsResult,
    DecompositionCertificate,
    gram_matrix,
    negative_squares,
    finite_type_rank,
    gns_construct,
    decompose,
    verify_decomposition,
)

__version__ = "0.1.0"
