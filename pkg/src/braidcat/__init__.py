"""braidcat: finite quantum groups, unitary R-matrices, and braided tensor
products of finite-dimensional operator algebras, verified numerically.

The package realizes, at desk scale, the correspondence between monoidal
structures on the category of algebras with a quantum-group action and
unitary R-matrices: it constructs the braided product X [x] Y from an
R-matrix, induces the product action, and checks every defining identity
(crossed-product spans, the braiding exchange relation, coherence,
invariant commutation, intersection triviality, uniqueness witnesses, and
R-matrix extraction) against pinned tolerances.
"""

from .linalg import (
    LegSpace,
    LinearMap,
    OperatorSubspace,
    dagger,
    embed_legs,
    kron,
    solve_linear_map,
    span_close,
    subspace_equal,
    subspace_intersect,
    tensor_subspace,
)
from .fqg import (
    AbelianStructure,
    BUILTIN_GROUPS,
    FiniteQuantumGroup,
    GroupError,
    GroupTable,
    InvariantViolation,
    build_function_algebra,
    builtin_group,
    check_bicharacter,
    group_from_spec,
    heisenberg_check,
    opposite_group,
)
from .rmatrix import (
    DeltaR,
    DeltaRSolveError,
    RMatrix,
    check_rmatrix,
    enumerate_bicharacter_rmatrices,
    opposite_rmatrix,
    rmatrix_from_exponents,
    rmatrix_from_spec,
    solve_delta_r,
)
from .gcalg import (
    GAlgebra,
    GMorphism,
    OperatorAlgebra,
    builtin_object,
    clifford1_graded,
    delta_action,
    diagonal_algebra,
    full_matrix_algebra,
    galgebra_from_spec,
    invariant_subspace,
    scalar_coefficient_check,
    tensor_pair,
    tensor_with_A,
    trivial_action,
)
from .braided import (
    BraidedAlgebra,
    BraidedConstructionError,
    BraidedCore,
    braided_morphism,
    build_braided,
    build_core,
    check_property3,
    coherence_suite,
    flip_iso,
)
from .theorems import (
    ExtractionResult,
    UniquenessWitness,
    extract_rmatrix,
    intersection_triviality_test,
    invariant_commutation_test,
    left_action_suite,
    property3_equivalence_test,
    uniqueness_test,
)
from .report import CheckRecord, all_passed, make_report

__version__ = "0.1.0"
