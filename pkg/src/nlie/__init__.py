"""Exact-arithmetic toolkit for n-ary Filippov (n-Lie) algebras.

An algebra is given by structure constants over Q: a table mapping each
ascending n-tuple of basis indices to the bracket value as a coordinate
vector.  The package validates the defining identities, computes
structural invariants, transports tables across bases, generates the
canonical low-dimensional classes, and classifies a given table back to
its canonical class with exact parameters and a checkable witness.
"""

from .algebra import (
    Algebra,
    InvariantSignature,
    JacobiReport,
    Subspace,
    ad_map,
    bracket_eval,
    center,
    check_derivation,
    check_jacobi,
    derivation_algebra,
    derived_subalgebra,
    invariant_signature,
    strip_central_summand,
    table_in_basis,
)
from .catalog import (
    ClassLabel,
    canonical,
    d7_canonical_triple,
    d7_equivalent,
    np1_labels,
    np2_labels,
    signature_table,
)
from .classify import (
    EXACT,
    FAMILY_ONLY,
    UNRESOLVED,
    Step,
    Verdict,
    classify,
    classify_np1,
    classify_np2,
)
from .errors import (
    ArityBoundViolated,
    DimensionMismatch,
    InvalidAlgebra,
    InvalidParameter,
    NlieError,
    ParseError,
    SchemaError,
    SingularMatrix,
    UnsupportedArity,
)
from .exactlin import Matrix
from .io import parse_algebra, parse_matrix, serialize_algebra, serialize_matrix
from .transform import (
    change_basis_matrix,
    change_basis_multilinear,
    random_basis_change,
    structure_matrix,
    verify_isomorphism,
)

__all__ = [
    "Algebra",
    "ArityBoundViolated",
    "ClassLabel",
    "DimensionMismatch",
    "EXACT",
    "FAMILY_ONLY",
    "InvalidAlgebra",
    "InvalidParameter",
    "InvariantSignature",
    "JacobiReport",
    "Matrix",
    "NlieError",
    "ParseError",
    "SchemaError",
    "SingularMatrix",
    "Step",
    "Subspace",
    "UNRESOLVED",
    "UnsupportedArity",
    "Verdict",
    "ad_map",
    "bracket_eval",
    "canonical",
    "center",
    "change_basis_matrix",
    "change_basis_multilinear",
    "check_derivation",
    "check_jacobi",
    "classify",
    "classify_np1",
    "classify_np2",
    "d7_canonical_triple",
    "d7_equivalent",
    "derivation_algebra",
    "derived_subalgebra",
    "invariant_signature",
    "np1_labels",
    "np2_labels",
    "parse_algebra",
    "parse_matrix",
    "random_basis_change",
    "serialize_algebra",
    "serialize_matrix",
    "signature_table",
    "strip_central_summand",
    "structure_matrix",
    "table_in_basis",
    "verify_isomorphism",
]
