"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the command line
frontend reports on standard error.
"""


class KDQError(ValueError):
    code = "ERROR"


class DimensionMismatch(KDQError):
    code = "DIMENSION_MISMATCH"


class InvalidDimension(KDQError):
    code = "INVALID_DIMENSION"


class DimensionTooSmall(KDQError):
    code = "DIMENSION_TOO_SMALL"


class NotNormalized(KDQError):
    code = "NOT_NORMALIZED"


class NotHermitian(KDQError):
    code = "NOT_HERMITIAN"


class NotDensityOperator(KDQError):
    code = "NOT_DENSITY_OPERATOR"


class NotOrthonormal(KDQError):
    code = "NOT_ORTHONORMAL"


class NonFinite(KDQError):
    code = "NON_FINITE"


class NearOrthogonalOverlap(KDQError):
    code = "NEAR_ORTHOGONAL"


class BasisMismatch(KDQError):
    code = "BASIS_MISMATCH"


class InvalidKDDistribution(KDQError):
    code = "INVALID_KD"


class GridTooCoarse(KDQError):
    code = "GRID"


class PostSelectionImpossible(KDQError):
    code = "POST_SELECTION_IMPOSSIBLE"


class InsufficientSamples(KDQError):
    code = "INSUFFICIENT_SAMPLES"


class ParseError(KDQError):
    code = "PARSE"
