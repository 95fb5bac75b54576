from typing import Any, Dict, Optional


EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_PROPERTY_VIOLATED = 2
EXIT_BUDGET_EXCEEDED = 3


class QMatroidError(Exception):
    """Base error. `detail` has the same shape everywhere: code / message / name."""

    code = "QMATROID_ERROR"
    exit_code = EXIT_INPUT_ERROR

    def __init__(self, message: str, name: Optional[str] = None, **extra: Any):
        super().__init__(message)
        self.message = message
        self.name = name or type(self).__name__
        self.extra = extra

    @property
    def detail(self) -> Dict[str, Any]:
        detail = {"code": self.code, "message": self.message, "name": self.name}
        detail.update(self.extra)
        return detail


# field
class NotPrime(QMatroidError):
    code = "NOT_PRIME"


class Reducible(QMatroidError):
    code = "REDUCIBLE_MODULUS"


class NoDefaultModulus(QMatroidError):
    code = "NO_DEFAULT_MODULUS"


class FieldElementError(QMatroidError):
    code = "BAD_FIELD_ELEMENT"


class DivisionByZero(QMatroidError):
    code = "DIVISION_BY_ZERO"


# subspace
class DimensionMismatch(QMatroidError):
    code = "DIMENSION_MISMATCH"


class ZeroSpace(QMatroidError):
    code = "ZERO_SPACE"


# qmatroid
class RankDeficientG(QMatroidError):
    code = "RANK_DEFICIENT_G"


class FieldMismatch(QMatroidError):
    code = "FIELD_MISMATCH"


class KOutOfRange(QMatroidError):
    code = "K_OUT_OF_RANGE"


class EmptyFamily(QMatroidError):
    code = "EMPTY_FAMILY"


class InconsistentFamily(QMatroidError):
    code = "INCONSISTENT_FAMILY"


class NotASpread(QMatroidError):
    code = "NOT_A_SPREAD"


class WrongDimension(QMatroidError):
    code = "WRONG_DIMENSION"


class NotASubspace(QMatroidError):
    code = "NOT_A_SUBSPACE"


class SingularAlpha(QMatroidError):
    code = "SINGULAR_ALPHA"


# zflats
class NotComputedFromOracle(QMatroidError):
    code = "NOT_COMPUTED_FROM_ORACLE"


class NotAMember(QMatroidError):
    code = "NOT_A_MEMBER"


# dsum / decompose
class GroundMismatch(QMatroidError):
    code = "GROUND_MISMATCH"


class ZeroGround(QMatroidError):
    code = "ZERO_GROUND"


class NotASpreadSet(QMatroidError):
    code = "NOT_A_SPREAD_SET"


# spec files, cli
class SpecError(QMatroidError):
    code = "INVALID_SPEC"


class WorkerPoolError(QMatroidError):
    code = "WORKER_POOL_FAILED"


class BudgetExceeded(QMatroidError):
    code = "BUDGET_EXCEEDED"
    exit_code = EXIT_BUDGET_EXCEEDED

    def __init__(self, message: str, progress: int = 0, **extra: Any):
        super().__init__(message, progress=progress, **extra)
        self.progress = progress
