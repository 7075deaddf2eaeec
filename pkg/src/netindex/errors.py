"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each failure family derives from one
of a handful of bases.
"""

from __future__ import annotations

from typing import Any


class NetIndexError(Exception):
    """Base class for all errors raised by the package."""


class UsageError(NetIndexError, ValueError):
    """Bad arguments or malformed input files."""


# --- fields and matrices -------------------------------------------------


class FieldError(UsageError):
    pass


class NonPrimeCharacteristic(FieldError):
    pass


class ReduciblePolynomial(FieldError):
    pass


class OrderCapExceeded(FieldError):
    pass


class MatrixError(UsageError):
    pass


class FieldMismatch(MatrixError):
    pass


class DimensionMismatch(MatrixError):
    pass


class NotSquare(MatrixError):
    pass


class RaggedBlocks(MatrixError):
    pass


# --- validation failures -------------------------------------------------


class ValidationError(NetIndexError):
    """An instance or code fails a structural or semantic check."""


class NetworkError(ValidationError):
    pass


class CyclicGraph(NetworkError):
    pass


class DemandNotOnto(NetworkError):
    pass


class DemandOnNonOutputEdge(NetworkError):
    pass


class MissingDemand(NetworkError):
    pass


class InputCountMismatch(NetworkError):
    pass


class BadIndexing(NetworkError):
    pass


class DuplicateMessageSource(NetworkError):
    pass


class InputOutputOverlap(NetworkError):
    pass


class UnknownVertex(NetworkError):
    pass


class CodeError(ValidationError):
    pass


class ShapeMismatch(CodeError):
    pass


class TableTooLarge(CodeError):
    pass


class ConditionViolation(CodeError):
    """A network code breaks N1, N2 or N3 on a specific edge.

    ``witness`` is a counterexample input for table codes, or a short
    description of the unsolvable linear system for linear codes.
    """

    condition = "N?"

    def __init__(self, edge: int, witness: Any = None, detail: str = "") -> None:
        self.edge = edge
        self.witness = witness
        msg = f"{self.condition} violated on edge {edge}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class N1Violation(ConditionViolation):
    condition = "N1"


class N2Violation(ConditionViolation):
    condition = "N2"


class N3Violation(ConditionViolation):
    condition = "N3"


class IndexModelError(ValidationError):
    pass


class WantsInHas(IndexModelError):
    pass


class UnknownMessageId(IndexModelError):
    pass


class Undecodable(IndexModelError):
    def __init__(self, client: int, witness: Any = None, detail: str = "") -> None:
        self.client = client
        self.witness = witness
        msg = f"client {client} cannot decode its demand"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class InvalidCode(IndexModelError):
    pass


class InstanceTooLarge(IndexModelError):
    pass


class ReductionError(ValidationError):
    pass


class InvalidNetworkCode(ReductionError):
    pass


class SingularM(ReductionError):
    pass


class StructureViolation(ReductionError):
    pass


class N3Failure(ReductionError):
    pass


# --- searches ------------------------------------------------------------


class SearchError(NetIndexError):
    pass


class BudgetExhausted(SearchError):
    pass


class NoCodeUpToMax(SearchError):
    pass


class RetryLimit(SearchError):
    pass


# --- packaged data -------------------------------------------------------


class UnknownInstance(UsageError):
    pass


class MissingSubnetworkFile(NetIndexError):
    pass
