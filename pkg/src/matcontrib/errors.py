"""Exception hierarchy shared across the framework.

Every error carries a stable ``code`` (its class name) and, where it
originates from a text file, a 1-based ``line`` number. The REST layer maps
these onto its JSON error envelope.
"""

from __future__ import annotations


class ContribError(Exception):
    """Base class for all framework errors."""

    def __init__(self, message: str, *, line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(message if line is None else f"{message} at line {line}")

    @property
    def code(self) -> str:
        return type(self).__name__


# -- MPFile grammar ----------------------------------------------------------

class ParseError(ContribError):
    """A line of MPFile text violates the grammar."""


class DepthJump(ParseError):
    pass


class DuplicateSibling(ParseError):
    pass


class RaggedTable(ParseError):
    pass


class EmptySectionName(ParseError):
    pass


class MixedContent(ParseError):
    pass


class OrphanContent(ParseError):
    pass


class DuplicateKey(ParseError):
    pass


class InvariantViolation(ContribError):
    """A document handed to the serializer violates a structural invariant."""


class NotFound(ContribError):
    pass


# -- Material identifiers ----------------------------------------------------

class IdentifierError(ContribError):
    pass


class UnknownElement(IdentifierError):
    pass


class MalformedIdentifier(IdentifierError):
    pass


class MixedWildcard(IdentifierError):
    pass


# -- Contribution pipeline ---------------------------------------------------

class PipelineError(ContribError):
    pass


class EmptyDocument(PipelineError):
    pass


class GeneralOnly(PipelineError):
    pass


class EmptyTable(PipelineError):
    pass


class DuplicateColumn(PipelineError):
    pass


class DuplicateTableName(PipelineError):
    pass


class OversizeContribution(PipelineError):
    pass


class IdExhaustion(PipelineError):
    pass


# -- Plot generation ---------------------------------------------------------

class PlotError(ContribError):
    pass


class UnknownTable(PlotError):
    pass


class UnknownColumn(PlotError):
    pass


class UnknownKind(PlotError):
    pass


class MalformedPlotSection(PlotError):
    pass


class NonNumericSeries(PlotError):
    pass


class KeyMismatch(ContribError):
    pass


# -- References --------------------------------------------------------------

class RefsError(ContribError):
    pass


class UnknownReferenceKind(RefsError):
    pass


class MalformedUrl(RefsError):
    pass


class MalformedDoi(RefsError):
    pass


# -- Store -------------------------------------------------------------------

class StoreError(ContribError):
    pass


class Corrupt(StoreError):
    pass
