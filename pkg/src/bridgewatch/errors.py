"""Exception hierarchy shared by all bridgewatch modules."""
from __future__ import annotations


class BridgewatchError(Exception):
    """Base class for every error raised by this package."""


# -- parsing / ingest ---------------------------------------------------------

class ParseError(BridgewatchError):
    """Base for per-line and per-document input errors."""


class MalformedLine(ParseError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class MissingField(ParseError):
    def __init__(self, field: str, line_no: int | None = None):
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}missing required field '{field}'")
        self.field = field
        self.line_no = line_no


class OutOfRangeValue(ParseError):
    def __init__(self, reason: str, line_no: int | None = None):
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{reason}")
        self.reason = reason
        self.line_no = line_no


class SchemaError(ParseError):
    """Schema violation in a single-document JSON file, with a field path."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class MissingFile(BridgewatchError):
    def __init__(self, name: str):
        super().__init__(f"missing required file '{name}'")
        self.name = name


class InvalidSession(BridgewatchError):
    """Raised by strict loading when validation reports violations."""

    def __init__(self, violations):
        lines = "; ".join(str(v) for v in violations[:5])
        more = "" if len(violations) <= 5 else f" (+{len(violations) - 5} more)"
        super().__init__(f"session failed validation: {lines}{more}")
        self.violations = list(violations)


# -- attention ----------------------------------------------------------------

class InsufficientPupilData(BridgewatchError):
    pass


class DegenerateCalibration(BridgewatchError):
    pass


class WindowTooSmall(BridgewatchError):
    pass


class InvalidWeights(BridgewatchError):
    pass


class EventOutsideSession(BridgewatchError):
    pass


# -- comms --------------------------------------------------------------------

class ChecklistEventMismatch(BridgewatchError):
    pass


class EmptyReference(BridgewatchError):
    pass


# -- adapters (detector / judge / stress backends) ----------------------------

class AdapterError(BridgewatchError):
    pass


class AdapterUnavailable(AdapterError):
    pass


class AdapterTimeout(AdapterError):
    pass


class MalformedAdapterResponse(AdapterError):
    pass


class OutOfRangeScore(AdapterError):
    pass


# -- stress -------------------------------------------------------------------

class ClipTooShort(BridgewatchError):
    pass


class MissingBaseline(BridgewatchError):
    pass


# -- simulate -----------------------------------------------------------------

class InvalidScenario(BridgewatchError):
    pass


class SchemaMismatch(BridgewatchError):
    pass


# -- report / rendering -------------------------------------------------------

class UnknownSection(BridgewatchError):
    pass


class UnknownChart(BridgewatchError):
    pass


class CatalogMismatch(BridgewatchError):
    pass
