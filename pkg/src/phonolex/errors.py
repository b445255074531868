"""Exception hierarchy shared by all phonolex modules."""


class PhonolexError(Exception):
    """Base class for all errors raised by this package."""


# -- lexicon store ----------------------------------------------------------

class LexiconError(PhonolexError):
    pass


class DuplicateId(LexiconError):
    def __init__(self, record_id):
        super().__init__(f"duplicate record id {record_id!r}")
        self.record_id = record_id


class MissingId(LexiconError):
    def __init__(self, detail=""):
        super().__init__(f"record block without an id marker{': ' + detail if detail else ''}")


class SeparatorInField(LexiconError):
    def __init__(self, record_id, marker, separator):
        super().__init__(
            f"record {record_id!r}, field {marker!r}: value contains the "
            f"field separator {separator!r}"
        )
        self.record_id = record_id
        self.marker = marker


class BadHeader(LexiconError):
    pass


class CorruptLine(LexiconError):
    def __init__(self, line_number, detail):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number


class SchemaError(PhonolexError):
    pass


# -- pattern language -------------------------------------------------------

class PatternError(PhonolexError):
    """Base for query-language errors; carries a source position when known.

    ``position`` is a 1-based column offset into the statement or pattern
    source; ``line`` is filled in by callers that track line numbers.
    """

    def __init__(self, message, position=None, line=None, attribute=None):
        self.position = position
        self.line = line
        self.attribute = attribute
        super().__init__(message)

    def located(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.position is not None:
            where.append(f"column {self.position}")
        prefix = f"{', '.join(where)}: " if where else ""
        return f"{prefix}{self.args[0]}"


class PatternSyntaxError(PatternError):
    pass


class UnbalancedDelimiter(PatternSyntaxError):
    pass


class DanglingQuantifier(PatternSyntaxError):
    pass


class ReservedName(PatternError):
    pass


class CycleDetected(PatternError):
    pass


class ArityMismatch(PatternError):
    pass


class EmptyProjection(PatternError):
    pass


class UnknownVariable(PatternError):
    pass


class WrongVariableKind(PatternError):
    pass


class BackrefBeforeLabel(PatternError):
    pass


class DuplicateLabel(PatternError):
    pass


class TooManyParameters(PatternError):
    pass


class MultipleFocus(PatternError):
    pass


# -- match engine -----------------------------------------------------------

class StepBudgetExceeded(PhonolexError):
    pass


class TimeLimitReached(PhonolexError):
    """Internal signal: the cooperative deadline fired mid-match."""


# -- query / render ---------------------------------------------------------

class QueryError(PhonolexError):
    pass


class UnknownAttribute(QueryError):
    def __init__(self, attribute):
        super().__init__(f"unknown attribute {attribute!r}")
        self.attribute = attribute


class NoFocus(QueryError):
    pass


class UnknownDisplayAttribute(QueryError):
    def __init__(self, attribute):
        super().__init__(f"unknown display attribute {attribute!r}")
        self.attribute = attribute


class BadQueryFile(QueryError):
    def __init__(self, line_number, detail):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number
