"""Exception hierarchy shared by every module of the engine."""


class DplError(Exception):
    """Base class for all engine errors."""


class ParseError(DplError, ValueError):
    """Malformed formula or agent-file text, with a 1-based location."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownSymbol(ParseError):
    pass


class UnknownPlan(DplError, LookupError):
    pass


class UnknownAbbreviation(DplError, LookupError):
    pass


class InvalidVocabulary(DplError, ValueError):
    pass


class NotPropositional(DplError, ValueError):
    pass


class NotConjunctive(DplError, ValueError):
    pass


class NotDnf(DplError, ValueError):
    pass


class NotLiteralDisjunction(DplError, ValueError):
    pass


class DuplicatePlan(DplError, ValueError):
    pass


class InconsistentPostcondition(DplError, ValueError):
    pass


class NonConjunctivePostcondition(DplError, ValueError):
    pass


class InconsistentLiteralSet(DplError, ValueError):
    pass


class InconsistentFormula(DplError, ValueError):
    pass


class InconsistentAnnouncement(DplError, ValueError):
    """Announcing the formula would leave no epistemically possible world."""


class IncoherentProgram(DplError, ValueError):
    def __init__(self, report):
        self.report = report
        failed = ", ".join(str(c) for c in report.failed())
        super().__init__(f"agent program is not coherent (failed conditions: {failed})")


class VocabularyTooLarge(DplError, ValueError):
    pass


class VocabularyMismatch(DplError, ValueError):
    pass


class UnknownWorld(DplError, LookupError):
    pass


class WorldOutsideExtension(DplError, ValueError):
    pass


class ResultNotPreorder(DplError, AssertionError):
    """A model transformation produced a relation that is not a preorder."""


class NotRanked(DplError, ValueError):
    pass
