"""Exception hierarchy for mdselect."""


class MdSelectError(Exception):
    """Base class for all errors raised by this package."""


class EmptyVocabulary(MdSelectError, ValueError):
    pass


class UnknownClass(MdSelectError, KeyError):
    pass


class ParseError(MdSelectError, ValueError):
    """Malformed corpus input. ``locus`` names the file and, when known, the line."""

    def __init__(self, message, locus=None):
        self.locus = locus
        if locus is not None:
            message = f"{locus}: {message}"
        super().__init__(message)


class InvalidSmoothing(MdSelectError, ValueError):
    pass


class EmptySubset(MdSelectError, ValueError):
    pass


class UndefinedDivergence(MdSelectError, ValueError):
    pass


class InvalidModel(MdSelectError, ValueError):
    pass


class UnknownMethod(MdSelectError, ValueError):
    pass


class BudgetOutOfRange(MdSelectError, ValueError):
    pass


class EmptyEvaluation(MdSelectError, ValueError):
    pass


class TooFewDocuments(MdSelectError, ValueError):
    pass
