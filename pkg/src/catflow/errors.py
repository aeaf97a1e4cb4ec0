"""Exception hierarchy shared by every catflow module."""


class CatflowError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class SchemaError(CatflowError):
    """Unknown object/morphism/attribute, or a domain/codomain/type mismatch."""


class InvalidInstanceError(CatflowError):
    """An instance failed validation where a valid one was required."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class HomomorphismError(CatflowError):
    pass


class TypingError(HomomorphismError):
    """No typing exists, or automatic typing was ambiguous."""

    def __init__(self, message, count=0):
        super().__init__(message)
        self.count = count


class AttributeConflictError(CatflowError):
    """Two parts identified by a colimit/limit carry different non-name attributes."""


class FormulaError(CatflowError):
    pass


class SimulationError(CatflowError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ModelFormatError(Exception):
    """Malformed model file (CLI exit code 2)."""
