"""Exception types shared across the package."""


class StatesumError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(StatesumError):
    """The ontology schema file is malformed or violates an invariant."""


class StateValidationError(StatesumError):
    """A dialogue state failed validation against the ontology."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GenerationError(StatesumError):
    """The random state generator could not produce a value."""


class CorpusError(StatesumError):
    """A corpus archive or prediction file could not be read."""


class ProtocolError(StatesumError):
    """A few-shot sampling request violates the experimental protocol."""


class EvaluationError(StatesumError):
    """Predictions could not be joined to corpus turns."""
