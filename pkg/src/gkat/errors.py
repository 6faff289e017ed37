"""Exception types shared across the package."""


class ParseError(ValueError):
    """Raised on malformed expression text; carries the source position."""

    def __init__(self, message, position):
        super().__init__("%s (at position %d)" % (message, position))
        self.position = position


class CapacityError(RuntimeError):
    """Raised when an enumeration or construction exceeds its state budget."""


class NotNormalError(ValueError):
    """Raised when an operation requiring a normal automaton gets one with
    steps into dead states."""


class NotClosedError(ValueError):
    """Raised when a hypothesis is requested from an unclosed table."""


class InternalInconsistencyError(RuntimeError):
    """Raised when a learner invariant that should hold by construction is
    observed broken (deterministic tables, counterexample progress)."""
