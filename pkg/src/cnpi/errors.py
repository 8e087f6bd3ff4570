class ParameterError(ValueError):
    """Argument outside the admissible parameter domain."""


class SolverError(RuntimeError):
    """A linear solve or time step could not be completed."""


class NotSPDError(SolverError):
    """Shifted composite operator is not provably positive definite."""
