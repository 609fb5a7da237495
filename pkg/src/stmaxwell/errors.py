"""Exceptions shared across modules."""


class MemoryCapError(MemoryError):
    """A dense object would exceed the configured memory cap."""


class SolverError(RuntimeError):
    """A linear solve failed or missed its residual target."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
