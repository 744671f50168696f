from __future__ import annotations


class EnsembleError(Exception):
    """Base class for every error raised by the package."""

    exit_code: int = 3


class DomainError(EnsembleError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""

    exit_code = 2


class PoleError(DomainError):
    """Evaluation at a pole of a special function."""


class SingularPointError(DomainError):
    """A density is evaluated exactly at a point where it diverges."""


class NumericalOverflowError(EnsembleError, ArithmeticError):
    """The result would not be representable as a finite double."""


class QuadratureError(EnsembleError):
    """Adaptive quadrature failed to converge or met a non-finite integrand."""


class EnvelopeViolationError(EnsembleError):
    """A rejection envelope does not dominate its target density."""


class StarvationError(EnsembleError):
    """A rejection sampler accepts too rarely to be useful."""


class SingularConditionalError(EnsembleError):
    """A conditional density cannot be normalised at the conditioning point."""


class FitError(EnsembleError):
    """A least-squares fit did not converge."""


class ValidationFailure(EnsembleError):
    """One or more invariant checks failed."""

    exit_code = 4

    def __init__(self, failures: list[str]) -> None:
        self.failures = list(failures)
        super().__init__("validation failed: " + ", ".join(self.failures))
