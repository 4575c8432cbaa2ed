"""Exception types raised across the package."""

from __future__ import annotations


class GkpGateError(Exception):
    """Base class for all package errors."""


class DomainError(GkpGateError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(GkpGateError):
    """A configured size budget (lattice window, grid points) was exceeded."""


class AccuracyError(GkpGateError):
    """A numerical routine failed to reach the requested tolerance.

    The best available estimate and its error bound are attached so callers
    can still report them.
    """

    def __init__(self, message: str, estimate=None, error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class StructuralError(GkpGateError):
    """A circuit graph violates a structural rule."""
