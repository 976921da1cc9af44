"""Exception hierarchy shared by every igeom package."""

from __future__ import annotations


class IGeomError(Exception):
    """Base class for all lab errors."""


class ParameterDomainError(IGeomError, ValueError):
    """A numeric parameter lies outside the domain the operation supports."""


class OrderingError(IGeomError, ValueError):
    """Values that must be ordered (angles, force points, times) are not."""


class DomainError(IGeomError, ValueError):
    """A planar point lies outside the discretized domain."""


class DegenerateStartError(IGeomError, ValueError):
    """A flow line was started on the boundary without an inward heading."""


class OutOfScopeError(IGeomError, ValueError):
    """The request is valid mathematics but outside what the lab simulates."""


class ConfigValidationError(IGeomError, ValueError):
    """An experiment document failed validation at ``field_path``."""

    def __init__(self, field_path: str, message: str) -> None:
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path
        self.message = message
