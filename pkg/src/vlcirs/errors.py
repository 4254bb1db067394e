"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A scenario or configuration violates one of its invariants."""


class GeometryError(ValueError):
    """A geometric construction has no valid result."""


class DegenerateGeometryError(GeometryError):
    """Zero-length vector, antiparallel rays or an out-of-domain normal."""
