"""Exception hierarchy.

``SpecGeoError`` covers invalid inputs; ``InternalCheckError`` and its
subclasses signal that two independent computational routes disagreed, which
is an implementation bug rather than bad data (the CLI maps them to exit 3).
"""


class SpecGeoError(Exception):
    pass


class PolySyntaxError(SpecGeoError, SyntaxError):
    pass


class InhomogeneousError(SpecGeoError, ValueError):
    pass


class DegreeZeroError(SpecGeoError, ValueError):
    pass


class DimensionMismatch(SpecGeoError, ValueError):
    pass


class ZeroLevelError(SpecGeoError, ValueError):
    pass


class NonpositiveLevelError(SpecGeoError, ValueError):
    pass


class NullBasePointError(SpecGeoError, ValueError):
    pass


class ConeExitError(SpecGeoError, ValueError):
    pass


class PoleError(SpecGeoError, ZeroDivisionError):
    pass


class ImproperConeError(SpecGeoError, ValueError):
    pass


class DomainError(SpecGeoError, ValueError):
    pass


class NotIsometricError(SpecGeoError, ValueError):
    pass


class DegenerateMetricError(SpecGeoError, ValueError):
    pass


class PreconditionError(SpecGeoError, ValueError):
    pass


class UnimplementedEntry(SpecGeoError, NotImplementedError):
    pass


class NotSpecialWarning(UserWarning):
    pass


class InternalCheckError(Exception):
    pass


class RouteMismatchError(InternalCheckError):
    pass
