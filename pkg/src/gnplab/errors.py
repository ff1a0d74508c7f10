"""Exception types shared across the package."""


class GnpLabError(Exception):
    """Base class for all package-specific errors."""


class SampleMismatch(GnpLabError):
    """Profile and core carry different sample counts."""


class NonSimpleBoundary(GnpLabError):
    """The induced outer boundary polyline self-intersects."""


class DegenerateProfile(GnpLabError):
    """Thickness profile is negative somewhere, or zero everywhere."""


class EmptySetError(GnpLabError):
    """An operation received an empty point set or an empty region."""


class GridMismatch(GnpLabError):
    """Two discrete fields or masks do not share a grid."""


class SingularSystem(GnpLabError):
    """The assembled linear system has no interior unknowns or failed to factor."""


class NonConvergence(GnpLabError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class LevelOutOfRange(GnpLabError):
    """Requested level is negative, above the field maximum, or inside the
    guard band around the maximum."""


class DegenerateSlice(GnpLabError):
    """Extracted level set covers fewer than four grid cells."""


class RayMisses(GnpLabError):
    """A normal ray carries no point above the requested level."""


class VanishingGradient(GnpLabError):
    """Gradient magnitude below the configured floor where a value is required."""


class EmptyShell(GnpLabError):
    """Symmetrization of a shell with nonpositive area was requested."""


class InclusionViolated(GnpLabError):
    """A comparison run received domains that are not nested."""


class ConfigError(GnpLabError):
    """Malformed domain spec or command configuration."""
