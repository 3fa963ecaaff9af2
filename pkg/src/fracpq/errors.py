"""Exception types shared across the package.

Every error raised by the library derives from FracpqError so callers can
catch numerical and validation failures in one place. The CLI maps
ConfigError to exit code 2 and everything else to exit code 3.
"""

from __future__ import annotations


class FracpqError(Exception):
    """Base class for all package errors."""


class EmptyDomain(FracpqError):
    """Shape contains no interior node at the requested resolution."""


class BadMaskFile(FracpqError):
    """Mask file is malformed (header, dimensions, or characters)."""


class CenterTooShallow(FracpqError):
    """Cone center's distance to the boundary is below R - h."""


class CollarTooThin(FracpqError):
    """collar_width * h < truncation radius T of the kernel."""


class DomainMismatch(FracpqError):
    """Two grid functions from different domains were combined."""


class NotInterior(FracpqError):
    """A pointwise operation was requested at a non-interior node."""


class Overflow(FracpqError):
    """A log-space component left the representable double range."""


class ZeroFunction(FracpqError):
    """Operation undefined at u identically zero."""


class NotProjectable(FracpqError):
    """Nehari projection precondition [u]_a^p < mu*||u||^p fails."""


class WrongCase(FracpqError):
    """Operation requires the other (H1a/H1b) case tag."""


class MuBelowThreshold(FracpqError):
    """mu fails the necessary lower bound against the lambda estimate."""


class NoConvergence(FracpqError):
    """Iteration cap reached before the gradient tolerance."""


class QEqualsOne(FracpqError):
    """Limit formulas divide by Q - 1."""


class LambdaTooSmall(FracpqError):
    """Lambda * R^alpha <= 1 for the computed inradius."""


class DegenerateInput(FracpqError):
    """Viscosity residual requested for u <= 0 everywhere."""


class ConfigError(FracpqError):
    """Invalid or unknown configuration content."""
