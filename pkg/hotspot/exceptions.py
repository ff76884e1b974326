"""
Exception hierarchy for the hotspot package.
"""

from typing import List, Optional


class HotspotError(Exception):
    """Base class for every error raised by hotspot."""


class DomainError(HotspotError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedError(HotspotError):
    """The operation does not handle this domain, norm or pair kind."""


class SolverError(HotspotError):
    """
    A numerical solver failed to converge.

    Attributes:
        residual (float or None): Last residual or change measured
        iterations (int or None): Iterations performed before giving up
    """

    def __init__(self, message: str, residual: Optional[float] = None, iterations: Optional[int] = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ConsistencyError(HotspotError):
    """Two independent evaluations of the same quantity disagree."""


class InapplicableError(HotspotError):
    """A bound's hypotheses do not hold for the given inputs."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ConfigError(HotspotError, ValueError):
    """Invalid experiment configuration or environment setting."""

    def __init__(self, message: str, paths: Optional[List[str]] = None):
        super().__init__(message)
        self.paths = paths or []
