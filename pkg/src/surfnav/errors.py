"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes, so keep the split between input
problems (bad files, bad specs) and pipeline problems (snap failures,
unreachable states) intact.
"""

from __future__ import annotations

__all__ = [
    "SurfnavError",
    "EmptyInputError",
    "InvalidPointError",
    "GridFormatError",
    "SurfaceFormatError",
    "NoCandidatesError",
    "SeedSnapError",
    "InvalidSeedError",
    "OffSurfaceError",
    "NoPathError",
    "SceneSpecError",
    "QuerySamplingError",
]


class SurfnavError(Exception):
    """Base class for all package errors."""


class EmptyInputError(SurfnavError):
    """An input collection (point cloud, candidate set) was empty."""


class InvalidPointError(SurfnavError):
    """A coordinate was non-finite or malformed."""


class GridFormatError(SurfnavError):
    """A grid file failed structural validation.

    ``offset`` is the byte offset of the first offending field.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SurfaceFormatError(SurfnavError):
    """A surface file failed structural validation."""


class NoCandidatesError(SurfnavError):
    """No standing voxel survived the geometric filters."""


class SeedSnapError(SurfnavError):
    """The nearest candidate was farther than the allowed snap radius.

    ``distance`` is the world distance to that nearest candidate.
    """

    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance


class InvalidSeedError(SurfnavError):
    """A seed voxel is not a member of the candidate set."""


class OffSurfaceError(SurfnavError):
    """A query endpoint is not a state of the surface."""


class NoPathError(SurfnavError):
    """No path connects the endpoints (only possible across components)."""


class SceneSpecError(SurfnavError):
    """A scene spec is malformed: unknown preset, out-of-bounds primitive."""


class QuerySamplingError(SurfnavError):
    """The requested query mix cannot be drawn from this surface."""
