"""Traversable-surface extraction.

Standing candidates are free voxels with an in-bounds occupied voxel
directly below and a fully free clearance column above. The collision
filter removes candidates whose body volume (a lateral disk over the
clearance column, support plane excluded) touches any raw-occupied voxel.
The surface is the set of candidates reachable from a seed through
cardinal column moves whose height change stays within the step bound:
|dx| + |dy| = 1 and |dz| <= step_voxels.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    InvalidSeedError,
    NoCandidatesError,
    SeedSnapError,
    SurfaceFormatError,
)
from .grid import OccupancyGrid, ceil_voxels, floor_voxels

__all__ = [
    "CandidateSet",
    "DerivedVoxelParams",
    "ExtractionParams",
    "ExtractionTimings",
    "ReductionStats",
    "Surface",
    "candidate_set",
    "collision_filter",
    "extract_pipeline",
    "extract_surface",
    "levels_at",
    "load_surface",
    "reduction_stats",
    "save_surface",
    "select_seed",
    "step_offsets",
]


@dataclass(frozen=True)
class ExtractionParams:
    """Physical extraction thresholds, in meters.

    step_height: tallest rise/drop traversable between adjacent columns.
    clearance_height: free column required above a standing voxel.
    inflation_radius: lateral collision radius of the robot body.
    """

    step_height: float = 0.3
    clearance_height: float = 1.6
    inflation_radius: float = 0.3

    def __post_init__(self):
        for name in ("step_height", "inflation_radius"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if not (math.isfinite(self.clearance_height) and self.clearance_height > 0):
            raise ValueError(
                f"clearance_height must be finite and > 0, got {self.clearance_height}"
            )


@dataclass(frozen=True)
class DerivedVoxelParams:
    """Extraction thresholds converted to voxel units at one resolution.

    step_voxels = floor(step_height / r); clearance_voxels =
    ceil(clearance_height / r); inflation_voxels = ceil(inflation_radius / r).
    """

    step_voxels: int
    clearance_voxels: int
    inflation_voxels: int
    resolution: float

    def __post_init__(self):
        if not (math.isfinite(self.resolution) and self.resolution > 0):
            raise ValueError(f"resolution must be finite and > 0, got {self.resolution}")
        if self.step_voxels < 0:
            raise ValueError(f"step_voxels must be >= 0, got {self.step_voxels}")
        if self.clearance_voxels < 1:
            raise ValueError(f"clearance_voxels must be >= 1, got {self.clearance_voxels}")
        if self.inflation_voxels < 0:
            raise ValueError(f"inflation_voxels must be >= 0, got {self.inflation_voxels}")
        if self.step_voxels >= self.clearance_voxels:
            # A step taller than the robot's clearance column is not a step.
            raise ValueError(
                f"step_voxels ({self.step_voxels}) must be smaller than "
                f"clearance_voxels ({self.clearance_voxels})"
            )

    @classmethod
    def from_params(cls, params: ExtractionParams, resolution: float) -> "DerivedVoxelParams":
        if not (math.isfinite(resolution) and resolution > 0):
            raise ValueError(f"resolution must be finite and > 0, got {resolution}")
        return cls(
            step_voxels=floor_voxels(params.step_height / resolution),
            clearance_voxels=ceil_voxels(params.clearance_height / resolution),
            inflation_voxels=ceil_voxels(params.inflation_radius / resolution),
            resolution=resolution,
        )


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Standing candidates as a boolean mask aligned with the source grid."""

    mask: np.ndarray
    grid: OccupancyGrid
    params: DerivedVoxelParams

    def __post_init__(self):
        mask = np.asarray(self.mask)
        if mask.shape != self.grid.dims:
            raise ValueError(
                f"mask shape {mask.shape} does not match grid dims {self.grid.dims}"
            )
        mask = np.ascontiguousarray(mask.astype(bool))
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, voxel) -> bool:
        x, y, z = voxel
        if not self.grid.in_bounds(x, y, z):
            return False
        return bool(self.mask[x, y, z])

    def triples(self) -> list[tuple[int, int, int]]:
        """Candidate voxels as tuples, lexicographic order."""
        return [tuple(v) for v in np.argwhere(self.mask).tolist()]


def candidate_set(grid: OccupancyGrid, params: DerivedVoxelParams) -> CandidateSet:
    """Free voxels with in-bounds support below and a free clearance column.

    Support must come from a real occupied voxel: the out-of-bounds-reads-
    occupied convention does not manufacture a floor below the grid.
    Clearance treats out-of-bounds as occupied, so voxels within
    clearance_voxels of the grid top are excluded.
    """
    occ = grid.occupancy
    nx, ny, nz = occ.shape
    kc = params.clearance_voxels
    mask = np.zeros(occ.shape, dtype=bool)
    zmax = nz - 1 - kc  # last z whose clearance column is fully in bounds
    if zmax >= 1:
        cum = np.cumsum(occ, axis=2, dtype=np.int32)
        # occupied count in the column (z, z + kc] for z in [1, zmax]
        blocked = cum[:, :, 1 + kc : zmax + 1 + kc] - cum[:, :, 1 : zmax + 1]
        mask[:, :, 1 : zmax + 1] = (
            ~occ[:, :, 1 : zmax + 1] & occ[:, :, 0:zmax] & (blocked == 0)
        )
    return CandidateSet(mask, grid, params)


def collision_filter(candidates: CandidateSet) -> CandidateSet:
    """Drop candidates whose body volume intersects a raw-occupied voxel.

    The body volume of candidate (x, y, z) is every voxel (x', y', z') with
    XY Euclidean distance <= inflation_voxels, (x', y') != (x, y), and
    z' in [z+1, z+clearance_voxels]. The candidate's own column is already
    covered by the clearance test; the support plane never collides.
    Columns outside the grid read as occupied.
    """
    params = candidates.params
    rad = params.inflation_voxels
    if rad == 0:
        return candidates
    occ = candidates.grid.occupancy
    nx, ny, nz = occ.shape
    kc = params.clearance_voxels

    xs, ys, zs = np.nonzero(candidates.mask)
    if xs.size == 0:
        return candidates
    cum = np.cumsum(occ, axis=2, dtype=np.int32)
    keep = np.ones(xs.size, dtype=bool)
    for dx in range(-rad, rad + 1):
        for dy in range(-rad, rad + 1):
            if dx == 0 and dy == 0:
                continue
            if dx * dx + dy * dy > rad * rad:
                continue
            cx = xs + dx
            cy = ys + dy
            inb = (cx >= 0) & (cx < nx) & (cy >= 0) & (cy < ny)
            hit = ~inb  # out-of-bounds columns are occupied
            sel = np.nonzero(inb)[0]
            if sel.size:
                # candidates always satisfy z + kc <= nz - 1
                span = cum[cx[sel], cy[sel], zs[sel] + kc] - cum[cx[sel], cy[sel], zs[sel]]
                hit[sel] = span > 0
            keep &= ~hit
    mask = np.zeros_like(candidates.mask)
    mask[xs[keep], ys[keep], zs[keep]] = True
    return CandidateSet(mask, candidates.grid, params)


def select_seed(pose, candidates: CandidateSet, max_snap: float) -> tuple[int, int, int]:
    """Candidate whose world center is nearest the pose.

    Exact distance ties resolve to the lexicographically smallest voxel.
    Raises if the candidate set is empty or the nearest candidate is
    farther than ``max_snap`` meters.
    """
    pose = np.asarray(pose, dtype=np.float64)
    if pose.shape != (3,) or not np.all(np.isfinite(pose)):
        raise ValueError(f"pose must be 3 finite coordinates, got {pose!r}")
    coords = np.argwhere(candidates.mask)  # lexicographic (x, y, z)
    if coords.shape[0] == 0:
        raise NoCandidatesError("no candidates: every voxel failed the geometric filters")
    grid = candidates.grid
    centers = grid.origin + (coords + 0.5) * grid.resolution
    d2 = ((centers - pose) ** 2).sum(axis=1)
    best = int(np.argmin(d2))  # first minimum = lexicographic tie-break
    dist = math.sqrt(float(d2[best]))
    if dist > max_snap:
        raise SeedSnapError(
            f"seed snap failed: nearest candidate is {dist:.3f} m from pose, "
            f"max_snap is {max_snap} m",
            distance=dist,
        )
    x, y, z = coords[best]
    return (int(x), int(y), int(z))


def step_offsets(step_voxels: int) -> np.ndarray:
    """Neighbor offsets in deterministic expansion order.

    Directions +x, -x, +y, -y; within each direction dz scans
    0, +1, -1, ..., +k, -k so flat motion is discovered before climbs.
    """
    dz_order = [0]
    for d in range(1, step_voxels + 1):
        dz_order.extend((d, -d))
    out = []
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        for dz in dz_order:
            out.append((dx, dy, dz))
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Surface:
    """Seed-reachable standing voxels with stable ordinals.

    ``states[i]`` is the i-th voxel in BFS discovery order; ``state_index``
    inverts it; ``levels`` maps each column (x, y) to its sorted standing
    heights (multi-story columns have several).
    """

    states: np.ndarray
    seed: tuple[int, int, int]
    dims: tuple[int, int, int]
    resolution: float
    origin: np.ndarray
    params: DerivedVoxelParams
    state_index: dict = field(repr=False)
    levels: dict = field(repr=False)
    bfs_seconds: float = 0.0
    extraction: ExtractionParams | None = None

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    def __contains__(self, state) -> bool:
        return tuple(state) in self.state_index

    def ordinal(self, state) -> int:
        return self.state_index[tuple(state)]

    def state_centers(self) -> np.ndarray:
        """World centers of all states, ordinal order, (N, 3)."""
        return self.origin + (self.states + 0.5) * self.resolution

    def z_span(self) -> int:
        """Height difference in voxels between lowest and highest state."""
        if self.size == 0:
            return 0
        zs = self.states[:, 2]
        return int(zs.max() - zs.min())


def _flat_index(coords: np.ndarray, ny: int, nz: int) -> np.ndarray:
    return (coords[:, 0] * ny + coords[:, 1]) * nz + coords[:, 2]


def _levels_from_states(states: np.ndarray) -> dict:
    """Group states by column: (x, y) -> sorted array of z."""
    levels: dict[tuple[int, int], np.ndarray] = {}
    if states.shape[0] == 0:
        return levels
    order = np.lexsort((states[:, 2], states[:, 1], states[:, 0]))
    srt = states[order]
    change = (np.diff(srt[:, 0]) != 0) | (np.diff(srt[:, 1]) != 0)
    starts = np.concatenate(([0], np.nonzero(change)[0] + 1))
    bounds = np.concatenate((starts[1:], [srt.shape[0]]))
    for s, e in zip(starts.tolist(), bounds.tolist()):
        levels[(int(srt[s, 0]), int(srt[s, 1]))] = np.ascontiguousarray(srt[s:e, 2])
    return levels


def extract_surface(
    candidates: CandidateSet,
    seeds: Sequence,
    extraction: ExtractionParams | None = None,
) -> Surface:
    """BFS closure of the seeds over the bounded-step column relation.

    Expansion follows :func:`step_offsets` order and ordinals are assigned
    in discovery order, so the output is identical across runs and
    platforms. Seeds landing in one component deduplicate; the first seed
    is recorded as canonical.
    """
    t0 = time.perf_counter()
    mask = candidates.mask
    nx, ny, nz = mask.shape
    seed_list = [tuple(int(c) for c in s) for s in seeds]
    if not seed_list:
        raise InvalidSeedError("invalid seed: no seeds given")
    for s in seed_list:
        if s not in candidates:
            raise InvalidSeedError(f"invalid seed: {s} is not a candidate voxel")

    offsets = step_offsets(candidates.params.step_voxels)
    flat_mask = mask.ravel()
    visited = np.zeros(mask.size, dtype=bool)

    first = []
    for s in seed_list:
        fi = (s[0] * ny + s[1]) * nz + s[2]
        if not visited[fi]:
            visited[fi] = True
            first.append(s)
    frontier = np.array(first, dtype=np.int64)

    chunks = []
    while frontier.shape[0]:
        chunks.append(frontier)
        nb = (frontier[:, None, :] + offsets[None, :, :]).reshape(-1, 3)
        inb = (
            (nb[:, 0] >= 0) & (nb[:, 0] < nx)
            & (nb[:, 1] >= 0) & (nb[:, 1] < ny)
            & (nb[:, 2] >= 0) & (nb[:, 2] < nz)
        )
        nb = nb[inb]
        fi = _flat_index(nb, ny, nz)
        ok = flat_mask[fi] & ~visited[fi]
        nb = nb[ok]
        fi = fi[ok]
        if fi.shape[0]:
            # keep the first occurrence of each voxel: rows are already in
            # (parent ordinal, offset order) sequence, i.e. discovery order
            _, idx = np.unique(fi, return_index=True)
            idx.sort()
            nb = nb[idx]
            fi = fi[idx]
            visited[fi] = True
        frontier = nb

    states = np.concatenate(chunks) if chunks else np.empty((0, 3), dtype=np.int64)
    state_index = {
        (int(x), int(y), int(z)): i for i, (x, y, z) in enumerate(states.tolist())
    }
    levels = _levels_from_states(states)

    return Surface(
        states=states,
        seed=seed_list[0],
        dims=(nx, ny, nz),
        resolution=candidates.grid.resolution,
        origin=candidates.grid.origin,
        params=candidates.params,
        state_index=state_index,
        levels=levels,
        bfs_seconds=time.perf_counter() - t0,
        extraction=extraction,
    )


def levels_at(surface: Surface, x: int, y: int) -> list[int]:
    """Sorted standing heights of column (x, y); empty if off the surface."""
    zs = surface.levels.get((int(x), int(y)))
    if zs is None:
        return []
    return [int(z) for z in zs]


@dataclass(frozen=True)
class ReductionStats:
    total_voxels: int
    surface_size: int
    reduction: float
    extract_seconds: float


def reduction_stats(
    grid: OccupancyGrid, surface: Surface, extract_seconds: float | None = None
) -> ReductionStats:
    """Search-space reduction 1 - |surface| / |grid|."""
    total = grid.total_voxels
    n = surface.size
    seconds = surface.bfs_seconds if extract_seconds is None else extract_seconds
    return ReductionStats(
        total_voxels=total,
        surface_size=n,
        reduction=1.0 - n / total,
        extract_seconds=seconds,
    )


@dataclass(frozen=True)
class ExtractionTimings:
    candidate_seconds: float
    collision_seconds: float
    bfs_seconds: float

    @property
    def total_seconds(self) -> float:
        return self.candidate_seconds + self.collision_seconds + self.bfs_seconds


def extract_pipeline(
    grid: OccupancyGrid,
    params: ExtractionParams,
    seed_pose=None,
    seed_voxel=None,
    max_snap: float = 2.0,
) -> tuple[Surface, ExtractionTimings]:
    """candidate_set -> collision_filter -> select_seed -> extract_surface.

    Exactly one of ``seed_pose`` (world, snapped within ``max_snap``) or
    ``seed_voxel`` (must already be a candidate) selects the seed.
    """
    if (seed_pose is None) == (seed_voxel is None):
        raise ValueError("exactly one of seed_pose or seed_voxel is required")
    derived = DerivedVoxelParams.from_params(params, grid.resolution)
    t0 = time.perf_counter()
    cands = candidate_set(grid, derived)
    t1 = time.perf_counter()
    filtered = collision_filter(cands)
    t2 = time.perf_counter()
    if seed_voxel is not None:
        seed = tuple(int(c) for c in seed_voxel)
    else:
        seed = select_seed(seed_pose, filtered, max_snap)
    surface = extract_surface(filtered, [seed], extraction=params)
    return surface, ExtractionTimings(t1 - t0, t2 - t1, surface.bfs_seconds)


def save_surface(surface: Surface, destination) -> None:
    """Write a surface as a JSON document (states in ordinal order)."""
    params = surface.params
    extraction = surface.extraction
    doc = {
        "format": "surfnav-surface",
        "version": 1,
        "resolution": surface.resolution,
        "origin": [float(c) for c in surface.origin],
        "dims": list(surface.dims),
        "seed": list(surface.seed),
        "params": {
            "step_height": extraction.step_height if extraction else None,
            "clearance_height": extraction.clearance_height if extraction else None,
            "inflation_radius": extraction.inflation_radius if extraction else None,
            "step_voxels": params.step_voxels,
            "clearance_voxels": params.clearance_voxels,
            "inflation_voxels": params.inflation_voxels,
        },
        "states": surface.states.tolist(),
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if hasattr(destination, "write"):
        destination.write(text + "\n")
    else:
        Path(destination).write_text(text + "\n")


def load_surface(source) -> Surface:
    """Read a surface written by :func:`save_surface`."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SurfaceFormatError(f"not a surface file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "surfnav-surface":
        raise SurfaceFormatError("not a surface file: missing format marker")
    if doc.get("version") != 1:
        raise SurfaceFormatError(f"unsupported surface version {doc.get('version')!r}")
    try:
        p = doc["params"]
        params = DerivedVoxelParams(
            step_voxels=int(p["step_voxels"]),
            clearance_voxels=int(p["clearance_voxels"]),
            inflation_voxels=int(p["inflation_voxels"]),
            resolution=float(doc["resolution"]),
        )
        meters = (p.get("step_height"), p.get("clearance_height"), p.get("inflation_radius"))
        extraction = None
        if all(v is not None for v in meters):
            extraction = ExtractionParams(*(float(v) for v in meters))
        states = np.asarray(doc["states"], dtype=np.int64)
        if states.size == 0:
            states = np.empty((0, 3), dtype=np.int64)
        if states.ndim != 2 or states.shape[1] != 3:
            raise SurfaceFormatError(f"bad states array of shape {states.shape}")
        dims = tuple(int(d) for d in doc["dims"])
        seed = tuple(int(c) for c in doc["seed"])
        origin = np.asarray(doc["origin"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise SurfaceFormatError(f"bad surface file: {exc}") from exc
    if len(dims) != 3 or min(dims) < 1:
        raise SurfaceFormatError(f"bad dims {dims}")
    state_index = {
        (int(x), int(y), int(z)): i for i, (x, y, z) in enumerate(states.tolist())
    }
    if states.shape[0] and seed not in state_index:
        raise SurfaceFormatError(f"seed {seed} is not among the states")
    return Surface(
        states=states,
        seed=seed,
        dims=dims,
        resolution=float(doc["resolution"]),
        origin=origin,
        params=params,
        state_index=state_index,
        levels=_levels_from_states(states),
        bfs_seconds=0.0,
        extraction=extraction,
    )
