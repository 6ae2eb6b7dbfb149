"""Traversable-surface extraction and clearance-aware planning on occupancy grids."""

from .dfield import DistanceField, boundary_states, distance_field
from .errors import (
    EmptyInputError,
    GridFormatError,
    InvalidPointError,
    InvalidSeedError,
    NoCandidatesError,
    NoPathError,
    OffSurfaceError,
    QuerySamplingError,
    SceneSpecError,
    SeedSnapError,
    SurfaceFormatError,
    SurfnavError,
)
from .extract import (
    CandidateSet,
    DerivedVoxelParams,
    ExtractionParams,
    ExtractionTimings,
    ReductionStats,
    Surface,
    candidate_set,
    collision_filter,
    extract_pipeline,
    extract_surface,
    levels_at,
    load_surface,
    reduction_stats,
    save_surface,
    select_seed,
    step_offsets,
)
from .grid import (
    OccupancyGrid,
    ceil_voxels,
    floor_voxels,
    load_grid,
    load_point_cloud,
    save_grid,
    save_point_cloud,
    voxel_to_world,
    voxelize,
    world_to_voxel,
)
from .plan import (
    PathResult,
    PlanParams,
    SearchGraph,
    edge_cost,
    heuristic,
    plan,
    successors,
)
from .scenegen import (
    PRESET_NAMES,
    CeilingCavity,
    FloorSlab,
    Hole,
    LowCabinet,
    Scene,
    SceneSpec,
    Staircase,
    Table,
    Wall,
    build_scene,
    load_scene_spec,
    preset,
    sample_queries,
    save_scene_spec,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "CeilingCavity",
    "DerivedVoxelParams",
    "DistanceField",
    "EmptyInputError",
    "ExtractionParams",
    "ExtractionTimings",
    "FloorSlab",
    "GridFormatError",
    "Hole",
    "InvalidPointError",
    "InvalidSeedError",
    "LowCabinet",
    "NoCandidatesError",
    "NoPathError",
    "OccupancyGrid",
    "OffSurfaceError",
    "PRESET_NAMES",
    "PathResult",
    "PlanParams",
    "QuerySamplingError",
    "ReductionStats",
    "Scene",
    "SceneSpec",
    "SceneSpecError",
    "SearchGraph",
    "SeedSnapError",
    "Staircase",
    "Surface",
    "SurfaceFormatError",
    "SurfnavError",
    "Table",
    "Wall",
    "boundary_states",
    "build_scene",
    "candidate_set",
    "ceil_voxels",
    "collision_filter",
    "distance_field",
    "edge_cost",
    "extract_pipeline",
    "extract_surface",
    "floor_voxels",
    "heuristic",
    "levels_at",
    "load_grid",
    "load_point_cloud",
    "load_scene_spec",
    "load_surface",
    "plan",
    "preset",
    "reduction_stats",
    "sample_queries",
    "save_grid",
    "save_point_cloud",
    "save_scene_spec",
    "save_surface",
    "select_seed",
    "step_offsets",
    "successors",
    "voxel_to_world",
    "voxelize",
    "world_to_voxel",
]
