"""Summarize every scene preset through the full pipeline.

One table row per preset: grid size, candidate and surface counts,
reduction, extraction time, and mean search time over a small query
batch. Useful as a quick regression glance after touching the filters.
"""

import argparse
import time

import numpy as np

from surfnav import (
    DerivedVoxelParams,
    ExtractionParams,
    PRESET_NAMES,
    PlanParams,
    SearchGraph,
    build_scene,
    candidate_set,
    collision_filter,
    distance_field,
    extract_pipeline,
    plan,
    preset,
    reduction_stats,
    sample_queries,
)

COLUMNS = ("preset", "voxels", "cands", "states", "reduction", "extract_s", "search_ms")


def summarize(name: str, resolution: float, queries: int, rng_seed: int) -> tuple:
    spec = preset(name, resolution=resolution, rng_seed=rng_seed)
    grid = build_scene(spec).grid
    dv = DerivedVoxelParams.from_params(ExtractionParams(), resolution)
    n_cands = int(np.count_nonzero(collision_filter(candidate_set(grid, dv)).mask))

    surface, timings = extract_pipeline(grid, ExtractionParams(), seed_pose=spec.seed_hint)
    stats = reduction_stats(grid, surface, timings.total_seconds)
    dfield = distance_field(surface)
    graph = SearchGraph.build(surface)

    mode = "mixed" if surface.z_span() >= surface.params.clearance_voxels else "same_floor"
    pairs = sample_queries(surface, queries, mode=mode, rng_seed=rng_seed)
    params = PlanParams()
    plan(surface, dfield, *pairs[0], params, graph=graph)  # JIT warmup
    times = []
    for start, goal in pairs:
        t0 = time.perf_counter()
        plan(surface, dfield, start, goal, params, graph=graph)
        times.append(time.perf_counter() - t0)

    return (name, grid.total_voxels, n_cands, surface.size,
            f"{stats.reduction:.4f}", f"{timings.total_seconds:.3f}",
            f"{1e3 * float(np.mean(times)):.3f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=float, default=0.2)
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--rng-seed", type=int, default=0)
    args = ap.parse_args()

    rows = [COLUMNS]
    for name in PRESET_NAMES:
        rows.append(summarize(name, args.resolution, args.queries, args.rng_seed))
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(COLUMNS))]
    for row in rows:
        print("  ".join(str(v).rjust(w) for v, w in zip(row, widths)))


if __name__ == "__main__":
    main()
