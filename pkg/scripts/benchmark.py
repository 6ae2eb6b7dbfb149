"""Time extraction and planning on a large preset grid.

Runs the full pipeline once at a fine resolution, then a batch of
sampled queries against the prebuilt search graph. Prints a breakdown
suitable for comparing machines or commits. The first compiled-kernel
call is warmed outside the timed loop.
"""

import argparse
import time

import numpy as np

from surfnav import (
    ExtractionParams,
    PlanParams,
    SearchGraph,
    build_scene,
    distance_field,
    extract_pipeline,
    plan,
    preset,
    reduction_stats,
    sample_queries,
)


def run(args: argparse.Namespace) -> None:
    spec = preset(args.preset, resolution=args.resolution, rng_seed=args.rng_seed)
    t0 = time.perf_counter()
    grid = build_scene(spec).grid
    build_s = time.perf_counter() - t0
    print(f"scene    {spec.name}  r={args.resolution}  "
          f"dims={tuple(grid.occupancy.shape)}  voxels={grid.total_voxels:,}")
    print(f"build    {build_s:.3f} s")

    surface, timings = extract_pipeline(grid, ExtractionParams(), seed_pose=spec.seed_hint)
    stats = reduction_stats(grid, surface, timings.total_seconds)
    print(f"extract  {timings.total_seconds:.3f} s  "
          f"(candidates {timings.candidate_seconds:.3f}, "
          f"collision {timings.collision_seconds:.3f}, "
          f"bfs {timings.bfs_seconds:.3f})")
    print(f"surface  {surface.size:,} states  reduction {stats.reduction:.4f}")

    t0 = time.perf_counter()
    dfield = distance_field(surface)
    print(f"dfield   {time.perf_counter() - t0:.3f} s  "
          f"max boundary distance {int(dfield.distances.max())}")
    t0 = time.perf_counter()
    graph = SearchGraph.build(surface)
    print(f"graph    {time.perf_counter() - t0:.3f} s  {graph.edge_count:,} edges")

    mode = "mixed" if surface.z_span() >= surface.params.clearance_voxels else "same_floor"
    pairs = sample_queries(surface, args.queries, mode=mode, rng_seed=args.rng_seed)
    params = PlanParams(epsilon=args.epsilon)
    plan(surface, dfield, *pairs[0], params, graph=graph)  # JIT warmup

    times, expanded = [], []
    for start, goal in pairs:
        t0 = time.perf_counter()
        result = plan(surface, dfield, start, goal, params, graph=graph)
        times.append(time.perf_counter() - t0)
        expanded.append(result.expanded)
    ms = 1e3 * np.asarray(times)
    print(f"search   {len(pairs)} {mode} queries  epsilon={args.epsilon}")
    print(f"         mean {ms.mean():.3f} ms  median {np.median(ms):.3f} ms  "
          f"max {ms.max():.3f} ms")
    print(f"         expanded mean {np.mean(expanded):.0f}  max {max(expanded)}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="plaza_like")
    ap.add_argument("--resolution", type=float, default=0.048)
    ap.add_argument("--queries", type=int, default=50)
    ap.add_argument("--epsilon", type=float, default=1.0)
    ap.add_argument("--rng-seed", type=int, default=7)
    run(ap.parse_args())


if __name__ == "__main__":
    main()
