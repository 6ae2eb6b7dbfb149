"""Clearance-aware weighted A* over an extracted surface.

Moves connect a state to surface states in the four adjacent columns
within the step bound. Edge cost is metric length plus an asymmetric
vertical penalty plus a boundary-proximity bias, so equal-length paths
prefer descending over climbing and corridor centers over walls. The
heuristic underestimates every term it models and is consistent, which
keeps plain A* (epsilon = 1) exact; epsilon > 1 trades cost for speed
with the usual bounded-suboptimality guarantee.

Two engines share one graph and one tie-break rule (min f, then max g,
then lexicographic coordinates), so their outputs are bit-identical: a
compiled kernel for throughput and a plain-Python one that doubles as
its readable specification.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .dfield import DistanceField
from .errors import NoPathError, OffSurfaceError
from .extract import Surface

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


__all__ = [
    "PathResult",
    "PlanParams",
    "SearchGraph",
    "edge_cost",
    "heuristic",
    "plan",
    "successors",
]

_DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class PlanParams:
    """Search weights.

    epsilon: heuristic inflation, >= 1; 1 searches exactly.
    w_up / w_down: per-voxel vertical penalty factors for climbing and
    descending. Consistency of the heuristic needs w_up >= w_down.
    w_obstacle: boundary-proximity bias scale; each entered state adds
    w_obstacle * resolution / (boundary_distance + 1).
    """

    epsilon: float = 1.0
    w_up: float = 2.0
    w_down: float = 1.0
    w_obstacle: float = 0.5

    def __post_init__(self):
        for name in ("epsilon", "w_up", "w_down", "w_obstacle"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.epsilon < 1.0:
            raise ValueError(f"epsilon must be >= 1, got {self.epsilon}")
        if self.w_down < 0.0 or self.w_up < self.w_down:
            raise ValueError(
                f"need w_up >= w_down >= 0, got w_up={self.w_up} w_down={self.w_down}"
            )
        if self.w_obstacle < 0.0:
            raise ValueError(f"w_obstacle must be >= 0, got {self.w_obstacle}")


def successors(surface: Surface, state) -> list[tuple[int, int, int]]:
    """Connected neighbors of ``state``, direction-major, ascending height."""
    x, y, z = (int(c) for c in state)
    k = surface.params.step_voxels
    out = []
    for dx, dy in _DIRECTIONS:
        zs = surface.levels.get((x + dx, y + dy))
        if zs is None:
            continue
        lo = np.searchsorted(zs, z - k, side="left")
        hi = np.searchsorted(zs, z + k, side="right")
        for zz in zs[lo:hi].tolist():
            out.append((x + dx, y + dy, int(zz)))
    return out


def edge_cost(src, dst, dst_boundary_distance: int, params: PlanParams, resolution: float) -> float:
    """Cost of the move src -> dst.

    metric length + |dz| * resolution * (w_up rising, w_down falling)
    + w_obstacle * resolution / (boundary distance of dst + 1).
    """
    dx = dst[0] - src[0]
    dy = dst[1] - src[1]
    dz = dst[2] - src[2]
    base = resolution * math.sqrt(dx * dx + dy * dy + dz * dz)
    if dz > 0:
        vert = resolution * dz * params.w_up
    elif dz < 0:
        vert = resolution * -dz * params.w_down
    else:
        vert = 0.0
    return base + vert + params.w_obstacle * resolution / (dst_boundary_distance + 1)


def heuristic(state, goal, params: PlanParams, resolution: float) -> float:
    """Admissible cost lower bound: straight-line length plus the cheapest
    possible vertical penalty (w_down per voxel of net height change)."""
    dx = state[0] - goal[0]
    dy = state[1] - goal[1]
    dz = state[2] - goal[2]
    d2 = dx * dx + dy * dy + dz * dz
    return resolution * math.sqrt(d2) + resolution * abs(dz) * params.w_down


@dataclass(frozen=True, eq=False)
class SearchGraph:
    """CSR adjacency of a surface: edges sorted by (source ordinal,
    direction, height). Independent of planning weights, so one graph
    serves any number of queries."""

    indptr: np.ndarray
    targets: np.ndarray
    dz: np.ndarray
    surface: Surface
    build_seconds: float

    @property
    def edge_count(self) -> int:
        return int(self.targets.shape[0])

    @classmethod
    def build(cls, surface: Surface) -> "SearchGraph":
        t0 = time.perf_counter()
        states = surface.states
        n = states.shape[0]
        k = surface.params.step_voxels
        dz_fan = np.arange(-k, k + 1, dtype=np.int64)
        offsets = np.array(
            [(dx, dy, dz) for dx, dy in _DIRECTIONS for dz in dz_fan.tolist()],
            dtype=np.int64,
        )
        m = offsets.shape[0]
        if n == 0:
            return cls(
                indptr=np.zeros(1, dtype=np.int64),
                targets=np.empty(0, dtype=np.int64),
                dz=np.empty(0, dtype=np.int64),
                surface=surface,
                build_seconds=time.perf_counter() - t0,
            )
        nx, ny, nz = surface.dims
        ord_of = np.full(nx * ny * nz, -1, dtype=np.int64)
        flat_states = (states[:, 0] * ny + states[:, 1]) * nz + states[:, 2]
        ord_of[flat_states] = np.arange(n, dtype=np.int64)
        nb = states[:, None, :] + offsets[None, :, :]
        inb = (
            (nb[..., 0] >= 0) & (nb[..., 0] < nx)
            & (nb[..., 1] >= 0) & (nb[..., 1] < ny)
            & (nb[..., 2] >= 0) & (nb[..., 2] < nz)
        )
        flat = (nb[..., 0] * ny + nb[..., 1]) * nz + nb[..., 2]
        flat[~inb] = 0
        hit = ord_of[flat]
        hit[~inb] = -1
        present = hit >= 0
        # row-major flatten keeps (source, direction, dz) order
        targets = hit[present]
        dz_edge = np.broadcast_to(np.tile(dz_fan, 4), (n, m))[present]
        counts = present.sum(axis=1)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(
            indptr=indptr,
            targets=np.ascontiguousarray(targets),
            dz=np.ascontiguousarray(dz_edge),
            surface=surface,
            build_seconds=time.perf_counter() - t0,
        )


@dataclass(frozen=True)
class PathResult:
    """A* output: states in path order (start first), accumulated cost,
    metric lengths in meters, and search effort."""

    states: np.ndarray
    cost: float
    metric_length: float
    metric_length_xy: float
    expanded: int
    search_seconds: float
    engine: str


@njit(cache=True)
def _heap_less(hf, hg, hk, i, j):
    # min f, then max g, then lexicographic (x,y,z) packed into hk. Pushes
    # of one node carry strictly decreasing g, so (f, g, key) is already a
    # total order over live entries and no insertion counter is needed.
    if hf[i] != hf[j]:
        return hf[i] < hf[j]
    if hg[i] != hg[j]:
        return hg[i] > hg[j]
    return hk[i] < hk[j]


@njit(cache=True)
def _heap_swap(hf, hg, hk, hn, i, j):
    hf[i], hf[j] = hf[j], hf[i]
    hg[i], hg[j] = hg[j], hg[i]
    hk[i], hk[j] = hk[j], hk[i]
    hn[i], hn[j] = hn[j], hn[i]


@njit(cache=True)
def _sift_up(hf, hg, hk, hn, i):
    while i > 0:
        p = (i - 1) // 2
        if _heap_less(hf, hg, hk, i, p):
            _heap_swap(hf, hg, hk, hn, i, p)
            i = p
        else:
            break


@njit(cache=True)
def _sift_down(hf, hg, hk, hn, size):
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        small = l
        r = l + 1
        if r < size and _heap_less(hf, hg, hk, r, l):
            small = r
        if _heap_less(hf, hg, hk, small, i):
            _heap_swap(hf, hg, hk, hn, i, small)
            i = small
        else:
            break


@njit(cache=True)
def _astar_kernel(
    indptr, targets, dzs, cost_by_dz, bias, xs, ys, zs, start, goal, epsilon, res, w_down, k
):
    n = xs.shape[0]
    g = np.full(n, np.inf)
    parent = np.full(n, -1, np.int64)
    closed = np.zeros(n, np.bool_)
    cap = targets.shape[0] + 2
    hf = np.empty(cap)
    hg = np.empty(cap)
    hk = np.empty(cap, np.int64)
    hn = np.empty(cap, np.int64)
    gx, gy, gz = xs[goal], ys[goal], zs[goal]

    dx = xs[start] - gx
    dy = ys[start] - gy
    dz = zs[start] - gz
    h0 = res * math.sqrt(float(dx * dx + dy * dy + dz * dz)) + res * abs(dz) * w_down
    g[start] = 0.0
    hf[0] = 0.0 + epsilon * h0
    hg[0] = 0.0
    hk[0] = (xs[start] << 42) | (ys[start] << 21) | zs[start]
    hn[0] = start
    size = 1
    expanded = 0
    found = False
    while size > 0:
        pg = hg[0]
        pn = hn[0]
        size -= 1
        hf[0], hg[0], hk[0], hn[0] = hf[size], hg[size], hk[size], hn[size]
        _sift_down(hf, hg, hk, hn, size)
        if closed[pn] or pg != g[pn]:
            continue
        if pn == goal:
            found = True
            break
        closed[pn] = True
        expanded += 1
        for e in range(indptr[pn], indptr[pn + 1]):
            v = targets[e]
            if closed[v]:
                continue
            ng = pg + cost_by_dz[dzs[e] + k] + bias[v]
            if ng < g[v]:
                g[v] = ng
                parent[v] = pn
                dx = xs[v] - gx
                dy = ys[v] - gy
                dz = zs[v] - gz
                hv = res * math.sqrt(float(dx * dx + dy * dy + dz * dz)) + res * abs(dz) * w_down
                hf[size] = ng + epsilon * hv
                hg[size] = ng
                hk[size] = (xs[v] << 42) | (ys[v] << 21) | zs[v]
                hn[size] = v
                size += 1
                _sift_up(hf, hg, hk, hn, size - 1)
    return parent, g, expanded, found


def _astar_python(graph, cost_by_dz, bias, start, goal, epsilon, res, w_down, k):
    """Reference engine. Must mirror the kernel move for move."""
    import heapq

    states = graph.surface.states
    xs, ys, zs = states[:, 0], states[:, 1], states[:, 2]
    n = states.shape[0]
    g = np.full(n, np.inf)
    parent = np.full(n, -1, np.int64)
    closed = np.zeros(n, np.bool_)
    indptr, targets, dzs = graph.indptr, graph.targets, graph.dz
    gx, gy, gz = int(xs[goal]), int(ys[goal]), int(zs[goal])

    def h(v):
        dx = int(xs[v]) - gx
        dy = int(ys[v]) - gy
        dz = int(zs[v]) - gz
        return res * math.sqrt(dx * dx + dy * dy + dz * dz) + res * abs(dz) * w_down

    g[start] = 0.0
    # tuple order implements: min f, max g, lexicographic coords, insertion
    heap = [(0.0 + epsilon * h(start), -0.0, int(xs[start]), int(ys[start]), int(zs[start]), 0, start)]
    seq = 1
    expanded = 0
    found = False
    while heap:
        _, neg_g, _, _, _, _, pn = heapq.heappop(heap)
        pg = -neg_g
        if closed[pn] or pg != g[pn]:
            continue
        if pn == goal:
            found = True
            break
        closed[pn] = True
        expanded += 1
        for e in range(indptr[pn], indptr[pn + 1]):
            v = int(targets[e])
            if closed[v]:
                continue
            ng = pg + cost_by_dz[dzs[e] + k] + bias[v]
            if ng < g[v]:
                g[v] = ng
                parent[v] = pn
                heapq.heappush(
                    heap,
                    (ng + epsilon * h(v), -ng, int(xs[v]), int(ys[v]), int(zs[v]), seq, v),
                )
                seq += 1
    return parent, g, expanded, found


def _cost_table(params: PlanParams, resolution: float, k: int) -> np.ndarray:
    """Edge cost by height change, excluding the per-target bias."""
    table = np.empty(2 * k + 1, dtype=np.float64)
    for dz in range(-k, k + 1):
        base = resolution * math.sqrt(1.0 + dz * dz)
        if dz > 0:
            vert = resolution * dz * params.w_up
        elif dz < 0:
            vert = resolution * -dz * params.w_down
        else:
            vert = 0.0
        table[dz + k] = base + vert
    return table


def _metric_lengths(states: np.ndarray, resolution: float) -> tuple[float, float]:
    if states.shape[0] < 2:
        return 0.0, 0.0
    d = np.diff(states, axis=0).astype(np.float64)
    full = resolution * float(np.sqrt((d**2).sum(axis=1)).sum())
    xy = resolution * float(np.sqrt((d[:, :2] ** 2).sum(axis=1)).sum())
    return full, xy


def plan(
    surface: Surface,
    dfield: DistanceField,
    start,
    goal,
    params: PlanParams | None = None,
    engine: str = "auto",
    graph: SearchGraph | None = None,
) -> PathResult:
    """Search a path between two surface states.

    ``start`` and ``goal`` are voxel triples that must lie on the surface.
    Pass a prebuilt ``graph`` to amortize adjacency construction across
    queries. ``engine`` is "auto", "numba" or "python".
    """
    if params is None:
        params = PlanParams()
    if dfield.surface is not surface:
        raise ValueError("distance field belongs to a different surface")
    if graph is not None and graph.surface is not surface:
        raise ValueError("graph belongs to a different surface")
    start = tuple(int(c) for c in start)
    goal = tuple(int(c) for c in goal)
    if start not in surface:
        raise OffSurfaceError(f"state {start} is not on the surface (start)")
    if goal not in surface:
        raise OffSurfaceError(f"state {goal} is not on the surface (goal)")

    if engine == "auto":
        engine = "numba" if _HAVE_NUMBA else "python"
    if engine == "numba" and not _HAVE_NUMBA:
        raise ValueError("numba engine requested but numba is not importable")
    if engine not in ("numba", "python"):
        raise ValueError(f"unknown engine {engine!r}")

    if start == goal:
        return PathResult(
            states=np.array([start], dtype=np.int64),
            cost=0.0,
            metric_length=0.0,
            metric_length_xy=0.0,
            expanded=0,
            search_seconds=0.0,
            engine=engine,
        )

    if graph is None:
        graph = SearchGraph.build(surface)
    k = surface.params.step_voxels
    res = surface.resolution
    cost_by_dz = _cost_table(params, res, k)
    bias = params.w_obstacle * res / (dfield.distances.astype(np.float64) + 1.0)
    s = surface.ordinal(start)
    t = surface.ordinal(goal)

    t0 = time.perf_counter()
    if engine == "numba":
        states = surface.states
        parent, g, expanded, found = _astar_kernel(
            graph.indptr,
            graph.targets,
            graph.dz,
            cost_by_dz,
            bias,
            states[:, 0],
            states[:, 1],
            states[:, 2],
            s,
            t,
            params.epsilon,
            res,
            params.w_down,
            k,
        )
    else:
        parent, g, expanded, found = _astar_python(
            graph, cost_by_dz, bias, s, t, params.epsilon, res, params.w_down, k
        )
    elapsed = time.perf_counter() - t0

    if not found:
        # unreachable on a seed-connected surface, but the graph is caller
        # input and the contract needs a typed failure
        raise NoPathError(f"no path from {start} to {goal}")

    chain = [t]
    while chain[-1] != s:
        chain.append(int(parent[chain[-1]]))
    chain.reverse()
    path_states = surface.states[np.array(chain, dtype=np.int64)]
    full, xy = _metric_lengths(path_states, res)
    return PathResult(
        states=path_states,
        cost=float(g[t]),
        metric_length=full,
        metric_length_xy=xy,
        expanded=int(expanded),
        search_seconds=elapsed,
        engine=engine,
    )
