"""Parameter-sensitive solvers: profile-partitioned computation and the
intersection-graph degeneracy iteration.

The profile path slices the domain along the axis a sweeping hyperplane
stabs least, solving each slice independently.  The degeneracy path
orders the boxes so each sees few earlier neighbours and localises all
work to one box's own extent per step.
"""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass

import numpy as np

from .geom import AxisBox, DomainBox, Instance, clip, volume
from .measures import DepthDistribution, _finish_dd
from .sdc import _dd_engine, _klee_engine, _maxdepth_engine


@dataclass(frozen=True)
class ProfileReport:
    """Per-dimension stab maxima, their minimum, and the axis realizing it."""

    per_dim: tuple[int, ...]
    profile: int
    axis: int

    def to_json(self) -> dict:
        return {"per_dim": list(self.per_dim), "profile": self.profile, "axis": self.axis}


@dataclass(frozen=True)
class BoxIntersectionGraph:
    """Undirected graph on box indices; edges join intersecting pairs."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    e: int


@dataclass(frozen=True)
class DegeneracyOrdering:
    """Vertex order where each vertex has at most k earlier neighbours."""

    order: tuple[int, ...]
    k: int


def _clipped_pairs_1d(instance: Instance, axis: int) -> list[tuple[float, float]]:
    """Axis projections of the boxes clipped to the domain; empty clips dropped,
    degenerate ones kept (closed-box convention)."""
    dlo = instance.domain.lo
    dhi = instance.domain.hi
    d = instance.dim
    out = []
    for b in instance.boxes:
        lo = b.lo
        hi = b.hi
        ok = True
        for k in range(d):
            if lo[k] > dhi[k] or hi[k] < dlo[k]:
                ok = False
                break
        if ok:
            out.append((max(lo[axis], dlo[axis]), min(hi[axis], dhi[axis])))
    return out


def _max_stab(pairs: list[tuple[float, float]]) -> int:
    events = []
    for s, e in pairs:
        events.append((s, 0))
        events.append((e, 1))
    events.sort()
    active = 0
    best = 0
    for _, kind in events:
        if kind == 0:
            active += 1
            if active > best:
                best = active
        else:
            active -= 1
    return best


def profile(instance: Instance) -> ProfileReport:
    """Max boxes stabbed by any axis-orthogonal hyperplane, per dimension.

    Starts are processed before ends at equal coordinates, so touching
    closed boxes count as simultaneously stabbed.  An empty instance has
    profile 0 in every dimension.
    """
    d = instance.dim
    if instance.n == 0:
        return ProfileReport((0,) * d, 0, 0)
    per_dim = tuple(_max_stab(_clipped_pairs_1d(instance, k)) for k in range(d))
    p = min(per_dim)
    return ProfileReport(per_dim, p, per_dim.index(p))


def _profile_slices(instance: Instance) -> tuple[int, int, list[tuple[float, float]]]:
    """Slice bounds along the min-profile axis, one cut after every 2p
    endpoints (duplicates counted with multiplicity)."""
    rep = profile(instance)
    a, p = rep.axis, rep.profile
    dlo, dhi = instance.domain.lo[a], instance.domain.hi[a]
    endpoints: list[float] = []
    for s, e in _clipped_pairs_1d(instance, a):
        endpoints.append(s)
        endpoints.append(e)
    endpoints.sort()
    cuts: list[float] = []
    if p > 0:
        for t in range(2 * p, len(endpoints), 2 * p):
            x = endpoints[t]
            if dlo < x < dhi and (not cuts or x > cuts[-1]):
                cuts.append(x)
    bounds = []
    prev = dlo
    for x in cuts:
        bounds.append((prev, x))
        prev = x
    bounds.append((prev, dhi))
    return a, p, bounds


def _boxes_per_slice(instance: Instance, axis: int, bounds: list[tuple[float, float]]):
    """Raw (lo, hi) coordinate pairs of the boxes positively overlapping
    each slice, found by bisecting the cut coordinates per box."""
    dom = instance.domain
    cuts = [hi for _, hi in bounds[:-1]]
    slices: list[list[tuple[tuple[float, ...], tuple[float, ...]]]] = [
        [] for _ in bounds
    ]
    for b in instance.boxes:
        ok = True
        for k in range(instance.dim):
            if b.lo[k] >= dom.hi[k] or b.hi[k] <= dom.lo[k]:
                ok = False
                break
        if not ok:
            continue
        pair = (b.lo, b.hi)
        first = bisect.bisect_right(cuts, b.lo[axis])
        last = bisect.bisect_left(cuts, b.hi[axis])
        for t in range(first, last + 1):
            slices[t].append(pair)
    return slices


def dd_profile(instance: Instance) -> DepthDistribution:
    """Depth distribution via independent slices along the min-profile axis."""
    d = instance.dim
    dom = instance.domain
    axis, _, bounds = _profile_slices(instance)
    per_slice = _boxes_per_slice(instance, axis, bounds)
    V = np.zeros(instance.n + 1)
    for (lo, hi), sub in zip(bounds, per_slice):
        dlo = list(dom.lo)
        dhi = list(dom.hi)
        dlo[axis] = lo
        dhi[axis] = hi
        raw = _dd_engine(d, dlo, dhi, sub, len(sub))
        V[: len(raw)] += raw
    return _finish_dd(V, volume(dom))


def klee_profile(instance: Instance) -> float:
    """Klee's measure as the sum of per-slice covered volumes."""
    dom = instance.domain
    axis, _, bounds = _profile_slices(instance)
    per_slice = _boxes_per_slice(instance, axis, bounds)
    total = 0.0
    for (lo, hi), sub in zip(bounds, per_slice):
        dlo = list(dom.lo)
        dhi = list(dom.hi)
        dlo[axis] = lo
        dhi[axis] = hi
        total += _klee_engine(instance.dim, dlo, dhi, sub)
    return total


def maxdepth_profile(instance: Instance) -> int:
    """Maximum depth as the max over per-slice maxima."""
    dom = instance.domain
    axis, _, bounds = _profile_slices(instance)
    per_slice = _boxes_per_slice(instance, axis, bounds)
    best = 0
    for (lo, hi), sub in zip(bounds, per_slice):
        dlo = list(dom.lo)
        dhi = list(dom.hi)
        dlo[axis] = lo
        dhi[axis] = hi
        best = max(best, _maxdepth_engine(instance.dim, dlo, dhi, sub))
    return best


def intersection_graph(instance: Instance) -> BoxIntersectionGraph:
    """Pairwise-tested intersection graph of the boxes clipped to the domain.

    Degenerate (zero-volume) intersections create edges; boxes entirely
    outside the domain are isolated vertices.
    """
    n = instance.n
    d = instance.dim
    if n == 0:
        return BoxIntersectionGraph(0, (), 0)
    clo = np.full((n, d), np.inf)
    chi = np.full((n, d), -np.inf)
    for i, b in enumerate(instance.boxes):
        cb = clip(b, instance.domain)
        if cb is not None:
            clo[i] = cb.lo
            chi[i] = cb.hi
    adjacency = []
    edges = 0
    for u in range(n):
        hit = np.nonzero(
            np.all((clo[u] <= chi) & (clo <= chi[u]), axis=1)
        )[0]
        neighbors = tuple(int(v) for v in hit if v != u)
        adjacency.append(neighbors)
        edges += len(neighbors)
    return BoxIntersectionGraph(n, tuple(adjacency), edges // 2)


def graph_to_edge_list(g: BoxIntersectionGraph) -> str:
    """Edge-list text export: one "u v" line per edge, u < v, sorted."""
    lines = [f"{u} {v}" for u in range(g.n) for v in g.adjacency[u] if u < v]
    return "\n".join(lines) + ("\n" if lines else "")


def degeneracy_ordering(g: BoxIntersectionGraph) -> DegeneracyOrdering:
    """Greedy min-degree removal (smallest index on ties); k is the largest
    degree seen at removal time and the order is the reversed removal
    sequence, so every vertex has at most k earlier neighbours."""
    degree = [len(a) for a in g.adjacency]
    removed = [False] * g.n
    heap = [(degree[v], v) for v in range(g.n)]
    heapq.heapify(heap)
    removal: list[int] = []
    k = 0
    while heap:
        deg, v = heapq.heappop(heap)
        if removed[v] or deg != degree[v]:
            continue
        removed[v] = True
        removal.append(v)
        k = max(k, deg)
        for w in g.adjacency[v]:
            if not removed[w]:
                degree[w] -= 1
                heapq.heappush(heap, (degree[w], w))
    return DegeneracyOrdering(tuple(reversed(removal)), k)


def dd_degeneracy(instance: Instance) -> DepthDistribution:
    """Depth distribution by walking a degeneracy ordering and solving each
    box against its earlier neighbours inside the box's own clipped extent.

    A point of box u at local depth j lies in u and j-1 earlier boxes (all
    of which must be neighbours of u), so its volume moves from global
    depth j-1 to j.
    """
    dom = instance.domain
    d = instance.dim
    n = instance.n
    g = intersection_graph(instance)
    ordering = degeneracy_ordering(g)
    pos = {u: i for i, u in enumerate(ordering.order)}
    V = np.zeros(n + 1)
    V[0] = volume(dom)
    for i, u in enumerate(ordering.order):
        dom_u = clip(instance.boxes[u], dom)
        if dom_u is None or volume(dom_u) <= 0.0:
            continue
        local_boxes = [
            (instance.boxes[v].lo, instance.boxes[v].hi)
            for v in g.adjacency[u]
            if pos[v] < i
        ]
        local_boxes.append((instance.boxes[u].lo, instance.boxes[u].hi))
        raw = _dd_engine(d, dom_u.lo, dom_u.hi, local_boxes, len(local_boxes))
        tail = raw[1:]
        V[: len(tail)] -= tail
        V[1 : len(tail) + 1] += tail
    return _finish_dd(V, volume(dom))


def klee_degeneracy(instance: Instance) -> float:
    """Klee's measure as the sum of newly covered volume per ordering step:
    each box's clipped extent minus what its earlier neighbours cover."""
    dom = instance.domain
    g = intersection_graph(instance)
    ordering = degeneracy_ordering(g)
    pos = {u: i for i, u in enumerate(ordering.order)}
    total = 0.0
    for i, u in enumerate(ordering.order):
        dom_u = clip(instance.boxes[u], dom)
        if dom_u is None:
            continue
        vol_u = volume(dom_u)
        if vol_u <= 0.0:
            continue
        earlier = [
            (instance.boxes[v].lo, instance.boxes[v].hi)
            for v in g.adjacency[u]
            if pos[v] < i
        ]
        covered = _klee_engine(instance.dim, dom_u.lo, dom_u.hi, earlier)
        total += vol_u - covered
    return total


def maxdepth_degeneracy(instance: Instance) -> int:
    """Maximum depth as the max of per-step local maxima; every witness
    point lies inside the last box of the ordering covering it."""
    dom = instance.domain
    g = intersection_graph(instance)
    ordering = degeneracy_ordering(g)
    pos = {u: i for i, u in enumerate(ordering.order)}
    best = 0
    for i, u in enumerate(ordering.order):
        dom_u = clip(instance.boxes[u], dom)
        if dom_u is None or volume(dom_u) <= 0.0:
            continue
        local_boxes = [
            (instance.boxes[v].lo, instance.boxes[v].hi)
            for v in g.adjacency[u]
            if pos[v] < i
        ]
        local_boxes.append((instance.boxes[u].lo, instance.boxes[u].hi))
        best = max(best, _maxdepth_engine(instance.dim, dom_u.lo, dom_u.hi, local_boxes))
    return best
