"""Reeb graph of spatial proximity components over time.

Vertices mark the instants where the component partition changes (plus the
window boundaries); each directed edge carries the entity set that forms one
component throughout the edge's time span. Simultaneous events are processed
in their serialised order, so the graph may contain zero-length edges; those
are kept, never contracted, which preserves the degree classification.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .connectivity import SpanningForest
from .events import EventKind, all_events, initial_adjacency
from .model import Dataset, EntitySet, Interval, validate


class InternalInvariantError(AssertionError):
    """A structural invariant of the pipeline was violated (a bug, not bad data)."""


class VertexKind(Enum):
    START = "start"
    END = "end"
    MERGE = "merge"
    SPLIT = "split"


_DEGREES = {
    VertexKind.START: (0, 1),
    VertexKind.END: (1, 0),
    VertexKind.MERGE: (2, 1),
    VertexKind.SPLIT: (1, 2),
}


@dataclass
class ReebVertex:
    id: int
    kind: VertexKind
    time: float


@dataclass
class ReebEdge:
    id: int
    source: int
    target: int
    component: EntitySet


@dataclass
class ReebGraph:
    """Directed acyclic graph of component evolution over [t0, t_end]."""

    dataset: Dataset
    vertices: dict[int, ReebVertex] = field(default_factory=dict)
    edges: dict[int, ReebEdge] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    _next_vertex: int = 0
    _next_edge: int = 0
    _out: dict[int, list[int]] = field(default_factory=dict)
    _in: dict[int, list[int]] = field(default_factory=dict)

    # -- construction ------------------------------------------------------

    def add_vertex(self, kind: VertexKind, time: float) -> ReebVertex:
        v = ReebVertex(self._next_vertex, kind, time)
        self._next_vertex += 1
        self.vertices[v.id] = v
        self._out[v.id] = []
        self._in[v.id] = []
        return v

    def add_edge(self, source: int, target: int, component: EntitySet) -> ReebEdge:
        e = ReebEdge(self._next_edge, source, target, component)
        self._next_edge += 1
        self.edges[e.id] = e
        self._out[source].append(e.id)
        self._in[target].append(e.id)
        return e

    # -- mutation (used by robustification only) ----------------------------

    def retarget_edge(self, eid: int, new_target: int) -> None:
        e = self.edges[eid]
        self._in[e.target].remove(eid)
        e.target = new_target
        self._in[new_target].append(eid)

    def resource_edge(self, eid: int, new_source: int) -> None:
        e = self.edges[eid]
        self._out[e.source].remove(eid)
        e.source = new_source
        self._out[new_source].append(eid)

    def remove_edge(self, eid: int) -> None:
        e = self.edges.pop(eid)
        self._out[e.source].remove(eid)
        self._in[e.target].remove(eid)

    def remove_vertex(self, vid: int) -> None:
        if self._out[vid] or self._in[vid]:
            raise InternalInvariantError(f"removing vertex {vid} with incident edges")
        del self.vertices[vid]
        del self._out[vid]
        del self._in[vid]

    # -- queries -------------------------------------------------------------

    def out_edges(self, vid: int) -> list[ReebEdge]:
        return [self.edges[i] for i in self._out[vid]]

    def in_edges(self, vid: int) -> list[ReebEdge]:
        return [self.edges[i] for i in self._in[vid]]

    def edge_interval(self, e: ReebEdge) -> Interval:
        return Interval(self.vertices[e.source].time, self.vertices[e.target].time)

    def topological_order(self) -> list[int]:
        """Vertex ids in time-respecting topological order, deterministic."""
        indeg = {vid: len(self._in[vid]) for vid in self.vertices}
        heap = [
            (self.vertices[vid].time, vid) for vid, d in indeg.items() if d == 0
        ]
        heapq.heapify(heap)
        order: list[int] = []
        while heap:
            _, vid = heapq.heappop(heap)
            order.append(vid)
            for eid in self._out[vid]:
                t = self.edges[eid].target
                indeg[t] -= 1
                if indeg[t] == 0:
                    heapq.heappush(heap, (self.vertices[t].time, t))
        if len(order) != len(self.vertices):
            raise InternalInvariantError("Reeb graph contains a cycle")
        return order

    def edges_spanning(self, t: float) -> list[ReebEdge]:
        return [
            e
            for e in self.edges.values()
            if self.vertices[e.source].time <= t <= self.vertices[e.target].time
        ]

    def partition_at(self, t: float) -> list[tuple[int, ...]]:
        """Partition of the entities induced by edges strictly spanning t.

        Meaningful for t strictly between distinct vertex times; at a vertex
        time several edges may touch t and the result would double-count.
        """
        blocks = [
            e.component.indices()
            for e in self.edges.values()
            if self.vertices[e.source].time < t < self.vertices[e.target].time
        ]
        return sorted(blocks)

    def copy(self) -> "ReebGraph":
        g = ReebGraph(self.dataset)
        g._next_vertex = self._next_vertex
        g._next_edge = self._next_edge
        g.vertices = {vid: ReebVertex(v.id, v.kind, v.time) for vid, v in self.vertices.items()}
        g.edges = {eid: ReebEdge(e.id, e.source, e.target, e.component) for eid, e in self.edges.items()}
        g._out = {vid: list(eids) for vid, eids in self._out.items()}
        g._in = {vid: list(eids) for vid, eids in self._in.items()}
        g.meta = dict(self.meta)
        return g


def build_reeb(dataset: Dataset, eps: float) -> ReebGraph:
    """Sweep all events in serialised order, tracking components into a Reeb graph."""
    validate(dataset)
    n = dataset.n
    events = all_events(dataset, eps)

    # deletion time for every edge insertion: the pair's next disconnect, else +inf
    by_pair: dict[tuple[int, int], list[int]] = {}
    for idx, ev in enumerate(events):
        by_pair.setdefault((ev.a, ev.b), []).append(idx)
    deletion_after: dict[int, float] = {}
    first_deletion: dict[tuple[int, int], float] = {}
    for pair, idxs in by_pair.items():
        nxt = math.inf
        for idx in reversed(idxs):
            ev = events[idx]
            if ev.kind == EventKind.DISCONNECT:
                nxt = ev.time
            else:
                deletion_after[idx] = nxt
        for idx in idxs:
            if events[idx].kind == EventKind.DISCONNECT:
                first_deletion[pair] = events[idx].time
                break

    graph = ReebGraph(dataset)
    forest = SpanningForest(n)
    for a, b in sorted(initial_adjacency(dataset, eps)):
        forest.insert(a, b, first_deletion.get((a, b), math.inf))

    # mapping M: canonical component root -> (latest vertex id, component set)
    t0 = dataset.t0
    current: dict[int, tuple[int, EntitySet]] = {}
    for mask in sorted(forest.component_masks()):
        es = EntitySet(n, mask)
        v = graph.add_vertex(VertexKind.START, t0)
        current[es.min_index()] = (v.id, es)

    for idx, ev in enumerate(events):
        a, b, t = ev.a, ev.b, ev.time
        if ev.kind == EventKind.CONNECT:
            ra, rb = forest.component_of(a), forest.component_of(b)
            if ra == rb:
                forest.insert(a, b, deletion_after[idx])
                continue
            va, sa = current.pop(ra)
            vb, sb = current.pop(rb)
            v = graph.add_vertex(VertexKind.MERGE, t)
            graph.add_edge(va, v.id, sa)
            graph.add_edge(vb, v.id, sb)
            forest.insert(a, b, deletion_after[idx])
            current[forest.component_of(a)] = (v.id, sa | sb)
        else:
            root = forest.component_of(a)
            split = forest.delete(a, b)
            if not split:
                continue
            v_old, s_old = current.pop(root)
            v = graph.add_vertex(VertexKind.SPLIT, t)
            graph.add_edge(v_old, v.id, s_old)
            sa = EntitySet(n, forest.component_mask(a))
            sb = EntitySet(n, forest.component_mask(b))
            current[sa.min_index()] = (v.id, sa)
            current[sb.min_index()] = (v.id, sb)

    t_end = dataset.t_end
    for root in sorted(current):
        vid, es = current[root]
        v = graph.add_vertex(VertexKind.END, t_end)
        graph.add_edge(vid, v.id, es)
    return graph


def reduce_reeb(graph: ReebGraph, groups) -> ReebGraph:
    """Subgraph of the edges that support at least one reported maximal group.

    An edge supports a group G when G's entities are contained in the edge
    component and the time overlap is non-degenerate: positive length, or the
    edge itself is an instant inside the group's interval, or the single touch
    point is one of the group's interval endpoints.
    """
    keep: set[int] = set()
    for e in graph.edges.values():
        ei = graph.edge_interval(e)
        for g in groups:
            if not g.entities.issubset(e.component):
                continue
            inter = ei.intersection(g.interval)
            if inter is None:
                continue
            if inter.length > 0 or ei.length == 0 or inter.start in (g.interval.start, g.interval.end):
                keep.add(e.id)
                break
    sub = ReebGraph(graph.dataset)
    sub._next_vertex = graph._next_vertex
    sub._next_edge = graph._next_edge
    used_vertices = set()
    for eid in keep:
        e = graph.edges[eid]
        used_vertices.add(e.source)
        used_vertices.add(e.target)
    for vid in sorted(used_vertices):
        v = graph.vertices[vid]
        sub.vertices[vid] = ReebVertex(v.id, v.kind, v.time)
        sub._out[vid] = []
        sub._in[vid] = []
    for eid in sorted(keep):
        e = graph.edges[eid]
        sub.edges[eid] = ReebEdge(e.id, e.source, e.target, e.component)
        sub._out[e.source].append(eid)
        sub._in[e.target].append(eid)
    sub.meta["reduced_from_edges"] = len(graph.edges)
    return sub


def audit(graph: ReebGraph, samples: int = 0, rng: np.random.Generator | None = None,
          strict_degrees: bool = True) -> None:
    """Structural audit; raises InternalInvariantError on any violation.

    Checks the vertex degree table, the time ordering of every edge, the
    disjoint-union component law at merges and splits, and (optionally) that
    the edges spanning sampled times partition the full entity set.
    """
    n = graph.dataset.n
    full = EntitySet.full(n)
    for v in graph.vertices.values():
        indeg = len(graph._in[v.id])
        outdeg = len(graph._out[v.id])
        if strict_degrees and (indeg, outdeg) != _DEGREES[v.kind]:
            raise InternalInvariantError(
                f"vertex {v.id} kind {v.kind.value} has degrees ({indeg}, {outdeg})"
            )
    for e in graph.edges.values():
        if graph.vertices[e.source].time > graph.vertices[e.target].time:
            raise InternalInvariantError(f"edge {e.id} goes backwards in time")
        if not e.component:
            raise InternalInvariantError(f"edge {e.id} carries an empty component")
    for v in graph.vertices.values():
        ins = graph.in_edges(v.id)
        outs = graph.out_edges(v.id)
        if v.kind == VertexKind.MERGE and len(ins) == 2 and outs:
            if not ins[0].component.isdisjoint(ins[1].component):
                raise InternalInvariantError(f"merge {v.id} has overlapping inputs")
            if (ins[0].component | ins[1].component) != outs[0].component:
                raise InternalInvariantError(f"merge {v.id} breaks the union law")
        if v.kind == VertexKind.SPLIT and len(outs) == 2 and ins:
            if not outs[0].component.isdisjoint(outs[1].component):
                raise InternalInvariantError(f"split {v.id} has overlapping outputs")
            if (outs[0].component | outs[1].component) != ins[0].component:
                raise InternalInvariantError(f"split {v.id} breaks the union law")
    if samples:
        rng = rng or np.random.default_rng(0)
        vertex_times = sorted({v.time for v in graph.vertices.values()})
        lo, hi = vertex_times[0], vertex_times[-1]
        for _ in range(samples):
            t = float(rng.uniform(lo, hi))
            if any(abs(t - vt) < 1e-9 for vt in vertex_times):
                continue
            blocks = graph.partition_at(t)
            combined = EntitySet.empty(n)
            total = 0
            for block in blocks:
                es = EntitySet.of(n, block)
                if not combined.isdisjoint(es):
                    raise InternalInvariantError(f"overlapping components at t={t}")
                combined = combined | es
                total += len(es)
            if combined != full:
                raise InternalInvariantError(f"edges at t={t} do not cover all entities")
