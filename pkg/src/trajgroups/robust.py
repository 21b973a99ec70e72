"""Robust grouping: absorb brief group interruptions into the Reeb graph.

Split vertices move forward in time and merge vertices backward, all at the
same rate; the only structural changes happen when a split meets a later
merge along a shared edge. If the two vertices are joined by two parallel
edges the pair collapses (a component that split and immediately remerged);
otherwise the pair passes, rewiring locally to merge-before-split. Applying
all encounters up to half the robustness window and then shifting the
surviving split/merge times by that half-window yields the graph whose
maximal groups are the robust ones.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .model import EntitySet
from .reeb import InternalInvariantError, ReebGraph, VertexKind


@dataclass(frozen=True)
class Encounter:
    """A split/merge pair scheduled to meet when the window half-width reaches gamma."""

    gamma: float
    split_vertex: int
    merge_vertex: int
    generation: tuple[int, int] = (0, 0)

    def heap_key(self):
        return (self.gamma, self.split_vertex, self.merge_vertex)


def _qualifying_pairs(graph: ReebGraph, vid: int, alpha: float):
    """Split-to-merge edges incident to vid whose duration is within alpha."""
    for e in list(graph.in_edges(vid)) + list(graph.out_edges(vid)):
        u, v = e.source, e.target
        if (
            graph.vertices[u].kind == VertexKind.SPLIT
            and graph.vertices[v].kind == VertexKind.MERGE
        ):
            duration = graph.vertices[v].time - graph.vertices[u].time
            if 0.0 <= duration <= alpha:
                yield u, v, duration


def find_initial_encounters(graph: ReebGraph, alpha: float) -> list[Encounter]:
    """All qualifying split-to-merge edges, as a heap ordered by (gamma, ids)."""
    found: set[tuple[int, int]] = set()
    heap: list[tuple[tuple, Encounter]] = []
    for e in graph.edges.values():
        u, v = e.source, e.target
        if (u, v) in found:
            continue
        if (
            graph.vertices[u].kind == VertexKind.SPLIT
            and graph.vertices[v].kind == VertexKind.MERGE
        ):
            duration = graph.vertices[v].time - graph.vertices[u].time
            if 0.0 <= duration <= alpha:
                found.add((u, v))
                enc = Encounter(duration / 2.0, u, v)
                heap.append((enc.heap_key(), enc))
    heapq.heapify(heap)
    return [enc for _, enc in heap]


def robustify(graph: ReebGraph, alpha: float) -> ReebGraph:
    """Process all encounters with gamma <= alpha/2 and shift the vertex times.

    With alpha == 0 the result is a structurally identical copy. The returned
    graph records the number of collapse and passing encounters in
    ``meta["collapses"]`` / ``meta["passings"]``.
    """
    g = graph.copy()
    g.meta["alpha"] = alpha
    g.meta["collapses"] = 0
    g.meta["passings"] = 0
    if alpha == 0:
        return g

    gen: dict[int, int] = {vid: 0 for vid in g.vertices}
    heap: list[tuple[float, int, int, int, int]] = []

    def push_pairs(vid: int) -> None:
        for u, v, duration in _qualifying_pairs(g, vid, alpha):
            heapq.heappush(heap, (duration / 2.0, u, v, gen[u], gen[v]))

    for enc in find_initial_encounters(g, alpha):
        u, v = enc.split_vertex, enc.merge_vertex
        heapq.heappush(heap, (enc.gamma, u, v, gen[u], gen[v]))

    def bump_and_rescan(vids) -> None:
        for vid in vids:
            if vid in g.vertices:
                gen[vid] += 1
        for vid in vids:
            if vid in g.vertices:
                push_pairs(vid)

    last_gamma = 0.0
    while heap:
        gamma, u, v, gu, gv = heapq.heappop(heap)
        if u not in g.vertices or v not in g.vertices:
            continue
        if gen[u] != gu or gen[v] != gv:
            continue
        if g.vertices[u].kind != VertexKind.SPLIT or g.vertices[v].kind != VertexKind.MERGE:
            continue
        joining = [e for e in g.out_edges(u) if e.target == v]
        if not joining:
            continue
        if gamma < last_gamma - 1e-12:
            raise InternalInvariantError("encounters popped out of gamma order")
        last_gamma = max(last_gamma, gamma)

        if len(joining) == 2:
            # collapse: the component split and remerged; both vertices vanish
            (p,) = g.in_edges(u)
            (c,) = g.out_edges(v)
            if p.id == c.id or p.source == u or c.target == v:
                raise InternalInvariantError("degenerate collapse configuration")
            if p.component != c.component:
                raise InternalInvariantError("collapse outer components differ")
            src, tgt, comp = p.source, c.target, p.component
            for eid in (joining[0].id, joining[1].id, p.id, c.id):
                g.remove_edge(eid)
            g.remove_vertex(u)
            g.remove_vertex(v)
            g.add_edge(src, tgt, comp)
            g.meta["collapses"] += 1
            bump_and_rescan((src, tgt))
        else:
            # passing: rewire to merge-before-split
            (e,) = joining
            (p,) = g.in_edges(u)
            a_edges = [x for x in g.out_edges(u) if x.id != e.id]
            b_edges = [x for x in g.in_edges(v) if x.id != e.id]
            (c,) = g.out_edges(v)
            if len(a_edges) != 1 or len(b_edges) != 1:
                raise InternalInvariantError("passing endpoints have bad degrees")
            a, b = a_edges[0], b_edges[0]
            if p.id in (e.id, a.id, b.id, c.id) or c.id in (e.id, a.id, b.id):
                raise InternalInvariantError("degenerate passing configuration")
            if not p.component.isdisjoint(b.component):
                raise InternalInvariantError("passing components overlap")
            g.retarget_edge(p.id, v)
            g.resource_edge(c.id, u)
            g.resource_edge(e.id, v)
            g.retarget_edge(e.id, u)
            e.component = p.component | b.component
            if (a.component | c.component) != e.component:
                raise InternalInvariantError("passing breaks the union law")
            g.meta["passings"] += 1
            bump_and_rescan((u, v, p.source, c.target))

    half = alpha / 2.0
    t0, t_end = g.dataset.t0, g.dataset.t_end
    for v in g.vertices.values():
        if v.kind == VertexKind.SPLIT:
            v.time = min(v.time + half, t_end)
        elif v.kind == VertexKind.MERGE:
            v.time = max(v.time - half, t0)
    for e in g.edges.values():
        if g.vertices[e.source].time > g.vertices[e.target].time + 1e-12:
            raise InternalInvariantError(
                f"edge {e.id} inverted after shifting: "
                f"{g.vertices[e.source].time} > {g.vertices[e.target].time}"
            )
        # guard against clean inversions from exact arithmetic
        if g.vertices[e.source].time > g.vertices[e.target].time:
            g.vertices[e.target].time = g.vertices[e.source].time
    return g
