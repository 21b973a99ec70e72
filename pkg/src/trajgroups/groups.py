"""Maximal groups from the Reeb graph via per-edge grouping trees.

Every Reeb edge carries a laminar tree whose nodes are the groups discovered
so far on that edge, each with the first time its members were together.
Merges stack two trees under a fresh root in O(1); splits partition a tree
bottom-up, ending every node whose members separate. A record is reported
once it ends (at a split or at the end of the window), subject to the size
and duration filters, and records covered by a superset group on a superset
interval are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import DataError, EntitySet, Interval
from .reeb import ReebGraph, VertexKind


class PartitionMismatch(DataError):
    pass


class OverlappingLeaves(DataError):
    pass


@dataclass(frozen=True)
class MaximalGroup:
    entities: EntitySet
    interval: Interval

    def sort_key(self):
        return (self.interval.start, self.interval.end, len(self.entities), self.entities.indices())


class GroupNode:
    """One discovered group: member bitmask, first-together time, subgroup children."""

    __slots__ = ("members", "start", "children")

    def __init__(self, members: int, start: float, children=None):
        self.members = members
        self.start = start
        self.children: list[GroupNode] = children or []

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)


@dataclass
class GroupingTree:
    """Laminar tree of the groups alive on one Reeb edge."""

    root: GroupNode
    capacity: int

    @classmethod
    def component(cls, members: EntitySet, start: float) -> "GroupingTree":
        return cls(GroupNode(members.mask, start), members.capacity)

    def nodes(self) -> list[GroupNode]:
        return list(self.root.walk())


def merge_trees(t1: GroupingTree, t2: GroupingTree, t_v: float) -> GroupingTree:
    """New root (union, t_v) over the two roots; the inputs are absorbed."""
    if t1.capacity != t2.capacity:
        raise OverlappingLeaves("capacity mismatch")
    if t1.root.members & t2.root.members:
        raise OverlappingLeaves("merging trees with shared entities")
    root = GroupNode(t1.root.members | t2.root.members, t_v, [t1.root, t2.root])
    return GroupingTree(root, t1.capacity)


def split_tree(
    tree: GroupingTree, left: EntitySet, right: EntitySet, t_v: float
) -> tuple[GroupingTree | None, GroupingTree | None, list[MaximalGroup]]:
    """Partition a tree across a split at time t_v.

    Nodes with members on both sides end (returned, unfiltered, as groups on
    [node start, t_v]); nodes wholly on one side survive into that side's
    tree. A surviving set keeps the earliest start among the original nodes
    containing it, which the bottom-up contraction realises by preferring the
    deepest node's result whenever a projection coincides with a single
    child's.
    """
    lm, rm = left.mask, right.mask
    cap = tree.capacity
    if lm & rm or (lm | rm) != tree.root.members:
        raise PartitionMismatch("split sides must partition the edge component")

    ended: list[MaximalGroup] = []
    results: dict[int, tuple[GroupNode | None, GroupNode | None]] = {}

    # iterative post-order; nodes wholly on one side are kept intact unsplit
    stack: list[tuple[GroupNode, bool]] = [(tree.root, False)]
    while stack:
        node, expanded = stack.pop()
        on_left = bool(node.members & lm)
        on_right = bool(node.members & rm)
        if not (on_left and on_right):
            results[id(node)] = (node, None) if on_left else (None, node)
            continue
        if not expanded:
            stack.append((node, True))
            for c in node.children:
                stack.append((c, False))
            continue
        # straddling node: it ends here, its projections feed the new trees
        ended.append(
            MaximalGroup(EntitySet(cap, node.members), Interval(node.start, t_v))
        )
        lefts: list[GroupNode] = []
        rights: list[GroupNode] = []
        for c in node.children:
            cl, cr = results.pop(id(c))
            if cl is not None:
                lefts.append(cl)
            if cr is not None:
                rights.append(cr)
        if len(lefts) > 1:
            lnode = GroupNode(node.members & lm, node.start, lefts)
        elif lefts:
            lnode = lefts[0]  # contraction: deeper node keeps its earlier start
        else:
            lnode = GroupNode(node.members & lm, node.start)
        if len(rights) > 1:
            rnode = GroupNode(node.members & rm, node.start, rights)
        elif rights:
            rnode = rights[0]
        else:
            rnode = GroupNode(node.members & rm, node.start)
        results[id(node)] = (lnode, rnode)

    lroot, rroot = results.pop(id(tree.root))
    if lroot is not None and lroot.members != lm:
        raise PartitionMismatch("left projection does not match the split side")
    if rroot is not None and rroot.members != rm:
        raise PartitionMismatch("right projection does not match the split side")
    ltree = GroupingTree(lroot, cap) if lroot is not None else None
    rtree = GroupingTree(rroot, cap) if rroot is not None else None
    return ltree, rtree, ended


def _discard_covered(batch: list[tuple[int, float]]) -> list[int]:
    """Indices of batch records not covered by another record in the batch.

    All records in a batch share their end time, so (mask, start) suffices:
    covered means a proper-superset mask with the same start.
    """
    keep = []
    for i, (g, s) in enumerate(batch):
        covered = False
        for h, hs in batch:
            if h != g and (g & h) == g and hs <= s:
                covered = True
                break
        if not covered:
            keep.append(i)
    return keep


def compute_maximal_groups(graph: ReebGraph, m: int = 1, delta: float = 0.0) -> list[MaximalGroup]:
    """All maximal groups of size >= m lasting >= delta, from a built Reeb graph.

    The sweep itself runs with no filters; size/duration are applied when a
    record ends, and covered records (superset group on a superset interval,
    which can only share the same end event) are dropped there too.
    """
    n = graph.dataset.n
    trees: dict[int, GroupingTree] = {}
    seen: set[tuple[int, float, float]] = set()
    out: list[MaximalGroup] = []

    def report(batch: list[MaximalGroup]) -> None:
        raw = [(g.entities.mask, g.interval.start) for g in batch]
        for i in _discard_covered(raw):
            g = batch[i]
            if len(g.entities) < m or g.interval.length < delta:
                continue
            key = (g.entities.mask, g.interval.start, g.interval.end)
            if key not in seen:
                seen.add(key)
                out.append(g)

    for vid in graph.topological_order():
        v = graph.vertices[vid]
        ins = graph.in_edges(vid)
        outs = graph.out_edges(vid)
        if v.kind == VertexKind.START:
            (e,) = outs
            trees[e.id] = GroupingTree.component(e.component, v.time)
        elif v.kind == VertexKind.MERGE:
            e1, e2 = sorted(ins, key=lambda e: e.id)
            (e,) = outs
            trees[e.id] = merge_trees(trees.pop(e1.id), trees.pop(e2.id), v.time)
        elif v.kind == VertexKind.SPLIT:
            (e,) = ins
            e1, e2 = sorted(outs, key=lambda e: e.id)
            ltree, rtree, ended = split_tree(
                trees.pop(e.id), e1.component, e2.component, v.time
            )
            report(ended)
            if ltree is None or rtree is None or ltree.root.members != e1.component.mask:
                raise PartitionMismatch("split outputs do not match outgoing edges")
            trees[e1.id] = ltree
            trees[e2.id] = rtree
        else:  # END: every node of the incoming tree ends here
            (e,) = ins
            tree = trees.pop(e.id)
            batch = [
                MaximalGroup(EntitySet(n, node.members), Interval(node.start, v.time))
                for node in tree.nodes()
            ]
            report(batch)

    out.sort(key=MaximalGroup.sort_key)
    return out
