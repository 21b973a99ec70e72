"""Dynamic connectivity via a maximum-weight spanning forest.

Edge weights are scheduled deletion times. Under that discipline a forest edge
deleted at its own weight never has a replacement: any non-forest edge across
the cut would have weight <= the deleted edge's weight (max-weight invariant),
yet every live edge's deletion time lies in the future. Deletes therefore
split components outright, and only inserts need a tree-path search.

The structure is adjacency dicts plus per-component bitmasks with
smaller-side relabelling; every operation is O(component size) worst case,
which is fast enough for the acceptance workloads (see design notes).
"""

from __future__ import annotations

from .model import DataError


class DuplicateEdge(DataError):
    pass


class MissingEdge(DataError):
    pass


def _key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class SpanningForest:
    """Maximum-weight spanning forest over n vertices with explicit weights."""

    def __init__(self, n: int):
        self.n = n
        self._adj: list[dict[int, float]] = [dict() for _ in range(n)]
        self._nonforest: dict[tuple[int, int], float] = {}
        self._comp: list[int] = list(range(n))        # vertex -> component id
        self._members: dict[int, int] = {i: 1 << i for i in range(n)}
        self._next_id = n

    # -- queries ---------------------------------------------------------

    def same_component(self, a: int, b: int) -> bool:
        return self._comp[a] == self._comp[b]

    def component_of(self, a: int) -> int:
        """Canonical component label: the minimum entity index in the component."""
        mask = self._members[self._comp[a]]
        return (mask & -mask).bit_length() - 1

    def component_mask(self, a: int) -> int:
        return self._members[self._comp[a]]

    def component_masks(self) -> list[int]:
        return list(self._members.values())

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj[a] or _key(a, b) in self._nonforest

    def forest_edges(self) -> list[tuple[int, int, float]]:
        out = []
        for a, nbrs in enumerate(self._adj):
            for b, w in nbrs.items():
                if a < b:
                    out.append((a, b, w))
        return out

    def nonforest_edges(self) -> list[tuple[int, int, float]]:
        return [(a, b, w) for (a, b), w in self._nonforest.items()]

    # -- updates ---------------------------------------------------------

    def insert(self, a: int, b: int, weight: float) -> None:
        """Add edge (a, b) with its scheduled deletion time as weight."""
        if a == b:
            raise DuplicateEdge(f"self loop ({a}, {b})")
        if self.has_edge(a, b):
            raise DuplicateEdge(f"edge ({a}, {b}) already present")
        ca, cb = self._comp[a], self._comp[b]
        if ca != cb:
            self._adj[a][b] = weight
            self._adj[b][a] = weight
            small, big = (ca, cb) if self._members[ca].bit_count() <= self._members[cb].bit_count() else (cb, ca)
            mask = self._members.pop(small)
            self._members[big] |= mask
            while mask:
                low = mask & -mask
                self._comp[low.bit_length() - 1] = big
                mask ^= low
            return
        # cycle: evict the minimum-weight edge on the tree path if lighter
        path = self._tree_path(a, b)
        min_u, min_v, min_w = path[0]
        for u, v, w in path[1:]:
            if w < min_w:
                min_u, min_v, min_w = u, v, w
        if weight > min_w:
            del self._adj[min_u][min_v]
            del self._adj[min_v][min_u]
            self._nonforest[_key(min_u, min_v)] = min_w
            self._adj[a][b] = weight
            self._adj[b][a] = weight
        else:
            self._nonforest[_key(a, b)] = weight

    def delete(self, a: int, b: int) -> bool:
        """Remove edge (a, b); returns True iff the component split."""
        k = _key(a, b)
        if k in self._nonforest:
            del self._nonforest[k]
            return False
        if b not in self._adj[a]:
            raise MissingEdge(f"edge ({a}, {b}) not present")
        del self._adj[a][b]
        del self._adj[b][a]
        side = self._smaller_side(a, b)
        old_id = self._comp[a]
        new_id = self._next_id
        self._next_id += 1
        mask = 0
        for v in side:
            self._comp[v] = new_id
            mask |= 1 << v
        self._members[new_id] = mask
        self._members[old_id] &= ~mask
        return True

    # -- internals -------------------------------------------------------

    def _tree_path(self, a: int, b: int) -> list[tuple[int, int, float]]:
        """Edges on the forest path from a to b (both in one component)."""
        parent: dict[int, int] = {a: a}
        stack = [a]
        while stack:
            u = stack.pop()
            if u == b:
                break
            for v in self._adj[u]:
                if v not in parent:
                    parent[v] = u
                    stack.append(v)
        if b not in parent:
            raise MissingEdge(f"no forest path between {a} and {b}")
        path = []
        v = b
        while v != a:
            u = parent[v]
            path.append((u, v, self._adj[u][v]))
            v = u
        return path

    def _smaller_side(self, a: int, b: int) -> list[int]:
        """After removing forest edge (a, b): the first side to be fully explored.

        Both sides are expanded in lockstep, so the cost is proportional to the
        smaller side.
        """
        seen_a, seen_b = {a}, {b}
        stack_a, stack_b = [a], [b]
        while stack_a and stack_b:
            u = stack_a.pop()
            for v in self._adj[u]:
                if v not in seen_a:
                    seen_a.add(v)
                    stack_a.append(v)
            u = stack_b.pop()
            for v in self._adj[u]:
                if v not in seen_b:
                    seen_b.add(v)
                    stack_b.append(v)
        if not stack_a and not stack_b:
            return sorted(min(seen_a, seen_b, key=len))
        return sorted(seen_a if not stack_a else seen_b)
