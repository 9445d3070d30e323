"""Small directed-graph engine over vertex ordinals ``0..n-1``.

Provides weak and strong components, quotient graphs, a deterministic
topological order and the complement.  Component blocks are always listed by
smallest member, members ascending.

The label-level helpers (:func:`weak_labels`, :func:`scc_labels`) work on raw
pair lists and are what the satisfiability engine calls in its inner loop.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "DiGraph",
    "Partition",
    "CycleDetected",
    "connected_components",
    "strongly_connected_components",
    "quotient",
    "topological_order",
    "complement",
    "weak_labels",
    "scc_labels",
    "min_topological_order",
]


class CycleDetected(ValueError):
    def __init__(self, cycle: list[int]):
        self.cycle = cycle
        super().__init__(f"graph has a cycle through {cycle}")


@dataclass(frozen=True)
class DiGraph:
    """Irreflexive digraph on ``0..n-1``; ``names`` optionally labels the vertices."""

    n: int
    arcs: frozenset = frozenset()
    names: tuple | None = None

    def __post_init__(self):
        arcs = frozenset((int(a), int(b)) for a, b in self.arcs)
        for a, b in arcs:
            if a == b:
                raise ValueError(f"self-loop at {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"arc ({a}, {b}) out of range for n={self.n}")
        object.__setattr__(self, "arcs", arcs)
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.n or len(set(names)) != self.n:
                raise ValueError("names must be distinct, one per vertex")
            object.__setattr__(self, "names", names)

    @cached_property
    def succ(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.arcs:
            out[a].append(b)
        return tuple(tuple(sorted(s)) for s in out)

    def label(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)

    def induced(self, w: Iterable[int]) -> "DiGraph":
        """Subgraph on ``w``, renumbered in ascending order of the old ordinals."""
        keep = sorted(set(w))
        pos = {v: i for i, v in enumerate(keep)}
        arcs = {(pos[a], pos[b]) for a, b in self.arcs if a in pos and b in pos}
        names = tuple(self.label(v) for v in keep) if self.names is not None else None
        return DiGraph(len(keep), frozenset(arcs), names)


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks covering ``0..n-1``, ordered by smallest member."""

    blocks: tuple
    labels: tuple

    @classmethod
    def from_labels(cls, labels: Sequence[int], count: int | None = None) -> "Partition":
        labels = _normalize(list(labels))
        if count is None:
            count = max(labels, default=-1) + 1
        blocks: list[list[int]] = [[] for _ in range(count)]
        for v, c in enumerate(labels):
            blocks[c].append(v)
        return cls(tuple(tuple(b) for b in blocks), tuple(labels))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int) -> "Partition":
        labels = [-1] * n
        for i, block in enumerate(blocks):
            for v in block:
                if labels[v] != -1:
                    raise ValueError(f"vertex {v} in two blocks")
                labels[v] = i
        if -1 in labels:
            raise ValueError(f"vertex {labels.index(-1)} not covered")
        return cls.from_labels(labels)

    def __len__(self) -> int:
        return len(self.blocks)


def _normalize(labels: list[int]) -> list[int]:
    """Renumber labels by first appearance, so block order = smallest member order."""
    remap: dict[int, int] = {}
    out = []
    for c in labels:
        r = remap.get(c)
        if r is None:
            r = remap[c] = len(remap)
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# label-level primitives


def weak_labels(n: int, *pair_lists: Iterable[tuple[int, int]]) -> tuple[list[int], int]:
    """Weakly connected component label per vertex (normalized) and the count.

    Every pair in every list is treated as an undirected edge.
    """
    parent = list(range(n))
    merged = 0
    for pairs in pair_lists:
        for a, b in pairs:
            # find with path halving
            while parent[a] != a:
                parent[a] = a = parent[parent[a]]
            while parent[b] != b:
                parent[b] = b = parent[parent[b]]
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
                merged += 1
                if merged == n - 1:
                    return [0] * n, 1
    labels = [0] * n
    remap: dict[int, int] = {}
    for v in range(n):
        r = v
        while parent[r] != r:
            r = parent[r]
        parent[v] = r
        c = remap.get(r)
        if c is None:
            c = remap[r] = len(remap)
        labels[v] = c
    return labels, len(remap)


def scc_labels(n: int, succ: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """Strongly connected component label per vertex (normalized) and the count.

    Iterative Tarjan; ``succ[v]`` lists the successors of ``v``.
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    ncomp = 0
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return _normalize(comp), ncomp


def min_topological_order(k: int, arcs: Iterable[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm, always emitting the smallest available vertex.

    Raises :class:`CycleDetected` with one witness cycle if the graph is cyclic.
    """
    succ: list[set[int]] = [set() for _ in range(k)]
    indeg = [0] * k
    for a, b in arcs:
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    heap = [v for v in range(k) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) < k:
        raise CycleDetected(_find_cycle(k, succ, set(range(k)) - set(order)))
    return order


def _find_cycle(k: int, succ: list[set[int]], rest: set[int]) -> list[int]:
    # every leftover vertex keeps a leftover predecessor; walk back until a repeat
    pred: dict[int, int] = {}
    for a in rest:
        for b in succ[a]:
            if b in rest:
                pred.setdefault(b, a)
    v = min(rest)
    seen: dict[int, int] = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = pred[v]
    cycle = path[seen[v]:]
    cycle.reverse()
    return cycle


# ---------------------------------------------------------------------------
# graph-level API


def connected_components(g: DiGraph) -> Partition:
    labels, count = weak_labels(g.n, g.arcs)
    return Partition.from_labels(labels, count)


def strongly_connected_components(g: DiGraph) -> Partition:
    labels, count = scc_labels(g.n, g.succ)
    return Partition.from_labels(labels, count)


def quotient(g: DiGraph, p: Partition) -> DiGraph:
    """One vertex per block; arc between blocks iff some arc crosses between them."""
    if len(p.labels) != g.n:
        raise ValueError("partition does not match graph size")
    lab = p.labels
    arcs = {(lab[a], lab[b]) for a, b in g.arcs if lab[a] != lab[b]}
    return DiGraph(len(p.blocks), frozenset(arcs))


def topological_order(g: DiGraph) -> list[int]:
    return min_topological_order(g.n, g.arcs)


def complement(g: DiGraph) -> DiGraph:
    n = g.n
    arcs = frozenset((a, b) for a in range(n) for b in range(n) if a != b and (a, b) not in g.arcs)
    return DiGraph(n, arcs, g.names)
