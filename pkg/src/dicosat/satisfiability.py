"""Decide satisfiability of partial homology sets and build explaining cotrees.

The engine splits the vertex set recursively.  On a sub-problem ``W`` with
more than one vertex it looks at three graphs on ``W``:

* ``G0 = R1 + RX + F0``: if weakly disconnected, its components are joined
  under a ``0`` node (rule 1);
* ``G1 = R0 + RX + F1``: if weakly disconnected, joined under a ``1`` node
  (rule 2);
* ``GX = R0 + R1 + RX + reversed(FX)``: if it has several strongly connected
  components, they are joined under an ``X`` node, left to right along a
  topological order of the condensation (rule 3).

If no rule applies, the partial set is not satisfiable and ``W`` is returned
as the witness.  Which applicable rule is used does not change the verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cotree import Cotree, Inner, Leaf, relations_from_cotree
from .digraph import DiGraph, min_topological_order, scc_labels, weak_labels
from .relations import Instance, PartialHomologySet, induced, validate

__all__ = [
    "RuleOrder",
    "DEFAULT_ORDER",
    "SatOutcome",
    "InvariantError",
    "UNSAT_MESSAGE",
    "rule_graphs",
    "build_cotree",
    "is_satisfiable",
    "extend_to_full",
    "solve_pairs",
]

UNSAT_MESSAGE = "H is not satisfiable w.r.t. F"

# rule number -> label of the node it creates
RULE_LABEL = {1: "0", 2: "1", 3: "X"}

_R0, _R1, _RX, _F0, _F1, _FXR = range(6)


class InvariantError(AssertionError):
    """The engine produced a cotree that does not explain its input."""


@dataclass(frozen=True)
class RuleOrder:
    """Order in which rules 1, 2, 3 are tried.

    A fixed order is a permutation of ``(1, 2, 3)``.  ``RuleOrder.random(seed)``
    instead picks uniformly among the applicable rules at every step, drawing
    from a Philox stream seeded with ``seed``.
    """

    rules: tuple | None = (1, 2, 3)
    seed: int | None = None

    def __post_init__(self):
        if self.rules is None:
            if self.seed is None:
                raise ValueError("a random rule order needs a seed")
        elif sorted(self.rules) != [1, 2, 3]:
            raise ValueError(f"not a permutation of the rules: {self.rules}")
        else:
            object.__setattr__(self, "rules", tuple(self.rules))

    @classmethod
    def random(cls, seed: int) -> "RuleOrder":
        return cls(None, int(seed))

    @classmethod
    def parse(cls, text: str) -> "RuleOrder":
        """``"123"``-style digit permutations or ``"rand:<seed>"``."""
        text = text.strip()
        if text.startswith("rand:"):
            try:
                return cls.random(int(text[5:]))
            except ValueError:
                raise ValueError(f"bad seed in rule order {text!r}") from None
        if len(text) == 3 and sorted(text) == ["1", "2", "3"]:
            return cls(tuple(int(c) for c in text))
        raise ValueError(f"bad rule order {text!r}; expected a permutation of 123 or rand:<seed>")

    @property
    def is_random(self) -> bool:
        return self.rules is None

    def __str__(self) -> str:
        if self.rules is None:
            return f"rand:{self.seed}"
        return "".join(map(str, self.rules))


DEFAULT_ORDER = RuleOrder((1, 2, 3))
FIXED_ORDERS = tuple(RuleOrder(p) for p in itertools.permutations((1, 2, 3)))


@dataclass(frozen=True)
class SatOutcome:
    cotree: Cotree | None = None
    unsat_witness: frozenset | None = None
    violations: tuple = field(default=())

    @property
    def satisfiable(self) -> bool:
        return self.cotree is not None

    def __bool__(self) -> bool:
        return self.satisfiable


def rule_graphs(inst: Instance, w=None) -> tuple[DiGraph, DiGraph, DiGraph]:
    """The three rule graphs ``(G0, G1, GX)`` on ``w`` (default: all vertices).

    Vertices of the returned graphs are the members of ``w`` in declaration
    order; the graphs carry their names.
    """
    sub = inst if w is None else induced(inst, w)
    index = sub.index
    h, f = sub.h, sub.f

    def arcs(*rels):
        return frozenset((index[x], index[y]) for r in rels for x, y in r)

    rev_fx = [(y, x) for x, y in f.fx]
    g0 = arcs(h.r1, h.rx, f.f0)
    g1 = arcs(h.r0, h.rx, f.f1)
    gx = arcs(h.r0, h.r1, h.rx, rev_fx)
    n = len(sub.vertices)
    return (DiGraph(n, g0, sub.vertices), DiGraph(n, g1, sub.vertices), DiGraph(n, gx, sub.vertices))


# ---------------------------------------------------------------------------
# engine core


def _apply_rule(rule: int, k: int, lists) -> tuple[list[int], list[int]] | None:
    """Block labels and left-to-right block order if ``rule`` applies, else None."""
    if rule == 1:
        labels, count = weak_labels(k, lists[_R1], lists[_RX], lists[_F0])
        return (labels, list(range(count))) if count > 1 else None
    if rule == 2:
        labels, count = weak_labels(k, lists[_R0], lists[_RX], lists[_F1])
        return (labels, list(range(count))) if count > 1 else None
    succ: list[list[int]] = [[] for _ in range(k)]
    for a, b in lists[_R0]:
        succ[a].append(b)
        succ[b].append(a)
    for a, b in lists[_R1]:
        succ[a].append(b)
        succ[b].append(a)
    for a, b in lists[_RX]:
        succ[a].append(b)
    for a, b in lists[_FXR]:
        succ[a].append(b)
    labels, count = scc_labels(k, succ)
    if count == 1:
        return None
    cross = set()
    for a in range(k):
        la = labels[a]
        for b in succ[a]:
            lb = labels[b]
            if la != lb:
                cross.add((la, lb))
    return labels, min_topological_order(count, cross)


def solve_pairs(
    names: Sequence[str],
    r0, r1, rx, f0, f1, fx,
    order: RuleOrder = DEFAULT_ORDER,
) -> tuple[Cotree | None, frozenset | None]:
    """Run the engine on ordinal pair lists; returns ``(cotree, None)`` or ``(None, witness)``.

    ``r0``, ``r1``, ``f0``, ``f1`` need each unordered pair at least once (both
    directions are fine); ``rx`` and ``fx`` are directed arcs.  No validation
    is done here.
    """
    n = len(names)
    rng = np.random.Generator(np.random.Philox(order.seed)) if order.is_random else None
    lists = [list(r0), list(r1), list(rx), list(f0), list(f1), [(b, a) for a, b in fx]]

    # records[i] is a global vertex ordinal for leaves, (label, child ids) for inner nodes
    records: list = [None]
    stack = [(0, list(range(n)), lists)]
    while stack:
        nid, verts, cur = stack.pop()
        k = len(verts)
        if k == 1:
            records[nid] = verts[0]
            continue

        if rng is None:
            picked = None
            for rule in order.rules:
                res = _apply_rule(rule, k, cur)
                if res is not None:
                    picked = rule, res
                    break
        else:
            options = [(rule, res) for rule in (1, 2, 3) if (res := _apply_rule(rule, k, cur)) is not None]
            picked = options[int(rng.integers(len(options)))] if options else None
        if picked is None:
            return None, frozenset(names[v] for v in verts)

        rule, (labels, block_order) = picked
        count = len(block_order)
        pos = [0] * k
        members: list[list[int]] = [[] for _ in range(count)]
        for v in range(k):
            block = members[labels[v]]
            pos[v] = len(block)
            block.append(verts[v])
        sub = [[[] for _ in range(6)] for _ in range(count)]
        for t in range(6):
            for a, b in cur[t]:
                la = labels[a]
                if la == labels[b]:
                    sub[la][t].append((pos[a], pos[b]))

        first = len(records)
        records.extend([None] * count)
        child_ids = []
        for slot, block in enumerate(block_order):
            cid = first + slot
            child_ids.append(cid)
            if len(members[block]) == 1:
                records[cid] = members[block][0]
        records[nid] = (RULE_LABEL[rule], child_ids)
        # push right to left so the leftmost child is expanded first
        for slot in range(count - 1, -1, -1):
            block = block_order[slot]
            if len(members[block]) > 1:
                stack.append((first + slot, members[block], sub[block]))

    built: list = [None] * len(records)
    for i in range(len(records) - 1, -1, -1):
        rec = records[i]
        if isinstance(rec, tuple):
            built[i] = Inner(rec[0], tuple(built[c] for c in rec[1]))
        else:
            built[i] = Leaf(names[rec])
    return Cotree(built[0], check=False), None


def _ordinal_pairs(inst: Instance):
    index = inst.index

    def undirected(r):
        return [(index[x], index[y]) for x, y in r if index[x] < index[y]]

    def directed(r):
        return [(index[x], index[y]) for x, y in r]

    h, f = inst.h, inst.f
    return (undirected(h.r0), undirected(h.r1), directed(h.rx),
            undirected(f.f0), undirected(f.f1), directed(f.fx))


def build_cotree(inst: Instance, order: RuleOrder = DEFAULT_ORDER, verify: bool = False) -> SatOutcome:
    """Build a canonical cotree explaining ``inst.h`` while avoiding ``inst.f``.

    Invalid instances return an outcome carrying the violations.  Unsatisfiable
    ones return the vertex set of the sub-problem on which no rule applied.
    With ``verify=True`` the result is re-checked against the input and an
    :class:`InvariantError` is raised on mismatch.
    """
    violations = validate(inst)
    if violations:
        return SatOutcome(violations=tuple(violations))
    tree, witness = solve_pairs(inst.vertices, *_ordinal_pairs(inst), order=order)
    if tree is None:
        return SatOutcome(unsat_witness=witness)
    if verify:
        _verify(inst, tree)
    return SatOutcome(cotree=tree)


def _verify(inst: Instance, tree: Cotree) -> None:
    if sorted(tree.leaves()) != sorted(inst.vertices):
        raise InvariantError("cotree leaves differ from the vertex set")
    if not tree.is_canonical():
        raise InvariantError("cotree is not canonical")
    full = relations_from_cotree(tree)
    for got, want, forbidden in zip(full.components(), inst.h.components(), inst.f.components()):
        if not want.pairs <= got.pairs:
            raise InvariantError("cotree does not explain the partial set")
        if got.pairs & forbidden.pairs:
            raise InvariantError("cotree uses a forbidden pair")


def is_satisfiable(inst: Instance, order: RuleOrder = DEFAULT_ORDER) -> bool:
    return build_cotree(inst, order).satisfiable


def extend_to_full(inst: Instance, order: RuleOrder = DEFAULT_ORDER) -> PartialHomologySet | None:
    """A full set extending ``inst.h`` and avoiding ``inst.f``, or None if unsatisfiable."""
    out = build_cotree(inst, order)
    if out.cotree is None:
        return None
    return relations_from_cotree(out.cotree)
