"""Ordered, event-labeled cotrees.

Leaves carry vertex names; inner nodes carry one of the labels ``"0"``
(union / duplication), ``"1"`` (join / speciation) or ``"X"`` (directed join /
horizontal transfer, read left to right).  Child order matters under ``X``.

All traversals are iterative, so very deep trees are fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .relations import (
    ORTHOLOG,
    PARALOG,
    UNASSIGNED,
    XENO_BWD,
    XENO_FWD,
    Mode,
    ParseError,
    PartialHomologySet,
    RelationSet,
    check_name,
)

__all__ = [
    "LABELS",
    "Leaf",
    "Inner",
    "Cotree",
    "relations_from_cotree",
    "canonicalize",
    "parse_cotree",
    "serialize_cotree",
    "cotree_matrix",
]

LABELS = ("0", "1", "X")


@dataclass(frozen=True)
class Leaf:
    name: str


@dataclass(frozen=True, eq=False)
class Inner:
    label: str
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if self.label not in LABELS:
            raise ValueError(f"bad inner label {self.label!r}")
        if len(self.children) < 2:
            raise ValueError("inner nodes need at least two children")

    def __eq__(self, other):
        if not isinstance(other, Inner):
            return NotImplemented
        return _same_shape(self, other)

    def __hash__(self):
        return hash(serialize_cotree(Cotree(self, check=False)))


Node = Union[Leaf, Inner]


def _same_shape(a: Node, b: Node) -> bool:
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if isinstance(x, Leaf) or isinstance(y, Leaf):
            if x != y:
                return False
            continue
        if x.label != y.label or len(x.children) != len(y.children):
            return False
        stack.extend(zip(x.children, y.children))
    return True


def _preorder(root: Node) -> Iterator[Node]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Inner):
            stack.extend(reversed(node.children))


class Cotree:
    """Rooted ordered tree over distinct leaf names.

    Structural checks (labels, at least two children per inner node, distinct
    leaves) run on construction unless ``check=False``.  Canonical form, where
    no inner node repeats its parent's label, is optional; see
    :meth:`is_canonical` and :func:`canonicalize`.
    """

    __slots__ = ("root", "_leaves")

    def __init__(self, root: Node, check: bool = True):
        self.root = root
        self._leaves = None
        if check:
            names = self.leaves()
            if len(set(names)) != len(names):
                seen = set()
                dup = next(v for v in names if v in seen or seen.add(v))
                raise ValueError(f"duplicate leaf {dup!r}")
            for v in names:
                check_name(v)

    @classmethod
    def leaf(cls, name: str) -> "Cotree":
        return cls(Leaf(name))

    def leaves(self) -> list[str]:
        """Leaf names in left-to-right order."""
        if self._leaves is None:
            self._leaves = [n.name for n in _preorder(self.root) if isinstance(n, Leaf)]
        return list(self._leaves)

    def nodes(self) -> Iterator[Node]:
        return _preorder(self.root)

    def inner_nodes(self) -> Iterator[Inner]:
        return (n for n in _preorder(self.root) if isinstance(n, Inner))

    def is_canonical(self) -> bool:
        for node in self.inner_nodes():
            for c in node.children:
                if isinstance(c, Inner) and c.label == node.label:
                    return False
        return True

    def __len__(self) -> int:
        return len(self.leaves())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cotree):
            return NotImplemented
        return _same_shape(self.root, other.root)

    def __hash__(self):
        return hash(serialize_cotree(self))

    def __repr__(self) -> str:
        return f"Cotree({serialize_cotree(self)!r})"

    def __str__(self) -> str:
        return serialize_cotree(self)


def _child_leaf_blocks(tree: Cotree):
    """Yield ``(label, [leaves of child 1], [leaves of child 2], ...)`` per inner node."""
    # post-order: leaf lists of children are ready before their parent
    order = list(_preorder(tree.root))
    leaves: dict[int, list[str]] = {}
    for node in reversed(order):
        if isinstance(node, Leaf):
            leaves[id(node)] = [node.name]
            continue
        blocks = [leaves.pop(id(c)) for c in node.children]
        yield node.label, blocks
        merged = []
        for b in blocks:
            merged.extend(b)
        leaves[id(node)] = merged


def relations_from_cotree(tree: Cotree) -> PartialHomologySet:
    """The full homology set explained by ``tree``.

    For each inner node and each pair of its children, all leaf pairs across
    the two children get the node's label; under ``X`` the leaf from the left
    child is the arc source.  Every leaf pair is visited exactly once, so the
    cost is quadratic in the number of leaves.
    """
    r0, r1, rx = set(), set(), set()
    for label, blocks in _child_leaf_blocks(tree):
        for i, left in enumerate(blocks):
            for right in blocks[i + 1:]:
                if label == "X":
                    rx.update((a, b) for a in left for b in right)
                else:
                    target = r0 if label == "0" else r1
                    for a in left:
                        for b in right:
                            target.add((a, b))
                            target.add((b, a))
    return PartialHomologySet(
        RelationSet(frozenset(r0), Mode.SYMMETRIC),
        RelationSet(frozenset(r1), Mode.SYMMETRIC),
        RelationSet(frozenset(rx), Mode.ANTISYMMETRIC),
    )


def cotree_matrix(tree: Cotree, vertices) -> np.ndarray:
    """Pair-code matrix (see :func:`dicosat.relations.to_matrix`) of the full set of ``tree``."""
    index = {v: i for i, v in enumerate(vertices)}
    n = len(index)
    m = np.full((n, n), UNASSIGNED, dtype=np.int8)
    for label, blocks in _child_leaf_blocks(tree):
        idx = [np.fromiter((index[v] for v in b), dtype=np.intp, count=len(b)) for b in blocks]
        for i, left in enumerate(idx):
            for right in idx[i + 1:]:
                if label == "X":
                    m[np.ix_(left, right)] = XENO_FWD
                    m[np.ix_(right, left)] = XENO_BWD
                else:
                    code = PARALOG if label == "0" else ORTHOLOG
                    m[np.ix_(left, right)] = code
                    m[np.ix_(right, left)] = code
    return m


def canonicalize(tree: Cotree) -> Cotree:
    """Contract every inner child that repeats its parent's label.

    The child's children are spliced in at its position, so the left-to-right
    leaf order and the explained relations are unchanged.
    """
    order = list(_preorder(tree.root))
    done: dict[int, Node] = {}
    for node in reversed(order):
        if isinstance(node, Leaf):
            done[id(node)] = node
            continue
        kids = []
        for c in node.children:
            c2 = done.pop(id(c))
            if isinstance(c2, Inner) and c2.label == node.label:
                kids.extend(c2.children)
            else:
                kids.append(c2)
        done[id(node)] = Inner(node.label, tuple(kids))
    return Cotree(done[id(tree.root)], check=False)


# ---------------------------------------------------------------------------
# text format: leaves by name, inner node "(" children ")" label, ending ";"

_DELIMS = set("(),;")


def serialize_cotree(tree: Cotree) -> str:
    out: list[str] = []
    # stack items: node to emit, or a closing string
    stack: list = [tree.root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, Leaf):
            out.append(item.name)
        else:
            out.append("(")
            stack.append(")" + item.label)
            kids = item.children
            for i in range(len(kids) - 1, -1, -1):
                stack.append(kids[i])
                if i:
                    stack.append(",")
    out.append(";")
    return "".join(out)


def parse_cotree(text: str) -> Cotree:
    """Parse the output of :func:`serialize_cotree`.  Whitespace between tokens is ignored."""
    s = text
    n = len(s)
    i = 0
    # frames of children collected for each open "("; the bottom frame is the whole tree
    frames: list[tuple[int, list[Node]]] = [(-1, [])]
    names: set[str] = set()
    expect_item = True

    def skip_ws(j):
        while j < n and s[j].isspace():
            j += 1
        return j

    while True:
        i = skip_ws(i)
        if i >= n:
            raise ParseError("missing ';'", position=i)
        ch = s[i]
        if expect_item:
            if ch == "(":
                frames.append((i, []))
                i += 1
                continue
            if ch in _DELIMS:
                raise ParseError(f"expected a leaf or '(' but found {ch!r}", position=i)
            j = i
            while j < n and s[j] not in _DELIMS and not s[j].isspace():
                j += 1
            name = s[i:j]
            try:
                check_name(name)
            except ValueError as exc:
                raise ParseError(str(exc), position=i) from None
            if name in names:
                raise ParseError(f"duplicate leaf {name!r}", position=i)
            names.add(name)
            frames[-1][1].append(Leaf(name))
            i = j
            expect_item = False
            continue
        if ch == ",":
            if len(frames) == 1:
                raise ParseError("',' outside parentheses", position=i)
            i += 1
            expect_item = True
            continue
        if ch == ")":
            if len(frames) == 1:
                raise ParseError("unbalanced ')'", position=i)
            start, kids = frames.pop()
            j = skip_ws(i + 1)
            if j >= n or s[j] not in LABELS:
                found = s[j] if j < n else "end of input"
                raise ParseError(f"expected label 0, 1 or X after ')' but found {found!r}", position=j)
            if len(kids) < 2:
                raise ParseError("inner node with fewer than two children", position=start)
            frames[-1][1].append(Inner(s[j], tuple(kids)))
            i = j + 1
            continue
        if ch == ";":
            if len(frames) > 1:
                raise ParseError("unbalanced '('", position=frames[-1][0])
            if len(frames[0][1]) != 1:
                raise ParseError("expected exactly one tree", position=i)
            if skip_ws(i + 1) != n:
                raise ParseError("trailing characters after ';'", position=i + 1)
            return Cotree(frames[0][1][0], check=False)
        raise ParseError(f"unexpected {ch!r}", position=i)
