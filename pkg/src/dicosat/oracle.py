"""Brute-force ground truth for small instances.

Enumerates every canonical ordered cotree on up to five leaves and checks the
satisfiability definition directly: some cotree must contain every given
pair in its relation and none of the forbidden ones.  Relations are read off
each tree with a naive lowest-common-ancestor walk, independent of the
extraction in :mod:`dicosat.cotree`.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cotree import LABELS, Cotree, Inner, Leaf
from .relations import ForbiddenSet, Instance, PartialHomologySet

__all__ = [
    "MAX_LEAVES",
    "CapExceeded",
    "enumerate_cotrees",
    "brute_force_satisfiable",
    "signatures",
    "exhaustive_instances",
    "random_instance",
    "cross_check",
]

MAX_LEAVES = 5

# cell codes, same meaning as the matrix form in dicosat.relations
_P, _O, _XF, _XB = 0, 1, 2, 3


class CapExceeded(ValueError):
    pass


def _set_partitions(items: tuple) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]
        yield [(first,)] + part


def _trees(leaves: tuple, parent_label: str | None) -> Iterator:
    if len(leaves) == 1:
        yield Leaf(leaves[0])
        return
    for part in _set_partitions(leaves):
        if len(part) < 2:
            continue
        for blocks in itertools.permutations(part):
            for label in LABELS:
                if label == parent_label:
                    continue
                subtrees = [list(_trees(b, label)) for b in blocks]
                for kids in itertools.product(*subtrees):
                    yield Inner(label, kids)


def enumerate_cotrees(leaves: Sequence[str]) -> Iterator[Cotree]:
    """Every canonical ordered cotree on ``leaves``, each exactly once."""
    leaves = tuple(leaves)
    if not 1 <= len(leaves) <= MAX_LEAVES:
        raise CapExceeded(f"enumeration supports 1..{MAX_LEAVES} leaves, got {len(leaves)}")
    if len(set(leaves)) != len(leaves):
        raise ValueError("duplicate leaves")
    for root in _trees(leaves, None):
        yield Cotree(root, check=False)


def _codes_by_lca(tree: Cotree, n: int) -> np.ndarray:
    """Code matrix of a tree whose leaves are ``0..n-1``, via explicit lca walks."""
    parent: dict[int, Inner | None] = {id(tree.root): None}
    depth = {id(tree.root): 0}
    leaf_node = {}
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            leaf_node[int(node.name)] = node
            continue
        for c in node.children:
            parent[id(c)] = node
            depth[id(c)] = depth[id(node)] + 1
            stack.append(c)

    def path_up(node):
        out = [node]
        while parent[id(out[-1])] is not None:
            out.append(parent[id(out[-1])])
        return out

    paths = {v: path_up(leaf_node[v]) for v in range(n)}
    out = np.full((n, n), -1, dtype=np.int8)
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            ancestors = {id(a) for a in paths[y]}
            below_x = None
            for node in paths[x]:
                if id(node) in ancestors:
                    lca = node
                    break
                below_x = node
            label = lca.label
            if label == "0":
                out[x, y] = _P
            elif label == "1":
                out[x, y] = _O
            else:
                # x is left of y iff x's branch comes first among lca's children
                below_y = next(a for a in paths[y] if parent[id(a)] is lca)
                kids = [id(c) for c in lca.children]
                left = kids.index(id(below_x)) < kids.index(id(below_y))
                out[x, y] = _XF if left else _XB
    return out


@lru_cache(maxsize=None)
def signatures(n: int) -> np.ndarray:
    """Distinct full relation sets on leaves ``0..n-1`` as flattened code rows."""
    if not 1 <= n <= MAX_LEAVES:
        raise CapExceeded(f"enumeration supports 1..{MAX_LEAVES} leaves, got {n}")
    names = [str(i) for i in range(n)]
    rows = {_codes_by_lca(t, n).tobytes() for t in enumerate_cotrees(names)}
    arr = np.array([np.frombuffer(r, dtype=np.int8) for r in sorted(rows)])
    arr.setflags(write=False)
    return arr


def brute_force_satisfiable(inst: Instance) -> bool:
    """Check the definition by trying every cotree on the instance's vertices."""
    n = len(inst.vertices)
    if n > MAX_LEAVES:
        raise CapExceeded(f"brute force supports at most {MAX_LEAVES} vertices, got {n}")
    index = inst.index
    cells, codes = [], []
    banned_cells, banned_codes = [], []

    def cell(x, y):
        return index[x] * n + index[y]

    for code, rel in ((_P, inst.h.r0), (_O, inst.h.r1), (_XF, inst.h.rx)):
        for x, y in rel:
            if x == y or x not in index or y not in index:
                return False
            cells.append(cell(x, y))
            codes.append(code)
    for code, rel in ((_P, inst.f.f0), (_O, inst.f.f1), (_XF, inst.f.fx)):
        for x, y in rel:
            if x == y or x not in index or y not in index:
                continue
            banned_cells.append(cell(x, y))
            banned_codes.append(code)

    sig = signatures(n)
    ok = np.ones(len(sig), dtype=bool)
    if cells:
        ok &= (sig[:, cells] == np.array(codes, dtype=np.int8)).all(axis=1)
    if banned_cells:
        ok &= ~(sig[:, banned_cells] == np.array(banned_codes, dtype=np.int8)).any(axis=1)
    return bool(ok.any())


# ---------------------------------------------------------------------------
# instance families for cross-checking


def _names(n: int) -> tuple[str, ...]:
    return tuple("abcdefghijklmnopqrstuvwxyz"[i] if n <= 26 else f"v{i}" for i in range(n))


def _instance_from_choices(names, pairs, choices, f0=(), f1=(), fx=()) -> Instance:
    r0, r1, rx = [], [], []
    for (i, j), c in zip(pairs, choices):
        x, y = names[i], names[j]
        if c == 1:
            r0.append((x, y))
        elif c == 2:
            r1.append((x, y))
        elif c == 3:
            rx.append((x, y))
        elif c == 4:
            rx.append((y, x))
    return Instance(names, PartialHomologySet.from_pairs(r0, r1, rx), ForbiddenSet.from_pairs(f0, f1, fx))


def exhaustive_instances(n: int) -> Iterator[Instance]:
    """Every way to leave each unordered pair unassigned or put it in R0, R1, or RX either way; F empty."""
    names = _names(n)
    pairs = list(itertools.combinations(range(n), 2))
    for choices in itertools.product(range(5), repeat=len(pairs)):
        yield _instance_from_choices(names, pairs, choices)


def random_instance(n: int, rng: np.random.Generator, p_assign: float = 0.5, p_forbid: float = 0.25) -> Instance:
    """Random valid instance on ``n`` vertices.

    Each unordered pair is assigned with probability ``p_assign`` to one of the
    four options, uniformly.  Every unassigned pair then gets each of ``F0``,
    ``F1`` and ``FX`` independently with probability ``p_forbid``, the ``FX``
    arc pointing either way.
    Assigned pairs are never forbidden, so the instance always validates.
    """
    names = _names(n)
    pairs = list(itertools.combinations(range(n), 2))
    assigned = rng.random(len(pairs)) < p_assign
    kinds = rng.integers(1, 5, size=len(pairs))
    choices = np.where(assigned, kinds, 0)
    forb = rng.random((len(pairs), 4)) < p_forbid
    f0, f1, fx = [], [], []
    for (i, j), c, fl in zip(pairs, choices, forb):
        if c:
            continue
        x, y = names[i], names[j]
        if fl[0]:
            f0.append((x, y))
        if fl[1]:
            f1.append((x, y))
        # FX is antisymmetric, so at most one arc per pair
        if fl[2]:
            fx.append((x, y) if fl[3] else (y, x))
    return _instance_from_choices(names, pairs, choices, f0, f1, fx)


def cross_check(n: int, trials: int = 10_000, seed: int = 0, order=None) -> tuple[int, int, list[Instance]]:
    """Compare engine and brute-force verdicts; returns ``(agreed, total, disagreements)``.

    For ``n <= 3`` the exhaustive family is used and ``trials``/``seed`` are
    ignored; otherwise ``trials`` random instances with forbidden pairs.
    """
    from .satisfiability import DEFAULT_ORDER, is_satisfiable

    if not 1 <= n <= MAX_LEAVES:
        raise CapExceeded(f"brute force supports 1..{MAX_LEAVES} vertices, got {n}")
    order = order or DEFAULT_ORDER
    if n <= 3:
        family: Iterable[Instance] = exhaustive_instances(n)
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        family = (random_instance(n, rng) for _ in range(trials))
    agreed = total = 0
    bad = []
    for inst in family:
        total += 1
        if is_satisfiable(inst, order) == brute_force_satisfiable(inst):
            agreed += 1
        else:
            bad.append(inst)
    return agreed, total, bad
