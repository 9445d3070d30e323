"""Di-cograph recognition and conversion between digraphs and full homology sets.

A digraph is read as a full set: symmetric arc pairs are orthology, one-way
arcs xenology, non-adjacent pairs paralogy.  Recognition runs the
satisfiability engine on that full set with no forbidden pairs.
"""

from __future__ import annotations

from .cotree import Cotree
from .digraph import DiGraph
from .relations import Instance, Mode, ParseError, PartialHomologySet, RelationSet, check_name
from .satisfiability import DEFAULT_ORDER, build_cotree

__all__ = [
    "digraph_of_relations",
    "relations_of_digraph",
    "is_dicograph",
    "parse_digraph",
    "format_digraph",
]


def digraph_of_relations(h: PartialHomologySet, vertices) -> DiGraph:
    """Digraph on ``vertices`` whose arcs are ``r1`` (both directions) and ``rx``."""
    vertices = tuple(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    arcs = {(index[x], index[y]) for x, y in h.r1} | {(index[x], index[y]) for x, y in h.rx}
    return DiGraph(len(vertices), frozenset(arcs), vertices)


def relations_of_digraph(g: DiGraph) -> PartialHomologySet:
    r0, r1, rx = set(), set(), set()
    name = g.label
    for a in range(g.n):
        for b in range(g.n):
            if a == b:
                continue
            fwd = (a, b) in g.arcs
            back = (b, a) in g.arcs
            pair = (name(a), name(b))
            if fwd and back:
                r1.add(pair)
            elif fwd:
                rx.add(pair)
            elif not back:
                r0.add(pair)
    return PartialHomologySet(
        RelationSet(frozenset(r0), Mode.SYMMETRIC),
        RelationSet(frozenset(r1), Mode.SYMMETRIC),
        RelationSet(frozenset(rx), Mode.ANTISYMMETRIC),
    )


def is_dicograph(g: DiGraph) -> tuple[bool, Cotree | frozenset]:
    """``(True, cotree)`` if ``g`` is a di-cograph, else ``(False, witness)``.

    The witness is the vertex set of an induced subgraph that is neither
    disconnected, nor co-disconnected, nor split by its strong components.
    Cost is O(n^2 + nm), not linear.
    """
    names = tuple(g.label(v) for v in range(g.n))
    inst = Instance(names, relations_of_digraph(g))
    out = build_cotree(inst, DEFAULT_ORDER)
    if out.cotree is not None:
        return True, out.cotree
    return False, out.unsat_witness


def parse_digraph(text: str) -> DiGraph:
    """Parse ``A x y`` arc lines with optional ``V`` declarations and ``#`` comments."""
    order: list[str] = []
    index: dict[str, int] = {}
    arcs = set()

    def vid(v, lineno):
        try:
            check_name(v)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if v not in index:
            index[v] = len(order)
            order.append(v)
        return index[v]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "V":
            for v in tok[1:]:
                vid(v, lineno)
        elif tok[0] == "A":
            if len(tok) != 3:
                raise ParseError(f"A expects two vertices, got {len(tok) - 1}", line=lineno)
            a, b = vid(tok[1], lineno), vid(tok[2], lineno)
            if a == b:
                raise ParseError(f"self-loop at {tok[1]!r}", line=lineno)
            arcs.add((a, b))
        else:
            raise ParseError(f"unknown record type {tok[0]!r}", line=lineno)
    if not order:
        raise ParseError("no vertices")
    return DiGraph(len(order), frozenset(arcs), tuple(order))


def format_digraph(g: DiGraph) -> str:
    lines = ["V " + " ".join(g.label(v) for v in range(g.n))]
    lines.extend(f"A {g.label(a)} {g.label(b)}" for a, b in sorted(g.arcs))
    return "\n".join(lines) + "\n"
