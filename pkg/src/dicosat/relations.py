"""Relation data model for partial homology sets.

A homology set holds three relations on a vertex set: paralogy ``r0``,
orthology ``r1`` (both symmetric) and xenology ``rx`` (antisymmetric).  A
forbidden set has the same shape and lists pairs that must stay out of the
corresponding relation.

Pairs are stored as ordered ``(x, y)`` tuples of vertex names.  Symmetric
relations always contain both directions.
"""

from __future__ import annotations

import enum
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

import numpy as np

__all__ = [
    "Mode",
    "RelationSet",
    "PartialHomologySet",
    "ForbiddenSet",
    "Instance",
    "ParseError",
    "UndeclaredVertexWarning",
    "Violation",
    "ReflexivePair",
    "SymmetryBroken",
    "AntisymmetryBroken",
    "OverlapBetweenRelations",
    "RelationMeetsForbidden",
    "UnknownVertex",
    "symmetric_closure",
    "reverse",
    "induced",
    "validate",
    "is_full",
    "parse_relations",
    "format_relations",
    "to_matrix",
    "from_matrix",
]

Pair = tuple[str, str]

_BAD_NAME = re.compile(r"[\s#(),;]")

# pair codes used by the matrix form; XENO_FWD at [i, j] means (i, j) in rx
UNASSIGNED = -1
PARALOG = 0
ORTHOLOG = 1
XENO_FWD = 2
XENO_BWD = 3


class ParseError(ValueError):
    """Malformed input text.  Carries a 1-based ``line`` or a 0-based ``position``."""

    def __init__(self, message: str, line: int | None = None, position: int | None = None):
        self.line = line
        self.position = position
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif position is not None:
            where = f"position {position}: "
        super().__init__(where + message)


class UndeclaredVertexWarning(UserWarning):
    pass


def check_name(name: str) -> str:
    if not name or _BAD_NAME.search(name):
        raise ValueError(f"invalid vertex name {name!r}")
    return name


class Mode(enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


@dataclass(frozen=True)
class RelationSet:
    """A set of ordered vertex pairs with a declared symmetry mode.

    The constructor stores exactly what it is given; invariants are checked by
    :func:`validate`.  Use :meth:`symmetric` to build a symmetric relation from
    pairs given in one direction only.
    """

    pairs: frozenset = frozenset()
    mode: Mode = Mode.SYMMETRIC

    def __post_init__(self):
        if not isinstance(self.pairs, frozenset):
            object.__setattr__(self, "pairs", frozenset(self.pairs))

    @classmethod
    def symmetric(cls, pairs: Iterable[Pair] = ()) -> "RelationSet":
        out = set()
        for x, y in pairs:
            out.add((x, y))
            out.add((y, x))
        return cls(frozenset(out), Mode.SYMMETRIC)

    @classmethod
    def antisymmetric(cls, pairs: Iterable[Pair] = ()) -> "RelationSet":
        return cls(frozenset(pairs), Mode.ANTISYMMETRIC)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def vertices(self) -> set[str]:
        return {v for p in self.pairs for v in p}


def _empty_sym() -> RelationSet:
    return RelationSet(frozenset(), Mode.SYMMETRIC)


def _empty_anti() -> RelationSet:
    return RelationSet(frozenset(), Mode.ANTISYMMETRIC)


@dataclass(frozen=True)
class PartialHomologySet:
    r0: RelationSet = field(default_factory=_empty_sym)
    r1: RelationSet = field(default_factory=_empty_sym)
    rx: RelationSet = field(default_factory=_empty_anti)

    @classmethod
    def from_pairs(cls, r0=(), r1=(), rx=()) -> "PartialHomologySet":
        """Build from pair lists; ``r0`` and ``r1`` pairs may be given in one direction."""
        return cls(RelationSet.symmetric(r0), RelationSet.symmetric(r1), RelationSet.antisymmetric(rx))

    def components(self) -> tuple[RelationSet, RelationSet, RelationSet]:
        return self.r0, self.r1, self.rx

    def vertices(self) -> set[str]:
        return self.r0.vertices() | self.r1.vertices() | self.rx.vertices()


@dataclass(frozen=True)
class ForbiddenSet:
    f0: RelationSet = field(default_factory=_empty_sym)
    f1: RelationSet = field(default_factory=_empty_sym)
    fx: RelationSet = field(default_factory=_empty_anti)

    @classmethod
    def from_pairs(cls, f0=(), f1=(), fx=()) -> "ForbiddenSet":
        return cls(RelationSet.symmetric(f0), RelationSet.symmetric(f1), RelationSet.antisymmetric(fx))

    def components(self) -> tuple[RelationSet, RelationSet, RelationSet]:
        return self.f0, self.f1, self.fx

    def vertices(self) -> set[str]:
        return self.f0.vertices() | self.f1.vertices() | self.fx.vertices()


@dataclass(frozen=True)
class Instance:
    """Vertex set plus partial homology set ``h`` and forbidden set ``f``.

    Vertices keep their declaration order; position in :attr:`vertices` is the
    vertex ordinal used for every deterministic tie-break downstream.
    """

    vertices: tuple
    h: PartialHomologySet = field(default_factory=PartialHomologySet)
    f: ForbiddenSet = field(default_factory=ForbiddenSet)

    def __post_init__(self):
        vs = tuple(self.vertices)
        object.__setattr__(self, "vertices", vs)
        if not vs:
            raise ValueError("an instance needs at least one vertex")
        for v in vs:
            check_name(v)
        if len(set(vs)) != len(vs):
            raise ValueError("duplicate vertex names")

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def __len__(self) -> int:
        return len(self.vertices)


# ---------------------------------------------------------------------------
# operators


def symmetric_closure(r: RelationSet) -> RelationSet:
    return RelationSet.symmetric(r.pairs)


def reverse(r: RelationSet) -> RelationSet:
    return RelationSet(frozenset((y, x) for x, y in r.pairs), r.mode)


def _restrict(r: RelationSet, w) -> RelationSet:
    return RelationSet(frozenset(p for p in r.pairs if p[0] in w and p[1] in w), r.mode)


Restrictable = Union[PartialHomologySet, ForbiddenSet, RelationSet, Instance]


def induced(x: Restrictable, w) -> Restrictable:
    """Restrict ``x`` to pairs with both endpoints in ``w``.

    For an :class:`Instance` the vertex list is restricted too (keeping
    declaration order); ``w`` must then be non-empty.
    """
    w = frozenset(w)
    if isinstance(x, RelationSet):
        return _restrict(x, w)
    if isinstance(x, PartialHomologySet):
        return PartialHomologySet(*(_restrict(r, w) for r in x.components()))
    if isinstance(x, ForbiddenSet):
        return ForbiddenSet(*(_restrict(r, w) for r in x.components()))
    if isinstance(x, Instance):
        return Instance(tuple(v for v in x.vertices if v in w), induced(x.h, w), induced(x.f, w))
    raise TypeError(f"cannot restrict {type(x).__name__}")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    def __str__(self) -> str:
        fields = ", ".join(str(v) for v in self.__dict__.values())
        return f"{type(self).__name__}({fields})"


@dataclass(frozen=True, repr=False)
class ReflexivePair(Violation):
    x: str
    relation: str


@dataclass(frozen=True, repr=False)
class SymmetryBroken(Violation):
    x: str
    y: str
    relation: str


@dataclass(frozen=True, repr=False)
class AntisymmetryBroken(Violation):
    x: str
    y: str
    relation: str


@dataclass(frozen=True, repr=False)
class OverlapBetweenRelations(Violation):
    x: str
    y: str
    first: str
    second: str


@dataclass(frozen=True, repr=False)
class RelationMeetsForbidden(Violation):
    x: str
    y: str
    kind: str


@dataclass(frozen=True, repr=False)
class UnknownVertex(Violation):
    name: str
    relation: str


def _sort_key(index: dict[str, int]):
    big = len(index)
    return lambda p: (index.get(p[0], big), p[0], index.get(p[1], big), p[1])


def _unordered(pairs, key) -> list[Pair]:
    """One representative per unordered pair, deterministic."""
    seen = set()
    out = []
    for x, y in sorted(pairs, key=key):
        k = (x, y) if (x, y) <= (y, x) else (y, x)
        if k not in seen:
            seen.add(k)
            out.append((x, y))
    return out


def validate(inst: Instance) -> list[Violation]:
    """Return every invariant violation of ``inst``; an empty list means valid.

    Checks irreflexivity, symmetry modes, known endpoints, pairwise
    disjointness of ``r0``, ``r1`` and the symmetric closure of ``rx``, and that
    no relation meets its forbidden counterpart.
    """
    index = inst.index
    key = _sort_key(index)
    out: list[Violation] = []
    named = [
        ("R0", inst.h.r0), ("R1", inst.h.r1), ("RX", inst.h.rx),
        ("F0", inst.f.f0), ("F1", inst.f.f1), ("FX", inst.f.fx),
    ]
    for name, r in named:
        unknown = sorted({v for p in r.pairs for v in p if v not in index})
        out.extend(UnknownVertex(v, name) for v in unknown)
        for x, y in sorted(r.pairs, key=key):
            if x == y:
                out.append(ReflexivePair(x, name))
        if r.mode is Mode.SYMMETRIC:
            for x, y in sorted(r.pairs, key=key):
                if x != y and (y, x) not in r.pairs:
                    out.append(SymmetryBroken(x, y, name))
        else:
            for x, y in _unordered(r.pairs, key):
                if x != y and (y, x) in r.pairs:
                    out.append(AntisymmetryBroken(x, y, name))

    rx_sym = symmetric_closure(inst.h.rx).pairs
    for (a, ra), (b, rb) in [
        (("R0", inst.h.r0.pairs), ("R1", inst.h.r1.pairs)),
        (("R0", inst.h.r0.pairs), ("RX", rx_sym)),
        (("R1", inst.h.r1.pairs), ("RX", rx_sym)),
    ]:
        for x, y in _unordered(ra & rb, key):
            out.append(OverlapBetweenRelations(x, y, a, b))

    for kind, r, fb in [
        ("0", inst.h.r0, inst.f.f0),
        ("1", inst.h.r1, inst.f.f1),
        ("X", inst.h.rx, inst.f.fx),
    ]:
        common = r.pairs & fb.pairs
        pairs = _unordered(common, key) if kind != "X" else sorted(common, key=key)
        out.extend(RelationMeetsForbidden(x, y, kind) for x, y in pairs)
    return out


def is_full(inst: Instance) -> bool:
    """True iff every ordered pair of distinct vertices lies in r0, r1 or rx (either direction)."""
    n = len(inst.vertices)
    covered = set(inst.h.r0.pairs) | inst.h.r1.pairs | symmetric_closure(inst.h.rx).pairs
    index = inst.index
    count = sum(1 for x, y in covered if x != y and x in index and y in index)
    return count == n * (n - 1)


# ---------------------------------------------------------------------------
# matrix form


def to_matrix(h: PartialHomologySet, vertices) -> np.ndarray:
    """Encode ``h`` as an ``n x n`` int8 matrix of pair codes.

    ``-1`` unassigned, ``0`` paralog, ``1`` ortholog, ``2`` at ``[i, j]`` when
    ``(i, j)`` is a xenology arc and ``3`` at the mirrored cell.  Assumes ``h``
    is valid over ``vertices``.
    """
    index = {v: i for i, v in enumerate(vertices)}
    n = len(index)
    m = np.full((n, n), UNASSIGNED, dtype=np.int8)
    for code, r in ((PARALOG, h.r0), (ORTHOLOG, h.r1)):
        for x, y in r.pairs:
            m[index[x], index[y]] = code
    for x, y in h.rx.pairs:
        i, j = index[x], index[y]
        m[i, j] = XENO_FWD
        m[j, i] = XENO_BWD
    return m


def from_matrix(m: np.ndarray, vertices) -> PartialHomologySet:
    names = list(vertices)
    r0 = [(names[i], names[j]) for i, j in zip(*np.nonzero(m == PARALOG))]
    r1 = [(names[i], names[j]) for i, j in zip(*np.nonzero(m == ORTHOLOG))]
    rx = [(names[i], names[j]) for i, j in zip(*np.nonzero(m == XENO_FWD))]
    return PartialHomologySet(
        RelationSet(frozenset(r0), Mode.SYMMETRIC),
        RelationSet(frozenset(r1), Mode.SYMMETRIC),
        RelationSet(frozenset(rx), Mode.ANTISYMMETRIC),
    )


# ---------------------------------------------------------------------------
# text format

_TAGS = ("R0", "R1", "RX", "F0", "F1", "FX")


def parse_relations(text: str) -> Instance:
    """Parse the line-based relation format.

    ``V`` lines declare vertices; ``R0``/``R1``/``F0``/``F1`` lines add an
    unordered pair, ``RX``/``FX`` a directed arc.  Vertices used before being
    declared are appended in order of first use; when the file declares
    vertices at all, each such vertex raises :class:`UndeclaredVertexWarning`.
    """
    declared: list[str] = []
    seen: set[str] = set()
    implicit: list[tuple[str, int]] = []
    buckets: dict[str, set] = {t: set() for t in _TAGS}
    has_decl = False

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        tag = tok[0]
        if tag == "V":
            has_decl = True
            for v in tok[1:]:
                _checked(v, lineno)
                if v not in seen:
                    seen.add(v)
                    declared.append(v)
            continue
        if tag not in buckets:
            raise ParseError(f"unknown record type {tag!r}", line=lineno)
        if len(tok) != 3:
            raise ParseError(f"{tag} expects two vertices, got {len(tok) - 1}", line=lineno)
        x, y = _checked(tok[1], lineno), _checked(tok[2], lineno)
        for v in (x, y):
            if v not in seen:
                seen.add(v)
                declared.append(v)
                implicit.append((v, lineno))
        buckets[tag].add((x, y))

    if has_decl:
        for v, lineno in implicit:
            warnings.warn(f"line {lineno}: vertex {v!r} was not declared", UndeclaredVertexWarning, stacklevel=2)
    if not declared:
        raise ParseError("no vertices", line=None)
    h = PartialHomologySet(
        RelationSet.symmetric(buckets["R0"]),
        RelationSet.symmetric(buckets["R1"]),
        RelationSet.antisymmetric(buckets["RX"]),
    )
    f = ForbiddenSet(
        RelationSet.symmetric(buckets["F0"]),
        RelationSet.symmetric(buckets["F1"]),
        RelationSet.antisymmetric(buckets["FX"]),
    )
    return Instance(tuple(declared), h, f)


def _checked(v: str, lineno: int) -> str:
    try:
        return check_name(v)
    except ValueError as exc:
        raise ParseError(str(exc), line=lineno) from None


def format_relations(inst: Instance) -> str:
    """Render ``inst`` in the relation format; symmetric pairs are written once."""
    key = _sort_key(inst.index)
    lines = ["V " + " ".join(inst.vertices)]
    for tag, r in zip(_TAGS, (*inst.h.components(), *inst.f.components())):
        if r.mode is Mode.SYMMETRIC:
            pairs = [(x, y) for x, y in sorted(r.pairs, key=key) if key((x, y)) <= key((y, x))]
        else:
            pairs = sorted(r.pairs, key=key)
        lines.extend(f"{tag} {x} {y}" for x, y in pairs)
    return "\n".join(lines) + "\n"
