"""Simulation study: degrade the relations of random cotrees and measure recovery.

Each trial grows a pure-birth binary tree, labels its inner nodes at random,
reads off the full relation set, deletes pairs with probability ``p``,
optionally marks some deleted pairs as forbidden in a relation they do not
belong to, solves the result, and compares the recovered full set with the
true one using the relative difference.

Internally relation sets are ``n x n`` int8 pair-code matrices (see
:func:`dicosat.relations.to_matrix`); the public functions accept and return
:class:`~dicosat.relations.PartialHomologySet` values.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cotree import Cotree, Inner, Leaf, cotree_matrix
from .relations import (
    UNASSIGNED,
    XENO_BWD,
    XENO_FWD,
    ForbiddenSet,
    Mode,
    PartialHomologySet,
    RelationSet,
    from_matrix,
    reverse,
    to_matrix,
)
from .satisfiability import RuleOrder, solve_pairs

__all__ = [
    "UNIFORM",
    "SKEWED",
    "ExperimentConfig",
    "TrialRecord",
    "make_rng",
    "leaf_names",
    "ProtocolError",
    "trial_seed",
    "summarize",
    "generate_pure_birth_tree",
    "label_tree",
    "delete_pairs",
    "sample_forbidden",
    "relative_difference",
    "random_baseline",
    "run_trial",
    "run_experiment",
    "write_csv",
    "CSV_HEADER",
]

UNIFORM = (1 / 3, 1 / 3, 1 / 3)
SKEWED = (0.1, 0.8, 0.1)

CSV_HEADER = ("leaf_size", "p_unassigned", "p_forbidden", "rule_order", "trial", "seed", "rel_diff", "satisfiable")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


# ---------------------------------------------------------------------------
# trees


def generate_pure_birth_tree(n_leaves: int, rng: np.random.Generator):
    """Random binary tree from the pure-birth process, as nested 2-tuples.

    Starting from a cherry, a uniformly chosen leaf is split until there are
    ``n_leaves`` leaves.  Leaves are the ints ``0..n_leaves-1``, assigned by a
    uniform random permutation so leaf numbers carry no positional signal.
    """
    if n_leaves < 2:
        raise ValueError("need at least two leaves")
    children: dict[int, tuple[int, int]] = {0: (1, 2)}
    leaves = [1, 2]
    nxt = 3
    while len(leaves) < n_leaves:
        i = int(rng.integers(len(leaves)))
        node = leaves[i]
        children[node] = (nxt, nxt + 1)
        leaves[i] = nxt
        leaves.append(nxt + 1)
        nxt += 2
    perm = rng.permutation(n_leaves)
    leaf_id = {node: int(perm[j]) for j, node in enumerate(sorted(leaves))}

    # post-order assembly of nested tuples
    built: dict[int, object] = {}
    stack = [(0, False)]
    while stack:
        node, ready = stack.pop()
        if node in leaf_id:
            built[node] = leaf_id[node]
        elif ready:
            a, b = children[node]
            built[node] = (built.pop(a), built.pop(b))
        else:
            stack.append((node, True))
            a, b = children[node]
            stack.append((b, False))
            stack.append((a, False))
    return built[0]


def leaf_names(n: int) -> tuple[str, ...]:
    """Zero-padded ordinal names, so lexicographic order equals ordinal order."""
    width = len(str(n - 1))
    return tuple(str(i).zfill(width) for i in range(n))


def _count_leaves(tree) -> int:
    count, stack = 0, [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, tuple):
            stack.extend(node)
        else:
            count += 1
    return count


def label_tree(tree, dist: Sequence[float], rng: np.random.Generator) -> Cotree:
    """Label every inner node ``0``, ``1`` or ``X`` independently with probabilities ``dist``.

    Leaves become vertices named by their zero-padded number.  The result is
    usually not canonical.
    """
    dist = _check_dist(dist)
    if not isinstance(tree, tuple):
        return Cotree(Leaf(leaf_names(1)[0]), check=False)
    names = leaf_names(_count_leaves(tree))
    inner = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, tuple):
            inner.append(node)
            stack.extend(reversed(node))
    labels = rng.choice(3, size=len(inner), p=dist)
    label_of = {id(node): "01X"[c] for node, c in zip(inner, labels)}

    built: dict[int, object] = {}
    for node in reversed(inner):
        kids = tuple(built.pop(id(c)) if isinstance(c, tuple) else Leaf(names[c]) for c in node)
        built[id(node)] = Inner(label_of[id(node)], kids)
    return Cotree(built[id(tree)], check=False)


def _check_dist(dist) -> np.ndarray:
    d = np.asarray(dist, dtype=float)
    if d.shape != (3,) or (d < 0).any() or (d > 1).any() or not math.isclose(d.sum(), 1.0, abs_tol=1e-9):
        raise ValueError(f"label distribution must be three probabilities summing to 1, got {dist}")
    return d / d.sum()


# ---------------------------------------------------------------------------
# degradation and baseline (matrix kernels)


def _upper(n: int):
    return np.triu_indices(n, 1)


def _delete_codes(codes: np.ndarray, p: float, rng) -> np.ndarray:
    iu, ju = _upper(len(codes))
    drop = rng.random(len(iu)) < p
    out = codes.copy()
    out[iu[drop], ju[drop]] = UNASSIGNED
    out[ju[drop], iu[drop]] = UNASSIGNED
    return out


_ALTERNATIVES = np.array([[1, 2], [0, 2], [0, 1]])  # kinds 0, 1, X(=2) excluding the true one


def _forbid_codes(partial: np.ndarray, truth: np.ndarray, p_prime: float, rng, orientation: str = "canonical"):
    """Boolean matrices ``(F0, F1, FX)``; ``FX[i, j]`` forbids the arc ``(i, j)``."""
    n = len(partial)
    iu, ju = _upper(n)
    draw = rng.random(len(iu)) < p_prime
    pick = rng.integers(2, size=len(iu))
    sel = draw & (partial[iu, ju] == UNASSIGNED)
    kind = np.minimum(truth[iu, ju], 2)
    chosen = _ALTERNATIVES[kind, pick]
    f0 = np.zeros((n, n), dtype=bool)
    f1 = np.zeros((n, n), dtype=bool)
    fx = np.zeros((n, n), dtype=bool)
    for k, mat in ((0, f0), (1, f1)):
        m = sel & (chosen == k)
        mat[iu[m], ju[m]] = True
        mat[ju[m], iu[m]] = True
    m = sel & (chosen == 2)
    if orientation == "canonical":
        fx[iu[m], ju[m]] = True
    elif orientation == "reversed":
        fx[ju[m], iu[m]] = True
    else:
        raise ValueError(f"unknown FX orientation {orientation!r}")
    return f0, f1, fx


def _baseline_codes(partial: np.ndarray, rng, options: int = 4) -> np.ndarray:
    n = len(partial)
    iu, ju = _upper(n)
    if options == 4:
        choice = rng.integers(4, size=len(iu))
    elif options == 3:
        kind = rng.integers(3, size=len(iu))
        flip = rng.integers(2, size=len(iu))
        choice = np.where(kind == 2, 2 + flip, kind)
    else:
        raise ValueError("baseline options must be 3 or 4")
    out = partial.copy()
    m = partial[iu, ju] == UNASSIGNED
    upper = choice[m].astype(np.int8)
    mirror = np.where(upper >= 2, 5 - upper, upper).astype(np.int8)  # 2 <-> 3
    out[iu[m], ju[m]] = upper
    out[ju[m], iu[m]] = mirror
    return out


def _rel_diff_codes(truth: np.ndarray, rec: np.ndarray) -> float:
    n = len(truth)
    if n < 2:
        return 0.0
    t0, r0 = truth == 0, rec == 0
    t1, r1 = truth == 1, rec == 1
    tx, rx = truth == XENO_FWD, rec == XENO_FWD
    rx_rev = rec == XENO_BWD
    total = (
        np.count_nonzero(t0 ^ r0)
        + np.count_nonzero(t1 ^ r1)
        + 2 * np.count_nonzero(tx & rx_rev)
        + 2 * np.count_nonzero((tx & ~rx_rev) ^ rx)
    )
    return total / (n * n - n)


def _vertices(h: PartialHomologySet, vertices) -> tuple[str, ...]:
    return tuple(vertices) if vertices is not None else tuple(sorted(h.vertices()))


def delete_pairs(h_full: PartialHomologySet, p: float, rng, vertices=None) -> PartialHomologySet:
    """Drop each unordered pair (both directions) independently with probability ``p``.

    Pairs are visited in row-major order over ``vertices`` (default: sorted
    names), which fixes how random draws map to pairs.
    """
    vs = _vertices(h_full, vertices)
    return from_matrix(_delete_codes(to_matrix(h_full, vs), p, rng), vs)


def sample_forbidden(
    h_partial: PartialHomologySet,
    h_true_full: PartialHomologySet,
    p_prime: float,
    rng,
    vertices=None,
    orientation: str = "canonical",
) -> ForbiddenSet:
    """Forbid unassigned pairs, each with probability ``p_prime``, in a relation they are not in.

    The forbidden relation is drawn uniformly from the two kinds other than
    the pair's true kind.  A forbidden xenology entry covers one arc: from the
    smaller to the larger vertex (``"canonical"``) or the reverse.
    """
    vs = _vertices(h_true_full, vertices)
    f0, f1, fx = _forbid_codes(to_matrix(h_partial, vs), to_matrix(h_true_full, vs), p_prime, rng, orientation)
    return _forbidden_from_bool(f0, f1, fx, vs)


def _forbidden_from_bool(f0, f1, fx, vs) -> ForbiddenSet:
    def pairs(mat):
        return frozenset((vs[i], vs[j]) for i, j in zip(*np.nonzero(mat)))

    return ForbiddenSet(
        RelationSet(pairs(f0), Mode.SYMMETRIC),
        RelationSet(pairs(f1), Mode.SYMMETRIC),
        RelationSet(pairs(fx), Mode.ANTISYMMETRIC),
    )


def random_baseline(h_partial: PartialHomologySet, rng, vertices=None, options: int = 4) -> PartialHomologySet:
    """Fill every unassigned pair at random.

    With ``options=4`` the pair becomes paralog, ortholog, or a xenology arc in
    either direction, each with probability 1/4.  With ``options=3`` the kind
    is uniform and a xenology arc gets a random direction.
    """
    vs = _vertices(h_partial, vertices)
    return from_matrix(_baseline_codes(to_matrix(h_partial, vs), rng, options), vs)


def relative_difference(h_true: PartialHomologySet, h_rec: PartialHomologySet, leaf_count: int) -> float:
    """Normalized disagreement between two full sets on ``leaf_count`` vertices.

    Sums the symmetric differences of the paralogy and orthology relations,
    twice the number of reversed xenology arcs, and twice the symmetric
    difference between the remaining true arcs and the recovered arcs; divides
    by ``leaf_count**2 - leaf_count``.  Values above 1 are possible.
    """
    if leaf_count < 2:
        return 0.0
    rec_rev = reverse(h_rec.rx).pairs
    tx = h_true.rx.pairs
    total = (
        len(h_true.r0.pairs ^ h_rec.r0.pairs)
        + len(h_true.r1.pairs ^ h_rec.r1.pairs)
        + 2 * len(tx & rec_rev)
        + 2 * len((tx - rec_rev) ^ h_rec.rx.pairs)
    )
    return total / (leaf_count * leaf_count - leaf_count)


# ---------------------------------------------------------------------------
# experiment driver


@dataclass(frozen=True)
class ExperimentConfig:
    leaf_sizes: tuple = (25, 50, 100)
    trials: int = 100
    p_unassigned: tuple = tuple(k / 10 for k in range(1, 11))
    # empty means no forbidden pairs are injected
    p_forbidden: tuple = ()
    label_distribution: tuple = UNIFORM
    rule_orders: tuple = ("123",)
    master_seed: int = 0
    fx_orientation: str = "canonical"
    # 0 disables the random-assignment baseline rows, 3 or 4 picks its option count
    baseline: int = 0

    def __post_init__(self):
        for name in ("leaf_sizes", "p_unassigned", "p_forbidden", "label_distribution", "rule_orders"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.leaf_sizes or any(int(s) < 2 for s in self.leaf_sizes):
            raise ValueError("leaf sizes must be at least 2")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        for p in (*self.p_unassigned, *self.p_forbidden):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of range: {p}")
        if not self.p_unassigned:
            raise ValueError("need at least one p_unassigned value")
        _check_dist(self.label_distribution)
        for o in self.rule_orders:
            if o != "rand":
                RuleOrder.parse(o)
        if not self.rule_orders:
            raise ValueError("need at least one rule order")
        if self.fx_orientation not in ("canonical", "reversed"):
            raise ValueError(f"unknown FX orientation {self.fx_orientation!r}")
        if self.baseline not in (0, 3, 4):
            raise ValueError("baseline must be 0, 3 or 4")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned int")

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """Read flat ``key = value`` lines; lists are comma separated, ``#`` starts a comment."""
        kw = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            kw[key] = value
        return cls.from_strings(kw)

    @classmethod
    def from_strings(cls, kw: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        out = {}
        for key, value in kw.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            out[key] = _convert(key, value)
        return cls(**out)

    def to_text(self) -> str:
        def fmt(v):
            if isinstance(v, tuple):
                return ",".join(fmt(x) for x in v)
            return repr(v) if isinstance(v, float) else str(v)

        return "".join(f"{f.name} = {fmt(getattr(self, f.name))}\n" for f in fields(self))


def _floats(value: str) -> tuple:
    return tuple(float(x) for x in value.split(",") if x.strip())


def _convert(key: str, value):
    if not isinstance(value, str):
        return value
    if key == "leaf_sizes":
        return tuple(int(x) for x in value.split(",") if x.strip())
    if key in ("trials", "baseline"):
        return int(value)
    if key == "master_seed":
        return int(value, 0)
    if key in ("p_unassigned", "p_forbidden"):
        return _floats(value)
    if key == "label_distribution":
        named = {"uniform": UNIFORM, "skewed": SKEWED}
        return named.get(value.strip().lower()) or _floats(value)
    if key == "rule_orders":
        if value.strip() == "all":
            return ("123", "132", "213", "231", "312", "321", "rand")
        return tuple(x.strip() for x in value.split(",") if x.strip())
    return value.strip()


@dataclass(frozen=True)
class TrialRecord:
    leaf_size: int
    p_unassigned: float
    p_forbidden: float
    rule_order: str
    trial: int
    seed: int
    rel_diff: float
    satisfiable: bool

    def row(self) -> list[str]:
        return [
            str(self.leaf_size),
            f"{self.p_unassigned:.6f}",
            f"{self.p_forbidden:.6f}",
            self.rule_order,
            str(self.trial),
            str(self.seed),
            f"{self.rel_diff:.6f}",
            "true" if self.satisfiable else "false",
        ]


class ProtocolError(RuntimeError):
    """A degraded true relation set failed to solve, or the solution broke a constraint."""


def trial_seed(master_seed: int, *coords: int) -> int:
    """64-bit seed for one trial, hashed from the master seed and cell coordinates."""
    ss = np.random.SeedSequence([int(master_seed), *map(int, coords)])
    return int(ss.generate_state(1, np.uint64)[0])


def _solve_codes(partial, f0, f1, fx, names, order: RuleOrder):
    iu, ju = _upper(len(names))
    up = partial[iu, ju]

    def upper_pairs(mask):
        return list(zip(iu[mask].tolist(), ju[mask].tolist()))

    def arcs(mat):
        a, b = np.nonzero(mat)
        return list(zip(a.tolist(), b.tolist()))

    tree, witness = solve_pairs(
        names,
        upper_pairs(up == 0),
        upper_pairs(up == 1),
        arcs(partial == XENO_FWD),
        upper_pairs(f0[iu, ju]),
        upper_pairs(f1[iu, ju]),
        arcs(fx),
        order=order,
    )
    return tree, witness


def run_trial(
    leaf_size: int,
    p_unassigned: float,
    p_forbidden: float,
    order: str,
    seed: int,
    dist=UNIFORM,
    fx_orientation: str = "canonical",
) -> tuple[float, bool]:
    """One protocol run; returns ``(rel_diff, satisfiable)``.

    ``order`` is a rule-order string, ``"rand"`` (engine seed drawn from the
    trial stream) or ``"baseline"`` (random fill instead of the engine, with
    four options; ``"baseline3"`` for three).
    """
    rng = make_rng(seed)
    names = leaf_names(leaf_size)
    truth_tree = label_tree(generate_pure_birth_tree(leaf_size, rng), dist, rng)
    truth = cotree_matrix(truth_tree, names)
    partial = _delete_codes(truth, p_unassigned, rng)
    if p_forbidden > 0:
        f0, f1, fx = _forbid_codes(partial, truth, p_forbidden, rng, fx_orientation)
    else:
        f0 = f1 = fx = np.zeros(truth.shape, dtype=bool)

    if order.startswith("baseline"):
        rec = _baseline_codes(partial, rng, 3 if order == "baseline3" else 4)
        return _rel_diff_codes(truth, rec), True

    rule_order = RuleOrder.random(int(rng.integers(2**63))) if order == "rand" else RuleOrder.parse(order)
    tree, witness = _solve_codes(partial, f0, f1, fx, names, rule_order)
    if tree is None:
        raise ProtocolError(
            f"degraded instance unsatisfiable: leaf_size={leaf_size} p={p_unassigned} "
            f"p'={p_forbidden} order={order} seed={seed} witness={sorted(witness)}"
        )
    rec = cotree_matrix(tree, names)
    known = partial != UNASSIGNED
    if (rec[known] != partial[known]).any() or (rec[f0] == 0).any() or (rec[f1] == 1).any() or (rec[fx] == XENO_FWD).any():
        raise ProtocolError(f"recovered set breaks the input constraints (seed={seed})")
    return _rel_diff_codes(truth, rec), True


def _cells(cfg: ExperimentConfig) -> list[tuple]:
    orders = list(cfg.rule_orders)
    if cfg.baseline:
        orders.append("baseline" if cfg.baseline == 4 else "baseline3")
    p_forb = cfg.p_forbidden or (0.0,)
    return [
        (si, size, pi, p, fi, pf, oi, o)
        for si, size in enumerate(cfg.leaf_sizes)
        for pi, p in enumerate(cfg.p_unassigned)
        for fi, pf in enumerate(p_forb)
        for oi, o in enumerate(orders)
    ]


def _run_cell(args) -> list[TrialRecord]:
    cfg, (si, size, pi, p, fi, pf, oi, order) = args
    out = []
    for trial in range(cfg.trials):
        seed = trial_seed(cfg.master_seed, size, pi, fi, oi, trial)
        rel, sat = run_trial(size, p, pf, order, seed, cfg.label_distribution, cfg.fx_orientation)
        out.append(TrialRecord(size, p, pf, order, trial, seed, rel, sat))
    return out


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> Iterator[TrialRecord]:
    """All trial records of ``cfg`` in cell order, then trial order.

    Seeds depend only on the configuration and cell coordinates, so the
    output does not depend on ``workers``.
    """
    jobs = [(cfg, cell) for cell in _cells(cfg)]
    if workers <= 1:
        for job in jobs:
            yield from _run_cell(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for records in pool.map(_run_cell, jobs):
            yield from records


def write_csv(records: Iterable[TrialRecord], fh=None) -> str | None:
    """Write records as CSV with LF line endings; returns the text if ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue() if fh is None else None


def summarize(records: Iterable[TrialRecord]) -> dict[tuple, tuple[float, float, int]]:
    """Mean, standard deviation and count of ``rel_diff`` per cell."""
    groups: dict[tuple, list[float]] = {}
    for r in records:
        groups.setdefault((r.leaf_size, r.p_unassigned, r.p_forbidden, r.rule_order), []).append(r.rel_diff)
    out = {}
    for key, vals in groups.items():
        a = np.asarray(vals)
        out[key] = (float(a.mean()), float(a.std(ddof=1)) if len(a) > 1 else 0.0, len(a))
    return out
