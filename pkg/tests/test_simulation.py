import io
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cotrees
from dicosat.cotree import cotree_matrix, relations_from_cotree
from dicosat.relations import Instance, PartialHomologySet, RelationSet, from_matrix, is_full, to_matrix, validate
from dicosat.satisfiability import is_satisfiable
from dicosat.simulation import (
    CSV_HEADER,
    SKEWED,
    UNIFORM,
    ExperimentConfig,
    TrialRecord,
    _rel_diff_codes,
    delete_pairs,
    generate_pure_birth_tree,
    label_tree,
    leaf_names,
    make_rng,
    random_baseline,
    relative_difference,
    run_experiment,
    run_trial,
    sample_forbidden,
    summarize,
    trial_seed,
    write_csv,
)


def leaf_depths(tree):
    out, stack = [], [(tree, 0)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, tuple):
            stack.extend((c, d + 1) for c in node)
        else:
            out.append(d)
    return out


def full_set(n, seed, dist=UNIFORM):
    rng = make_rng(seed)
    t = label_tree(generate_pure_birth_tree(n, rng), dist, rng)
    return t, relations_from_cotree(t), leaf_names(n)


# ---------------------------------------------------------------------------
# trees


def test_two_leaves_give_the_cherry():
    t = generate_pure_birth_tree(2, make_rng(0))
    assert sorted(t) == [0, 1]


def test_three_leaves_are_uniform_over_cherries():
    rng = make_rng(1)
    counts = {}
    for _ in range(3000):
        t = generate_pure_birth_tree(3, rng)
        cherry = frozenset(next(c for c in t if isinstance(c, tuple)))
        counts[cherry] = counts.get(cherry, 0) + 1
    assert len(counts) == 3
    assert all(abs(c - 1000) < 3 * np.sqrt(3000 * (1 / 3) * (2 / 3)) for c in counts.values())


def test_yule_mean_leaf_depth():
    n = 25
    rng = make_rng(2)
    depths = [np.mean(leaf_depths(generate_pure_birth_tree(n, rng))) for _ in range(10_000)]
    expected = 2 * sum(1 / k for k in range(2, n + 1))
    assert abs(np.mean(depths) - expected) / expected < 0.05


def test_pure_birth_leaves_are_a_permutation():
    t = generate_pure_birth_tree(40, make_rng(3))
    depths = leaf_depths(t)
    flat, stack = [], [t]
    while stack:
        node = stack.pop()
        if isinstance(node, tuple):
            stack.extend(node)
        else:
            flat.append(node)
    assert sorted(flat) == list(range(40)) and len(depths) == 40
    with pytest.raises(ValueError):
        generate_pure_birth_tree(1, make_rng(0))


def test_degenerate_label_distributions():
    n = 10
    vs = leaf_names(n)
    pairs = {(x, y) for x in vs for y in vs if x != y}
    _, h, _ = full_set(n, 4, (0, 1, 0))
    assert h.r1.pairs == pairs
    _, h, _ = full_set(n, 4, (1, 0, 0))
    assert h.r0.pairs == pairs
    with pytest.raises(ValueError):
        label_tree(generate_pure_birth_tree(3, make_rng(0)), (0.5, 0.6, 0), make_rng(0))


def test_uniform_label_frequencies():
    rng = make_rng(5)
    counts = {"0": 0, "1": 0, "X": 0}
    for _ in range(10_000):
        t = label_tree(generate_pure_birth_tree(50, rng), UNIFORM, rng)
        for node in t.inner_nodes():
            counts[node.label] += 1
    total = sum(counts.values())
    assert total == 10_000 * 49
    assert all(abs(c / total - 1 / 3) < 0.02 for c in counts.values())


def test_skewed_label_frequencies():
    rng = make_rng(6)
    labels = [n.label for _ in range(500) for n in label_tree(generate_pure_birth_tree(50, rng), SKEWED, rng).inner_nodes()]
    assert abs(labels.count("1") / len(labels) - 0.8) < 0.02


def test_leaf_names_sort_like_ordinals():
    names = leaf_names(120)
    assert names[7] == "007" and list(names) == sorted(names)


# ---------------------------------------------------------------------------
# degradation


def test_delete_extremes():
    _, h, vs = full_set(12, 7)
    assert delete_pairs(h, 0.0, make_rng(0), vs) == h
    assert delete_pairs(h, 1.0, make_rng(0), vs) == PartialHomologySet()


def test_delete_half_is_binomial():
    _, h, vs = full_set(25, 8)
    kept = []
    rng = make_rng(9)
    for _ in range(200):
        m = to_matrix(delete_pairs(h, 0.5, rng, vs), vs)
        kept.append(np.count_nonzero(m[np.triu_indices(25, 1)] != -1))
    # 300 unordered pairs; the mean of 200 draws has sd sqrt(75 / 200)
    assert abs(np.mean(kept) - 150) < 3 * np.sqrt(75 / 200)
    assert all(abs(k - 150) < 5 * np.sqrt(75) for k in kept)


def test_deleted_sets_are_valid_subsets():
    _, h, vs = full_set(20, 10)
    part = delete_pairs(h, 0.6, make_rng(1), vs)
    assert validate(Instance(vs, part)) == []
    for a, b in zip(part.components(), h.components()):
        assert a.pairs <= b.pairs


def test_forbidden_sampling():
    _, h, vs = full_set(15, 11)
    part = delete_pairs(h, 0.7, make_rng(2), vs)
    assert sample_forbidden(part, h, 0.0, make_rng(3), vs).components() == tuple(
        RelationSet(frozenset(), m.mode) for m in part.components()
    )
    f = sample_forbidden(part, h, 1.0, make_rng(3), vs)
    for true_rel, banned in zip(h.components(), f.components()):
        assert not true_rel.pairs & banned.pairs
    assigned = part.r0.pairs | part.r1.pairs | part.rx.pairs | {(y, x) for x, y in part.rx.pairs}
    forbidden = f.f0.pairs | f.f1.pairs | f.fx.pairs | {(y, x) for x, y in f.fx.pairs}
    assert not assigned & forbidden
    # canonical orientation: smaller name first
    assert all(x < y for x, y in f.fx.pairs)
    rev = sample_forbidden(part, h, 1.0, make_rng(3), vs, orientation="reversed")
    assert all(x > y for x, y in rev.fx.pairs)
    assert validate(Instance(vs, part, f)) == []


def test_orthologs_are_never_forbidden_as_orthologs():
    _, h, vs = full_set(30, 12, (0.2, 0.6, 0.2))
    part = delete_pairs(h, 1.0, make_rng(4), vs)
    f = sample_forbidden(part, h, 1.0, make_rng(5), vs)
    ortho = [p for p in h.r1.pairs if p[0] < p[1]]
    assert ortho and not any(p in f.f1.pairs for p in ortho)
    assert all(p in f.f0.pairs or p in f.fx.pairs for p in ortho)


def test_degraded_instances_with_forbidden_pairs_stay_satisfiable():
    rng = make_rng(13)
    for i in range(1000):
        n = 4 + i % 9
        _, h, vs = full_set(n, 1000 + i)
        part = delete_pairs(h, 0.7, rng, vs)
        f = sample_forbidden(part, h, float(rng.random()), rng, vs, "canonical" if i % 2 else "reversed")
        assert is_satisfiable(Instance(vs, part, f))


# ---------------------------------------------------------------------------
# metric


def test_relative_difference_examples():
    ortho = PartialHomologySet.from_pairs(r1=[("x", "y")])
    fwd = PartialHomologySet.from_pairs(rx=[("x", "y")])
    back = PartialHomologySet.from_pairs(rx=[("y", "x")])
    assert relative_difference(ortho, ortho, 2) == 0.0
    assert relative_difference(ortho, fwd, 2) == 2.0
    assert relative_difference(fwd, back, 2) == 2.0
    assert relative_difference(PartialHomologySet(), PartialHomologySet(), 1) == 0.0


@given(cotrees(min_leaves=2, max_leaves=9), cotrees(min_leaves=2, max_leaves=9))
def test_metric_kernel_matches_formula(a, b):
    n = min(len(a), len(b))
    vs = [f"v{i}" for i in range(n)]
    ma = cotree_matrix(a, [f"v{i}" for i in range(len(a))])[:n, :n]
    mb = cotree_matrix(b, [f"v{i}" for i in range(len(b))])[:n, :n]
    ha, hb = from_matrix(ma, vs), from_matrix(mb, vs)
    value = relative_difference(ha, hb, n)
    assert value == pytest.approx(_rel_diff_codes(ma, mb))
    assert value == pytest.approx(relative_difference(hb, ha, n))
    # on full sets every disagreeing unordered pair costs 4, so the metric is twice the disagreement rate
    iu = np.triu_indices(n, 1)
    assert value == pytest.approx(2 * np.mean(ma[iu] != mb[iu]))
    assert 0.0 <= value <= 2.0


# ---------------------------------------------------------------------------
# baseline


def test_baseline_keeps_full_sets():
    _, h, vs = full_set(10, 14)
    assert random_baseline(h, make_rng(0), vs) == h


def test_baseline_options_are_uniform():
    empty = PartialHomologySet()
    vs = ("x", "y")
    rng = make_rng(15)
    draws = 10_000
    for options, expected in ((4, [0.25] * 4), (3, [1 / 3, 1 / 3, 1 / 6, 1 / 6])):
        counts = np.zeros(4)
        for _ in range(draws):
            m = to_matrix(random_baseline(empty, rng, vs, options), vs)
            counts[m[0, 1]] += 1
        for c, p in zip(counts, expected):
            assert abs(c - draws * p) < 3 * np.sqrt(draws * p * (1 - p))
        full = random_baseline(empty, rng, vs, options)
        assert is_full(Instance(vs, full))


def test_baseline_is_worse_than_the_engine_at_full_deletion():
    engine = [run_trial(50, 1.0, 0.0, "123", s)[0] for s in range(40)]
    baseline = [run_trial(50, 1.0, 0.0, "baseline", s)[0] for s in range(40)]
    assert np.mean(baseline) > np.mean(engine)


# ---------------------------------------------------------------------------
# driver


def small_config(**kw):
    base = dict(leaf_sizes=(8, 12), trials=3, p_unassigned=(0.0, 0.5, 1.0), rule_orders=("123", "rand"), master_seed=99)
    base.update(kw)
    return ExperimentConfig(**base)


def test_zero_deletion_recovers_everything():
    recs = list(run_experiment(small_config(p_unassigned=(0.0,), p_forbidden=(0.5,))))
    assert recs and all(r.rel_diff == 0.0 and r.satisfiable for r in recs)


def test_records_are_ordered_and_reproducible():
    cfg = small_config(baseline=4)
    a = list(run_experiment(cfg))
    assert a == list(run_experiment(cfg))
    assert a == list(run_experiment(cfg, workers=2))
    assert len(a) == 2 * 3 * 3 * 3
    assert [r.rule_order for r in a[:9]] == ["123"] * 3 + ["rand"] * 3 + ["baseline"] * 3
    assert a[0].seed == trial_seed(99, 8, 0, 0, 0, 0)
    assert len({r.seed for r in a}) == len(a)
    other = list(run_experiment(small_config(baseline=4, master_seed=100)))
    assert [r.seed for r in other] != [r.seed for r in a]


def test_csv_format():
    recs = [TrialRecord(25, 0.8, 0.0, "123", 0, 17, 1 / 3, True)]
    text = write_csv(recs)
    assert text == ",".join(CSV_HEADER) + "\n25,0.800000,0.000000,123,0,17,0.333333,true\n"
    buf = io.StringIO()
    write_csv(recs, buf)
    assert buf.getvalue() == text and "\r" not in text


def test_config_text_round_trip():
    cfg = ExperimentConfig.from_text(
        """
        # desk-scale sweep
        leaf_sizes = 25, 50
        trials = 10
        p_unassigned = 0.1,0.2
        p_forbidden = 0.5
        label_distribution = skewed
        rule_orders = all
        master_seed = 0x10
        fx_orientation = reversed
        baseline = 3
        """
    )
    assert cfg.leaf_sizes == (25, 50) and cfg.trials == 10
    assert cfg.label_distribution == SKEWED and cfg.master_seed == 16
    assert len(cfg.rule_orders) == 7 and cfg.baseline == 3
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg


@pytest.mark.parametrize(
    "text",
    [
        "trials = 0",
        "leaf_sizes = 1",
        "p_unassigned = 1.5",
        "label_distribution = 0.5,0.5,0.5",
        "rule_orders = 124",
        "fx_orientation = both",
        "baseline = 2",
        "colour = red",
        "no equals sign",
    ],
)
def test_config_errors(text):
    with pytest.raises(ValueError):
        ExperimentConfig.from_text(text)


def test_summary():
    recs = [TrialRecord(5, 0.5, 0.0, "123", i, i, v, True) for i, v in enumerate([0.1, 0.3])]
    mean, sd, count = summarize(recs)[(5, 0.5, 0.0, "123")]
    assert mean == pytest.approx(0.2) and sd == pytest.approx(np.std([0.1, 0.3], ddof=1)) and count == 2


@given(st.integers(2, 30), st.floats(0, 1), st.floats(0, 1), st.sampled_from(["123", "321", "rand"]), st.integers(0, 2**63))
def test_trials_never_break_the_protocol(n, p, pf, order, seed):
    rel, sat = run_trial(n, p, pf, order, seed)
    assert sat and 0.0 <= rel <= 2.0
    if p == 0:
        assert rel == 0.0
    assert run_trial(n, p, pf, order, seed) == (rel, sat)


def test_trial_seeds_hash_all_coordinates():
    seeds = {trial_seed(1, *c) for c in itertools.product(range(3), repeat=5)}
    assert len(seeds) == 3**5
