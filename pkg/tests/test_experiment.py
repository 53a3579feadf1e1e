import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ildlimit import nb
from ildlimit.bucketizer import aggregate
from ildlimit.core import ild_curve
from ildlimit.dataio import ObservationTable
from ildlimit.experiment import (
    RESULT_COLUMNS,
    SplitSpec,
    evaluate_ild_on_validation,
    ild_scores,
    run_trials,
    split,
    summarize,
    write_results_csv,
)


def synthetic(m=400, seed=0, n_feat=3):
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, 3, size=(m, n_feat))
    logit = -1.0 + 0.8 * codes[:, 0] - 0.5 * codes[:, 1] + 0.3 * codes[:, 2]
    labels = (rng.random(m) < 1 / (1 + np.exp(-logit))).astype(int)
    return ObservationTable(codes, labels)


def test_split_sizes():
    t = synthetic(10)
    for seed in range(5):
        tr, va = split(t, SplitSpec(0.8, seed))
        assert (tr.M, va.M) == (8, 2)


def test_split_round_half_up():
    tr, va = split(synthetic(4238), SplitSpec(0.8, 1))
    assert (tr.M, va.M) == (3390, 848)


def test_split_deterministic_and_seed_dependent():
    t = synthetic(50)
    a = split(t, SplitSpec(0.8, 3))
    b = split(t, SplitSpec(0.8, 3))
    c = split(t, SplitSpec(0.8, 4))
    assert a[0].equals(b[0]) and a[1].equals(b[1])
    assert not a[0].equals(c[0])


@settings(max_examples=40)
@given(st.integers(2, 120), st.integers(0, 10**6), st.floats(0.05, 0.95), st.booleans())
def test_split_is_partition(m, seed, frac, stratified):
    # Tag each row with its index in an extra column so identity is visible.
    base = synthetic(m, seed=1)
    t = ObservationTable(np.column_stack([base.codes, np.arange(m)]), base.labels)
    tr, va = split(t, SplitSpec(frac, seed, stratified))
    ids = np.concatenate([tr.codes[:, -1], va.codes[:, -1]])
    assert sorted(ids.tolist()) == list(range(m))
    assert tr.M == int(np.floor(frac * m + 0.5))
    assert np.array_equal(t.labels[ids], np.concatenate([tr.labels, va.labels]))


def test_stratified_keeps_class_ratio():
    t = synthetic(1000)
    tr, _ = split(t, SplitSpec(0.8, 0, stratified=True))
    assert tr.labels.sum() == int(np.floor(0.8 * t.labels.sum() + 0.5))


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(1.0)


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(20, 300))
def test_train_equals_valid_reproduces_ild(seed, m):
    t = synthetic(m, seed=seed)
    if t.labels.min() == t.labels.max():
        return
    assert evaluate_ild_on_validation(t, t).auc_exact == ild_curve(aggregate(t)).auc_exact


def test_perfect_pattern_transfers():
    train = ObservationTable([[0], [0], [1], [1], [2]], [0, 0, 1, 1, 0])
    valid = ObservationTable([[1], [0], [2], [1]], [1, 0, 0, 1])
    assert evaluate_ild_on_validation(train, valid).auc == 1.0


def test_unseen_bucket_gets_global_ratio():
    train = ObservationTable([[0], [0], [0], [1], [1]], [0, 0, 1, 1, 1])
    # Train ratios: bucket 0 -> 1/2, bucket 1 -> inf, global -> 3/2.
    valid = ObservationTable([[0], [5], [1], [5]], [0, 1, 1, 0])
    scores, unseen = ild_scores(train, valid)
    assert unseen == 1
    assert scores.tolist() == [0, 1, 2, 1]


def test_single_trial_composition():
    t = synthetic(300)
    (r,) = run_trials(t, 1, base_seed=5)
    tr, va = split(t, SplitSpec(0.8, 5))
    model = nb.fit(tr, alpha=1.0, n_codes=None)
    assert r.seed == 5
    assert r.auc_ild == evaluate_ild_on_validation(tr, va).auc
    assert r.auc_nb == nb.nb_roc(model, va).auc
    assert r.auc_diff == r.auc_ild - r.auc_nb
    assert r.n_buckets_train == aggregate(tr).n_buckets


def test_run_trials_deterministic(tmp_path):
    t = synthetic(300)
    a = run_trials(t, 4, base_seed=10)
    b = run_trials(t, 4, base_seed=10)
    assert [r.seed for r in a] == [10, 11, 12, 13]
    write_results_csv(a, tmp_path / "a.csv")
    write_results_csv(b, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header == ",".join(RESULT_COLUMNS)


def test_degenerate_trial_recorded_not_fatal():
    t = ObservationTable([[0]] * 9 + [[1]], [0] * 9 + [1])
    results = run_trials(t, 5)
    assert len(results) == 5
    bad = [r for r in results if r.auc_ild is None]
    assert bad and all(r.warnings for r in bad)
    s = summarize(results)
    assert s["n_trials"] == 5


def test_summarize():
    s = summarize(run_trials(synthetic(300), 3))
    assert s["auc_diff"]["min"] <= s["auc_diff"]["mean"] <= s["auc_diff"]["max"]


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_ceiling_mode_bounds_naive_bayes(seed):
    t = synthetic(300, seed=seed)
    for r in run_trials(t, 2, base_seed=seed, ild_mode="ceiling"):
        if r.auc_ild is not None:
            assert r.auc_ild >= r.auc_nb - 1e-12


def test_unknown_ild_mode():
    with pytest.raises(ValueError):
        run_trials(synthetic(50), 1, ild_mode="bogus")
