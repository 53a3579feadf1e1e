import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ildlimit import nb, oracles
from ildlimit.bucketizer import aggregate
from ildlimit.core import ild_curve
from ildlimit.dataio import FeatureSchema, FeatureSpec, ObservationTable
from ildlimit.errors import DegenerateClassError

TOY = ObservationTable([[0], [0], [1], [1]], [0, 0, 1, 0])
TOY_SCHEMA = FeatureSchema((FeatureSpec("f", "f", "categorical", ("0", "1"), allow_missing=False),), "y")


def count_estimate(rows, labels, code, y, alpha, n_codes):
    """Independent loop-based estimate of P(f = code | y)."""
    hits = sum(1 for r, lab in zip(rows, labels) if r == code and lab == y)
    total = sum(1 for lab in labels if lab == y)
    return (hits + alpha) / (total + alpha * n_codes)


def test_fit_perfect_feature_no_smoothing():
    t = ObservationTable([[0], [1], [1], [0]], [0, 1, 1, 0])
    m = nb.fit(t, alpha=0.0)
    assert m.cond[0][1, 1] == 1.0 and m.cond[0][1, 0] == 0.0
    assert nb.score(m, [1]) == 1.0
    assert nb.score(m, [0]) == 0.0


def test_fit_toy_laplace():
    m = nb.fit(TOY, TOY_SCHEMA, alpha=1.0)
    rows, labels = [0, 0, 1, 1], [0, 0, 1, 0]
    for code, y in itertools.product((0, 1), (0, 1)):
        assert m.cond[0][code, y] == pytest.approx(count_estimate(rows, labels, code, y, 1.0, 2))
    assert m.cond[0][1, 1] == pytest.approx(2 / 3)
    assert m.prior == pytest.approx(2 / 6)


def test_score_toy_matches_joint_enumeration():
    m = nb.fit(TOY, TOY_SCHEMA, alpha=1.0)
    joint = {y: (m.prior if y else 1 - m.prior) * m.cond[0][1, y] for y in (0, 1)}
    expected = joint[1] / (joint[0] + joint[1])
    assert expected == pytest.approx(5 / 11)
    assert nb.score(m, [1]) == pytest.approx(expected, abs=1e-15)


def test_sentinel_counts_in_code_space():
    schema = FeatureSchema((FeatureSpec("f", "f", "categorical", ("a", "b")),), "y")
    t = ObservationTable([[0], [2], [1]], [1, 0, 1], schema)
    m = nb.fit(t, alpha=1.0)
    assert m.cond[0].shape == (3, 2)
    assert m.cond[0][:, 0].sum() == pytest.approx(1.0, abs=1e-12)


def test_uninformative_model_returns_prior():
    t = ObservationTable([[0], [1], [0], [1]], [0, 0, 1, 1])
    m = nb.fit(t, alpha=1.0)
    for x in (0, 1):
        assert nb.score(m, [x]) == pytest.approx(m.prior)


def test_both_classes_impossible_falls_back_to_prior():
    t = ObservationTable([[0, 0], [1, 1]], [0, 1])
    m = nb.fit(t, alpha=0.0)
    assert nb.score(m, [0, 1]) == m.prior


def test_score_rejects_out_of_range_code():
    m = nb.fit(TOY, TOY_SCHEMA)
    with pytest.raises(ValueError):
        nb.score(m, [5])


@st.composite
def tables(draw, n_feat=3, max_rows=40):
    m = draw(st.integers(2, max_rows))
    codes = draw(st.lists(st.lists(st.integers(0, 2), min_size=n_feat, max_size=n_feat), min_size=m, max_size=m))
    labels = draw(st.lists(st.integers(0, 1), min_size=m, max_size=m))
    return ObservationTable(np.array(codes).reshape(m, n_feat), labels)


@given(tables(), st.floats(0.1, 5.0))
def test_tables_normalized_and_scores_interior(t, alpha):
    m = nb.fit(t, alpha=alpha, n_codes=[3, 3, 3])
    for table in m.cond:
        assert np.allclose(table.sum(axis=0), 1.0, atol=1e-12)
    assert 0 < m.prior < 1
    s = nb.score_codes(m, t.codes)
    assert ((s > 0) & (s < 1)).all()


@given(tables(), st.permutations([0, 1, 2]))
def test_feature_permutation_invariance(t, perm):
    m = nb.fit(t, alpha=1.0, n_codes=[3, 3, 3])
    s = nb.score_codes(m, t.codes)
    s_perm = nb.score_codes(m.permuted(perm), t.codes[:, perm])
    assert np.allclose(s, s_perm, rtol=0, atol=1e-12)


def test_nb_roc_trivial_cases():
    t = ObservationTable([[0], [0], [0], [0]], [0, 1, 0, 1])
    m = nb.fit(t, alpha=1.0)
    assert nb.nb_roc(m, t).auc == 0.5
    t = ObservationTable([[0], [1], [1], [0]], [0, 1, 1, 0])
    assert nb.nb_roc(nb.fit(t, alpha=1.0), t).auc == 1.0
    with pytest.raises(DegenerateClassError):
        nb.nb_roc(m, ObservationTable([[0]], [1]))


@settings(max_examples=60)
@given(tables())
def test_nb_roc_monotone_and_below_ceiling(t):
    if t.labels.min() == t.labels.max():
        return
    m = nb.fit(t, alpha=1.0, n_codes=[3, 3, 3])
    c = nb.nb_roc(m, t)
    assert (np.diff(c.fpr) >= 0).all() and (np.diff(c.tpr) >= 0).all()
    assert c.auc_exact <= ild_curve(aggregate(t)).auc_exact


def test_best_threshold_labels_as_scores():
    t = ObservationTable([[0], [1], [1], [0]], [0, 1, 1, 0])
    m = nb.fit(t, alpha=1.0)
    th = nb.best_threshold(m, t)
    assert th == pytest.approx(nb.score(m, [1]))
    assert nb.accuracy_at(m, t, th) == 1.0


def test_best_threshold_toy_matches_exhaustive():
    m = nb.fit(TOY, TOY_SCHEMA, alpha=1.0)
    s = nb.score_codes(m, TOY.codes)
    t_star, acc_star = oracles.exhaustive_best_threshold(s, TOY.labels)
    assert nb.best_threshold(m, TOY) == t_star
    assert nb.accuracy_at(m, TOY, t_star) == acc_star


@given(tables())
def test_best_threshold_property(t):
    m = nb.fit(t, alpha=1.0, n_codes=[3, 3, 3])
    s = nb.score_codes(m, t.codes)
    t_star, acc_star = oracles.exhaustive_best_threshold(s, t.labels)
    assert nb.best_threshold(m, t) == t_star
    assert nb.accuracy_at(m, t, t_star) == acc_star


def test_json_roundtrip(tmp_path):
    m = nb.fit(TOY, TOY_SCHEMA, alpha=1.0)
    m.save(tmp_path / "m.json")
    m2 = nb.NbModel.load(tmp_path / "m.json")
    assert m2.prior == m.prior and m2.alpha == m.alpha
    assert all(np.array_equal(a, b) for a, b in zip(m.cond, m2.cond))
    assert m2.feature_names == ("f",)
