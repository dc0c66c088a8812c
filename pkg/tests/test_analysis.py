import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from spikebam.analysis import (
    CorrelationReport,
    discrimination_stats,
    learning_curve,
    template_correlation,
)
from spikebam.engine import RunRecord

from oracles import naive_pearson

SHAPE = (100, 100)


def rand_matrix(rng, p=0.3):
    return (rng.random(SHAPE) < p).astype(np.uint8)


def test_self_and_complement_are_exact():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rand_matrix(rng, rng.uniform(0.01, 0.99))
        if a.min() == a.max():
            continue
        assert template_correlation(a, a) == 1.0
        assert template_correlation(a, 1 - a) == -1.0


def test_matches_naive_pearson():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a, b = rand_matrix(rng, rng.uniform(0.05, 0.95)), rand_matrix(rng, rng.uniform(0.05, 0.95))
        assert abs(template_correlation(a, b) - naive_pearson(a, b)) <= 1e-12


def test_constant_matrix_is_degenerate():
    a = np.zeros(SHAPE, dtype=np.uint8)
    b = rand_matrix(np.random.default_rng(2))
    assert template_correlation(a, b) == 0.0
    assert template_correlation(a, b, return_flag=True) == (0.0, True)
    assert template_correlation(b, np.ones(SHAPE, np.uint8), return_flag=True) == (0.0, True)
    assert template_correlation(b, b, return_flag=True) == (1.0, False)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        template_correlation(np.zeros((100, 100)), np.zeros((100, 99)))


def test_non_binary_rejected():
    with pytest.raises(ValueError):
        template_correlation(np.full(SHAPE, 2), np.zeros(SHAPE))


binary = arrays(np.uint8, (12, 9), elements=st.integers(0, 1))


@given(a=binary, b=binary)
def test_symmetric_and_bounded(a, b):
    r = template_correlation(a, b)
    assert r == template_correlation(b, a)
    assert -1.0 <= r <= 1.0


@given(a=binary, b=binary, seed=st.integers(0, 2**32 - 1))
def test_invariant_to_consistent_relabeling(a, b, seed):
    rng = np.random.default_rng(seed)
    rows, cols = rng.permutation(a.shape[0]), rng.permutation(a.shape[1])
    assert template_correlation(a, b) == pytest.approx(template_correlation(a[rows][:, cols], b[rows][:, cols]), abs=1e-12)


@given(a=binary, b=binary)
def test_oracle_on_small_matrices(a, b):
    r, flag = template_correlation(a, b, return_flag=True)
    if flag:
        assert r == 0.0 and (a.min() == a.max() or b.min() == b.max())
    else:
        assert r == pytest.approx(naive_pearson(a, b), abs=1e-12)


def fake_record(outputs, seed=1, condition="no_topdown"):
    return RunRecord(seed=seed, condition=condition, config_hash="x", outputs=outputs, schedule=[], raster=np.zeros(0))


def test_repeating_network_has_flat_unit_curve():
    rng = np.random.default_rng(3)
    fixed = rand_matrix(rng)
    outputs = np.broadcast_to(fixed, (20, 10) + SHAPE).copy()
    curve = learning_curve([fake_record(outputs)])["no_topdown"]
    assert all(s.mean == 1.0 for s in curve.values())
    d = discrimination_stats([fake_record(outputs)])["no_topdown"]
    assert d.same.mean == d.different.mean == 1.0


def test_random_outputs_do_not_discriminate():
    rng = np.random.default_rng(4)
    outputs = (rng.random((20, 10) + SHAPE) < 0.2).astype(np.uint8)
    d = discrimination_stats([fake_record(outputs)])["no_topdown"]
    assert abs(d.same.mean) < 0.02 and abs(d.different.mean) < 0.02
    assert d.same.n == 100 and d.different.n == 900


def test_sample_counts_and_permutation_invariance():
    rng = np.random.default_rng(5)
    recs = [
        fake_record((rng.random((20, 10) + SHAPE) < 0.3).astype(np.uint8), seed=s, condition=c)
        for s in range(1, 4)
        for c in ("no_topdown", "topdown")
    ]
    a = CorrelationReport.from_records(recs)
    b = CorrelationReport.from_records(recs[::-1])
    assert a.summary() == b.summary()
    assert a.discrimination["topdown"].same.n == 300
    assert a.discrimination["topdown"].different.n == 2700
    assert a.curve["no_topdown"][1].n == 30


def test_missing_presentations_rejected():
    with pytest.raises(ValueError):
        learning_curve([fake_record(np.zeros((5, 10) + SHAPE, np.uint8))])


def test_report_files(tmp_path):
    rng = np.random.default_rng(6)
    rec = fake_record((rng.random((20, 10) + SHAPE) < 0.3).astype(np.uint8))
    rep = CorrelationReport.from_records([rec], ["config_hash=x", "seed=1"])
    rep.write(tmp_path)
    curve = (tmp_path / "curve.csv").read_text().splitlines()
    assert curve[:3] == ["# config_hash=x", "# seed=1", "condition,p,mean,std,n"]
    assert len(curve) == 3 + 9
    disc = (tmp_path / "discrimination.csv").read_text().splitlines()
    assert disc[2] == "condition,case,mean,std,n,t_stat"
    assert disc[3].startswith("no_topdown,same,")
    assert (tmp_path / "summary.txt").read_text() == rep.summary()
