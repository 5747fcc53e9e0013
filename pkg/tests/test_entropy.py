"""Entropy and dimension tests.

Product measures give closed-form entropies (the weighted symbol entropy at
every node), so most expected values here are analytic.  The two-block split
identity is exercised with hypothesis-generated random count tables because
it must hold for any plug-in table, not only well-behaved ones.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerwalk import (
    CylinderMeasureTable,
    InsufficientCounts,
    ParameterError,
    ScaleSequence,
    capacity_sequence,
    chain_rule_gap,
    delta_jk,
    dim_cantor,
    entropy_hk,
    entropy_ratio_dimension,
    local_dimension_samples,
    make_product_table,
    make_uniform_table,
)

LOG4 = math.log(4.0)


def weight_entropy(weights):
    w = np.asarray(weights, dtype=float)
    p = w / w.sum()
    return float(-(p * np.log(p)).sum())


# ---------------------------------------------------------------------------
# h_k


def test_uniform_entropy_is_log4(seq_quarter):
    t = make_uniform_table(seq_quarter, 3, per_cell=50)
    for base in ("", "1", "23"):
        for k in range(1, 4 - len(base)):
            assert entropy_hk(t, base, k, floor=1) == pytest.approx(LOG4, abs=1e-12)


def test_product_entropy_is_symbol_entropy():
    seq = ScaleSequence.constant(0.3)
    weights = (3, 5, 2, 7)
    t = make_product_table(seq, 4, weights, scale=3)
    expected = weight_entropy(weights)
    for base in ("", "2", "41"):
        for k in (1, 2):
            assert entropy_hk(t, base, k, floor=1) == pytest.approx(expected, rel=1e-12)


def test_degenerate_measure_has_zero_entropy(seq_quarter):
    counts = np.zeros(16, dtype=np.int64)
    counts[5] = 1000  # all walkers in one depth-2 cell
    t = CylinderMeasureTable(depth=2, counts=counts, seed=0)
    assert entropy_hk(t, "", 2, floor=1) == 0.0
    assert entropy_hk(t, "", 1, floor=1) == 0.0


def test_entropy_bounds(table_depth4):
    for k in (1, 2, 3):
        h = entropy_hk(table_depth4, "", k)
        assert 0.0 <= h <= LOG4 + 1e-12


def test_entropy_floor_and_guards(table_depth4):
    with pytest.raises(ParameterError):
        entropy_hk(table_depth4, "", 0)
    with pytest.raises(ParameterError):
        entropy_hk(table_depth4, "111", 2)
    with pytest.raises(InsufficientCounts):
        entropy_hk(table_depth4, "", 1, floor=10**9)


# ---------------------------------------------------------------------------
# two-block split identity


@st.composite
def count_tables(draw):
    depth = draw(st.integers(2, 3))
    cells = draw(
        st.lists(
            st.integers(0, 50), min_size=4**depth, max_size=4**depth
        ).filter(lambda c: sum(c) > 0)
    )
    return CylinderMeasureTable(depth=depth, counts=np.array(cells), seed=0)


@given(count_tables())
@settings(max_examples=60, deadline=None)
def test_split_identity_on_random_tables(t):
    for j in range(1, t.depth):
        k = t.depth - j
        assert chain_rule_gap(t, "", j, k) < 1e-10


def test_split_identity_on_campaign(table_depth4):
    for j, k in [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2)]:
        assert chain_rule_gap(table_depth4, "", j, k) < 1e-10
    assert chain_rule_gap(table_depth4, "1", 1, 2) < 1e-10


# ---------------------------------------------------------------------------
# oscillation


def test_oscillation_zero_on_product_table():
    seq = ScaleSequence.constant(0.3)
    t = make_product_table(seq, 4, (3, 5, 2, 7))
    for j, k in [(1, 1), (1, 2), (2, 1)]:
        report = delta_jk(t, "", j, k, floor=1)
        assert report.delta == 0.0
        assert report.bases_used == 4**j


def test_oscillation_positive_on_campaign(table_depth4):
    report = delta_jk(table_depth4, "", 1, 1)
    assert report.delta > 0.0
    assert report.bases_used == 4
    assert len(report.values) == 4


def test_oscillation_needs_two_bases():
    counts = np.zeros(16, dtype=np.int64)
    counts[0:4] = [10, 20, 30, 40]  # only corner 1 is populated
    t = CylinderMeasureTable(depth=2, counts=counts, seed=0)
    with pytest.raises(InsufficientCounts):
        delta_jk(t, "", 1, 1, floor=5)


# ---------------------------------------------------------------------------
# capacity sequence and set dimension


def test_dim_constant_quarter_is_one():
    assert dim_cantor(ScaleSequence.constant(0.25), n_max=50) == pytest.approx(
        1.0, abs=1e-12
    )


def test_dim_constant_third():
    expected = LOG4 / math.log(3.0)
    assert dim_cantor(ScaleSequence.constant(1.0 / 3.0), n_max=50) == pytest.approx(
        expected, abs=1e-12
    )


def test_dim_periodic_two_cycle():
    # the capacity sequence of the (0.2, 0.3) cycle converges to
    # 2 log 4 / -log(0.06), constant along even n and from below along odd n,
    # so the windowed minimum sits just under the limit, within O(1/n_max)
    seq = ScaleSequence.periodic((0.2, 0.3))
    limit = 2.0 * LOG4 / -math.log(0.2 * 0.3)
    got = dim_cantor(seq, n_max=10_000)
    assert got <= limit + 1e-15
    assert got == pytest.approx(limit, abs=1e-4)


def test_capacity_sequence_values():
    seq = ScaleSequence.constant(0.25)
    caps = capacity_sequence(seq, 5)
    np.testing.assert_allclose(caps, np.ones(5), atol=1e-12)
    with pytest.raises(ParameterError):
        capacity_sequence(seq, 0)


def test_dim_window_semantics():
    seq = ScaleSequence.periodic((0.2, 0.3))
    caps = capacity_sequence(seq, 7)
    assert dim_cantor(seq, n_max=7, window=1) == pytest.approx(caps[-1], abs=1e-15)
    assert dim_cantor(seq, n_max=7, window=4) == pytest.approx(
        caps[-4:].min(), abs=1e-15
    )
    with pytest.raises(ParameterError):
        dim_cantor(seq, n_max=3, window=10)


# ---------------------------------------------------------------------------
# dimension estimate from tables


def test_uniform_table_estimates_set_dimension(seq_quarter):
    # huge per-cell counts make the occupancy correction negligible, so the
    # corrected ratio at the deepest generation equals the capacity there
    t = make_uniform_table(seq_quarter, 4, per_cell=10**10)
    report = entropy_ratio_dimension(t, seq_quarter, bootstrap_reps=0)
    assert report.estimate == pytest.approx(1.0, abs=1e-10)
    assert report.tail_spread < 1e-10
    for r in report.ratios_plugin:
        assert r == pytest.approx(1.0, abs=1e-12)


def test_product_table_estimate_matches_formula():
    seq = ScaleSequence.constant(0.3)
    weights = (3, 5, 2, 7)
    t = make_product_table(seq, 4, weights, scale=10**6)
    report = entropy_ratio_dimension(t, seq, bootstrap_reps=0)
    expected = weight_entropy(weights) / -math.log(0.3)
    assert report.estimate == pytest.approx(expected, abs=1e-6)


def test_entropy_report_shapes(table_depth4, seq_quarter):
    report = entropy_ratio_dimension(table_depth4, seq_quarter, bootstrap_reps=32)
    assert report.generations == (1, 2, 3, 4)
    assert len(report.ratios) == 4
    assert report.bootstrap_se > 0.0
    assert report.uncertainty >= report.bootstrap_se
    assert report.n_effective == table_depth4.n_effective
    d = report.as_dict()
    assert d["estimate"] == report.estimate
    assert len(d["ratios_plugin"]) == 4


def test_entropy_report_bootstrap_deterministic(table_depth4, seq_quarter):
    a = entropy_ratio_dimension(table_depth4, seq_quarter, bootstrap_reps=32, seed=9)
    b = entropy_ratio_dimension(table_depth4, seq_quarter, bootstrap_reps=32, seed=9)
    assert a.bootstrap_se == b.bootstrap_se


def test_dimension_needs_depth(seq_quarter):
    t = make_uniform_table(seq_quarter, 2, per_cell=10)
    with pytest.raises(ParameterError):
        entropy_ratio_dimension(t, seq_quarter)


# ---------------------------------------------------------------------------
# local dimension


def test_local_dimension_uniform_quarter(seq_quarter):
    # w(I) = 4**-depth and l(depth) = 4**-depth: every sample is exactly 1
    t = make_uniform_table(seq_quarter, 3, per_cell=7)
    samples = local_dimension_samples(t, seq_quarter, 500, seed=1)
    assert np.all(samples == 1.0)


def test_local_dimension_degenerate(seq_quarter):
    counts = np.zeros(16, dtype=np.int64)
    counts[3] = 999
    t = CylinderMeasureTable(depth=2, counts=counts, seed=0)
    samples = local_dimension_samples(t, seq_quarter, 100, seed=2)
    assert np.all(samples == 0.0)


def test_local_dimension_campaign_range(table_depth4, seq_quarter):
    samples = local_dimension_samples(table_depth4, seq_quarter, 2000, seed=3)
    assert samples.shape == (2000,)
    assert np.all(samples > 0.0)
    # reproducible draw
    again = local_dimension_samples(table_depth4, seq_quarter, 2000, seed=3)
    np.testing.assert_array_equal(samples, again)


# ---------------------------------------------------------------------------
# synthetic table guards


def test_synthetic_overflow_guards(seq_quarter):
    with pytest.raises(ParameterError):
        make_uniform_table(seq_quarter, 10, per_cell=2**45)
    with pytest.raises(ParameterError):
        make_product_table(seq_quarter, 40, (3, 5, 2, 7))
    with pytest.raises(ParameterError):
        make_product_table(seq_quarter, 2, (3, 5, 2))
    with pytest.raises(ParameterError):
        make_product_table(seq_quarter, 2, (3, 5, 2, 0))


def test_product_table_total():
    seq = ScaleSequence.constant(0.25)
    t = make_product_table(seq, 3, (1, 2, 3, 4), scale=5)
    assert t.n_effective == 5 * 10**3
