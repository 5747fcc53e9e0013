"""Lattice-oracle tests.

The block-walk acceleration must be exact in law, so the central check is a
chi-square homogeneity test between the accelerated walk and the single-step
reference on the same geometry with disjoint seeds.
"""

import numpy as np
import pytest
import scipy.stats

from cornerwalk import (
    CostGuardError,
    GridOracleParams,
    ParameterError,
    ScaleSequence,
    StepLimitExceeded,
    grid_harmonic_measure,
    grid_walk_reference,
    richardson_check,
)


def tiny_params(seq, depth=1, refine=8.0, **kw):
    defaults = dict(start_radius=1.1, outer_radius=1.6)
    defaults.update(kw)
    return GridOracleParams.for_depth(seq, depth, refine=refine, **defaults)


# ---------------------------------------------------------------------------
# parameter guards


def test_cost_guard_on_depth(seq_quarter):
    with pytest.raises(CostGuardError):
        GridOracleParams.for_depth(seq_quarter, 4).validate(seq_quarter)


def test_spacing_guard(seq_quarter):
    with pytest.raises(ParameterError):
        GridOracleParams(depth=1, spacing=0.1).validate(seq_quarter)
    # exactly l(depth)/8 is allowed
    GridOracleParams.for_depth(seq_quarter, 1, refine=8.0).validate(seq_quarter)


def test_circle_guards(seq_quarter):
    with pytest.raises(ParameterError):
        tiny_params(seq_quarter, start_radius=0.5).validate(seq_quarter)
    with pytest.raises(ParameterError):
        tiny_params(seq_quarter, outer_radius=1.11).validate(seq_quarter)


def test_reference_cost_guard(seq_quarter):
    params = GridOracleParams.for_depth(seq_quarter, 2, refine=16.0)
    with pytest.raises(CostGuardError):
        grid_walk_reference(seq_quarter, params, 10_000_000, seed=1)


def test_rejects_nonpositive_walkers(seq_quarter):
    with pytest.raises(ParameterError):
        grid_harmonic_measure(seq_quarter, tiny_params(seq_quarter), 0, seed=1)


# ---------------------------------------------------------------------------
# basic behavior


def test_depth0_absorbs_everything(seq_quarter):
    params = GridOracleParams(
        depth=0, spacing=0.0625, start_radius=1.1, outer_radius=1.6
    )
    table = grid_harmonic_measure(seq_quarter, params, 2000, seed=3)
    assert table.counts.tolist() == [2000]
    assert table.oracle is True
    assert table.meta["engine"] == "grid_oracle"


def test_oracle_deterministic(seq_quarter):
    params = tiny_params(seq_quarter)
    a = grid_harmonic_measure(seq_quarter, params, 5000, seed=11)
    b = grid_harmonic_measure(seq_quarter, params, 5000, seed=11)
    c = grid_harmonic_measure(seq_quarter, params, 5000, seed=12)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)


def test_partition_and_symmetry(seq_quarter):
    params = tiny_params(seq_quarter)
    n = 80_000
    table = grid_harmonic_measure(seq_quarter, params, n, seed=7)
    assert table.n_effective == n
    p = table.counts / n
    se = np.sqrt(0.25 * 0.75 / n)
    # the four corners are exchangeable under the lattice symmetries
    assert np.all(np.abs(p - 0.25) < 4.0 * se)


def test_step_limit_raises(seq_quarter):
    params = tiny_params(seq_quarter, max_iterations=3)
    with pytest.raises(StepLimitExceeded):
        grid_harmonic_measure(seq_quarter, params, 500, seed=5)


# ---------------------------------------------------------------------------
# acceleration is exact in law


def test_block_walk_matches_single_step(seq_quarter):
    params = GridOracleParams(
        depth=1, spacing=1.0 / 32.0, start_radius=1.1, outer_radius=1.6
    )
    fast = grid_harmonic_measure(seq_quarter, params, 60_000, seed=21)
    slow = grid_walk_reference(seq_quarter, params, 20_000, seed=22)
    assert fast.meta["engine"] == "grid_oracle"
    assert slow.meta["engine"] == "grid_reference"
    p = scipy.stats.chi2_contingency(np.vstack([fast.counts, slow.counts])).pvalue
    assert p > 1e-4
    # the acceleration must actually skip steps
    assert fast.meta["total_steps"] / 60_000 > 0.0
    assert slow.meta["total_steps"] / 20_000 > fast.meta["total_steps"] / 60_000


def test_richardson_spacing_refinement(seq_quarter):
    params = GridOracleParams(
        depth=1, spacing=1.0 / 32.0, start_radius=1.1, outer_radius=1.6
    )
    report = richardson_check(seq_quarter, params, 40_000, seed=31)
    assert report["spacing_fine"] == pytest.approx(1.0 / 64.0)
    # halving the spacing moves the masses by at most a few combined
    # standard errors once the lattice resolves the squares
    assert report["max_abs_diff"] < 4.0 * report["max_combined_se"] + 0.01
