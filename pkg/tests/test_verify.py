import math

import numpy as np
import pytest

from alphapart.core import AlphaParams, g_values
from alphapart.exact import build_count_table
from alphapart.verify import (
    TAIL_SLACK,
    SamplerStarvationError,
    check_i2_bound,
    fit_c3,
    rho_from_c3,
    run_clt_report,
    sample_partitions,
)


def test_report_shapes(half):
    rep = run_clt_report(half, [20, 60, 150])
    for key in ("ks_values", "mgf_deviation", "mean_rel_gap", "var_rel_gap", "tail_threshold_T"):
        assert len(getattr(rep, key)) == 3
    assert len(rep.tail_check) == 3 * 4 * 2
    assert rep.tail_slack == TAIL_SLACK
    for t in rep.tail_check:
        assert t.passed == (t.exact_tail <= t.bound * TAIL_SLACK)
    assert rep.tail_threshold_T[0] == pytest.approx(20 ** (1 / 9))


def test_trivial_grid(half):
    rep = run_clt_report(half, [1])
    assert rep.ks_values == [0.0]
    assert rep.var_rel_gap == [None]
    assert all(t.passed for t in rep.tail_check)


def test_t_grid_domain(half):
    with pytest.raises(ValueError):
        run_clt_report(half, [10], t_grid=[4.0])


def test_report_reuses_table(half):
    table = build_count_table(half, 80)
    a = run_clt_report(half, [40, 80], table=table)
    b = run_clt_report(half, [40, 80])
    assert a.ks_values == b.ks_values


def test_circle_check(half):
    pts = check_i2_bound(half, 500)
    assert len(pts) == 21
    assert all(0 < p.ratio < 1 for p in pts)
    c3 = fit_c3(pts)
    assert c3 > 0 and rho_from_c3(half, c3) > 0
    with pytest.raises(ValueError):
        check_i2_bound(half, 500, y_grid=[1e-6])


@pytest.mark.parametrize("exact_classes", [0, 2, None])
def test_samples_are_partitions(half, exact_classes):
    n = 30
    batch = sample_partitions(half, n, 500, seed=11, exact_classes=exact_classes, record_parts=True)
    g = g_values(half, n)
    assert batch.accepted == 500 <= batch.attempts
    for parts, length in zip(batch.parts, batch.lengths):
        assert sum(k * m for k, m in parts) == n
        assert all(1 <= m <= g[k - 1] for k, m in parts)
        assert sum(m for _, m in parts) == length


def test_seed_determinism(half):
    a = sample_partitions(half, 200, 300, seed=7)
    b = sample_partitions(half, 200, 300, seed=7)
    c = sample_partitions(half, 200, 300, seed=8)
    assert a == b
    assert a.lengths != c.lengths


@pytest.mark.parametrize("exact_classes", [0, None])
def test_sampler_matches_exact_law_small_n(half, exact_classes):
    n = 12
    row = build_count_table(half, n).row(n)
    q = sum(row)
    batch = sample_partitions(half, n, 20000, seed=3, exact_classes=exact_classes)
    freq = np.bincount(batch.lengths, minlength=len(row))[: len(row)] / batch.accepted
    for j, c in enumerate(row):
        p = c / q
        se = math.sqrt(p * (1 - p) / batch.accepted)
        assert abs(freq[j] - p) <= 4 * se + 1e-12


def test_starvation(half):
    with pytest.raises(SamplerStarvationError):
        sample_partitions(half, 3000, 5, seed=0, max_attempts=3, exact_classes=0)


def test_invalid(half):
    with pytest.raises(ValueError):
        sample_partitions(half, 0, 1, seed=0)
