from __future__ import annotations

import math

import numpy as np
import pytest

from flockgame.game import Action
from flockgame.oracle import (
    GridSpec,
    Mode,
    build_best_response_table,
    choose_k_max,
    enumerate_spe,
    oracle_ct_approx,
    oracle_dt,
    late_arrivals,
    unit_grid,
)
from flockgame.sampling import sample_params

from conftest import make_params

STEP = 2.0**-10


def test_choose_k_max():
    p = make_params(2.0)
    assert choose_k_max(p, 1.0) == 8
    assert choose_k_max(p, 0.5) == 14


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(1.0, 0, 5)
    with pytest.raises(ValueError):
        GridSpec(0.0, -1, 5)
    g = GridSpec(0.5, -2, 4)
    assert len(g) == 7
    assert g.times(10.0).tolist() == [11, 10.5, 10, 9.5, 9, 8.5, 8]


@pytest.mark.parametrize("t1,times,u2", [(10, [9], 3.75), (8, [7, 9], 1.75), (11, [10], 4.0)])
def test_best_response_rows(t1, times, u2):
    p = make_params(2.0)
    table = build_best_response_table(p, unit_grid(p))
    br = table.responses(table.row_index(t1))
    assert [a.t for a, _ in br] == times
    assert all(u == pytest.approx(u2) for _, u in br)


def test_leader_favorable_example():
    res = oracle_dt(make_params(2.0), Mode.LEADER_FAVORABLE)
    [o] = res.outcomes
    assert (o.t1.t, o.t2.t) == (8, 9)
    assert (o.u1, o.u2) == (pytest.approx(3.1111, abs=1e-4), pytest.approx(1.75))


def test_all_supportable_example():
    res = oracle_dt(make_params(2.0), Mode.ALL_SUPPORTABLE)
    pairs = [(o.t1.t, o.t2.t) for o in res.outcomes]
    assert (8, 9) in pairs and (10, 9) in pairs
    # (7, 8) also reaches the max-min value 2 exactly.
    assert pairs == [(7, 8), (8, 9), (10, 9)]
    assert res.maxmin_u1 == pytest.approx(2.0)


@pytest.mark.parametrize("mode", list(Mode))
def test_strict_flock_unique_in_both_modes(mode):
    [o] = oracle_dt(make_params(0.2), mode).outcomes
    assert (o.t1.t, o.t2.t) == (10, 10)


@pytest.mark.parametrize("augment", [False, True])
def test_dense_and_region_tables_agree(augment):
    for p in sample_params(21, 40):
        for step in (1.0, 0.25):
            grid = GridSpec(step, -2, choose_k_max(p, step))
            if len(grid) > 2000:
                continue
            dense = build_best_response_table(p, grid, augment, method="dense")
            region = build_best_response_table(p, grid, augment, method="region")
            assert np.allclose(dense.best_u2, region.best_u2, atol=1e-12)
            for mode in Mode:
                a = enumerate_spe(p, grid, mode, table=dense)
                b = enumerate_spe(p, grid, mode, table=region)
                assert a.leader_value == pytest.approx(b.leader_value, abs=1e-12)
                if mode is Mode.LEADER_FAVORABLE:
                    assert a.outcomes == b.outcomes


def test_continuous_approximation_examples():
    res = oracle_ct_approx(make_params(0.2), STEP)
    assert any(abs(o.t1.t - (10 - math.sqrt(0.8))) <= 2 * STEP and o.t2.t == 10 for o in res.outcomes)

    res = oracle_ct_approx(make_params(1.0, beta1=10.0), STEP)
    assert any(abs(o.t1.t - 7.5) <= 2 * STEP and abs(o.t2.t - 8.5) <= 2 * STEP for o in res.outcomes)

    p = make_params(2.0)
    res = oracle_ct_approx(p, STEP)
    assert res.leader_value <= p.e2 - p.r / 2 + 10 * STEP


def test_continuous_approximation_preconditions():
    with pytest.raises(ValueError):
        oracle_ct_approx(make_params(0.2), 0.1)
    with pytest.raises(ValueError):
        oracle_ct_approx(make_params(0.2), 0.03)


def test_halving_step_converges():
    for p in sample_params(2, 15):
        coarse = oracle_ct_approx(p, 2.0**-7)
        fine = oracle_ct_approx(p, 2.0**-8)
        c, f = coarse.outcomes[0], fine.outcomes[0]
        if len(coarse.outcomes) == 1 and len(fine.outcomes) == 1:
            assert abs(c.t1.t - f.t1.t) <= 4 * 2.0**-7
            assert abs(c.t2.t - f.t2.t) <= 4 * 2.0**-7


def test_no_late_arrivals():
    for p in sample_params(4, 100):
        for mode in Mode:
            assert late_arrivals(oracle_dt(p, mode), p.t_o) == []


def test_table_csv_and_json():
    p = make_params(2.0)
    res = oracle_dt(p)
    lines = res.table.to_csv().splitlines()
    assert lines[0] == "t1,br_times,br_utility"
    assert "8,7;9,1.75" in lines
    d = res.to_dict()
    assert d["mode"] == "LeaderFavorable" and d["maxmin_u1"] == pytest.approx(2.0)


def test_just_before_reply_on_fine_grid():
    p = make_params(2.0)
    res = oracle_ct_approx(p, STEP)
    table = res.table
    br = table.responses(table.row_index(10.0))
    assert br[0][0] == Action.before(10.0)
