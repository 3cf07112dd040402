from __future__ import annotations

import math

import pytest

from flockgame.continuous import (
    check_no_late_arrival,
    classify_case_ct,
    follower_best_response_ct,
    indifference_residuals,
    solve_ct,
    tipping_points,
)
from flockgame.game import Action, GameParams, InvalidParamsError
from flockgame.oracle import Mode, oracle_ct_approx
from flockgame.results import FlockKind, SpeOutcome, SpeType
from flockgame.sampling import sample_params

from conftest import make_params

STEP = 2.0**-10


def test_tipping_points():
    assert tipping_points(make_params(0.2))[0] == pytest.approx(10 - math.sqrt(0.8))
    assert tipping_points(make_params(2.0))[1] == pytest.approx(10 - math.sqrt(12))
    assert tipping_points(make_params(1.0))[2] == pytest.approx(7.5)


def test_undercut_at_t_o():
    [(a, u2)] = follower_best_response_ct(10.0, make_params(2.0))
    assert a == Action.before(10.0)
    assert u2 == pytest.approx(4.0)


def test_ties_at_tipping_points():
    p = make_params(0.2)
    t11 = tipping_points(p)[0]
    acts = follower_best_response_ct(t11, p)
    assert [a for a, _ in acts] == [Action.before(t11), Action.exact(10.0)]
    assert all(u == pytest.approx(2.0) for _, u in acts)

    p = GameParams(4.5, 4.0, 5.0, 4.0, 2.0, 10.0)  # gap 1 with e1 = 5
    acts = follower_best_response_ct(7.5, p)
    assert [a for a, _ in acts] == [Action.before(7.5), Action.exact(8.5)]
    assert all(u == pytest.approx(2.4375) for _, u in acts)


def test_leader_after_t_o_rejected():
    with pytest.raises(ValueError):
        follower_best_response_ct(10.5, make_params(2.0))


@pytest.mark.parametrize(
    "delta,beta1,case",
    [(0.2, 4.5, "CT-1"), (1.0, 4.5, "CT-2.1.b"), (1.0, 10.0, "CT-2.1.a"), (2.0, 40.0, "CT-2.2.a"), (2.0, 4.5, "CT-2.2.b")],
)
def test_classification(delta, beta1, case):
    assert classify_case_ct(make_params(delta, beta1)).path == case


def test_solve_examples():
    [o] = solve_ct(make_params(0.2)).outcomes
    assert (o.t1.t, o.t2.t) == (pytest.approx(9.10557, abs=1e-5), 10.0)
    assert (o.type_tag, o.flock) == (SpeType.CT1, FlockKind.FLOCK)

    [o] = solve_ct(make_params(1.0, beta1=10.0)).outcomes
    assert (o.t1.t, o.t2.t) == (pytest.approx(7.5), pytest.approx(8.5))
    assert o.type_tag is SpeType.CT3

    res = solve_ct(make_params(2.0))
    assert res.outcomes == [] and res.case.path == "CT-2.2.b"


def test_boundary_case_returns_every_holding_outcome():
    # Delta_E * beta2 = sqrt(2 r beta2) + 1 exactly; beta1 large enough for both types.
    p = make_params(1.25, beta1=40.0)
    res = solve_ct(p)
    assert res.case.path == "CT-2.3.a"
    assert res.types == {SpeType.CT2, SpeType.CT3}
    sup = oracle_ct_approx(p, STEP, Mode.ALL_SUPPORTABLE)
    for o in res.outcomes:
        assert any(abs(o.t1.t - g.t1.t) <= 4 * STEP and abs(o.t2.t - g.t2.t) <= 4 * STEP for g in sup.outcomes)


def test_late_arrival_check():
    p = make_params(0.2)
    assert check_no_late_arrival(solve_ct(p).outcomes[0], 10.0)
    assert not check_no_late_arrival(SpeOutcome.build(10.5, 10.0, SpeType.GRID, p), 10.0)


def test_unit_window_required():
    with pytest.raises(InvalidParamsError):
        solve_ct(make_params(0.2, w=2.0))


def test_residuals_vanish():
    for p in sample_params(7, 100):
        for v in indifference_residuals(p).values():
            assert v is None or v < 1e-9


def test_leader_always_first_and_no_late_arrival():
    for p in sample_params(3, 300):
        for o in solve_ct(p).outcomes:
            assert o.t1.t < o.t2.t <= p.t_o
