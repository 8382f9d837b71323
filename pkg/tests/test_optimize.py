import numpy as np
import pytest

from boundkey.dist import Diagram, MarginalDistribution, NoisyChannel, from_diagram, validate_unambiguous
from boundkey.errors import InvalidDiagram, NoFeasiblePoint
from boundkey.fixtures import load_fixture
from boundkey.keyrate import STRUCTURED_4X5, noisy_bound
from boundkey.optimize import (
    OptConfig,
    OptResult,
    constraint_residuals,
    maximize_keyrate,
    merge_results,
    run_starts,
    snap_to_constraints,
    start_rng,
)
from boundkey.quantum import lift_state, pt_invariance_combinatorial, pt_report, reduce_to_AB

CROSS = Diagram(2, 2, (((0, 0), (1, 1)), ((0, 1), (1, 0))))
FAST = dict(max_evals=20000)


def certify(res):
    P = res.distribution()
    assert validate_unambiguous(P).ok
    assert pt_invariance_combinatorial(P, 1e-6)
    assert pt_report(reduce_to_AB(lift_state(P)), 1e-9).is_ppt


def test_constraint_residuals():
    norm, dets = constraint_residuals(load_fixture("3x3").P_AB, load_fixture("3x3").diagram)
    assert len(dets) == 3 and max(dets) <= 5e-6 and norm <= 5e-6
    assert constraint_residuals(np.full((2, 2), 0.25), CROSS)[1] == [0.0]
    assert constraint_residuals(np.array([[0.5, 0.0], [0.0, 0.5]]), CROSS)[1] == [0.25]


def test_config_validation():
    with pytest.raises(ValueError):
        OptConfig(starts=0)
    with pytest.raises(ValueError):
        OptConfig(penalty_schedule=(1e4, 1e2))
    with pytest.raises(ValueError):
        OptConfig(method="gradient")


def test_rng_streams_independent_of_start_count():
    a = start_rng(5, 3).random(4)
    b = start_rng(5, 3).random(4)
    c = start_rng(5, 4).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_cross_has_no_key():
    res = maximize_keyrate(CROSS, OptConfig(starts=3, **FAST))
    assert res.feasible
    assert res.best_rate <= 1e-6
    certify(res)


def test_structured_4x5_reaches_interior_point():
    res = maximize_keyrate(STRUCTURED_4X5, OptConfig(starts=1, seed=0))
    assert res.feasible
    assert res.best_rate >= 0.0347590
    certify(res)


def test_3x3_short_run_certified():
    res = maximize_keyrate(load_fixture("3x3").diagram, OptConfig(starts=2, seed=0))
    assert res.feasible
    assert res.best_rate >= noisy_bound(load_fixture("3x3").distribution(), load_fixture("3x3").channel) - 1e-4
    certify(res)
    assert res.to_json()["feasible"] is True


def test_monotone_in_starts():
    d = load_fixture("3x3").diagram
    one = maximize_keyrate(d, OptConfig(starts=1, seed=3, **FAST))
    two = maximize_keyrate(d, OptConfig(starts=2, seed=3, **FAST))
    assert two.best_rate >= one.best_rate


def test_parallel_matches_serial():
    serial = run_starts(CROSS, OptConfig(starts=2, **FAST), range(2))
    parallel = run_starts(CROSS, OptConfig(starts=2, workers=2, **FAST), range(2))
    for s, p in zip(serial, parallel):
        assert s.best_rate == p.best_rate
        np.testing.assert_array_equal(s.P_AB.p, p.P_AB.p)


def test_merge_order_independent():
    results = run_starts(CROSS, OptConfig(starts=3, **FAST), range(3))
    a = merge_results(results)
    b = merge_results(results[::-1])
    assert a is b


def test_merge_rejects_infeasible():
    bad = OptResult(0.1, MarginalDistribution("AB", np.eye(2) / 2), NoisyChannel.identity(2), 0.25, 1, 0, CROSS)
    with pytest.raises(NoFeasiblePoint):
        merge_results([bad])


def test_penalty_method_runs():
    res = maximize_keyrate(CROSS, OptConfig(starts=1, method="penalty", **FAST))
    assert res.feasible


def test_empty_diagram():
    with pytest.raises(InvalidDiagram):
        maximize_keyrate(Diagram(1, 1, ()), OptConfig(starts=1))


@pytest.mark.parametrize("name", ["3x3", "4x5"])
def test_snap_removes_rounding(name):
    fx = load_fixture(name)
    snapped = snap_to_constraints(fx.P_AB, fx.diagram)
    assert constraint_residuals(snapped, fx.diagram)[0] <= 1e-15
    assert np.max(np.abs(snapped.p - fx.P_AB.p / fx.P_AB.p.sum())) < 1e-5
    P = from_diagram(fx.diagram, snapped)
    assert pt_report(reduce_to_AB(lift_state(P)), 1e-9).is_ppt
