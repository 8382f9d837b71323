import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundkey.dist import JointDistribution3, validate_unambiguous
from boundkey.errors import DimensionMismatch, LoadError, NotIsometry
from boundkey.fixtures import load_fixture
from boundkey.keyrate import advantage, noisy_bound
from boundkey.protocol import (
    ProtocolStep,
    TranscriptState,
    check_sqrt_lift,
    check_unambiguous,
    iid_power,
    message_map,
    public_message_step,
    run_pipeline,
    steps_from_json,
)
from conftest import correlated, point_mass, random_unambiguous


def random_step(rng, state, speaker, n_msg):
    local = state.p.shape[0] if speaker == "A" else state.p.shape[1]
    q = rng.uniform(0, 1, (n_msg, local, *state.history))
    q[rng.random(q.shape) < 0.3] = 0.0
    q[0] += 1e-3
    return ProtocolStep(speaker, q / q.sum(axis=0))


def test_broadcast_reveals_key():
    P = correlated(2)
    step = ProtocolStep("A", np.eye(2))
    rep = run_pipeline(P, [step])
    assert advantage(P) == pytest.approx(1.0)
    assert rep.advantage_AB_vs_E == pytest.approx(0.0, abs=1e-13)


def test_constant_message_changes_nothing():
    P = load_fixture("3x3").distribution()
    const = ProtocolStep("B", np.ones((1, 3)))
    assert run_pipeline(P, [const]).advantage_AB_vs_E == pytest.approx(advantage(P), abs=1e-12)
    fx = load_fixture("3x3")
    rep = run_pipeline(P, [const], fx.channel)
    assert rep.noisy_bound == pytest.approx(noisy_bound(P, fx.channel), abs=1e-12)


def test_no_steps_matches_keyrate_exactly():
    fx = load_fixture("3x3")
    P = fx.distribution()
    assert run_pipeline(P).noisy_bound == advantage(P)
    assert run_pipeline(P).noisy_bound < 0
    assert run_pipeline(P, (), fx.channel).noisy_bound == noisy_bound(P, fx.channel)
    assert run_pipeline(P, (), None, "B->A").noisy_bound == advantage(P, "B")


def test_point_mass_rate_zero(rng):
    P = point_mass((2, 2, 1))
    st_ = TranscriptState.initial(P)
    step = random_step(rng, st_, "A", 2)
    assert run_pipeline(P, [step]).noisy_bound == pytest.approx(0.0, abs=1e-15)


def test_fixture_random_message_unambiguous(rng):
    P = load_fixture("3x3").distribution()
    state = TranscriptState.initial(P)
    out = public_message_step(state, random_step(rng, state, "A", 2))
    assert all(out.unambiguity)
    assert validate_unambiguous(out.joint()).ok


def test_sqrt_lift_examples(rng):
    P = correlated(3)
    state = TranscriptState.initial(P)
    copy = ProtocolStep("A", np.eye(3))
    assert check_sqrt_lift(message_map(state, copy), P) == 0.0
    with pytest.raises(NotIsometry):
        check_sqrt_lift(np.array([[1.0, 1.0]]), np.array([0.5, 0.5]))


def test_message_map_matches_step(rng):
    P = random_unambiguous(rng, 3, 2, 4)
    state = TranscriptState.initial(P)
    step = random_step(rng, state, "B", 3)
    np.testing.assert_allclose(message_map(state, step) @ P.p.ravel(), public_message_step(state, step).p.ravel(), atol=1e-16)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(1, 3))
def test_protocols_preserve_unambiguity(seed, d_A, d_B, d_E, n_steps):
    rng = np.random.default_rng(seed)
    P = random_unambiguous(rng, d_A, d_B, d_E)
    state = TranscriptState.initial(P)
    for _ in range(n_steps):
        step = random_step(rng, state, "AB"[rng.integers(2)], int(rng.integers(1, 4)))
        assert check_sqrt_lift(message_map(state, step), state.p) <= 1e-12
        state = public_message_step(state, step)
        assert check_unambiguous(state.p).ok
    assert all(state.unambiguity)
    J = state.joint()
    assert validate_unambiguous(J).ok
    # composite advantage agrees with the dense composite distribution
    assert state.advantage("A") == pytest.approx(advantage(J, "A"), abs=1e-12)


def test_step_validation():
    with pytest.raises(LoadError):
        ProtocolStep("E", np.eye(2))
    with pytest.raises(LoadError):
        ProtocolStep("A", np.full((2, 2), 0.3))
    state = TranscriptState.initial(correlated(2))
    with pytest.raises(DimensionMismatch):
        public_message_step(state, ProtocolStep("A", np.eye(3)))


def test_iid_power():
    P = correlated(2)
    P2 = iid_power(P, 2)
    assert P2.shape == (4, 4, 1)
    assert advantage(P2) == pytest.approx(2 * advantage(P))
    assert validate_unambiguous(iid_power(load_fixture("3x3").distribution(), 2)).ok


def test_steps_from_json():
    steps, ch, direction = steps_from_json({"steps": [{"speaker": "A", "q": [[1, 0], [0, 1]]}], "direction": "B->A"})
    assert len(steps) == 1 and ch is None and direction == "B->A"
    steps, ch, _ = steps_from_json([])
    assert steps == []
