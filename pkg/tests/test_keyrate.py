import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundkey.dist import JointDistribution3, NoisyChannel, entropy, from_diagram, marginal, relabel
from boundkey.errors import DimensionMismatch, DomainError
from boundkey.fixtures import FIXTURE_NAMES, load_fixture
from boundkey.keyrate import (
    STRUCTURED_4X5,
    STRUCTURED_4X5_CHANNEL,
    advantage,
    f_structured,
    keyrate_report,
    noisy_bound,
    structured_pab,
)
from conftest import correlated, point_mass, random_unambiguous
from oracles import direct_mutual_information

# values reproduced from the printed P_AB and Q, frozen as regression values
FROZEN_RATES = {
    "3x3": 0.005786087895151226,
    "4x4": 0.02939058410695239,
    "4x5": 0.048048344809469956,
    "5x6": 0.03784748528606485,
    "6x5": 0.035436091547730975,
}

seeds = st.integers(0, 2**32 - 1)


def random_structured(rng):
    """(a, b, c, d, e) on the simplex with a*b = d*e."""
    while True:
        a, b, d = rng.uniform(0, 0.4, 3)
        e = a * b / d
        c = 1 - a - b - d - e
        if c >= 0:
            return a, b, c, d, e


def test_advantage_simple():
    assert advantage(correlated(4)) == pytest.approx(2.0, abs=1e-13)
    p = np.zeros((3, 3, 3))
    p[[0, 1, 2], [0, 1, 2], [0, 1, 2]] = 1 / 3
    assert advantage(JointDistribution3(p)) == pytest.approx(0.0, abs=1e-13)
    P = load_fixture("3x3").distribution()
    assert advantage(P, "A") == pytest.approx(entropy(marginal(P, "B")) - entropy(marginal(P, "E")), abs=1e-12)


def test_advantage_against_direct_sum():
    P = load_fixture("4x4").distribution()
    want = direct_mutual_information(P.p, "B", "A") - direct_mutual_information(P.p, "E", "A")
    assert advantage(P, "A") == pytest.approx(want, abs=1e-12)
    want = direct_mutual_information(P.p, "A", "B") - direct_mutual_information(P.p, "E", "B")
    assert advantage(P, "B") == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_rates(name):
    fx = load_fixture(name)
    P = fx.distribution()
    rate = noisy_bound(P, fx.channel)
    assert rate > 0
    assert rate == pytest.approx(FROZEN_RATES[name], abs=1e-12)
    # plain one-way advantage is negative in both directions
    assert advantage(P, "A") < 0 and advantage(P, "B") < 0


def test_noisy_bound_trivial_channels():
    P = load_fixture("3x3").distribution()
    assert noisy_bound(P, NoisyChannel.identity(3)) == pytest.approx(advantage(P), abs=1e-13)
    assert noisy_bound(P, NoisyChannel.constant(3, 2)) == pytest.approx(0.0, abs=1e-13)
    with pytest.raises(DimensionMismatch):
        noisy_bound(P, NoisyChannel.identity(4))


def test_noisy_bound_direction():
    P = load_fixture("4x5").distribution()
    assert noisy_bound(P, NoisyChannel.identity(5), "B") == pytest.approx(advantage(P, "B"), abs=1e-13)


def test_keyrate_report():
    fx = load_fixture("3x3")
    rep = keyrate_report(fx.distribution(), fx.channel)
    assert rep.noisy_bound == pytest.approx(FROZEN_RATES["3x3"], abs=1e-15)
    assert rep.to_json()["direction"] == "A->B"
    assert keyrate_report(fx.distribution(), None, "B").direction == "B->A"


def test_f_structured_anchor():
    assert f_structured(1 / 10, 1 / 10, 3 / 8, 1 / 40, 2 / 5) == pytest.approx(0.0347590, abs=1e-6)
    assert f_structured(0, 0, 1, 0, 0) == pytest.approx(-1.0, abs=1e-15)


def test_f_structured_domain():
    with pytest.raises(DomainError):
        f_structured(-0.1, 0.2, 0.5, 0.2, 0.2)
    with pytest.raises(DomainError):
        f_structured(0.1, 0.1, 0.1, 0.1, 0.1)


def test_f_structured_matches_generic(rng):
    for _ in range(200):
        x = random_structured(rng)
        P = from_diagram(STRUCTURED_4X5, structured_pab(*x))
        assert f_structured(*x) == pytest.approx(noisy_bound(P, STRUCTURED_4X5_CHANNEL), abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4), st.integers(1, 6))
def test_advantage_fast_path(seed, d_A, d_B, d_E):
    P = random_unambiguous(np.random.default_rng(seed), d_A, d_B, d_E)
    assert advantage(P) == pytest.approx(entropy(marginal(P, "B")) - entropy(marginal(P, "E")), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4), st.integers(1, 6), st.integers(1, 3))
def test_noisy_bound_eve_relabel_invariant(seed, d_A, d_B, d_E, d_X):
    rng = np.random.default_rng(seed)
    P = random_unambiguous(rng, d_A, d_B, d_E)
    q = rng.uniform(0, 1, (d_X, d_A))
    ch = NoisyChannel(q / q.sum(axis=0))
    Q = relabel(P, perm_E=rng.permutation(P.d_E))
    assert noisy_bound(Q, ch) == pytest.approx(noisy_bound(P, ch), abs=1e-12)
    assert noisy_bound(P, NoisyChannel.identity(d_A)) == pytest.approx(advantage(P), abs=1e-12)


def test_point_mass_rate_zero():
    assert advantage(point_mass()) == 0.0
