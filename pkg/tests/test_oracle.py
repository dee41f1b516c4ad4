import math

import pytest

from klcodes.core import DivergenceBall, CodeLengths, kl_divergence, validate_distribution
from klcodes.errors import DomainError, LimitExceededError
from klcodes.oracle import (
    ball_sample,
    brute_binary_root,
    brute_min_over_codes,
    brute_sup_over_ball,
    enumerate_kraft_lengths,
    sorted_assignment,
)


def test_enumerate_tiny_binary():
    got = set(enumerate_kraft_lengths(2, 2, 2))
    assert got == {(1, 1), (1, 2), (2, 2)}


def test_enumerate_kraft_filter():
    got = set(enumerate_kraft_lengths(3, 2, 3))
    assert (1, 2, 2) in got
    assert (1, 2, 3) in got
    assert (1, 1, 2) not in got  # Kraft sum 1.25


def test_enumerate_ternary():
    assert (1, 1, 1) in set(enumerate_kraft_lengths(3, 3, 2))


def test_enumerate_limits():
    with pytest.raises(LimitExceededError):
        list(enumerate_kraft_lengths(11, 2, 4))
    with pytest.raises(LimitExceededError):
        list(enumerate_kraft_lengths(4, 2, 11))


def test_enumerate_all_feasible_and_sorted():
    for vec in enumerate_kraft_lengths(5, 2, 5):
        assert list(vec) == sorted(vec)
        assert sum(2 ** (5 - l) for l in vec) <= 2**5


def test_sorted_assignment_matches_weight_order():
    assigned = sorted_assignment([0.1, 0.6, 0.3], (1, 2, 3))
    assert assigned == (3, 1, 2)


def test_ball_sample_zero_radius():
    mu = validate_distribution([0.6, 0.4])
    assert ball_sample(DivergenceBall(mu, 0.0)) == [mu]


def test_ball_sample_includes_reachable_vertices():
    mu = validate_distribution([0.5, 0.5])
    samples = ball_sample(DivergenceBall(mu, math.log(2)), n_interior=100, seed=4)
    probs = {tuple(round(p, 9) for p in nu.probs) for nu in samples}
    assert (1.0, 0.0) in probs
    assert (0.0, 1.0) in probs


def test_ball_sample_certificates():
    mu = validate_distribution([0.6, 0.3, 0.1])
    ball = DivergenceBall(mu, 0.05)
    samples = ball_sample(ball, n_interior=2000, n_boundary=16, seed=8)
    assert len(samples) > 50
    for nu in samples:
        assert kl_divergence(nu, mu) <= 0.05 + 1e-10


def test_ball_sample_deterministic():
    mu = validate_distribution([0.5, 0.3, 0.2])
    ball = DivergenceBall(mu, 0.1)
    one = ball_sample(ball, n_interior=500, seed=21)
    two = ball_sample(ball, n_interior=500, seed=21)
    assert [nu.probs for nu in one] == [nu.probs for nu in two]


def test_brute_min_linear_cost():
    report = brute_min_over_codes("linear_cost", weights=[0.4, 0.3, 0.2, 0.1], arity=2, l_max=5)
    assert report.optimum_value == pytest.approx(1.9, abs=1e-12)
    assert (1, 2, 3, 3) in report.optimal_length_vectors


def test_brute_min_pointwise_anchor():
    report = brute_min_over_codes("pointwise", weights=[0.6, 0.3, 0.1], arity=2, l_max=4)
    assert report.optimum_value == pytest.approx(math.log2(1.2), abs=1e-12)
    assert all(sum(2 ** (4 - l) for l in vec) <= 16 for vec in report.optimal_length_vectors)


def test_brute_min_determinism():
    mu = validate_distribution([0.55, 0.3, 0.15])
    ball = DivergenceBall(mu, 0.04)
    a = brute_min_over_codes("avg_red", ball=ball, n_interior=500, seed=3)
    b = brute_min_over_codes("avg_red", ball=ball, n_interior=500, seed=3)
    assert a.optimum_value == b.optimum_value
    assert a.optimal_length_vectors == b.optimal_length_vectors
    assert a.evaluations == b.evaluations


def test_brute_sup_zero_radius_is_center_value():
    mu = validate_distribution([0.6, 0.3, 0.1])
    ball = DivergenceBall(mu, 0.0)
    lengths = CodeLengths((1, 2, 2))
    from klcodes.tilted import avg_redundancy

    value = brute_sup_over_ball(lengths, ball, "avg_red", [mu])
    assert value == pytest.approx(avg_redundancy(lengths, mu), abs=1e-15)


def test_brute_sup_includes_analytic_point():
    from klcodes.tilted import avg_redundancy, tilted_root

    mu = validate_distribution([0.6, 0.3, 0.1])
    ball = DivergenceBall(mu, 0.05)
    lengths = CodeLengths((1, 2, 2))
    point = tilted_root(mu, lengths, 0.05)
    analytic = avg_redundancy(lengths, point.distribution)
    sup = brute_sup_over_ball(lengths, ball, "avg_red", ball_sample(ball, 2000, seed=5))
    assert sup >= analytic - 1e-9
    assert sup <= analytic + 1e-6


def test_brute_binary_root_tiny_radius():
    root = brute_binary_root(0.5, 1e-12)
    assert root - 0.5 <= math.sqrt(1e-12 / 2) + 1e-13


def test_brute_binary_root_range():
    root = brute_binary_root(0.1, 0.5)
    assert 0.1 < root <= 0.6


def test_brute_binary_root_domain():
    with pytest.raises(DomainError):
        brute_binary_root(0.9, 0.5)  # saturated: 0.9 >= e^-0.5
    with pytest.raises(DomainError):
        brute_binary_root(0.5, 0.0)
