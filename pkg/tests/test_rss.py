import math

import pytest
from hypothesis import assume, given, strategies as st

from occpf.errors import ValidationError
from occpf.model import VehicleBody
from occpf.rss import (RelativeDistance, RssParams, alpha_coefficients, relative_distance,
                       rss_lateral_distance, rss_longitudinal_distance, violation_check)

P = RssParams()
speeds = st.floats(0.0, 50.0)


def test_longitudinal_example():
    assert rss_longitudinal_distance(30.0, 26.0, P) == pytest.approx(102.66666666666667, abs=1e-9)


def test_longitudinal_clamp():
    assert rss_longitudinal_distance(0.0, 26.0, RssParams(rho=1e-9)) == 0.0


@given(speeds, st.floats(0.1, 50.0))
def test_stationary_obstacle_needs_more_room(v_ego, v_obs):
    assert rss_longitudinal_distance(v_ego, 0.0, P) > rss_longitudinal_distance(v_ego, v_obs, P)


@given(speeds, speeds, speeds)
def test_longitudinal_monotone_in_ego_speed(v1, v2, v_obs):
    assume(v1 <= v2)
    assert rss_longitudinal_distance(v1, v_obs, P) <= rss_longitudinal_distance(v2, v_obs, P)


def test_lateral_symmetry_and_example():
    assert rss_lateral_distance(0.0, 0.0, P) == P.zeta
    assert rss_lateral_distance(0.5, 0.0, P) == pytest.approx(1.375, abs=1e-12)


# The printed stopping term is a parabola in the lateral speed with its vertex
# at v = -rho * (a_accel_lat_max + a_brake_lat_min); monotonicity holds above it.
_V_VERTEX = -P.rho * (P.a_accel_lat_max + P.a_brake_lat_min)


@given(st.floats(_V_VERTEX, 10.0), st.floats(_V_VERTEX, 10.0), st.floats(-10.0, 10.0))
def test_lateral_monotone_in_ego_speed(a, b, v_obs):
    assume(a <= b)
    assert rss_lateral_distance(a, v_obs, P) <= rss_lateral_distance(b, v_obs, P)


@given(st.floats(-10.0, 10.0), st.floats(-10.0, 10.0))
def test_lateral_never_below_margin(a, b):
    assert rss_lateral_distance(a, b, P) >= P.zeta


def test_params_validated():
    with pytest.raises(ValidationError):
        RssParams(a_brake_lat_min=0.0)
    with pytest.raises(ValidationError):
        RssParams(a_brake_min=7.0, a_brake_max=6.0)
    with pytest.raises(ValidationError):
        RssParams(alpha_norm="other")


def test_relative_distance_is_bumper_to_bumper():
    body = VehicleBody(4.8, 1.8)
    d = relative_distance(80.0, -4.0, body, body)
    assert d == RelativeDistance(pytest.approx(75.2), pytest.approx(2.2))
    assert relative_distance(1.0, 1.0, body, body) == RelativeDistance(0.0, 0.0)


def test_alpha_boundary_values():
    assert alpha_coefficients(10.0, 2.0, 10.0, 2.0) == (1.0, 1.0)
    a1, a2 = alpha_coefficients(20.0, 4.0, 10.0, 2.0)
    assert a1 == pytest.approx(0.5, abs=1e-15) and a2 == pytest.approx(0.5, abs=1e-15)
    a1, a2 = alpha_coefficients(0.0, 0.0, 10.0, 2.0)
    assert a1 == pytest.approx(1.5, abs=1e-15) and a2 == pytest.approx(0.5, abs=1e-15)


def test_alpha_paper_literal_normalization():
    a1, a2 = alpha_coefficients(0.0, 0.0, 10.0, 2.0, "paper-literal")
    assert a1 == pytest.approx(1 + math.pi ** 2 / 8)
    assert a2 == pytest.approx(math.pi ** 2 / 8)


@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999), st.floats(0.5, 200.0), st.floats(0.2, 5.0))
def test_violation_brakes_more_and_steers_less(fx, fy, sx, sy):
    rep = violation_check(RelativeDistance(fx * sx, fy * sy), sx, sy)
    assert rep.longitudinal_violated and rep.lateral_violated
    assert 1.0 < rep.alpha1 <= 1.5
    assert 0.0 <= rep.alpha2 <= 0.5


def test_violation_flags_use_strict_comparison():
    rep = violation_check(RelativeDistance(10.0, 2.0), 10.0, 2.0)
    assert not rep.longitudinal_violated and not rep.lateral_violated
