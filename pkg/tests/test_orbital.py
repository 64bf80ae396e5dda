import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leohfl.errors import NotInCoverage
from leohfl.orbital import (GatewayConfig, GroundPoint, OrbitTrack, SatelliteState, in_coverage,
                            position_at, window_time)

V = 28_000 / 3600  # km/s
CENTER = GroundPoint(1500.0, 2000.0 / 3.0)


def make_sat(radius=1200.0, phase=0.0, direction=1, center=CENTER, altitude=500.0):
    track = OrbitTrack.from_speed(center, radius, altitude, V)
    return SatelliteState(id=0, track=track, phase=phase, direction=direction, data_count=10,
                          energy_budget=1e5)


def gw(x=0.0, y=0.0, radius=2200.0, gid=0):
    return GatewayConfig(id=gid, position=GroundPoint(x, y), coverage_radius=radius)


def brute_force_window(sat, gateway, step=0.1):
    """Step the clock until the satellite first leaves coverage."""
    t = 0.0
    while t < sat.track.period:
        if not in_coverage(position_at(sat, t + step), gateway):
            return t + step
        t += step
    return sat.track.period


# position_at

def test_zero_time_is_start_point():
    p = position_at(make_sat(), 0.0)
    assert p.x == pytest.approx(CENTER.x + 1200.0)
    assert p.y == pytest.approx(CENTER.y)
    assert p.z == pytest.approx(500.0)


def test_full_period_returns_to_start():
    sat = make_sat(1200.0, phase=0.7)
    period = 2 * math.pi * 1200.0 / V
    a, b = position_at(sat, 0.0), position_at(sat, period)
    assert a.distance(b) < 1e-6


@pytest.mark.parametrize("direction", [1, -1])
def test_quarter_period_rotates_start_vector(direction):
    sat = make_sat(2200.0, phase=0.3, direction=direction)
    quarter = 0.25 * 2 * math.pi * 2200.0 / V
    start = position_at(sat, 0.0).as_array() - CENTER.as_array()
    angle = direction * math.pi / 2
    rot = np.array([[math.cos(angle), -math.sin(angle), 0],
                    [math.sin(angle), math.cos(angle), 0],
                    [0, 0, 1]])
    expected = CENTER.as_array() + rot @ start
    assert np.allclose(position_at(sat, quarter).as_array(), expected, atol=1e-6)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        position_at(make_sat(), -1.0)


@settings(max_examples=100, deadline=None)
@given(radius=st.floats(100, 5000), phase=st.floats(0, 2 * math.pi),
       direction=st.sampled_from([1, -1]), t=st.floats(0, 1e5))
def test_periodicity_property(radius, phase, direction, t):
    sat = make_sat(radius, phase, direction)
    a = position_at(sat, t)
    b = position_at(sat, t + sat.track.period)
    assert a.distance(b) < 1e-6


@pytest.mark.parametrize("radius", [1200.0, 1700.0, 2200.0])
def test_numerical_speed_matches_linear_speed(radius):
    sat = make_sat(radius, phase=1.1)
    for delta in (1e-1, 1e-2):
        d = position_at(sat, 5.0 + delta).distance(position_at(sat, 5.0)) / delta
        assert d == pytest.approx(V, rel=1e-3)


# in_coverage

def test_directly_overhead_is_covered():
    assert in_coverage(GroundPoint(0.0, 0.0, 500.0), gw())


def test_boundary_is_covered():
    assert in_coverage(GroundPoint(2200.0, 0.0, 500.0), gw())
    assert not in_coverage(GroundPoint(2200.0 + 1e-9, 0.0, 500.0), gw())


def test_table_geometry_point_outside_first_gateway():
    p = GroundPoint(1500.0, 2000.0 / 3.0 + 2200.0, 500.0)
    planar = math.sqrt(1500.0 ** 2 + (2000.0 / 3.0 + 2200.0) ** 2)
    assert planar == pytest.approx(3235.39, abs=0.01)
    assert not in_coverage(p, gw())
    assert in_coverage(p, gw(1500.0, 2000.0))


# window_time

def test_window_is_distance_over_speed():
    # DIS = 28,000 km of remaining arc at 28,000 km/h: one radian on a
    # 28,000 km track, with the gateway placed so the exit is one radian ahead
    track = OrbitTrack.from_speed(GroundPoint(0, 0), 28_000.0, 0.0, 28_000.0 / 3600.0)
    sat = SatelliteState(0, track, phase=0.0, direction=1)
    q = 40_000.0
    a = 2.0  # exit angle measured from the gateway bearing
    R = math.sqrt(q * q + track.radius ** 2 + 2 * track.radius * q * math.cos(a))
    # bearing psi from gateway to track centre; satellite at alpha = 2*pi - a - 1
    psi = -(2 * math.pi - a - 1.0)
    gw_pos = GroundPoint(-q * math.cos(psi), -q * math.sin(psi))
    g = GatewayConfig(0, gw_pos, coverage_radius=R)
    assert window_time(sat, g) == pytest.approx(3600.0, rel=1e-9)


def test_track_fully_inside_gets_one_period():
    sat = make_sat(1200.0, center=GroundPoint(0, 0))
    assert window_time(sat, gw()) == pytest.approx(2 * math.pi * 1200.0 / V)


def test_not_in_coverage_raises():
    sat = make_sat(1200.0, center=GroundPoint(10_000, 0))
    with pytest.raises(NotInCoverage):
        window_time(sat, gw())


def test_window_monotone_as_phase_advances():
    g = gw()
    for direction in (1, -1):
        phases = np.linspace(0, 2 * np.pi, 721)[:-1]
        inside = [p for p in phases if in_coverage(position_at(make_sat(1700.0, p, direction)), g)]
        start = inside[0]
        w0 = window_time(make_sat(1700.0, start, direction), g)
        prev = math.inf
        t = 0.0
        while t < w0 - 1.0:
            w = window_time(make_sat(1700.0, start, direction).advanced(t), g)
            assert w < prev
            prev = w
            t += 10.0


def test_window_matches_brute_force_oracle():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 50:
        radius = rng.uniform(500, 3000)
        center = GroundPoint(*rng.uniform(-2000, 2000, size=2))
        sat = make_sat(radius, rng.uniform(0, 2 * np.pi), int(rng.choice([1, -1])), center)
        g = gw(*rng.uniform(-2000, 2000, size=2), radius=rng.uniform(1000, 3000))
        if not in_coverage(position_at(sat), g):
            continue
        assert abs(window_time(sat, g) - brute_force_window(sat, g)) <= 1.0
        checked += 1
