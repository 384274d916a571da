import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cantornet.errors import DomainError, NotOnLineError
from cantornet.linedyn import (
    diagram_residual,
    embed,
    g,
    g_orbit,
    g_tilde,
    g_tilde_array,
    off_ray,
    project,
)
from cantornet.netcore import network_map


def g_tilde_reference(t, delta):
    theta = 2 * (1 - delta)
    if t < theta:
        return t / 2 + delta
    if t <= 1:
        return t / 2 + delta - 1
    return delta - 0.5


def test_g_tilde_landmarks(dp):
    assert g_tilde(0.0, dp) == dp.delta
    assert g_tilde(0.0, dp) == pytest.approx(0.6450983, abs=1e-7)
    assert g_tilde(dp.theta, dp) == 0.0
    assert g_tilde(2.0, dp) == pytest.approx(0.1450983, abs=1e-7)
    assert g_tilde(1.0, dp) == dp.delta - 0.5


def test_g_landmarks(dp):
    assert g(0.0, dp) == dp.delta
    assert g(1.0, dp) == dp.delta - 0.5
    assert g(dp.theta, dp) == 0.0


def test_domains(dp):
    with pytest.raises(DomainError):
        g_tilde(-1e-300, dp)
    with pytest.raises(DomainError):
        g(1.0 + 1e-15, dp)
    with pytest.raises(DomainError):
        g(-0.1, dp)


def test_matches_reference(dp):
    for t in np.linspace(0, 3, 30001):
        assert g_tilde(t, dp) == pytest.approx(g_tilde_reference(t, dp.delta), abs=2e-16)


def test_g_equals_g_tilde_on_unit_interval(dp):
    ts = np.linspace(0, 1, 10001)
    assert all(g(t, dp) == g_tilde(t, dp) for t in ts)
    assert np.array_equal(g_tilde_array(ts, dp), [g_tilde(t, dp) for t in ts])


def test_ranges(dp):
    ts = np.concatenate([np.linspace(0, 5, 50001), np.random.default_rng(0).uniform(0, 100, 10000)])
    out = g_tilde_array(ts, dp)
    assert out.min() >= 0.0 and out.max() <= 1.0


@settings(max_examples=300)
@given(s=st.floats(0, 1), t=st.floats(0, 1))
def test_exact_half_slope(s, t):
    from cantornet.fibodelta import compute_delta

    dp = compute_delta(64)
    if (s < dp.theta) != (t < dp.theta):
        return
    diff = abs(g(s, dp) - g(t, dp))
    assert abs(diff - abs(s - t) / 2) <= math.ulp(1.0)


def test_embed_project(net4):
    assert np.array_equal(embed(0.0, net4), np.zeros(4))
    assert np.array_equal(embed(1.0, net4), net4.v)
    assert project(embed(0.37, net4), net4) == pytest.approx(0.37, abs=1e-15)
    with pytest.raises(NotOnLineError) as info:
        project(net4.v + np.array([1e-3, 0, 0, 0]), net4)
    assert info.value.residual > 1e-9
    with pytest.raises(DomainError):
        embed(-0.5, net4)


def test_diagram_residual(networks):
    rng = np.random.default_rng(1)
    for p in networks.values():
        assert diagram_residual(0.0, p) <= 1e-15
        assert diagram_residual(1.0, p) <= 1e-12
        worst = max(diagram_residual(t, p) for t in rng.uniform(0, 2, 2000))
        assert worst <= 1e-12


def test_one_step_conjugacy_along_network_orbit(networks):
    # Wherever the network orbit sits on the ray away from the two thresholds,
    # its next step read through the projection is one g~ step.
    for p in networks.values():
        x = embed(0.37, p)
        checked = 0
        for _ in range(3000):
            t, off = off_ray(x, p)
            nxt = network_map(x, p)
            if off <= 1e-12 and min(abs(t - p.theta), abs(t - 1.0)) > 1e-9:
                assert abs(off_ray(nxt, p)[0] - g_tilde(t, p.delta_params)) <= 1e-12
                checked += 1
            x = nxt
        assert checked > 100


class TestOrbit:
    def test_examples(self, dp):
        o = g_orbit(1.0, 1, dp)
        assert o.values.tolist() == [1.0, dp.delta - 0.5]
        o = g_orbit(dp.theta, 2, dp)
        assert o.values.tolist() == [dp.theta, 0.0, dp.delta]
        assert o.itinerary.tolist() == [True, False, False]

    def test_long_orbit_range(self, dp):
        o = g_orbit(0.0, 10**6, dp)
        assert o.values.min() >= 0.0 and o.values.max() <= 1.0
        assert len(o.values) == 10**6 + 1

    def test_consistency(self, dp):
        o = g_orbit(0.123, 500, dp)
        assert all(g(a, dp) == b for a, b in zip(o.values[:-1], o.values[1:]))
        assert np.array_equal(o.itinerary, o.values >= dp.theta)

    def test_serialization(self, dp):
        o = g_orbit(dp.theta, 2, dp)
        assert o.itinerary_string() == "100"
        lines = o.to_csv().splitlines()
        assert lines[0] == "k,t,branch"
        assert lines[2] == "1,0,0"
        assert float(lines[1].split(",")[1]) == dp.theta

    def test_domain(self, dp):
        with pytest.raises(DomainError):
            g_orbit(1.5, 3, dp)
