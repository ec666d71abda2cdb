"""Contour machinery: arrivals, windows, and the two contour solvers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poroseis.cagniard import (Geometry, WaveBranch, WaveKind, arrival_times,
                               fictitious_arrival, gamma, head_window,
                               phase_time, q0_of_t, q1_of_t,
                               reflected_branch, snell_time,
                               transmitted_branches, upsilon, volume_window)
from poroseis.errors import DomainError


@pytest.fixture(scope="module")
def branches(acoustic, poro):
    return transmitted_branches(acoustic, poro)


@pytest.fixture(scope="module")
def fluid_geom():
    return Geometry(h=500.0, x=400.0, z=533.0)


@pytest.fixture(scope="module")
def porous_geom():
    return Geometry(h=500.0, x=400.0, z=-533.0)


@pytest.fixture(scope="module")
def wide_geom():
    """Offset chosen post-critical for every wave slower than the fast P."""
    return Geometry(h=500.0, x=800.0, z=-200.0)


def test_reflected_arrival_is_image_distance(acoustic, fluid_geom):
    branch = reflected_branch(acoustic)
    r = math.hypot(400.0, 533.0 + 500.0)
    assert fluid_geom.r == pytest.approx(r, rel=1e-15)
    t0 = fictitious_arrival(0.0, fluid_geom, branch)
    assert t0 == pytest.approx(r / 1500.0, rel=1e-14)
    for q in (1e-5, 3e-4, 2e-3):
        expect = r * math.sqrt(1.0 / 1500.0 ** 2 + q * q)
        assert fictitious_arrival(q, fluid_geom, branch) == pytest.approx(
            expect, rel=1e-14)


def test_geometry_rejects_bad_layout():
    with pytest.raises(ValueError):
        Geometry(h=-1.0, x=400.0, z=533.0)
    with pytest.raises(ValueError):
        Geometry(h=500.0, x=-4.0, z=533.0)


def test_side_checks(acoustic, branches, fluid_geom, porous_geom):
    """Reflected needs z >= 0, transmitted z <= 0; the wrong side raises."""
    refl = reflected_branch(acoustic)
    with pytest.raises(DomainError):
        fictitious_arrival(0.0, porous_geom, refl)
    with pytest.raises(DomainError):
        fictitious_arrival(0.0, fluid_geom, branches[WaveKind.TRANSMITTED_PF])


def test_transmitted_arrival_roundtrip(branches, porous_geom):
    """q0_of_t inverts the fictitious arrival on every transmitted branch."""
    for branch in branches.values():
        t0 = fictitious_arrival(0.0, porous_geom, branch)
        for t in np.linspace(1.02 * t0, 2.0 * t0, 50):
            q = q0_of_t(float(t), porous_geom, branch)
            back = fictitious_arrival(q, porous_geom, branch)
            assert abs(back - t) <= 1e-9 * t


def test_arrival_increases_with_slowness(branches, porous_geom):
    branch = branches[WaveKind.TRANSMITTED_PS]
    qs = np.linspace(0.0, 5e-3, 40)
    ts = [fictitious_arrival(float(q), porous_geom, branch) for q in qs]
    assert all(b > a for a, b in zip(ts, ts[1:]))


@settings(max_examples=60, deadline=None)
@given(frac=st.floats(0.0, 1.0), q=st.floats(0.0, 4e-3),
       x=st.floats(50.0, 1500.0), d=st.floats(20.0, 1500.0))
def test_stationary_crossing_is_minimal(frac, q, x, d):
    """No interface crossing beats the one the quartic selects."""
    geom = Geometry(h=400.0, x=x, z=-d)
    wb = WaveBranch(WaveKind.TRANSMITTED_S, 1500.0, 2377.691210598581)
    best = fictitious_arrival(q, geom, wb)
    probe = float(snell_time(frac * x, q, geom, wb))
    assert probe >= best - 1e-12 * best


def test_head_exists_only_past_critical(acoustic, poro, model):
    """The fixture reflection geometry is subcritical; a wider one is not."""
    branch = reflected_branch(acoustic)
    near = arrival_times(Geometry(h=500.0, x=400.0, z=533.0), branch,
                         model.v_max)
    far = arrival_times(Geometry(h=500.0, x=800.0, z=100.0), branch,
                        model.v_max)
    assert not near.head_exists
    assert math.isnan(near.t_h1) and math.isnan(near.q_max)
    assert far.head_exists
    assert far.t_h1 < far.t0 < far.t_h2
    assert far.q_max > 0.0


def test_head_segment_tangency(acoustic, model):
    """Head onset and volume arrival meet tangentially at q_max.

    The volume-minus-head gap has a double root there: it stays positive on
    both sides and only touches zero.  What changes sign is the saddle
    slowness measured against the fastest branch point.
    """
    branch = reflected_branch(acoustic)
    geom = Geometry(h=500.0, x=800.0, z=100.0)
    arr = arrival_times(geom, branch, model.v_max)
    qm = arr.q_max

    def gap(q):
        t_vol = fictitious_arrival(q, geom, branch)
        c1 = math.sqrt(1.0 / branch.v_top ** 2 - 1.0 / model.v_max ** 2)
        t_head = (geom.z + geom.h) * c1 \
            + geom.x * math.sqrt(1.0 / model.v_max ** 2 + q * q)
        return t_vol - t_head

    def saddle_excess(q):
        p0 = (geom.x / geom.r) * math.sqrt(1.0 / branch.v_top ** 2 + q * q)
        return p0 - math.sqrt(1.0 / model.v_max ** 2 + q * q)

    assert gap(0.5 * qm) > 0.0
    assert abs(gap(qm)) <= 1e-9 * arr.t0
    assert gap(1.5 * qm) > 0.0
    assert saddle_excess(0.5 * qm) > 0.0
    assert saddle_excess(1.5 * qm) < 0.0
    assert abs(saddle_excess(qm)) <= 1e-12 / branch.v_top


def test_head_window_shape(branches, wide_geom, model):
    """(0, q1) between onset and arrival, (q0, q1) afterwards, else None."""
    branch = branches[WaveKind.TRANSMITTED_PS]
    arr = arrival_times(wide_geom, branch, model.v_max)
    assert arr.head_exists

    assert head_window(0.99 * arr.t_h1, arr, wide_geom, branch,
                       model.v_max) is None
    assert head_window(1.01 * arr.t_h2, arr, wide_geom, branch,
                       model.v_max) is None

    t_early = 0.5 * (arr.t_h1 + arr.t0)
    lo, hi = head_window(t_early, arr, wide_geom, branch, model.v_max)
    assert lo == 0.0
    assert hi == pytest.approx(q1_of_t(t_early, wide_geom, branch,
                                       model.v_max), rel=1e-14)

    t_late = 0.5 * (arr.t0 + arr.t_h2)
    lo, hi = head_window(t_late, arr, wide_geom, branch, model.v_max)
    assert 0.0 < lo < hi
    assert lo == pytest.approx(q0_of_t(t_late, wide_geom, branch), rel=1e-12)
    assert hi <= arr.q_max * (1.0 + 1e-12)


def test_volume_window_closes_before_arrival(branches, porous_geom, model):
    branch = branches[WaveKind.TRANSMITTED_PF]
    arr = arrival_times(porous_geom, branch, model.v_max)
    assert volume_window(0.999 * arr.t0, arr, porous_geom, branch) is None
    win = volume_window(1.05 * arr.t0, arr, porous_geom, branch)
    assert win is not None and win[0] == 0.0 and win[1] > 0.0


def test_volume_contour_solves_phase_time(acoustic, branches, fluid_geom,
                                          porous_geom):
    """T(gamma(t, q)) = t to 1e-10 s across branches, times and slownesses."""
    refl = reflected_branch(acoustic)
    cases = [(fluid_geom, refl)] + [(porous_geom, b)
                                    for b in branches.values()]
    for geom, branch in cases:
        t0 = fictitious_arrival(0.0, geom, branch)
        for t in np.linspace(1.01 * t0, 1.8 * t0, 7):
            qhi = q0_of_t(float(t), geom, branch)
            for q in np.linspace(0.0, 0.98 * qhi, 5):
                point = gamma(float(t), float(q), geom, branch)
                assert point.residual <= 1e-10
                val = phase_time(point.value, float(q), geom, branch)
                assert abs(val - t) <= 1e-10
                assert point.value.real >= -1e-18


def test_volume_contour_time_derivative(branches, porous_geom):
    """dgamma/dt agrees with a centered difference of the solved contour."""
    branch = branches[WaveKind.TRANSMITTED_S]
    t0 = fictitious_arrival(0.0, porous_geom, branch)
    t = 1.3 * t0
    dt = 1e-7 * t
    qhi = q0_of_t(t, porous_geom, branch)
    for q in (0.0, 0.3 * qhi, 0.8 * qhi):
        mid = gamma(t, q, porous_geom, branch)
        hi = gamma(t + dt, q, porous_geom, branch)
        lo = gamma(t - dt, q, porous_geom, branch)
        fd = (hi.value - lo.value) / (2.0 * dt)
        assert abs(fd - mid.dt) <= 1e-5 * abs(mid.dt)


def test_zero_offset_contour_is_real(branches):
    """With no horizontal offset the deformed contour runs up the real axis."""
    geom = Geometry(h=500.0, x=0.0, z=-300.0)
    branch = branches[WaveKind.TRANSMITTED_PS]
    t0 = fictitious_arrival(0.0, geom, branch)
    point = gamma(1.4 * t0, 0.0, geom, branch)
    assert point.value.imag == pytest.approx(0.0, abs=1e-16)
    assert point.value.real > 0.0


def test_contour_launches_at_saddle(branches, porous_geom):
    """As t drops to the arrival the contour start approaches -i*p0(q).

    The gap closes like sqrt(t - t0), so shrinking the time excess by 16
    must shrink the distance by about 4.
    """
    from poroseis.cagniard import _p0_vec

    branch = branches[WaveKind.TRANSMITTED_PF]
    q = 1e-4
    t0q = fictitious_arrival(q, porous_geom, branch)
    p0 = float(_p0_vec(np.array([q]), porous_geom, branch)[0])
    d1 = abs(gamma(t0q * (1.0 + 1e-6), q, porous_geom, branch).value
             - (-1j) * p0)
    d2 = abs(gamma(t0q * (1.0 + 1e-6 / 16.0), q, porous_geom, branch).value
             - (-1j) * p0)
    assert d2 < d1
    assert d2 == pytest.approx(d1 / 4.0, rel=0.2)


def test_gamma_rejects_pre_arrival_times(branches, porous_geom):
    branch = branches[WaveKind.TRANSMITTED_PF]
    t0 = fictitious_arrival(0.0, porous_geom, branch)
    with pytest.raises(DomainError):
        gamma(0.99 * t0, 0.0, porous_geom, branch)


def test_head_contour_is_imaginary_segment(branches, wide_geom, model):
    """Head points sit on the negative imaginary axis between tip and saddle."""
    from poroseis.cagniard import _p0_vec

    branch = branches[WaveKind.TRANSMITTED_S]
    arr = arrival_times(wide_geom, branch, model.v_max)
    assert arr.head_exists
    for frac in (0.25, 0.5, 0.75):
        t = arr.t_h1 + frac * (min(arr.t0, arr.t_h2) - arr.t_h1)
        lo, hi = head_window(t, arr, wide_geom, branch, model.v_max)
        for q in np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 4):
            point = upsilon(float(t), float(q), wide_geom, branch, model.v_max)
            assert point.value.real == 0.0
            zeta = -point.value.imag
            tip = math.sqrt(1.0 / model.v_max ** 2 + q * q)
            p0 = float(_p0_vec(np.array([q]), wide_geom, branch)[0])
            assert tip <= zeta <= p0 * (1.0 + 1e-12)
            assert point.residual <= 1e-10
            assert point.dt.imag < 0.0


def test_upsilon_rejects_points_outside_segment(branches, wide_geom, model):
    branch = branches[WaveKind.TRANSMITTED_S]
    arr = arrival_times(wide_geom, branch, model.v_max)
    with pytest.raises(DomainError):
        upsilon(0.5 * arr.t_h1, 0.0, wide_geom, branch, model.v_max)
    t = 0.5 * (arr.t_h1 + min(arr.t0, arr.t_h2))
    _, hi = head_window(t, arr, wide_geom, branch, model.v_max)
    with pytest.raises(DomainError):
        upsilon(t, 2.0 * hi, wide_geom, branch, model.v_max)


def test_q1_rejects_zero_offset(branches, model):
    geom = Geometry(h=500.0, x=0.0, z=-300.0)
    with pytest.raises(DomainError):
        q1_of_t(0.5, geom, branches[WaveKind.TRANSMITTED_PS], model.v_max)
