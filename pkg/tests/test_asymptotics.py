import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from fst.asymptotics import (AsymptoticData, asymptote_eval, compute_etas, find_T0, gap,
                             strip_endpoints)
from fst.errors import DegenerateVelocities, DomainError, NoValidT0


def test_eta_closed_form():
    e1, e2 = compute_etas(1.0, 1.0, -0.5, 0.5)
    mp.mp.dps = 40
    ref = float(mp.mpf("0.75") ** mp.mpf("2.5"))
    assert e1 == pytest.approx(ref, rel=1e-15)
    assert e2 == pytest.approx(ref, rel=1e-15)
    assert e1 == pytest.approx(0.487139, abs=1e-6)


def test_eta_linear_in_coupling():
    e1, e2 = compute_etas(1.0, 1.0, -0.5, 0.5)
    d1, d2 = compute_etas(2.0, 1.0, -0.5, 0.5)
    assert d1 == 2 * e1
    assert d2 == e2


@pytest.mark.parametrize("u, v", [(0.5, 0.5), (0.6, 0.5), (-1.0, 0.5), (-0.5, 1.0)])
def test_degenerate_velocities(u, v):
    with pytest.raises(DegenerateVelocities):
        compute_etas(1.0, 1.0, u, v)


def test_negative_coupling_rejected():
    with pytest.raises(ValueError):
        compute_etas(-1.0, 1.0, -0.5, 0.5)


@given(st.floats(0.01, 0.95), st.floats(0.1, 5.0))
def test_mirror_symmetric_etas_equal(w, kappa):
    e1, e2 = compute_etas(kappa, kappa, -w, w)
    assert e1 == pytest.approx(e2, rel=1e-14)


def test_asymptote_at_minus_e():
    d = AsymptoticData(0.0, -1.0, -0.5, 0.5, 1.0, 1.0)
    pos, vel, acc = asymptote_eval(d, "a", -math.e)
    mp.mp.dps = 40
    eta = mp.mpf("0.75") ** mp.mpf("2.5")
    assert pos == pytest.approx(float(mp.e / 2 - eta), abs=1e-14)
    assert vel == pytest.approx(float(-mp.mpf("0.5") + eta / mp.e), abs=1e-14)
    assert acc == pytest.approx(float(eta / mp.e ** 2), rel=1e-14)


def test_asymptote_without_coupling_is_a_line():
    d = AsymptoticData(0.3, -1.0, -0.5, 0.5, 0.0, 0.0)
    for t in (-1.5, -10.0, -1e4):
        pos, vel, acc = asymptote_eval(d, "a", t)
        assert pos == 0.3 - 0.5 * t
        assert vel == -0.5 and acc == 0.0


def test_asymptote_domain():
    d = AsymptoticData(0.0, -1.0, -0.5, 0.5, 1.0, 1.0)
    for t in (-1.0, -0.5, 3.0):
        with pytest.raises(DomainError):
            asymptote_eval(d, "b", t)


@given(st.floats(-1e6, -1.0001))
def test_acceleration_identity(t):
    d = AsymptoticData(1.0, -1.0, -0.3, 0.5, 1.0, 2.0)
    _, va, aa = asymptote_eval(d, "a", t)
    _, vb, ab = asymptote_eval(d, "b", t)
    assert aa * t * t == pytest.approx(d.eta1, rel=1e-13)
    assert ab * t * t == pytest.approx(-d.eta2, rel=1e-13)
    assert abs(va - d.u_minus_inf) == pytest.approx(d.eta1 / abs(t), rel=1e-9, abs=1e-15)


def test_find_T0_symmetric():
    d = AsymptoticData(1.0, -1.0, -0.5, 0.5, 1.0, 1.0)
    T0 = find_T0(d, 0.01)
    assert T0 < -1
    assert gap(d, T0) > 0
    assert abs(T0 / 0.01 - round(T0 / 0.01)) < 1e-9


def test_find_T0_free_motion_is_first_grid_point_left_of_minus_one():
    d = AsymptoticData(1.0, -1.0, -0.5, 0.5, 0.0, 0.0)
    assert find_T0(d, 0.01) == pytest.approx(-1.01, abs=1e-12)


def test_find_T0_far_out():
    d = AsymptoticData(-50.0, 1.0, -0.01, 0.01, 1.0, 1.0)
    T0 = find_T0(d, 0.01)
    assert T0 < -1e5
    assert gap(d, T0) > 0


def test_find_T0_floor():
    d = AsymptoticData(-50.0, 1.0, -0.01, 0.01, 1.0, 1.0)
    with pytest.raises(NoValidT0):
        find_T0(d, 0.01, floor=-1e3)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.8, -0.05), st.floats(0.05, 0.8), st.floats(0.1, 3.0), st.floats(0.1, 3.0),
       st.floats(0.0, 5.0))
def test_gap_decreasing_left_of_T0(u, v, ka, kb, x0):
    d = AsymptoticData(x0, -x0, u, v, ka, kb)
    T0 = find_T0(d, 0.05)
    for t in (T0, 2 * T0 - 1, 10 * T0 - 5, 1e3 * T0):
        _, xd, _ = asymptote_eval(d, "a", t)
        _, yd, _ = asymptote_eval(d, "b", t)
        assert xd - yd < 0
        assert gap(d, t) > 0


def test_strip_endpoints_solve_cone_equations():
    d = AsymptoticData(1.0, -1.0, -0.4, 0.4, 1.0, 1.0)
    T = -200.0
    tm, tp = strip_endpoints(d, T)
    x = asymptote_eval(d, "a", T)[0]
    assert tm == pytest.approx(T - (x - asymptote_eval(d, "b", tm)[0]), abs=1e-11)
    assert tp == pytest.approx(T + (x - asymptote_eval(d, "b", tp)[0]), abs=1e-11)
    assert tm < T < tp


def test_mirrored_data_swaps_etas():
    d = AsymptoticData(1.0, -2.0, -0.3, 0.5, 1.0, 2.0)
    m = d.mirrored()
    assert m.eta1 == pytest.approx(d.eta2, rel=1e-14)
    assert m.eta2 == pytest.approx(d.eta1, rel=1e-14)
    assert m.mirrored() == d
