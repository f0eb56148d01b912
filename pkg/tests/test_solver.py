import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fst.asymptotics import AsymptoticData, find_T0, tail_coefficients
from fst.dynamics import residual_profile
from fst.errors import ConfigError, NonScattering, ScheduleExhausted
from fst.solver import (SolverConfig, auto_margin, check_scattering, default_schedule,
                        solve_conditional, solve_global)
from fst.trajectory import closed_form, pair_norm_distance

FAST = dict(step=0.05)


@pytest.fixture(scope="module")
def sym50(sym_data):
    return solve_conditional(sym_data, -50.0, SolverConfig(**FAST))


def test_free_motion_is_exact():
    d = AsymptoticData(1.0, -1.0, -0.4, 0.4, 0.0, 0.0)
    sol = solve_conditional(d, -50.0, SolverConfig(**FAST))
    assert sol.picard_iterations == 1
    assert sol.final_update_norm == 0.0
    t = sol.pair.a.times
    assert np.allclose(sol.pair.a.positions, 1.0 - 0.4 * t, atol=1e-12, rtol=0)
    assert np.allclose(sol.pair.b.positions, -1.0 + 0.4 * t, atol=1e-12, rtol=0)


def test_initial_data_exact(sym50, sym_data):
    sol = sym50
    xa, va = closed_form(tail_coefficients(sym_data, "a"), sol.T)
    assert abs(sol.pair.a.positions[0] - xa) < 1e-12
    assert abs(sol.pair.a.velocities[0] - va) < 1e-12
    tb = sol.pair.b.times[sol.pair.b.times <= sol.T_plus]
    yb, wb = closed_form(tail_coefficients(sym_data, "b"), tb)
    assert np.max(np.abs(sol.pair.b.positions[: len(tb)] - yb)) < 1e-12
    assert np.max(np.abs(sol.pair.b.velocities[: len(tb)] - wb)) < 1e-12
    assert sol.T_minus < sol.T < sol.T_plus


def test_picard_updates_decrease(sym50):
    n = np.array(sym50.update_norms)
    above = n[:-1] > 1e-8
    assert np.all(n[1:][above] < n[:-1][above])
    assert sym50.final_update_norm < SolverConfig().tol_fix


def test_solution_satisfies_equations(sym50):
    sol = sym50
    for particle, start in (("a", sol.T), ("b", sol.T_plus)):
        _, res = residual_profile(sol.pair, particle, start, sol.t_end, quad_step=0.05)
        assert np.max(np.abs(res)) < 1e-5


def test_particles_separate_and_stay_subluminal(sym50):
    pair = sym50.pair
    assert np.all(pair.a.positions > pair.b.positions)
    assert np.max(np.abs(pair.a.velocities)) < 1 and np.max(np.abs(pair.b.velocities)) < 1
    # repulsion slows the approach
    assert np.all(np.diff(pair.a.velocities) > 0)
    assert np.all(np.diff(pair.b.velocities[pair.b.times > sym50.T_plus]) < 0)


def test_gauss_seidel_matches_jacobi(sym50, sym_data):
    gs = solve_conditional(sym_data, -50.0, SolverConfig(sweep="gauss-seidel", **FAST))
    assert gs.picard_iterations < sym50.picard_iterations
    assert pair_norm_distance(gs.pair, sym50.pair) < 1e-9


def test_threads_are_bit_identical(sym50, sym_data):
    sol = solve_conditional(sym_data, -50.0, SolverConfig(threads=2, **FAST))
    assert np.array_equal(sol.pair.a.positions, sym50.pair.a.positions)
    assert np.array_equal(sol.pair.b.velocities, sym50.pair.b.velocities)


def test_warm_and_cold_seeds_agree(sym_data):
    sched = [-30.0, -60.0]
    kw = dict(T_schedule=sched, tol_global=np.inf, **FAST)
    warm = solve_global(sym_data, SolverConfig(family_seed="warm", **kw))
    cold = solve_global(sym_data, SolverConfig(family_seed="cold", **kw), workers=2)
    assert warm.deltas == pytest.approx(cold.deltas, abs=1e-8)
    assert pair_norm_distance(warm.final_pair, cold.final_pair) < 1e-8


def test_family_converges(sym_family):
    d = sym_family.deltas
    assert len(d) == 3
    assert all(b < a for a, b in zip(d, d[1:]))
    # roughly halving per doubling of |T|
    assert 0.3 < d[-1] / d[-2] < 0.8


def test_symmetry_defect_decays(sym_family):
    defects = [abs(s.pair.a.eval(0.0)[0] + s.pair.b.eval(0.0)[0]) for s in sym_family.family]
    assert all(b < a for a, b in zip(defects, defects[1:]))


def test_single_member_schedule_exhausts(sym_data):
    with pytest.raises(ScheduleExhausted) as err:
        solve_global(sym_data, SolverConfig(T_schedule=[-30.0], **FAST))
    assert len(err.value.run.family) == 1
    assert not err.value.run.converged


def test_non_scattering_rejected():
    d = AsymptoticData(-50.0, 1.0, -0.01, 0.01, 1.0, 1.0)
    with pytest.raises(NonScattering):
        check_scattering(d, -100.0)
    with pytest.raises(NonScattering):
        solve_conditional(d, -100.0, SolverConfig(**FAST))


def test_default_schedule_doubles(sym_data):
    cfg = SolverConfig(schedule_length=4)
    T0 = find_T0(sym_data, cfg.step)
    assert default_schedule(sym_data, cfg) == [T0, 2 * T0, 4 * T0, 8 * T0]


def test_margin_is_whole_units(sym_data):
    for h in (0.05, 0.02):
        m = auto_margin(sym_data, -50.0, SolverConfig(step=h))
        assert m == int(m) and m > 0
    assert auto_margin(sym_data, -50.0, SolverConfig(margin=3.5)) == 3.5


@pytest.mark.parametrize("kw", [dict(step=0.0), dict(damping=1.5), dict(damping=0.0),
                                dict(sweep="sor"), dict(family_seed="hot"), dict(max_picard=0),
                                dict(T_schedule=[-10.0, -5.0]), dict(T_schedule=[]),
                                dict(threads=0), dict(margin=-1.0), dict(schedule_ratio=1.0),
                                dict(tol_cone=0.0)])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        SolverConfig(**kw)


def test_config_from_dict():
    assert SolverConfig.from_dict({"step": 0.02}).step == 0.02
    with pytest.raises(ConfigError, match="unknown"):
        SolverConfig.from_dict({"stepsize": 0.02})


@settings(max_examples=6, deadline=None)
@given(st.floats(-0.6, -0.2), st.floats(0.2, 0.6), st.floats(0.5, 2.0), st.floats(0.5, 2.0))
def test_random_data_solves(u, v, ka, kb):
    d = AsymptoticData(1.0, -1.0, u, v, ka, kb)
    T = min(-30.0, find_T0(d, 0.1))
    sol = solve_conditional(d, T, SolverConfig(step=0.1))
    assert sol.final_update_norm < 1e-10
    assert np.all(sol.pair.a.positions > sol.pair.b.positions)
    _, res = residual_profile(sol.pair, "a", sol.T, sol.t_end, quad_step=0.1)
    assert np.max(np.abs(res)) < 1e-3
