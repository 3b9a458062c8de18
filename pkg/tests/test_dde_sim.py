"""Direct integration: config validation, step-size order, equilibrium
invariance, behavior on both sides of the first crossing, events, and the
oscillation metrics."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from keendelay import dde_sim as sim
from keendelay import equilibria as eqm
from keendelay.model_core import State


def eq_state(eq, d_omega=0.0):
    return State(eq.omega_star + d_omega, eq.lambda_star, eq.b_star)


class TestConfig:
    def test_accepts_reference_setup(self):
        cfg = sim.SimConfig(tau=0.85, dt=0.01, t_end=500.0,
                            initial=State(0.837, 0.968, 0.064))
        assert cfg.delay_steps == 85
        assert cfg.n_steps == 50_000
        assert cfg.history_state() == cfg.initial

    @pytest.mark.parametrize(
        "kw",
        [
            dict(dt=0.0),
            dict(dt=-0.01),
            dict(dt=math.nan),
            dict(t_end=0.0),
            dict(t_end=math.inf),
            dict(tau=-0.1),
            dict(tau=math.inf),
            dict(tau=0.85, dt=0.2),  # delay not a multiple of dt
            dict(tau=0.03, dt=0.01),  # fewer than 4 nodes per delay
        ],
    )
    def test_rejects_bad_setups(self, kw):
        base = dict(tau=0.0, dt=0.01, t_end=10.0,
                    initial=State(0.8, 0.9, 0.1))
        base.update(kw)
        with pytest.raises(sim.SimConfigError):
            sim.SimConfig(**base)

    def test_step_count_rounds_up(self):
        cfg = sim.SimConfig(tau=0.0, dt=0.01, t_end=1.005,
                            initial=State(0.8, 0.9, 0.1))
        assert cfg.n_steps == 101

    def test_explicit_history(self):
        cfg = sim.SimConfig(tau=0.5, dt=0.01, t_end=1.0,
                            initial=State(0.8, 0.9, 0.1),
                            history=State(0.5, 0.9, 0.1))
        assert cfg.history_state().omega == 0.5

    @pytest.mark.parametrize("lam0", [0.0, -0.2, 1.0 - 1e-7, 1.5])
    def test_simulate_rejects_boundary_start(self, ref_params, lam0):
        cfg = sim.SimConfig(tau=0.0, dt=0.01, t_end=1.0,
                            initial=State(0.8, lam0, 0.1))
        with pytest.raises(sim.SimConfigError):
            sim.simulate(ref_params, cfg)


class TestRhs:
    def test_matches_stationarity_function(self, ref_params):
        for w, lam, b, wd in [(0.8, 0.9, 0.1, 0.8), (0.6, 0.5, -0.2, 0.7),
                              (0.95, 0.99, 1.5, 0.2)]:
            got = sim.rhs(ref_params, State(w, lam, b), wd)
            want = eqm.system_rhs(ref_params, w, lam, b, wd)
            assert got.as_tuple() == pytest.approx(want, rel=1e-12)

    def test_pole_guard(self, ref_params):
        with pytest.raises(sim.SingularityError):
            sim.rhs(ref_params, State(0.8, 1.0 - 1e-10, 0.1), 0.8)


class TestAccuracy:
    def run_final(self, p, dt):
        cfg = sim.SimConfig(tau=0.0, dt=dt, t_end=5.0,
                            initial=State(0.83, 0.95, 0.1))
        traj = sim.simulate(p, cfg)
        assert traj.complete
        return traj.states[-1]

    def test_fourth_order_convergence(self, ref_params):
        ref = self.run_final(ref_params, 0.003125)
        e_coarse = np.linalg.norm(self.run_final(ref_params, 0.1) - ref)
        e_fine = np.linalg.norm(self.run_final(ref_params, 0.05) - ref)
        factor = e_coarse / e_fine
        assert 12.0 <= factor <= 20.0

    def test_history_changes_outcome(self, ref_params, eq_stable):
        base = dict(tau=0.5, dt=0.01, t_end=2.0, initial=eq_state(eq_stable))
        still = sim.simulate(ref_params, sim.SimConfig(**base))
        kicked = sim.simulate(ref_params, sim.SimConfig(
            history=State(eq_stable.omega_star + 0.01,
                          eq_stable.lambda_star, eq_stable.b_star), **base))
        assert np.max(np.abs(kicked.states - still.states)) > 1e-6


class TestNearCrossing:
    def test_equilibrium_invariance(self, ref_params, eq_stable):
        cfg = sim.SimConfig(tau=0.85, dt=0.01, t_end=100.0,
                            initial=eq_state(eq_stable))
        traj = sim.simulate(ref_params, cfg)
        assert traj.complete
        ref = np.array(eq_state(eq_stable).as_tuple())
        assert np.max(np.abs(traj.states - ref)) < 1e-8

    def test_decay_below_crossing(self, ref_params, eq_stable):
        cfg = sim.SimConfig(tau=0.80, dt=0.01, t_end=120.0,
                            initial=eq_state(eq_stable, d_omega=1e-3))
        traj = sim.simulate(ref_params, cfg)
        m = sim.oscillation_metrics(traj, eq_stable)
        assert m.window_amplitudes[-1] < 0.8 * m.window_amplitudes[0]

    def test_growth_above_crossing(self, ref_params, eq_stable):
        cfg = sim.SimConfig(tau=0.85, dt=0.01, t_end=120.0,
                            initial=eq_state(eq_stable, d_omega=1e-3))
        traj = sim.simulate(ref_params, cfg)
        m = sim.oscillation_metrics(traj, eq_stable)
        assert m.window_amplitudes[-1] > 1.2 * m.window_amplitudes[0]

    def test_emergent_period(self, ref_params, eq_stable):
        cfg = sim.SimConfig(tau=0.85, dt=0.01, t_end=300.0,
                            initial=State(0.837, 0.968, 0.064))
        traj = sim.simulate(ref_params, cfg)
        m = sim.oscillation_metrics(traj, eq_stable)
        assert not m.insufficient
        assert m.period == pytest.approx(2.913, rel=0.05)


class TestEvents:
    def test_full_employment_halt(self, ref_params):
        # high profit share drives explosive hiring straight into the guard
        cfg = sim.SimConfig(tau=0.0, dt=0.01, t_end=50.0,
                            initial=State(0.5, 0.95, 0.0))
        traj = sim.simulate(ref_params, cfg)
        assert not traj.complete
        kind, t_halt = traj.events[0]
        assert kind == "lambda-approaching-1"
        assert t_halt == pytest.approx(traj.times[-1] + 0.01, abs=1e-12)
        assert np.max(traj.states[:, 1]) < 1.0

    def test_nonfinite_halt(self, ref_params):
        # debt near the float ceiling keeps compounding until it overflows,
        # while employment only decays and stays clear of its own guards
        cfg = sim.SimConfig(tau=0.0, dt=0.01, t_end=10.0,
                            initial=State(0.8, 0.5, 1.5e308))
        traj = sim.simulate(ref_params, cfg)
        assert not traj.complete
        assert traj.events[0][0] == "nonfinite-value"
        assert np.all(np.isfinite(traj.states))


class TestMetrics:
    def test_short_trajectory_rejected(self, eq_stable):
        traj = sim.Trajectory(times=np.arange(4.0), states=np.zeros((4, 3)),
                              derivs=np.zeros((4, 3)), events=[])
        with pytest.raises(ValueError):
            sim.oscillation_metrics(traj, eq_stable)

    def test_known_sine_recovered(self):
        ref = SimpleNamespace(omega_star=0.8, lambda_star=0.9, b_star=0.1)
        t = np.linspace(0.0, 60.0, 6001)
        states = np.column_stack([
            0.8 + 0.01 * np.sin(2.0 * np.pi * t / 3.7),
            np.full_like(t, 0.9),
            np.full_like(t, 0.1),
        ])
        traj = sim.Trajectory(times=t, states=states,
                              derivs=np.zeros_like(states), events=[])
        m = sim.oscillation_metrics(traj, ref)
        assert not m.insufficient
        assert m.period == pytest.approx(3.7, rel=1e-3)
        assert max(m.window_amplitudes) == pytest.approx(0.01, rel=1e-3)

    def test_monotone_is_insufficient(self):
        ref = SimpleNamespace(omega_star=0.0, lambda_star=0.0, b_star=0.0)
        t = np.linspace(0.0, 10.0, 101)
        states = np.column_stack([t, t, t])
        traj = sim.Trajectory(times=t, states=states,
                              derivs=np.zeros_like(states), events=[])
        m = sim.oscillation_metrics(traj, ref)
        assert m.insufficient
        assert m.period is None
