"""Direct simulation of the delayed system by the method of steps.

Classic fourth-order Runge-Kutta on a fixed grid whose step divides the
delay, so whole-step delayed reads hit stored nodes exactly; half-step reads
use cubic Hermite interpolation from the bracketing nodes.  The pre-history
is a constant state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import model_core as mc
from .kernels import sim_steps
from .model_core import ModelParams, State


class SimConfigError(ValueError):
    """A simulation setting violates the grid or state constraints."""


class SingularityError(ValueError):
    """The employment rate sits inside the guard band of the wage-curve pole."""


EVENT_NAMES = {
    1: "lambda-approaching-1",
    2: "lambda-nonpositive",
    3: "nonfinite-value",
}

_POLE_GUARD = 1.0 - 1e-9  # rhs refuses evaluation above this
_EVENT_GUARD = 1.0 - 1e-6  # integration halts above this


@dataclass(frozen=True)
class SimConfig:
    tau: float
    dt: float
    t_end: float
    initial: State
    history: Optional[State] = None  # constant pre-history; defaults to initial

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise SimConfigError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > 0.0 and math.isfinite(self.t_end)):
            raise SimConfigError(f"t_end must be positive, got {self.t_end}")
        if self.tau < 0.0 or not math.isfinite(self.tau):
            raise SimConfigError(f"delay must be nonnegative, got {self.tau}")
        if self.tau > 0.0:
            n = self.tau / self.dt
            if abs(n - round(n)) > 1e-9 * max(1.0, n) or round(n) < 4:
                raise SimConfigError(
                    f"dt must divide the delay at least 4 times, got "
                    f"tau/dt = {n}")

    @property
    def delay_steps(self) -> int:
        return int(round(self.tau / self.dt)) if self.tau > 0.0 else 0

    @property
    def n_steps(self) -> int:
        n = self.t_end / self.dt
        # land on t_end when it sits on the grid, otherwise first node past it
        return int(round(n)) if abs(n - round(n)) < 1e-9 else int(math.ceil(n))

    def history_state(self) -> State:
        return self.history if self.history is not None else self.initial


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # rows (omega, lambda, b)
    derivs: np.ndarray  # rhs at each node, kept for interpolation
    events: list = field(default_factory=list)  # (kind, time) pairs

    @property
    def complete(self) -> bool:
        return not self.events

    def final_state(self) -> State:
        w, lam, b = self.states[-1]
        return State(w, lam, b)


def rhs(p: ModelParams, state: State, omega_delayed: float) -> State:
    """Instantaneous rates of the three variables.

    The wage curve is evaluated inline: the curve helper rejects employment
    below zero, but the integrator needs the algebraic continuation there.
    """
    if state.lam >= _POLE_GUARD:
        raise SingularityError(
            f"employment rate {state.lam} within 1e-9 of the wage-curve pole")
    one_m = 1.0 - state.lam
    phi = p.phi1 / (one_m * one_m) - p.phi0
    pi = mc.profit_share(p, state.omega, state.b)
    kap = mc.kappa(p, pi)
    g = kap / p.nu - p.delta
    z = mc.inflation(p, omega_delayed)
    return State(
        omega=state.omega * (phi - p.alpha - (1.0 - p.gamma) * z),
        lam=state.lam * (g - p.alpha - p.beta),
        b=kap - pi - state.b * (z + g),
    )


def _params_tuple(p: ModelParams) -> tuple:
    return (p.alpha, p.beta, p.delta, p.nu, p.r, p.gamma, p.eta_p, p.xi,
            p.phi0, p.phi1, p.kappa0, p.kappa1, p.kappa2)


def simulate(p: ModelParams, cfg: SimConfig) -> Trajectory:
    """Integrate from cfg.initial over [0, t_end]; may halt on an event."""
    lam0 = cfg.initial.lam
    if not (0.0 < lam0 < _EVENT_GUARD):
        raise SimConfigError(
            f"initial employment rate {lam0} outside (0, 1-1e-6)")
    nsteps = cfg.n_steps
    out_y = np.empty((nsteps + 1, 3), dtype=float)
    out_f = np.empty((nsteps + 1, 3), dtype=float)
    nodes, code = sim_steps(
        _params_tuple(p),
        cfg.initial.as_tuple(),
        (cfg.history_state().omega,),
        cfg.tau, cfg.dt, nsteps, cfg.delay_steps,
        out_y, out_f)
    times = np.arange(nodes) * cfg.dt
    events = []
    if code:
        # the step after the last stored node could not be completed
        events.append((EVENT_NAMES[code], nodes * cfg.dt))
    return Trajectory(times=times, states=out_y[:nodes].copy(),
                      derivs=out_f[:nodes].copy(), events=events)


@dataclass(frozen=True)
class OscillationMetrics:
    window_amplitudes: tuple  # max deviation from the reference per window
    period: Optional[float]  # mean upward-crossing spacing, None if too few
    crossings: int
    insufficient: bool  # fewer than 3 upward crossings in the tail


def oscillation_metrics(traj: Trajectory, eq, n_windows: int = 4) -> OscillationMetrics:
    """Amplitude-per-window and dominant period of a trajectory around eq.

    The period comes from upward zero crossings of the wage-share deviation
    over the last half of the run; amplitudes use the euclidean deviation.
    """
    n = traj.states.shape[0]
    if n < 2 * n_windows:
        raise ValueError(f"trajectory too short to split into {n_windows} windows")
    ref = np.array([eq.omega_star, eq.lambda_star, eq.b_star])
    dev = np.linalg.norm(traj.states - ref, axis=1)
    bounds = np.linspace(0, n, n_windows + 1).astype(int)
    amps = tuple(float(dev[a:b].max()) for a, b in zip(bounds[:-1], bounds[1:]))

    s = traj.states[n // 2:, 0] - eq.omega_star
    t = traj.times[n // 2:]
    up = np.flatnonzero((s[:-1] < 0.0) & (s[1:] >= 0.0))
    # linear interpolation of each crossing instant
    t_cross = t[up] + (t[up + 1] - t[up]) * (-s[up]) / (s[up + 1] - s[up])
    k = t_cross.size
    if k < 3:
        return OscillationMetrics(amps, None, int(k), True)
    period = float(np.diff(t_cross).mean())
    return OscillationMetrics(amps, period, int(k), False)
