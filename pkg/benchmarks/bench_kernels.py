"""Timing comparison between the compiled kernels and the pure fallback.

Runs the delayed-system stepper and the seeded Newton polish with both
backends on the bundled reference configuration and prints wall times.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from keendelay import model_core as mc
from keendelay.dde_sim import _params_tuple
from keendelay.equilibria import find_e4
from keendelay.kernels import _pykernels
from keendelay.linearize import k_constants

try:
    from keendelay.kernels import _ckernels
except ImportError:
    _ckernels = None


def reference_params() -> mc.ModelParams:
    return mc.ModelParams(
        alpha=0.025, beta=0.02, delta=0.01, nu=3.0, r=0.03, gamma=0.8,
        eta_p=1.4, xi=1.2, phi0=0.04340277, phi1=0.00006944,
        kappa0=-0.0065, kappa1=-5.0, kappa2=20.0)


def time_best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sim(mod, p: mc.ModelParams, repeats: int) -> float:
    tau, dt, t_end = 0.85, 0.01, 200.0
    nsteps = int(round(t_end / dt))
    ndelay = int(round(tau / dt))
    pars = _params_tuple(p)
    y0 = np.array([0.83, 0.95, 0.1])
    hist = np.array([0.83])
    out_y = np.empty((nsteps + 1, 3))
    out_f = np.empty((nsteps + 1, 3))

    def run():
        nodes, code = mod.sim_steps(pars, y0, hist, tau, dt, nsteps, ndelay,
                                    out_y, out_f)
        assert code == 0 and nodes == nsteps + 1

    return time_best(run, repeats)


def bench_newton(mod, p: mc.ModelParams, repeats: int) -> float:
    eq = max(find_e4(p), key=lambda e: e.omega_star)
    K = k_constants(p, eq)
    m = K.k1 * K.k2
    re = np.linspace(-3.0, 1.0, 40)
    im = np.linspace(0.0, 12.0, 40)
    seeds = (re[:, None] + 1j * im[None, :]).ravel()

    def run():
        roots, ok, iters = mod.newton_polish_many(
            -1.0, K.k4, -m, -m * K.k7,
            K.k0, -K.k0 * K.k4, -K.r * m * K.k6,
            0.85, seeds)
        assert ok.any()

    return time_best(run, repeats)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    p = reference_params()

    backends = [("pure", _pykernels)]
    if _ckernels is not None:
        backends.append(("compiled", _ckernels))
    else:
        print("compiled kernels unavailable; timing the fallback only")

    results = {}
    for name, mod in backends:
        t_sim = bench_sim(mod, p, args.repeats)
        t_newton = bench_newton(mod, p, args.repeats)
        results[name] = (t_sim, t_newton)
        print(f"{name:>9}: stepper {t_sim * 1e3:8.2f} ms   "
              f"newton grid {t_newton * 1e3:8.2f} ms")
    if len(results) == 2:
        s = results["pure"][0] / results["compiled"][0]
        n = results["pure"][1] / results["compiled"][1]
        print(f"speedup: stepper {s:.1f}x, newton grid {n:.1f}x")


if __name__ == "__main__":
    main()
