"""Pure fallback for the compiled kernels.

Same contracts and the same per-element arithmetic as the extension in
_ckernels.pyx; the Newton kernel is vectorized over seeds, the stepper is
a plain loop on floats.
"""

from __future__ import annotations

import math

import numpy as np


def newton_polish_many(r3, r2, r1, r0, q2, q1, q0, tau, seeds,
                       tol_dx=1e-12, tol_p=1e-14, max_iter=100):
    """Newton iteration on R(x) + Q(x)*exp(-tau*x) from each seed.

    Returns (roots, ok, iters); a seed is accepted when the residual drops
    below tol_p or the update below tol_dx.
    """
    x = np.array(seeds, dtype=complex).ravel().copy()
    n = x.size
    ok = np.zeros(n, dtype=bool)
    iters = np.zeros(n, dtype=np.int32)
    active = np.ones(n, dtype=bool)
    for it in range(max_iter):
        xa = x[active]
        e = np.exp(-tau * xa)
        pval = (((r3 * xa + r2) * xa + r1) * xa + r0
                + ((q2 * xa + q1) * xa + q0) * e)
        small_p = np.abs(pval) < tol_p
        idx = np.flatnonzero(active)
        if small_p.any():
            hit = idx[small_p]
            ok[hit] = True
            iters[hit] = it
            active[hit] = False
            keep = ~small_p
            xa, e, pval, idx = xa[keep], e[keep], pval[keep], idx[keep]
            if idx.size == 0:
                break
        dval = ((3.0 * r3 * xa + 2.0 * r2) * xa + r1
                + (2.0 * q2 * xa + q1 - tau * ((q2 * xa + q1) * xa + q0)) * e)
        with np.errstate(divide="ignore", invalid="ignore"):
            dx = pval / dval
        bad = ~np.isfinite(dx)
        xa = xa - np.where(bad, 0.0, dx)
        x[idx] = xa
        if bad.any():
            iters[idx[bad]] = it
            active[idx[bad]] = False
        small_dx = np.abs(dx) < tol_dx
        conv = small_dx & ~bad
        if conv.any():
            hit = idx[conv]
            ok[hit] = True
            iters[hit] = it + 1
            active[hit] = False
        if not active.any():
            break
    iters[active] = max_iter
    return x, ok, iters


def _rhs(pars, w, lam, b, w_delayed):
    (alpha, beta, delta, nu, r, gamma, eta_p, xi,
     phi0, phi1, kappa0, kappa1, kappa2) = pars
    pi = 1.0 - w - r * b
    try:
        kap = kappa0 + math.exp(kappa1 + kappa2 * pi)
    except OverflowError:
        # C exp saturates to inf here; match it so both backends agree
        kap = math.inf
    g = kap / nu - delta
    z = eta_p * (xi * w_delayed - 1.0)
    one_m = 1.0 - lam
    phi = phi1 / (one_m * one_m) - phi0
    return (w * (phi - alpha - (1.0 - gamma) * z),
            lam * (g - alpha - beta),
            kap - pi - b * (z + g))


def sim_steps(pars, y0, hist, tau, dt, nsteps, ndelay, out_y, out_f):
    """Fixed-step RK4 method-of-steps integration into out_y/out_f.

    ndelay is tau/dt (0 for no delay).  Delayed wage-share reads are exact
    at node times and cubic Hermite at half steps; negative times read the
    constant history.  Returns (nodes_done, event_code) with codes
    0 none, 1 employment near one, 2 employment nonpositive,
    3 nonfinite state.
    """
    guard_hi = 1.0 - 1e-6
    stage_hi = 1.0 - 1e-9
    w, lam, b = float(y0[0]), float(y0[1]), float(y0[2])
    hw = float(hist[0])
    out_y[0, 0], out_y[0, 1], out_y[0, 2] = w, lam, b

    def w_at_node(i):
        return hw if i < 0 else out_y[i, 0]

    def w_mid(i):
        # delayed read at (i + 1/2)*dt; negative times sit in the history
        if i < 0:
            return hw
        ya, fa = out_y[i, 0], out_f[i, 0]
        yb, fb = out_y[i + 1, 0], out_f[i + 1, 0]
        return 0.5 * (ya + yb) + 0.125 * dt * (fa - fb)

    f = _rhs(pars, w, lam, b, w_at_node(-ndelay) if ndelay > 0 else w)
    out_f[0, 0], out_f[0, 1], out_f[0, 2] = f

    for i in range(nsteps):
        if ndelay > 0:
            wdm = w_mid(i - ndelay)
            wd4 = w_at_node(i + 1 - ndelay)
        k1 = (out_f[i, 0], out_f[i, 1], out_f[i, 2])

        w2 = w + 0.5 * dt * k1[0]
        l2 = lam + 0.5 * dt * k1[1]
        b2 = b + 0.5 * dt * k1[2]
        if l2 >= stage_hi:
            return i + 1, 1
        k2 = _rhs(pars, w2, l2, b2, wdm if ndelay > 0 else w2)

        w3 = w + 0.5 * dt * k2[0]
        l3 = lam + 0.5 * dt * k2[1]
        b3 = b + 0.5 * dt * k2[2]
        if l3 >= stage_hi:
            return i + 1, 1
        k3 = _rhs(pars, w3, l3, b3, wdm if ndelay > 0 else w3)

        w4 = w + dt * k3[0]
        l4 = lam + dt * k3[1]
        b4 = b + dt * k3[2]
        if l4 >= stage_hi:
            return i + 1, 1
        k4 = _rhs(pars, w4, l4, b4, wd4 if ndelay > 0 else w4)

        w = w + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        lam = lam + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        b = b + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])

        if not (math.isfinite(w) and math.isfinite(lam) and math.isfinite(b)):
            return i + 1, 3
        if lam >= guard_hi:
            return i + 1, 1
        if lam <= 0.0:
            return i + 1, 2
        out_y[i + 1, 0], out_y[i + 1, 1], out_y[i + 1, 2] = w, lam, b
        f = _rhs(pars, w, lam, b,
                 w_at_node(i + 1 - ndelay) if ndelay > 0 else w)
        out_f[i + 1, 0], out_f[i + 1, 1], out_f[i + 1, 2] = f

    return nsteps + 1, 0
