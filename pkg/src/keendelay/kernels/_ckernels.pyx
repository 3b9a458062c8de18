# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: quasi-polynomial Newton batches and the DDE stepper.

Mirrors _pykernels operation for operation; keep the arithmetic in the same
order in both so the backends agree.
"""

import numpy as np

from libc.math cimport exp, isfinite

cdef extern from "complex.h" nogil:
    double complex cexp(double complex z)
    double cabs(double complex z)
    double creal(double complex z)
    double cimag(double complex z)


def newton_polish_many(double r3, double r2, double r1, double r0,
                       double q2, double q1, double q0, double tau,
                       seeds, double tol_dx=1e-12, double tol_p=1e-14,
                       int max_iter=100):
    """Newton iteration on R(x) + Q(x)*exp(-tau*x) from each seed.

    Returns (roots, ok, iters); a seed is accepted when the residual drops
    below tol_p or the update below tol_dx.
    """
    seeds_arr = np.ascontiguousarray(np.asarray(seeds, dtype=complex).ravel())
    cdef Py_ssize_t n = seeds_arr.shape[0]
    roots_arr = seeds_arr.copy()
    ok_arr = np.zeros(n, dtype=np.uint8)
    iters_arr = np.zeros(n, dtype=np.int32)
    cdef double complex[::1] xv = roots_arr
    cdef unsigned char[::1] okv = ok_arr
    cdef int[::1] itv = iters_arr
    cdef Py_ssize_t s
    cdef int it, niter
    cdef unsigned char okf
    cdef double complex x, e, p, d, dx

    for s in range(n):
        x = xv[s]
        okf = 0
        niter = max_iter
        for it in range(max_iter):
            e = cexp(-tau * x)
            p = (((r3 * x + r2) * x + r1) * x + r0
                 + ((q2 * x + q1) * x + q0) * e)
            if cabs(p) < tol_p:
                okf = 1
                niter = it
                break
            d = ((3.0 * r3 * x + 2.0 * r2) * x + r1
                 + (2.0 * q2 * x + q1 - tau * ((q2 * x + q1) * x + q0)) * e)
            dx = p / d
            if not (isfinite(creal(dx)) and isfinite(cimag(dx))):
                niter = it
                break
            x = x - dx
            if cabs(dx) < tol_dx:
                okf = 1
                niter = it + 1
                break
        xv[s] = x
        okv[s] = okf
        itv[s] = niter
    return roots_arr, ok_arr.view(np.bool_), iters_arr


ctypedef struct Pars:
    double alpha, beta, delta, nu, r, gamma, eta_p, xi
    double phi0, phi1, kappa0, kappa1, kappa2


cdef inline void _rhs(Pars *p, double w, double lam, double b,
                      double w_delayed, double *out) nogil:
    cdef double pi = 1.0 - w - p.r * b
    cdef double kap = p.kappa0 + exp(p.kappa1 + p.kappa2 * pi)
    cdef double g = kap / p.nu - p.delta
    cdef double z = p.eta_p * (p.xi * w_delayed - 1.0)
    cdef double one_m = 1.0 - lam
    cdef double phi = p.phi1 / (one_m * one_m) - p.phi0
    out[0] = w * (phi - p.alpha - (1.0 - p.gamma) * z)
    out[1] = lam * (g - p.alpha - p.beta)
    out[2] = kap - pi - b * (z + g)


cdef inline double _w_node(double[:, ::1] yv, Py_ssize_t i, double hw) nogil:
    if i < 0:
        return hw
    return yv[i, 0]


cdef inline double _w_mid(double[:, ::1] yv, double[:, ::1] fv,
                          Py_ssize_t i, double dt, double hw) nogil:
    if i < 0:
        return hw
    return (0.5 * (yv[i, 0] + yv[i + 1, 0])
            + 0.125 * dt * (fv[i, 0] - fv[i + 1, 0]))


def sim_steps(pars, y0, hist, double tau, double dt, Py_ssize_t nsteps,
              Py_ssize_t ndelay, double[:, ::1] out_y, double[:, ::1] out_f):
    """Fixed-step RK4 method-of-steps integration into out_y/out_f.

    ndelay is tau/dt (0 for no delay).  Delayed wage-share reads are exact
    at node times and cubic Hermite at half steps; negative times read the
    constant history.  Returns (nodes_done, event_code) with codes
    0 none, 1 employment near one, 2 employment nonpositive,
    3 nonfinite state.
    """
    cdef Pars P
    P.alpha = pars[0]; P.beta = pars[1]; P.delta = pars[2]; P.nu = pars[3]
    P.r = pars[4]; P.gamma = pars[5]; P.eta_p = pars[6]; P.xi = pars[7]
    P.phi0 = pars[8]; P.phi1 = pars[9]; P.kappa0 = pars[10]
    P.kappa1 = pars[11]; P.kappa2 = pars[12]

    cdef double guard_hi = 1.0 - 1e-6
    cdef double stage_hi = 1.0 - 1e-9
    cdef double w = y0[0], lam = y0[1], b = y0[2]
    cdef double hw = hist[0]
    cdef double wdm = 0.0, wd4 = 0.0
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double w2, l2, b2, w3, l3, b3, w4, l4, b4
    cdef Py_ssize_t i

    out_y[0, 0] = w; out_y[0, 1] = lam; out_y[0, 2] = b
    _rhs(&P, w, lam, b,
         _w_node(out_y, -ndelay, hw) if ndelay > 0 else w, &k1[0])
    out_f[0, 0] = k1[0]; out_f[0, 1] = k1[1]; out_f[0, 2] = k1[2]

    for i in range(nsteps):
        if ndelay > 0:
            wdm = _w_mid(out_y, out_f, i - ndelay, dt, hw)
            wd4 = _w_node(out_y, i + 1 - ndelay, hw)
        k1[0] = out_f[i, 0]; k1[1] = out_f[i, 1]; k1[2] = out_f[i, 2]

        w2 = w + 0.5 * dt * k1[0]
        l2 = lam + 0.5 * dt * k1[1]
        b2 = b + 0.5 * dt * k1[2]
        if l2 >= stage_hi:
            return i + 1, 1
        _rhs(&P, w2, l2, b2, wdm if ndelay > 0 else w2, &k2[0])

        w3 = w + 0.5 * dt * k2[0]
        l3 = lam + 0.5 * dt * k2[1]
        b3 = b + 0.5 * dt * k2[2]
        if l3 >= stage_hi:
            return i + 1, 1
        _rhs(&P, w3, l3, b3, wdm if ndelay > 0 else w3, &k3[0])

        w4 = w + dt * k3[0]
        l4 = lam + dt * k3[1]
        b4 = b + dt * k3[2]
        if l4 >= stage_hi:
            return i + 1, 1
        _rhs(&P, w4, l4, b4, wd4 if ndelay > 0 else w4, &k4[0])

        w = w + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        lam = lam + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        b = b + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])

        if not (isfinite(w) and isfinite(lam) and isfinite(b)):
            return i + 1, 3
        if lam >= guard_hi:
            return i + 1, 1
        if lam <= 0.0:
            return i + 1, 2
        out_y[i + 1, 0] = w; out_y[i + 1, 1] = lam; out_y[i + 1, 2] = b
        _rhs(&P, w, lam, b,
             _w_node(out_y, i + 1 - ndelay, hw) if ndelay > 0 else w, &k1[0])
        out_f[i + 1, 0] = k1[0]; out_f[i + 1, 1] = k1[1]; out_f[i + 1, 2] = k1[2]

    return nsteps + 1, 0
