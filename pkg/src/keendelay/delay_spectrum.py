"""Delay-dependent spectrum of the linearized system.

The characteristic function is a quasi-polynomial: a cubic plus a quadratic
weighted by exp(-x*tau).  Purely imaginary roots are located through a real
cubic in z = mu^2; each positive z yields a ladder of critical delays.  A
grid-seeded Newton iteration (compiled kernel when available) locates the
rightmost roots directly for any delay.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import cubic
from .kernels import newton_polish_many
from .linearize import LinearizationConstants, routh_hurwitz


class DegenerateError(ValueError):
    """A solve needed by the analysis is singular to working precision."""


class HypothesisError(ValueError):
    """The zero-delay stability hypothesis fails, so the verdict is void."""


@dataclass(frozen=True)
class HzCoefficients:
    """Coefficients of the real cubic whose positive roots are mu^2."""

    p: float
    q: float
    r_tilde: float
    delta_disc: float  # p^2 - 3q; sign decides whether h has turning points
    z1_star: Optional[float]  # larger turning point (local minimum)
    z2_star: Optional[float]

    def value(self, z: float) -> float:
        return ((z + self.p) * z + self.q) * z + self.r_tilde

    def deriv(self, z: float) -> float:
        return (3.0 * z + 2.0 * self.p) * z + self.q


@dataclass(frozen=True)
class CriticalDelayEntry:
    mu: float
    z: float
    cos_mt: float
    sin_mt: float
    unit_defect: float  # |cos^2 + sin^2 - 1| before the angle was taken
    theta: float  # atan2 angle wrapped to [0, 2*pi)
    taus: tuple  # delays for j = 0..j_max


@dataclass(frozen=True)
class CriticalDelaySet:
    entries: tuple
    tau0: float
    mu0: float
    z0: float
    hprime_at_z0: float


@dataclass(frozen=True)
class Transversality:
    hprime: float
    sign: int
    degenerate: bool  # |hprime| below 1e-10; the crossing-speed sign is void


@dataclass(frozen=True)
class StabilityVerdict:
    case: str  # "no-switch" | "switch-at-tau0"
    root_case: str  # which existence branch decided it
    tau0: Optional[float]
    mu0: Optional[float]
    classification: str
    delays: Optional[CriticalDelaySet]


def undelayed_poly(x: complex, K: LinearizationConstants) -> complex:
    """Cubic part of the characteristic function (no delay weight)."""
    m = K.k1 * K.k2
    return ((-x + K.k4) * x - m) * x - m * K.k7


def delayed_poly(x: complex, K: LinearizationConstants) -> complex:
    """Quadratic multiplying exp(-x*tau)."""
    return (K.k0 * x - K.k0 * K.k4) * x - K.r * K.k1 * K.k2 * K.k6


def quasipoly(x: complex, tau: float, K: LinearizationConstants) -> complex:
    return undelayed_poly(x, K) + delayed_poly(x, K) * cmath.exp(-tau * x)


def quasipoly_deriv(x: complex, tau: float, K: LinearizationConstants) -> complex:
    """d/dx of the characteristic function at fixed delay."""
    m = K.k1 * K.k2
    rp = (-3.0 * x + 2.0 * K.k4) * x - m
    qp = 2.0 * K.k0 * x - K.k0 * K.k4
    return rp + (qp - tau * delayed_poly(x, K)) * cmath.exp(-tau * x)


def hz_coefficients(K: LinearizationConstants) -> HzCoefficients:
    """Real cubic h(z) with h(mu^2) = |R(i mu)|^2 - |Q(i mu)|^2."""
    m = K.k1 * K.k2
    p = K.k4 ** 2 - K.k0 ** 2 - 2.0 * m
    q = (m ** 2 - (K.k0 * K.k4) ** 2 + 2.0 * m * K.k4 * K.k7
         - 2.0 * K.r * K.k0 * m * K.k6)
    r_tilde = m ** 2 * (K.k7 ** 2 - (K.r * K.k6) ** 2)
    delta = p * p - 3.0 * q
    if delta >= 0.0:
        s = math.sqrt(delta)
        z1 = (-p + s) / 3.0
        z2 = (-p - s) / 3.0
    else:
        z1 = z2 = None
    return HzCoefficients(p, q, r_tilde, delta, z1, z2)


def positive_roots(hz: HzCoefficients) -> tuple:
    """Positive roots of h, with the existence branch that applies.

    Returns (roots ascending, case label).  Branches: a negative constant
    term forces at least one positive root; without turning points there are
    none; otherwise the local minimum decides.
    """
    if hz.r_tilde < 0.0:
        case = "constant-term-negative"
    elif hz.delta_disc <= 0.0:
        case = "no-turning-points"
    else:
        case = "turning-point-test"
    real = cubic.real_roots(1.0, hz.p, hz.q, hz.r_tilde)
    roots = sorted(z for z in real if z > 0.0)
    if case == "no-turning-points" and roots:
        # can only be roundoff debris at z ~ 0; the branch is exact
        roots = [z for z in roots if abs(hz.value(z)) < 1e-10 and z > 1e-9]
    return roots, case


def critical_delays(K: LinearizationConstants, roots: Sequence[float],
                    j_max: int = 3) -> CriticalDelaySet:
    """Delay ladder for each crossing frequency mu = sqrt(z).

    cos(mu*tau) and sin(mu*tau) come from the 2x2 linear system given by the
    real and imaginary parts of the root condition, so the angle lands in the
    correct quadrant; tau0 is the smallest rung over all ladders.
    """
    if not roots:
        raise ValueError("need at least one positive root of h")
    entries = []
    for z in roots:
        mu = math.sqrt(z)
        rv = undelayed_poly(1j * mu, K)
        qv = delayed_poly(1j * mu, K)
        det = qv.real ** 2 + qv.imag ** 2
        if det < 1e-300:
            raise DegenerateError(
                f"delayed factor vanishes at frequency {mu}; the angle "
                "system is singular")
        c = -(rv.real * qv.real + rv.imag * qv.imag) / det
        s = (qv.real * rv.imag - rv.real * qv.imag) / det
        defect = abs(c * c + s * s - 1.0)
        theta = math.atan2(s, c)
        if theta < 0.0:
            theta += 2.0 * math.pi
        taus = tuple((theta + 2.0 * math.pi * j) / mu for j in range(j_max + 1))
        entries.append(CriticalDelayEntry(mu, z, c, s, defect, theta, taus))
    best = min(entries, key=lambda e: e.taus[0])
    hz = hz_coefficients(K)
    return CriticalDelaySet(
        entries=tuple(entries),
        tau0=best.taus[0],
        mu0=best.mu,
        z0=best.z,
        hprime_at_z0=hz.deriv(best.z),
    )


def transversality(hz: HzCoefficients, z0: float) -> Transversality:
    """Crossing speed sign at a frequency root: sign of h'(z0).

    The real part of the tracked root moves with the delay in the direction
    of this sign; |h'| under 1e-10 is flagged degenerate instead of signed.
    """
    if z0 <= 0.0:
        raise ValueError(f"z0 must be positive, got {z0}")
    hp = hz.deriv(z0)
    degenerate = abs(hp) < 1e-10
    sign = 0 if degenerate else (1 if hp > 0.0 else -1)
    return Transversality(hprime=hp, sign=sign, degenerate=degenerate)


def rightmost_roots(K: LinearizationConstants, tau: float,
                    region: tuple = (-3.0, 1.0, 0.0, 12.0),
                    grid: tuple = (40, 40),
                    tol_root: float = 1e-10) -> list:
    """Roots of the characteristic function in the upper-half rectangle.

    Newton from every grid seed, keep residuals below tol_root, reflect into
    the closed upper half plane (conjugates are implied), deduplicate, sort
    by descending real part.
    """
    if tau < 0.0:
        raise ValueError("delay must be nonnegative")
    re_min, re_max, im_min, im_max = region
    nx, ny = grid
    if nx < 1 or ny < 1 or re_max <= re_min or im_max < im_min:
        raise ValueError("empty seed region")
    res = np.linspace(re_min, re_max, nx)
    ims = np.linspace(im_min, im_max, ny)
    seeds = (res[:, None] + 1j * ims[None, :]).ravel()
    m = K.k1 * K.k2
    found, ok, _ = newton_polish_many(
        -1.0, K.k4, -m, -m * K.k7,
        K.k0, -K.k0 * K.k4, -K.r * m * K.k6,
        tau, seeds)
    cands = []
    for x, good in zip(found, ok):
        if not good:
            continue
        x = complex(x)
        resid = abs(quasipoly(x, tau, K))
        if resid < tol_root:
            if x.imag < 0.0:
                x = x.conjugate()
            cands.append((resid, x))
    cands.sort(key=lambda t: (t[0], t[1].real, t[1].imag))
    kept: list = []
    for _, x in cands:
        if all(abs(x - y) > 1e-6 for y in kept):
            kept.append(x)
    kept.sort(key=lambda x: (-x.real, x.imag))
    return kept


def stability_verdict(K: LinearizationConstants, j_max: int = 3) -> StabilityVerdict:
    """Delay-dependent verdict for a zero-delay-stable equilibrium.

    Requires the Routh-Hurwitz test to pass; then either no crossing
    frequency exists (stable for every delay) or the smallest critical delay
    marks the loss of stability.
    """
    rh = routh_hurwitz(K)
    if not rh.satisfied:
        raise HypothesisError(
            "Routh-Hurwitz fails at zero delay "
            f"(cond1={rh.cond1:.6g}, cond2={rh.cond2:.6g}, "
            f"cond3={rh.cond3:.6g}); the delay verdict is undefined")
    hz = hz_coefficients(K)
    roots, case = positive_roots(hz)
    if not roots:
        text = ("asymptotically stable for every delay; the crossing cubic "
                f"has no positive roots ({case})")
        return StabilityVerdict("no-switch", case, None, None, text, None)
    delays = critical_delays(K, roots, j_max)
    text = (f"asymptotically stable for delays below {delays.tau0:.6g}; a "
            f"conjugate root pair reaches the imaginary axis there at "
            f"frequency {delays.mu0:.6g} and a Hopf bifurcation occurs")
    return StabilityVerdict("switch-at-tau0", case, delays.tau0, delays.mu0,
                            text, delays)
