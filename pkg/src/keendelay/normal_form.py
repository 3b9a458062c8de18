"""Center-manifold reduction at a critical delay.

Produces the eigenvector pair of the crossing mode, the normalizer that
makes the adjoint pairing equal one, the quadratic and cubic coefficients of
the reduced equation, and the classification quantities (direction, orbit
stability, period trend).

The cubic coefficient is assembled twice: term by term from the published
bracket groups, and independently from the quadratic form of the vector
field paired with the manifold corrections.  The two disagree in spots; the
comparison ships as a DiscrepancyLog rather than being patched silently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import model_core as mc
from .equilibria import Equilibrium, system_rhs
from .kernels import newton_polish_many
from .linearize import LinearizationConstants
from .model_core import ModelParams


class SingularDenominatorError(ValueError):
    """An eigenvector component divides by a near-zero quantity."""


class SingularSystemError(ValueError):
    """A manifold-correction linear system is singular to working precision."""


class DegenerateError(ValueError):
    """Normalization or transversality degenerates; results are undefined."""


# monomials of the quadratic part, as (equation, first var, second var)
# with variables indexed omega=0, lambda=1, debt=2, delayed omega=3
_MONOMIALS = (
    ("f1 u2*u2", 0, 1, 1),
    ("f1 u1*u2", 0, 0, 1),
    ("f1 u1*u4", 0, 0, 3),
    ("f2 u1*u1", 1, 0, 0),
    ("f2 u3*u3", 1, 2, 2),
    ("f2 u1*u2", 1, 0, 1),
    ("f2 u1*u3", 1, 0, 2),
    ("f2 u2*u3", 1, 1, 2),
    ("f3 u1*u1", 2, 0, 0),
    ("f3 u3*u3", 2, 2, 2),
    ("f3 u1*u3", 2, 0, 2),
    ("f3 u3*u4", 2, 2, 3),
)


def quad_coefficients(p: ModelParams, K: LinearizationConstants,
                      eq: Equilibrium) -> dict:
    """Coefficient of each quadratic monomial of the expanded system.

    Keyed like _MONOMIALS labels; squares carry their 1/2 so that summing
    coeff * u_a * u_b over the table reproduces the quadratic remainder.
    """
    lam = eq.lambda_star
    pi = eq.pi_star
    gd = mc.growth_d1(p, pi)
    gdd = mc.growth_d2(p, pi)
    etx = p.eta_p * p.xi
    return {
        "f1 u2*u2": 0.5 * eq.omega_star * mc.phillips_d2(p, lam),
        "f1 u1*u2": mc.phillips_d1(p, lam),
        "f1 u1*u4": K.a_hat0,
        "f2 u1*u1": K.k8,
        "f2 u3*u3": p.r ** 2 * K.k8,
        "f2 u1*u2": -gd,
        "f2 u1*u3": p.r * lam * gdd,
        "f2 u2*u3": -p.r * gd,
        "f3 u1*u1": K.k9,
        "f3 u3*u3": K.k10,
        "f3 u1*u3": K.k11,
        "f3 u3*u4": -etx,
    }


def quad_form(coeffs: dict, u: Sequence[complex], v: Sequence[complex]) -> np.ndarray:
    """Symmetric bilinear form of the quadratic remainder on 4-vectors.

    quad_form(c, u, u) equals the quadratic terms of the expanded system at
    deviation u = (omega, lambda, debt, delayed omega).
    """
    out = np.zeros(3, dtype=complex)
    for label, i, a, b in _MONOMIALS:
        c = coeffs[label]
        if a == b:
            out[i] += c * u[a] * v[a]
        else:
            out[i] += 0.5 * c * (u[a] * v[b] + u[b] * v[a])
    return out


def eigenvectors(K: LinearizationConstants, mu0: float,
                 tau_k: float) -> tuple[np.ndarray, np.ndarray]:
    """Crossing-mode eigenvector and its unnormalized adjoint partner.

    Both are scaled to first component one.  The adjoint vector satisfies
    the transposed problem with the conjugated delay weight.
    """
    if mu0 == 0.0:
        raise SingularDenominatorError("frequency must be nonzero")
    e_minus = cmath.exp(-1j * mu0 * tau_k)
    if abs(K.k1) < 1e-12:
        raise SingularDenominatorError("k1 vanishes; the mode is degenerate")
    den3 = K.k4 - 1j * mu0
    if abs(den3) < 1e-12:
        raise SingularDenominatorError("k4 - i*mu vanishes")
    v2 = (1j * mu0 - K.k0 * e_minus) / K.k1
    v3 = -(K.k3 + K.k6 * e_minus) / den3
    q0 = np.array([1.0, v2, v3], dtype=complex)

    w2 = -K.k1 / (1j * mu0)
    dstar = 1j * mu0 * K.k4 - mu0 * mu0
    if abs(dstar) < 1e-12:
        raise SingularDenominatorError("adjoint denominator vanishes")
    w3 = -K.r * K.k1 * K.k2 / dstar
    qstar0 = np.array([1.0, w2, w3], dtype=complex)
    return q0, qstar0


def mode_pairing(psi0: np.ndarray, phi0: np.ndarray,
                 K: LinearizationConstants, mu0: float, tau_k: float,
                 mode_rate: Optional[complex] = None) -> complex:
    """Adjoint pairing of psi(s) = psi0 e^{i mu tau s} with an exponential
    mode phi(theta) = phi0 e^{mode_rate theta} on [-1, 0].

    mode_rate defaults to the crossing mode's own i*mu*tau.
    """
    a = 1j * mu0 * tau_k
    b = a if mode_rate is None else mode_rate
    s = b - a
    psic = psi0.conjugate()
    head = psic @ phi0
    jtau_phi = np.array([K.k0 * phi0[0], 0.0, K.k6 * phi0[0]], dtype=complex)
    if abs(s) < 1e-14:
        tail_factor = 1.0 + 0j
    else:
        tail_factor = (1.0 - cmath.exp(-s)) / s
    return head + tau_k * cmath.exp(-a) * (psic @ jtau_phi) * tail_factor


def normalize(q0: np.ndarray, qstar0: np.ndarray, K: LinearizationConstants,
              mu0: float, tau_k: float) -> complex:
    """Normalizer making the pairing of the adjoint pair equal one."""
    e_minus = cmath.exp(-1j * mu0 * tau_k)
    w2b = qstar0[1].conjugate()
    w3b = qstar0[2].conjugate()
    den = (qstar0[0].conjugate() * q0[0] + w2b * q0[1] + w3b * q0[2]
           + tau_k * (K.k0 + w3b * K.k6) * e_minus * q0[0])
    if abs(den) < 1e-12:
        raise DegenerateError("normalization denominator vanishes")
    return 1.0 / den


def mode_vector4(q0: np.ndarray, mu0: float, tau_k: float) -> np.ndarray:
    """Mode values entering the quadratic form: components at 0 plus the
    delayed first component."""
    return np.array([q0[0], q0[1], q0[2],
                     q0[0] * cmath.exp(-1j * mu0 * tau_k)], dtype=complex)


def g_coefficients(p: ModelParams, K: LinearizationConstants, eq: Equilibrium,
                   q0: np.ndarray, qstar0_normalized: np.ndarray,
                   mu0: float, tau_k: float):
    """Quadratic reduced-equation coefficients g20, g11, g02.

    The fourth return is the 4-component mode vector; the cubic coefficient
    needs it again once the manifold corrections are available.
    """
    coeffs = quad_coefficients(p, K, eq)
    phi = mode_vector4(q0, mu0, tau_k)
    row = qstar0_normalized.conjugate()
    g20 = 2.0 * tau_k * (row @ quad_form(coeffs, phi, phi))
    g11 = 2.0 * tau_k * (row @ quad_form(coeffs, phi, phi.conjugate()))
    g02 = 2.0 * tau_k * (row @ quad_form(coeffs, phi.conjugate(), phi.conjugate()))
    return g20, g11, g02, phi


def _solve3(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Partial-pivoted solve of a 3x3 system; callers report the residual."""
    try:
        return np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc


@dataclass(frozen=True)
class SolveReport:
    e1_residual: float
    e2_residual: float
    e1_cond: float
    e2_cond: float


def nf_linear_systems(K: LinearizationConstants, p: ModelParams,
                      eq: Equilibrium, q0: np.ndarray, mu0: float,
                      tau_k: float, g20: complex, g11: complex, g02: complex):
    """Manifold-correction constants and the corrections at theta 0 and -1.

    Solves one complex 3x3 system (double-frequency mode) and one real one
    (zero-frequency mode); returns (e1, e2, w20_at, w11_at, report) where
    the w pairs hold values at theta = 0 and theta = -1.
    """
    coeffs = quad_coefficients(p, K, eq)
    phi = mode_vector4(q0, mu0, tau_k)
    e2m = cmath.exp(-2j * mu0 * tau_k)
    m1 = np.array([
        [2j * mu0 - K.k0 * e2m, -K.k1, 0.0],
        [K.k2, 2j * mu0, K.r * K.k2],
        [-K.k3 - K.k6 * e2m, 0.0, 2j * mu0 - K.k4],
    ], dtype=complex)
    rhs1 = 2.0 * quad_form(coeffs, phi, phi)
    e1 = _solve3(m1, rhs1)
    res1 = float(np.abs(m1 @ e1 - rhs1).max())

    m2 = np.array([
        [K.k0, K.k1, 0.0],
        [-K.k2, 0.0, -K.r * K.k2],
        [K.k3 + K.k6, 0.0, K.k4],
    ], dtype=complex)
    rhs2 = -2.0 * quad_form(coeffs, phi, phi.conjugate())
    e2 = _solve3(m2, rhs2)
    res2 = float(np.abs(m2 @ e2 - rhs2).max())
    e2 = e2.real.astype(float)  # zero-frequency correction is real

    report = SolveReport(res1, res2,
                         float(np.linalg.cond(m1)), float(np.linalg.cond(m2)))

    mt = mu0 * tau_k
    qbar = q0.conjugate()

    def w20(theta: float) -> np.ndarray:
        return ((1j * g20 / mt) * q0 * cmath.exp(1j * mt * theta)
                + (1j * g02.conjugate() / (3.0 * mt)) * qbar
                * cmath.exp(-1j * mt * theta)
                + e1 * cmath.exp(2j * mt * theta))

    def w11(theta: float) -> np.ndarray:
        return ((-1j * g11 / mt) * q0 * cmath.exp(1j * mt * theta)
                + (1j * g11.conjugate() / mt) * qbar
                * cmath.exp(-1j * mt * theta)
                + e2)

    w20_at = (w20(0.0), w20(-1.0))
    w11_at = (w11(0.0), w11(-1.0))
    return e1, e2, w20_at, w11_at, report


def _corr_vector4(pair: tuple) -> np.ndarray:
    at0, atm1 = pair
    return np.array([at0[0], at0[1], at0[2], atm1[0]], dtype=complex)


def _pair_term(c: complex, a: int, b: int, phi: np.ndarray,
               w20v: np.ndarray, w11v: np.ndarray) -> complex:
    """Contribution of one quadratic monomial to the cubic coefficient
    bracket: the monomial applied to (mode, correction) pairs."""
    pb = phi.conjugate()
    if a == b:
        return c * (4.0 * phi[a] * w11v[a] + 2.0 * pb[a] * w20v[a])
    return c * (2.0 * phi[a] * w11v[b] + 2.0 * phi[b] * w11v[a]
                + pb[a] * w20v[b] + pb[b] * w20v[a])


@dataclass(frozen=True)
class GroupComparison:
    index: int
    label: str
    printed: complex
    derived: complex
    abs_diff: float
    matches: bool


@dataclass(frozen=True)
class QuadInputCheck:
    label: str
    used: float
    fd: float
    rel_err: float


@dataclass(frozen=True)
class DiscrepancyLog:
    """Published cubic-coefficient bracket vs the quadratic-form route.

    quad_inputs compares every analytic quadratic coefficient against a
    finite-difference second derivative of the vector field; groups compares
    each published bracket group against the same pairing built from those
    finite-difference coefficients.
    """
    quad_inputs: tuple
    groups: tuple
    g21_printed: complex
    g21_derived: complex
    mismatch_count: int

    def lines(self) -> list:
        out = ["cubic coefficient cross-check (printed vs derived):"]
        for g in self.groups:
            tag = "ok " if g.matches else "DIFF"
            out.append(
                f"  [{tag}] group {g.index:2d} {g.label}: printed "
                f"{g.printed:.10g} derived {g.derived:.10g} "
                f"|diff| {g.abs_diff:.3e}")
        out.append(f"  g21 printed form:  {self.g21_printed:.12g}")
        out.append(f"  g21 derived form:  {self.g21_derived:.12g}")
        out.append(f"  groups differing:  {self.mismatch_count}")
        out.append("quadratic coefficients vs finite differences:")
        for q in self.quad_inputs:
            out.append(f"  {q.label}: used {q.used:.10g} fd {q.fd:.10g} "
                       f"rel {q.rel_err:.2e}")
        return out


def fd_hessians(p: ModelParams, eq: Equilibrium, h: float = 2.5e-5) -> np.ndarray:
    """Second derivatives of the vector field in (omega, lambda, b, delayed
    omega) at the equilibrium, by central differences.

    The default step balances truncation against roundoff for the wage
    curve, whose higher derivatives blow up near full employment.
    """
    x0 = np.array([eq.omega_star, eq.lambda_star, eq.b_star, eq.omega_star])

    def f(x):
        return np.array(system_rhs(p, x[0], x[1], x[2], x[3]))

    steps = h * np.maximum(1.0, np.abs(x0))
    out = np.zeros((3, 4, 4))
    f0 = f(x0)
    for a in range(4):
        ea = np.zeros(4)
        ea[a] = steps[a]
        out[:, a, a] = (f(x0 + ea) - 2.0 * f0 + f(x0 - ea)) / steps[a] ** 2
        for b in range(a + 1, 4):
            eb = np.zeros(4)
            eb[b] = steps[b]
            mixed = (f(x0 + ea + eb) - f(x0 + ea - eb)
                     - f(x0 - ea + eb) + f(x0 - ea - eb)) / (4.0 * steps[a] * steps[b])
            out[:, a, b] = mixed
            out[:, b, a] = mixed
    return out


def g21_terms(p: ModelParams, K: LinearizationConstants, eq: Equilibrium,
              q0: np.ndarray, qstar0_normalized: np.ndarray,
              mu0: float, tau_k: float, w20_at: tuple, w11_at: tuple):
    """Cubic coefficient, published bracket by bracket, plus the log.

    Returns (g21_printed, g21_derived, DiscrepancyLog).  The printed route
    follows the published groups verbatim; the derived route applies the
    vector field's quadratic form to (mode, correction) pairs.
    """
    lam = eq.lambda_star
    pi = eq.pi_star
    gd = mc.growth_d1(p, pi)
    gdd = mc.growth_d2(p, pi)
    etx = p.eta_p * p.xi
    pdd = mc.phillips_d2(p, lam)

    al = q0[1]
    be = q0[2]
    alb = al.conjugate()
    beb = be.conjugate()
    # row weights of the three equations, normalizer included
    row = qstar0_normalized.conjugate()
    w1s, was, wbs = row[0], row[1], row[2]
    em = cmath.exp(-1j * mu0 * tau_k)
    ep = cmath.exp(1j * mu0 * tau_k)

    w20_0, w20_m1 = w20_at
    w11_0, w11_m1 = w11_at

    # published bracket groups, kept exactly as printed
    printed = [
        w1s * pdd * (alb * w20_0[1] + 2.0 * al * w11_0[1]),
        w1s * mc.phillips_d1(p, lam) * (alb * w20_0[0] + w20_0[1]
                                        + 2.0 * al * w11_0[0] + 2.0 * w11_0[1]),
        w1s * K.a_hat0 * (2.0 * w11_m1[0] + w20_m1[0] + ep * w20_0[0]
                          + 2.0 * em * w11_0[0]),
        was * K.k8 * (2.0 * w20_0[0] + 4.0 * w11_0[0]),
        was * p.r ** 2 * K.k8 * (2.0 * beb * w20_0[2] + 4.0 * be * w11_0[2]),
        -was * gd * (alb * w20_0[0] + w20_0[0] + 2.0 * al * w11_0[0]
                     + 2.0 * w20_0[0]),
        was * lam * p.r * gdd * (w20_0[0] + w20_0[0] + w20_0[0] + w11_0[1]),
        -was * p.r * gd * (beb * w20_0[1] + al * w20_0[2]
                           + 2.0 * be * w11_0[2] + 2.0 * al * w11_0[2]),
        wbs * K.k9 * (2.0 * w20_0[0] + 4.0 * w11_0[0]),
        wbs * K.k10 * (2.0 * beb * w20_0[2] + 4.0 * be * w11_0[2]),
        wbs * K.k11 * (beb * w20_0[0] + w20_0[2] + 2.0 * be * w11_0[0]
                       + 2.0 * w11_0[2]),
        -wbs * etx * (beb * w20_m1[0] + ep * w20_0[2]
                      + 2.0 * be * w11_m1[0] + 2.0 * em * w11_0[2]),
    ]
    g21_printed = tau_k * sum(printed)

    # derived route: analytic quadratic form paired with the corrections
    coeffs = quad_coefficients(p, K, eq)
    phi = mode_vector4(q0, mu0, tau_k)
    w20v = _corr_vector4(w20_at)
    w11v = _corr_vector4(w11_at)
    inner = (2.0 * quad_form(coeffs, phi, w11v)
             + quad_form(coeffs, phi.conjugate(), w20v))
    g21_derived = 2.0 * tau_k * (row @ inner)

    # per-group comparison against the finite-difference quadratic form
    hess = fd_hessians(p, eq)
    row_weights = (w1s, w1s, w1s, was, was, was, was, was,
                   wbs, wbs, wbs, wbs)
    quad_checks = []
    groups = []
    for idx, ((label, i, a, b), wrow) in enumerate(zip(_MONOMIALS, row_weights)):
        c_used = coeffs[label]
        c_fd = hess[i, a, b] if a != b else hess[i, a, a] / 2.0
        rel = abs(c_used - c_fd) / max(1.0, abs(c_fd))
        quad_checks.append(QuadInputCheck(label, float(c_used), float(c_fd), rel))
        derived = wrow * _pair_term(c_fd, a, b, phi, w20v, w11v)
        pr = printed[idx]
        diff = abs(pr - derived)
        groups.append(GroupComparison(
            idx + 1, label, complex(pr), complex(derived), diff,
            diff <= 1e-4 * max(1.0, abs(derived))))
    log = DiscrepancyLog(
        quad_inputs=tuple(quad_checks),
        groups=tuple(groups),
        g21_printed=complex(g21_printed),
        g21_derived=complex(g21_derived),
        mismatch_count=sum(1 for g in groups if not g.matches),
    )
    return g21_printed, g21_derived, log


def x0prime_differenced(K: LinearizationConstants, mu0: float, tau_k: float,
                        dtau: float = 0.005) -> complex:
    """Delay derivative of the tracked crossing root by centered differences.

    The root is continued by Newton from i*mu0 to tau_k +/- dtau.
    """
    m = K.k1 * K.k2
    vals = []
    for tau in (tau_k + dtau, tau_k - dtau):
        roots, ok, _ = newton_polish_many(
            -1.0, K.k4, -m, -m * K.k7,
            K.k0, -K.k0 * K.k4, -K.r * m * K.k6,
            tau, [1j * mu0])
        if not bool(ok[0]):
            raise DegenerateError(
                f"root continuation failed at delay {tau}")
        vals.append(complex(roots[0]))
    return (vals[0] - vals[1]) / (2.0 * dtau)


@dataclass(frozen=True)
class NormalFormIntermediates:
    q0: np.ndarray
    qstar0: np.ndarray  # normalized adjoint vector
    b_bar: complex
    g20: complex
    g11: complex
    g02: complex
    g21: complex  # published-bracket route; the reported value
    g21_derived: complex
    w20_at: tuple
    w11_at: tuple
    nf_e1: np.ndarray
    nf_e2: np.ndarray
    pairing_unit: complex  # adjoint pairing with the mode, should be 1
    pairing_cross: complex  # adjoint pairing with the conjugate mode, ~0
    solve_report: SolveReport


@dataclass(frozen=True)
class NormalFormResult:
    c1: complex
    mu_bar2: float
    beta2: float
    t2: float
    direction: str  # supercritical | subcritical
    orbit_stability: str  # stable | unstable
    period_trend: str  # increasing | decreasing
    c1_derived: complex
    x0prime: complex


def hopf_classification(inter: NormalFormIntermediates, x0p: complex,
                        mu0: float, tau_k: float) -> NormalFormResult:
    """Classification quantities from the reduced-equation coefficients."""
    if abs(x0p.real) < 1e-12:
        raise DegenerateError(
            "crossing speed has no real part; classification undefined")

    def c1_of(g21: complex) -> complex:
        return (1j / (2.0 * mu0 * tau_k)
                * (inter.g20 * inter.g11 - 2.0 * abs(inter.g11) ** 2
                   - abs(inter.g02) ** 2 / 3.0)
                + g21 / 2.0)

    c1 = c1_of(inter.g21)
    c1_derived = c1_of(inter.g21_derived)
    mu_bar2 = -c1.real / x0p.real
    beta2 = 2.0 * c1.real
    t2 = -(c1.imag + mu_bar2 * x0p.imag) / mu0
    return NormalFormResult(
        c1=c1,
        mu_bar2=mu_bar2,
        beta2=beta2,
        t2=t2,
        direction="supercritical" if mu_bar2 > 0 else "subcritical",
        orbit_stability="stable" if beta2 < 0 else "unstable",
        period_trend="increasing" if t2 > 0 else "decreasing",
        c1_derived=c1_derived,
        x0prime=x0p,
    )


def analyze_normal_form(p: ModelParams, K: LinearizationConstants,
                        eq: Equilibrium, mu0: float, tau_k: float,
                        dtau: float = 0.005):
    """Full pipeline at one critical pair (mu0, tau_k).

    Returns (intermediates, result, discrepancy log).
    """
    q0, qstar_raw = eigenvectors(K, mu0, tau_k)
    b_bar = normalize(q0, qstar_raw, K, mu0, tau_k)
    qstar0 = b_bar.conjugate() * qstar_raw
    g20, g11, g02, _phi = g_coefficients(p, K, eq, q0, qstar0, mu0, tau_k)
    e1, e2, w20_at, w11_at, report = nf_linear_systems(
        K, p, eq, q0, mu0, tau_k, g20, g11, g02)
    g21, g21_derived, log = g21_terms(
        p, K, eq, q0, qstar0, mu0, tau_k, w20_at, w11_at)
    unit = mode_pairing(qstar0, q0, K, mu0, tau_k)
    cross = mode_pairing(qstar0, q0.conjugate(), K, mu0, tau_k,
                         mode_rate=-1j * mu0 * tau_k)
    inter = NormalFormIntermediates(
        q0=q0, qstar0=qstar0, b_bar=b_bar,
        g20=g20, g11=g11, g02=g02, g21=g21, g21_derived=g21_derived,
        w20_at=w20_at, w11_at=w11_at, nf_e1=e1, nf_e2=e2,
        pairing_unit=unit, pairing_cross=cross, solve_report=report)
    x0p = x0prime_differenced(K, mu0, tau_k, dtau)
    result = hopf_classification(inter, x0p, mu0, tau_k)
    return inter, result, log
