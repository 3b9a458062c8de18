"""Linearization at an interior equilibrium.

Produces the twelve K constants that parameterize everything downstream,
the split Jacobians (instantaneous part and delayed part), the zero-delay
characteristic cubic and its Routh-Hurwitz test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model_core as mc
from .equilibria import Equilibrium
from .model_core import DomainError, ModelParams


@dataclass(frozen=True)
class LinearizationConstants:
    k0: float
    k1: float
    k2: float
    k3: float
    k4: float
    k5: float
    k6: float
    k7: float
    k8: float
    k9: float
    k10: float
    k11: float
    # the interest rate shows up on its own in the delayed factor of the
    # characteristic function, so it travels with the packaged products
    r: float
    a_hat0: float
    # absorbed by the equilibrium condition; stored only so the symbol set
    # is complete
    a_hat1: float


@dataclass
class JacobianPair:
    j0: np.ndarray
    j_tau: np.ndarray


@dataclass
class RouthHurwitz:
    satisfied: bool
    cond1: float  # trace-like sum, needs < 0
    cond2: float  # constant term product, needs > 0
    cond3: float  # bordered combination, needs < 0
    derived: float  # follows from the three, reported for visibility
    marginal: bool  # some condition within 1e-12 of zero


def k_constants(p: ModelParams, eq: Equilibrium) -> LinearizationConstants:
    """All K constants at an interior (E4) equilibrium."""
    if eq.kind != "E4":
        raise ValueError(f"linearization constants are defined at E4 points, got {eq.kind}")
    if not eq.admissible:
        raise ValueError("equilibrium must be admissible")
    w, lam, b = eq.omega_star, eq.lambda_star, eq.b_star
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda* must lie in (0, 1), got {lam}")
    pi = eq.pi_star
    z = mc.inflation(p, w)
    kd = mc.kappa_d1(p, pi)
    kdd = mc.kappa_d2(p, pi)
    gd = mc.growth_d1(p, pi)

    k0 = (p.gamma - 1.0) * w * p.eta_p * p.xi
    k1 = w * mc.phillips_d1(p, lam)
    k2 = lam * kd / p.nu
    k3 = 1.0 - kd + b * gd
    k4 = p.r * k3 - (p.alpha + p.beta + z)
    k6 = -b * p.eta_p * p.xi
    k7 = z + p.alpha + p.beta
    k5 = k7 + p.r * k6
    k8 = lam * kdd / (2.0 * p.nu)
    k9 = kdd * (p.nu - b) / (2.0 * p.nu)
    k10 = p.r ** 2 * k9 + p.r * kd / p.nu
    k11 = 2.0 * p.r * k9 + kd / p.nu
    a_hat0 = p.xi * p.eta_p * (p.gamma - 1.0)
    a_hat1 = -p.phi0 - p.alpha - p.eta_p - p.gamma * p.eta_p
    return LinearizationConstants(k0, k1, k2, k3, k4, k5, k6, k7,
                                  k8, k9, k10, k11, p.r, a_hat0, a_hat1)


def jacobians_at(p: ModelParams, eq: Equilibrium) -> JacobianPair:
    """Instantaneous and delayed Jacobians; their sum is the zero-delay one."""
    K = k_constants(p, eq)
    j0 = np.array([
        [0.0, K.k1, 0.0],
        [-K.k2, 0.0, -p.r * K.k2],
        [K.k3, 0.0, K.k4],
    ])
    j_tau = np.array([
        [K.k0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
        [K.k6, 0.0, 0.0],
    ])
    return JacobianPair(j0=j0, j_tau=j_tau)


def char_cubic(K: LinearizationConstants) -> np.ndarray:
    """Zero-delay characteristic cubic, coefficients highest power first."""
    return np.array([
        -1.0,
        K.k0 + K.k4,
        -(K.k0 * K.k4 + K.k1 * K.k2),
        -K.k1 * K.k2 * K.k5,
    ])


def routh_hurwitz(K: LinearizationConstants) -> RouthHurwitz:
    """Strict inequality test equivalent to a stable zero-delay cubic."""
    cond1 = K.k0 + K.k4
    cond2 = K.k1 * K.k2 * K.k5
    cond3 = cond2 + cond1 * (K.k0 * K.k4 + K.k1 * K.k2)
    derived = K.k0 * K.k4 + K.k1 * K.k2
    satisfied = cond1 < 0 and cond2 > 0 and cond3 < 0
    marginal = min(abs(cond1), abs(cond2), abs(cond3)) < 1e-12
    return RouthHurwitz(satisfied, cond1, cond2, cond3, derived, marginal)
