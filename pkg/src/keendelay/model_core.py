"""Model constants and closed-form ingredient functions.

The model couples the wage share omega, the employment rate lam and the
debt ratio b of a closed economy.  Everything downstream (equilibria,
linearization, delay analysis, simulation) is algebra over the four maps
defined here:

    phillips(lam) = phi1/(1-lam)^2 - phi0      wage growth vs employment
    kappa(pi)     = kappa0 + exp(kappa1 + kappa2*pi)   investment share
    growth(pi)    = kappa(pi)/nu - delta        output growth
    inflation(w)  = eta_p*(xi*w - 1)            price growth

with the profit share pi = 1 - omega - r*b never stored as state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """An argument left the mathematical domain of a model function."""


@dataclass(frozen=True)
class ModelParams:
    """All scalar constants of the model.

    Rates (alpha, beta, delta, r, eta_p) are per unit time; nu, gamma, xi
    and the Phillips/investment constants are dimensionless.  Validation
    is eager: every downstream formula silently misbehaves on a bad set.
    """

    alpha: float
    beta: float
    delta: float
    nu: float
    r: float
    gamma: float
    eta_p: float
    xi: float
    phi0: float
    phi1: float
    kappa0: float
    kappa1: float
    kappa2: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if not self.eta_p > 0:
            raise ValueError(f"eta_p must be positive, got {self.eta_p}")
        if not self.xi >= 1:
            raise ValueError(f"xi must be >= 1, got {self.xi}")
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not self.phi1 > 0:
            raise ValueError(f"phi1 must be positive, got {self.phi1}")
        if not self.kappa2 > 0:
            raise ValueError(f"kappa2 must be positive, got {self.kappa2}")
        # kappa's lower constant must leave room for the balanced-growth
        # investment level nu*(alpha+beta+delta).
        limit = self.nu * (self.alpha + self.beta + self.delta)
        if not self.kappa0 < limit:
            raise ValueError(
                f"kappa0 must be below nu*(alpha+beta+delta)={limit}, got {self.kappa0}"
            )
        # wage growth at zero employment must undercut productivity growth
        if not self.phi1 - self.phi0 < self.alpha:
            raise ValueError("phillips(0) must be below alpha")


@dataclass(frozen=True)
class State:
    """One point (omega, lam, b) of the state space.

    The profit share is derived, never stored: pi = 1 - omega - r*b.
    """

    omega: float
    lam: float
    b: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.omega, self.lam, self.b)


def profit_share(p: ModelParams, omega: float, b: float) -> float:
    return 1.0 - omega - p.r * b


# -- Phillips curve ---------------------------------------------------------

def phillips(p: ModelParams, lam: float) -> float:
    """Wage growth at employment rate lam; pole at lam = 1."""
    if lam < 0 or lam >= 1:
        raise DomainError(f"phillips needs 0 <= lam < 1, got {lam}")
    return p.phi1 / (1.0 - lam) ** 2 - p.phi0


def phillips_d1(p: ModelParams, lam: float) -> float:
    if lam < 0 or lam >= 1:
        raise DomainError(f"phillips_d1 needs 0 <= lam < 1, got {lam}")
    return 2.0 * p.phi1 / (1.0 - lam) ** 3


def phillips_d2(p: ModelParams, lam: float) -> float:
    if lam < 0 or lam >= 1:
        raise DomainError(f"phillips_d2 needs 0 <= lam < 1, got {lam}")
    return 6.0 * p.phi1 / (1.0 - lam) ** 4


def phillips_inv(p: ModelParams, y: float) -> float:
    """Inverse of phillips on (0, 1); requires y above phillips(0)."""
    if y <= p.phi1 - p.phi0:
        raise DomainError(f"phillips_inv needs y > phillips(0), got {y}")
    return 1.0 - math.sqrt(p.phi1 / (y + p.phi0))


# -- investment function ----------------------------------------------------

def kappa(p: ModelParams, pi: float) -> float:
    # exp can overflow for absurd profit shares swept by bracketing scans;
    # saturating keeps the sign information usable there.
    try:
        return p.kappa0 + math.exp(p.kappa1 + p.kappa2 * pi)
    except OverflowError:
        return math.inf


def kappa_d1(p: ModelParams, pi: float) -> float:
    try:
        return p.kappa2 * math.exp(p.kappa1 + p.kappa2 * pi)
    except OverflowError:
        return math.inf


def kappa_d2(p: ModelParams, pi: float) -> float:
    try:
        return p.kappa2 ** 2 * math.exp(p.kappa1 + p.kappa2 * pi)
    except OverflowError:
        return math.inf


def kappa_inv(p: ModelParams, y: float) -> float:
    if y <= p.kappa0:
        raise DomainError(f"kappa_inv needs y > kappa0={p.kappa0}, got {y}")
    return (math.log(y - p.kappa0) - p.kappa1) / p.kappa2


# -- growth rate ------------------------------------------------------------

def growth(p: ModelParams, pi: float) -> float:
    return kappa(p, pi) / p.nu - p.delta


def growth_d1(p: ModelParams, pi: float) -> float:
    return kappa_d1(p, pi) / p.nu


def growth_d2(p: ModelParams, pi: float) -> float:
    return kappa_d2(p, pi) / p.nu


def growth_inv(p: ModelParams, y: float) -> float:
    return kappa_inv(p, p.nu * (y + p.delta))


# -- inflation --------------------------------------------------------------

def inflation(p: ModelParams, omega: float) -> float:
    """Price growth as an affine function of the wage share."""
    return p.eta_p * (p.xi * omega - 1.0)
