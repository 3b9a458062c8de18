"""Fixed points of the delayed system.

A fixed point makes all three equations stationary with the delayed wage
share pinned to its current value, so the same points serve every delay.
Four families exist:

    E1(0, 0, b*)            collapse with zero wage share and employment
    E2(omega2*, 0, b*)      positive wage share, zero employment
    E3(0, lam*, b*)         a line of equilibria (lam* free), usually absent
    E4(omega*, lam*, b*)    interior points, up to two of them

E4 is the economically meaningful family and the only one analyzed
further downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import model_core as mc
from .model_core import DomainError, ModelParams


class NoRootError(ValueError):
    """A bracketing scan found no sign change."""


@dataclass
class Equilibrium:
    kind: str
    omega_star: float
    lambda_star: float
    b_star: float
    pi_star: float
    admissible: bool
    residual: float
    lambda_free: bool = False
    note: str = ""


def system_rhs(p: ModelParams, omega: float, lam: float, b: float,
               omega_delayed: float) -> tuple[float, float, float]:
    """Right-hand side of the three equations, delayed wage share explicit."""
    pi = mc.profit_share(p, omega, b)
    z = mc.inflation(p, omega_delayed)
    g = mc.growth(p, pi)
    f1 = omega * (mc.phillips(p, lam) - p.alpha - (1.0 - p.gamma) * z)
    f2 = lam * (g - p.alpha - p.beta)
    f3 = mc.kappa(p, pi) - pi - b * (z + g)
    return (f1, f2, f3)


def equilibrium_residual(p: ModelParams, omega: float, lam: float, b: float) -> float:
    """Max absolute stationarity defect with the delayed argument frozen."""
    f = system_rhs(p, omega, lam, b, omega)
    return max(abs(v) for v in f)


def _make(p: ModelParams, kind: str, omega: float, lam: float, b: float,
          lambda_free: bool = False, note: str = "") -> Equilibrium:
    finite = all(map(math.isfinite, (omega, b))) and (lambda_free or math.isfinite(lam))
    if finite:
        # a free employment rate is checked at a representative interior value
        res = equilibrium_residual(p, omega, 0.5 if lambda_free else lam, b)
    else:
        res = math.nan
    admissible = (
        finite
        and 0.0 < omega < 1.0
        and (lambda_free or 0.0 < lam < 1.0)
        and not note
    )
    return Equilibrium(
        kind=kind,
        omega_star=omega,
        lambda_star=lam,
        b_star=b,
        pi_star=mc.profit_share(p, omega, b) if finite else math.nan,
        admissible=admissible,
        residual=res,
        lambda_free=lambda_free,
        note=note,
    )


def find_pi_star(p: ModelParams) -> float:
    """Profit share forcing the balanced growth rate alpha + beta."""
    return mc.growth_inv(p, p.alpha + p.beta)


def find_e4(p: ModelParams) -> list[Equilibrium]:
    """Interior equilibria from the quadratic in omega*, sorted ascending.

    Roots are always reported; inadmissible ones carry the reason instead
    of silently disappearing.
    """
    pi_star = find_pi_star(p)
    a0 = p.xi * p.eta_p
    a1 = p.alpha + p.beta - p.eta_p - p.xi * p.eta_p * (1.0 - pi_star)
    a2 = (p.eta_p - p.alpha - p.beta) * (1.0 - pi_star) + p.r * (mc.kappa(p, pi_star) - pi_star)

    disc = a1 * a1 - 4.0 * a0 * a2
    if disc < 0:
        return []
    # stable variant: extract the larger-magnitude root first, the mate via
    # a2/(a0*root), avoiding cancellation when a1^2 >> a0*a2
    sq = math.sqrt(disc)
    qq = -0.5 * (a1 + math.copysign(sq, a1)) if a1 != 0 else 0.5 * sq
    roots = sorted({qq / a0} if qq == 0 else {qq / a0, a2 / qq})

    out = []
    for w in roots:
        zw = mc.inflation(p, w)
        y = p.alpha + (1.0 - p.gamma) * zw
        if y <= p.phi1 - p.phi0:
            out.append(_make(p, "E4", w, math.nan, math.nan,
                             note="wage-growth target below phillips(0)"))
            continue
        lam = mc.phillips_inv(p, y)
        denom = zw + p.alpha + p.beta
        if abs(denom) < 1e-14:
            out.append(_make(p, "E4", w, lam, math.nan,
                             note="debt equation denominator vanishes"))
            continue
        b = (mc.kappa(p, pi_star) - pi_star) / denom
        out.append(_make(p, "E4", w, lam, b))
    return out


def _bisect_root(f, lo: float, hi: float, flo: float) -> float:
    # plain bisection to 1e-12 interval width, then one Newton polish by
    # secant-free finite difference is done by the caller
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_roots(f, fprime, lo: float, hi: float, n: int) -> list[float]:
    """Sign-change scan over [lo, hi], bisection per bracket, Newton polish."""
    roots = []
    prev_b = lo
    prev_f = f(lo)
    step = (hi - lo) / n
    for i in range(1, n + 1):
        cur_b = lo + i * step
        cur_f = f(cur_b)
        if math.isfinite(prev_f) and math.isfinite(cur_f) and (prev_f < 0) != (cur_f < 0):
            root = _bisect_root(f, prev_b, cur_b, prev_f)
            d = fprime(root)
            if math.isfinite(d) and d != 0:
                root -= f(root) / d
            roots.append(root)
        prev_b, prev_f = cur_b, cur_f
    return roots


def find_e1(p: ModelParams, bracket: tuple[float, float] | None = None,
            scan_points: int = 10_000) -> list[Equilibrium]:
    """Equilibria with omega* = lam* = 0, debt ratio from a scalar root.

    The defining equation is kappa(pi) - pi = b*(growth(pi) - eta_p) with
    pi = 1 - r*b.  All roots in the scan range are returned, sorted by b.
    """

    def f(b: float) -> float:
        pi = 1.0 - p.r * b
        return mc.kappa(p, pi) - pi - b * (mc.growth(p, pi) - p.eta_p)

    def fprime(b: float) -> float:
        pi = 1.0 - p.r * b
        return (-p.r * mc.kappa_d1(p, pi) + p.r
                - (mc.growth(p, pi) - p.eta_p)
                + b * p.r * mc.growth_d1(p, pi))

    lo, hi = bracket if bracket is not None else (-1e3 / p.r, 1e3 / p.r)
    roots = _scan_roots(f, fprime, lo, hi, scan_points)
    if not roots:
        raise NoRootError(f"no sign change of the E1 defining equation in [{lo}, {hi}]")
    return [_make(p, "E1", 0.0, 0.0, b) for b in sorted(roots)]


def find_e2(p: ModelParams, bracket: tuple[float, float] | None = None,
            scan_points: int = 10_000) -> list[Equilibrium]:
    """Equilibria with lam* = 0 and the closed-form positive wage share."""
    if p.gamma == 1.0:
        raise ZeroDivisionError("E2 wage share undefined at gamma = 1")
    w2 = (mc.phillips(p, 0.0) - p.alpha) / ((1.0 - p.gamma) * p.eta_p * p.xi) + 1.0 / p.xi
    zw = mc.inflation(p, w2)

    def f(b: float) -> float:
        pi = 1.0 - w2 - p.r * b
        return mc.kappa(p, pi) - pi - b * (zw + mc.growth(p, pi))

    def fprime(b: float) -> float:
        pi = 1.0 - w2 - p.r * b
        return (-p.r * mc.kappa_d1(p, pi) + p.r
                - (zw + mc.growth(p, pi))
                + b * p.r * mc.growth_d1(p, pi))

    lo, hi = bracket if bracket is not None else (-1e3 / p.r, 1e3 / p.r)
    roots = _scan_roots(f, fprime, lo, hi, scan_points)
    if not roots:
        raise NoRootError(f"no sign change of the E2 defining equation in [{lo}, {hi}]")
    return [_make(p, "E2", w2, 0.0, b) for b in sorted(roots)]


def find_e3(p: ModelParams, tol: float = 1e-9) -> Equilibrium | None:
    """Line of equilibria with omega* = 0 and free employment rate.

    Exists only when the debt equation is consistent with the profit share
    already pinned by balanced growth; generically it is not.
    """
    pi3 = find_pi_star(p)
    if p.r == 0:
        raise ZeroDivisionError("E3 debt ratio undefined at r = 0")
    b3 = (1.0 - pi3) / p.r
    defect = mc.kappa(p, pi3) - pi3 - b3 * (mc.growth(p, pi3) - p.eta_p)
    if abs(defect) >= tol:
        return None
    return _make(p, "E3", 0.0, math.nan, b3, lambda_free=True)


def find_all(p: ModelParams) -> list[Equilibrium]:
    """Every family in one list; scan failures just drop that family."""
    out: list[Equilibrium] = []
    for finder in (find_e1, find_e2):
        try:
            out.extend(finder(p))
        except (NoRootError, ZeroDivisionError, DomainError):
            pass
    try:
        e3 = find_e3(p)
        if e3 is not None:
            out.append(e3)
    except (ZeroDivisionError, DomainError):
        pass
    out.extend(find_e4(p))
    return out
