"""Acceptance gate: one numbered check per required behavior, each printing
a single pass/fail line to the terminal with the deciding numbers.

Criterion 8 compares the branch classification against the stated target
signs; the computed reduction disagrees with that target, so the check is
expected to fail and documents the disagreement instead of hiding it."""

import cmath
import math

import numpy as np
import pytest

from keendelay import cubic
from keendelay import dde_sim as sim
from keendelay import delay_spectrum as ds
from keendelay import equilibria as eqm
from keendelay import linearize as lin
from keendelay import model_core as mc
from keendelay import normal_form as nf
from keendelay.model_core import State

E4_LOW = (0.8084459190135412, 0.9659919015918376, 0.9904227201749243)
E4_HIGH = (0.8362603006528849, 0.9683649731639392, 0.06327666553070102)
Z_HIGH = 0.004917305096846736
Z_LOW = -0.04181085605725072
MU_TARGETS = (2.157, 1.881)
RESIDUAL_MU = 0.050
TAU0_TARGET = 0.82998
MU0_TARGET = 2.1567
HPRIME_TARGET = 5.180
ROOT_085 = 0.00579485 + 2.15435j
TARGET_SIGNS = ("subcritical", "unstable", "decreasing")
TARGET_C1 = 436.694 + 3390.52j


def report(capsys, num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}"
    with capsys.disabled():
        print(line)
    assert ok, line


def test_criterion_01_interior_coordinates(capsys, ref_params, e4_pair):
    low, high = e4_pair
    got = [low.omega_star, low.lambda_star, low.b_star,
           high.omega_star, high.lambda_star, high.b_star]
    want = list(E4_LOW) + list(E4_HIGH)
    coord_err = max(abs(g - w) for g, w in zip(got, want))
    resid = max(e.residual for e in e4_pair)
    ok = coord_err < 1e-5 and resid < 1e-9
    report(capsys, 1, ok,
           f"two interior points, coordinate error {coord_err:.2e} "
           f"(tol 1e-5), stationarity residual {resid:.2e} (tol 1e-9)")


def test_criterion_02_inflation_at_equilibria(capsys, ref_params, e4_pair):
    z_low = mc.inflation(ref_params, e4_pair[0].omega_star)
    z_high = mc.inflation(ref_params, e4_pair[1].omega_star)
    err = max(abs(z_low - Z_LOW), abs(z_high - Z_HIGH))
    ok = err < 1e-4
    report(capsys, 2, ok,
           f"equilibrium inflation {z_high:.6f} and {z_low:.6f}, "
           f"error {err:.2e} (tol 1e-4)")


def test_criterion_03_zero_delay_verdicts(capsys, ref_params, e4_pair):
    results = []
    for eq in e4_pair:
        K = lin.k_constants(ref_params, eq)
        rh = lin.routh_hurwitz(K)
        roots = np.roots(lin.char_cubic(K))
        results.append((rh.satisfied, bool(np.all(roots.real < 0.0))))
    (low_rh, low_roots), (high_rh, high_roots) = results
    ok = (high_rh and high_roots and not low_rh and not low_roots
          and low_rh == low_roots and high_rh == high_roots)
    report(capsys, 3, ok,
           "inequality test and direct cubic roots agree: larger wage share "
           f"stable={high_rh}, smaller unstable={not low_rh}")


def test_criterion_04_crossing_frequencies(capsys, k_stable):
    hz = ds.hz_coefficients(k_stable)
    pos, case = ds.positive_roots(hz)
    mus = sorted((math.sqrt(z) for z in pos), reverse=True)
    mu_err = max(abs(a - b) for a, b in zip(mus, MU_TARGETS))
    neg = [z for z in cubic.real_roots(1.0, hz.p, hz.q, hz.r_tilde) if z < 0.0]
    res_err = abs(math.sqrt(abs(neg[0])) - RESIDUAL_MU) if neg else math.inf
    ok = len(pos) == 2 and mu_err < 1e-3 and len(neg) == 1 and res_err < 1e-3
    report(capsys, 4, ok,
           f"two crossing frequencies {mus[0]:.4f}, {mus[1]:.4f} "
           f"(err {mu_err:.2e}, tol 1e-3); remaining root negative with "
           f"sqrt|z| err {res_err:.2e} (tol 1e-3)")


def test_criterion_05_first_critical_delay(capsys, k_stable, crossing):
    resid = abs(ds.quasipoly(1j * crossing.mu0, crossing.tau0, k_stable))
    ok = (abs(crossing.tau0 - TAU0_TARGET) < 1e-4
          and abs(crossing.mu0 - MU0_TARGET) < 1e-3
          and resid < 1e-8)
    report(capsys, 5, ok,
           f"tau0 = {crossing.tau0:.6f} (tol 1e-4), mu0 = {crossing.mu0:.5f} "
           f"(tol 1e-3), characteristic residual {resid:.2e} (tol 1e-8)")


def test_criterion_06_transversality(capsys, k_stable, crossing):
    hz = ds.hz_coefficients(k_stable)
    tv = ds.transversality(hz, crossing.z0)
    lo = ds.rightmost_roots(k_stable, crossing.tau0 - 0.02)[0].real
    hi = ds.rightmost_roots(k_stable, crossing.tau0 + 0.02)[0].real
    fd_sign = 1 if hi > lo else -1
    ok = (abs(tv.hprime - HPRIME_TARGET) < 1e-2
          and not tv.degenerate and tv.sign == fd_sign == 1)
    report(capsys, 6, ok,
           f"h'(z0) = {tv.hprime:.6f} (target {HPRIME_TARGET}, tol 1e-2); "
           f"real part moves {lo:.5f} to {hi:.5f} across the crossing, "
           f"matching sign {tv.sign:+d}")


def test_criterion_07_spectrum_both_sides(capsys, k_stable):
    above = ds.rightmost_roots(k_stable, 0.85)
    below = ds.rightmost_roots(k_stable, 0.80)
    err = abs(above[0] - ROOT_085)
    ok = err < 1e-4 and bool(below) and all(z.real < 0.0 for z in below)
    report(capsys, 7, ok,
           f"rightmost root at delay 0.85 within {err:.2e} of "
           f"{ROOT_085} (tol 1e-4); all roots at 0.80 strictly left "
           f"of the axis")


def test_criterion_08_branch_classification(capsys, ref_params, eq_stable,
                                            k_stable, crossing):
    _, res, log = nf.analyze_normal_form(
        ref_params, k_stable, eq_stable, crossing.mu0, crossing.tau0)
    got_signs = (res.direction, res.orbit_stability, res.period_trend)
    log_ok = (len(log.groups) == 12 and log.mismatch_count > 0
              and len(log.lines()) >= 12)
    ok = log_ok and got_signs == TARGET_SIGNS
    mism = sorted(g.index for g in log.groups if not g.matches)
    report(capsys, 8, ok,
           f"computed {got_signs} vs target {TARGET_SIGNS}; "
           f"c1(0) = {res.c1:.6g} (target magnitude {TARGET_C1}, reported "
           f"ungated, derived route {res.c1_derived:.6g}); discrepancy log "
           f"emitted, cubic-term groups {mism} disagree between the printed "
           f"bracket and the derived pairing")


def test_criterion_09_property_suite(capsys, ref_params, eq_stable,
                                     k_stable, crossing):
    p = ref_params
    checks = []

    lam, pi = 0.9, 0.16
    fd1 = (mc.phillips(p, lam + 1e-5) - mc.phillips(p, lam - 1e-5)) / 2e-5
    fd2 = (mc.kappa(p, pi + 1e-5) - mc.kappa(p, pi - 1e-5)) / 2e-5
    checks.append(("derivative-vs-difference 1e-6",
                   abs(mc.phillips_d1(p, lam) / fd1 - 1.0) < 1e-6
                   and abs(mc.kappa_d1(p, pi) / fd2 - 1.0) < 1e-6))

    rt = [abs(mc.phillips_inv(p, mc.phillips(p, x)) - x) for x in (0.3, 0.95)]
    rt += [abs(mc.kappa_inv(p, mc.kappa(p, x)) - x) for x in (-0.2, 0.4)]
    checks.append(("inverse round-trips 1e-12", max(rt) < 1e-12))

    K = k_stable
    checks.append(("constant identities exact",
                   K.k5 == K.k7 + K.r * K.k6
                   and K.k4 == K.r * K.k3 - K.k7
                   and K.k0 == K.a_hat0 * eq_stable.omega_star))

    pair = lin.jacobians_at(p, eq_stable)
    q0, qraw = nf.eigenvectors(K, crossing.mu0, crossing.tau0)
    b_bar = nf.normalize(q0, qraw, K, crossing.mu0, crossing.tau0)
    qstar = b_bar.conjugate() * qraw
    weight = cmath.exp(-1j * crossing.mu0 * crossing.tau0)
    eig_res = np.max(np.abs(
        (pair.j0 + weight * pair.j_tau
         - 1j * crossing.mu0 * np.eye(3)) @ q0))
    unit = nf.mode_pairing(qstar, q0, K, crossing.mu0, crossing.tau0)
    checks.append(("eigenresidual 1e-8", eig_res < 1e-8))
    checks.append(("normalization 1e-10", abs(unit - 1.0) < 1e-10))

    def final(dt):
        cfg = sim.SimConfig(tau=0.0, dt=dt, t_end=5.0,
                            initial=State(0.83, 0.95, 0.1))
        return sim.simulate(p, cfg).states[-1]

    ref = final(0.003125)
    factor = (np.linalg.norm(final(0.1) - ref)
              / np.linalg.norm(final(0.05) - ref))
    checks.append((f"step-halving factor {factor:.2f} in [12, 20]",
                   12.0 <= factor <= 20.0))

    eq_state = State(eq_stable.omega_star, eq_stable.lambda_star,
                     eq_stable.b_star)
    inv = sim.simulate(p, sim.SimConfig(tau=0.85, dt=0.01, t_end=100.0,
                                        initial=eq_state))
    drift = np.max(np.abs(inv.states - np.array(eq_state.as_tuple())))
    checks.append((f"equilibrium drift {drift:.2e} under 1e-8", drift < 1e-8))

    osc = sim.simulate(p, sim.SimConfig(tau=0.85, dt=0.01, t_end=300.0,
                                        initial=State(0.837, 0.968, 0.064)))
    met = sim.oscillation_metrics(osc, eq_stable)
    period_txt = "none" if met.insufficient else f"{met.period:.4f}"
    period_ok = (not met.insufficient
                 and abs(met.period - 2.913) / 2.913 < 0.05)
    checks.append((f"emergent period {period_txt} within 5% of 2.913",
                   period_ok))

    ok = all(flag for _, flag in checks)
    detail = "; ".join(f"{name} {'ok' if flag else 'FAIL'}"
                       for name, flag in checks)
    report(capsys, 9, ok, detail)


def test_criterion_10_delay_scan(capsys, k_stable):
    taus = [0.82, 0.83, 0.84]
    res = [ds.rightmost_roots(k_stable, t)[0].real for t in taus]
    changed = [(a, b) for a, b, x, y in zip(taus, taus[1:], res, res[1:])
               if (x < 0.0) != (y < 0.0)]
    ok = len(changed) == 1 and res[0] < 0.0 < res[-1]
    values = ", ".join(f"{x:.5f}" for x in res)
    if changed:
        where = f"sign change inside ({changed[0][0]}, {changed[0][1]})"
    else:
        where = "no sign change located"
    report(capsys, 10, ok,
           f"max real part over the 0.01 grid: {values}; {where}")
