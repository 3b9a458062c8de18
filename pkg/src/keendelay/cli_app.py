"""Command-line front end: one JSON config, six analysis commands.

Exit codes: 0 success, 2 config problem, 3 missing equilibrium or index,
4 failed hypothesis or degeneracy, 5 integration halted by an event.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import delay_spectrum as ds
from . import model_core as mc
from . import normal_form as nf
from .cubic import roots as cubic_roots
from .dde_sim import (SimConfig, SimConfigError, Trajectory,
                      oscillation_metrics, simulate)
from .equilibria import Equilibrium, NoRootError, find_all, find_e4
from .linearize import char_cubic, k_constants, routh_hurwitz
from .model_core import ModelParams, State


class ConfigError(ValueError):
    """The config document is malformed or fails validation."""


_MODEL_KEYS = ("alpha", "beta", "delta", "nu", "r", "gamma", "eta_p", "xi",
               "phi0", "phi1", "kappa0", "kappa1", "kappa2")
_ANALYSIS_KEYS = ("tau", "dt", "t_end", "initial", "j_max", "newton", "tol")
_NEWTON_KEYS = ("re_min", "re_max", "im_min", "im_max", "nx", "ny")
_TOL_KEYS = ("residual", "root")
_OUTPUT_KEYS = ("dir", "svg")


@dataclass(frozen=True)
class NewtonWindow:
    re_min: float = -3.0
    re_max: float = 1.0
    im_min: float = 0.0
    im_max: float = 12.0
    nx: int = 40
    ny: int = 40


@dataclass(frozen=True)
class AnalysisConfig:
    tau: float = 0.0
    dt: Optional[float] = None  # None picks tau/64, or 0.01 when tau is 0
    t_end: float = 500.0
    initial: tuple = (0.837, 0.968, 0.064)
    j_max: int = 3
    newton: NewtonWindow = NewtonWindow()
    tol_residual: float = 1e-9
    tol_root: float = 1e-10


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    svg: bool = False


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    analysis: AnalysisConfig
    output: OutputConfig


def _check_keys(doc: dict, allowed: Sequence[str], where: str) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = [k for k in doc if k not in allowed]
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _number(doc: dict, key: str, where: str, default=None):
    if key not in doc:
        if default is None:
            raise ConfigError(f"{where}.{key} is required")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return float(v)


def _apply_set(doc: dict, expr: str) -> None:
    """Apply one dotted-path override, value parsed as a JSON literal."""
    if "=" not in expr:
        raise ConfigError(f"--set needs key=value, got {expr!r}")
    path, raw = expr.split("=", 1)
    keys = [k for k in path.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"--set has an empty key path: {expr!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = doc
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set path {path!r} crosses a non-object")
    node[keys[-1]] = value


def load_config(path: str, sets: Sequence[str] = (),
                out_dir: Optional[str] = None) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    for expr in sets:
        _apply_set(doc, expr)

    _check_keys(doc, ("model", "analysis", "output"), "config")
    if "model" not in doc:
        raise ConfigError("config.model is required")
    mdoc = doc["model"]
    _check_keys(mdoc, _MODEL_KEYS, "model")
    kwargs = {k: _number(mdoc, k, "model") for k in _MODEL_KEYS}
    try:
        model = ModelParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"model parameters rejected: {exc}") from exc

    adoc = doc.get("analysis", {})
    _check_keys(adoc, _ANALYSIS_KEYS, "analysis")
    ndoc = adoc.get("newton", {})
    _check_keys(ndoc, _NEWTON_KEYS, "analysis.newton")
    tdoc = adoc.get("tol", {})
    _check_keys(tdoc, _TOL_KEYS, "analysis.tol")
    initial = adoc.get("initial", [0.837, 0.968, 0.064])
    if (not isinstance(initial, (list, tuple)) or len(initial) != 3
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in initial)):
        raise ConfigError("analysis.initial must be [omega, lambda, b]")
    dt = None
    if "dt" in adoc:
        dt = _number(adoc, "dt", "analysis")
    j_max = adoc.get("j_max", 3)
    if isinstance(j_max, bool) or not isinstance(j_max, int) or j_max < 0:
        raise ConfigError("analysis.j_max must be a nonnegative integer")
    for k in ("nx", "ny"):
        if k in ndoc and (isinstance(ndoc[k], bool)
                          or not isinstance(ndoc[k], int) or ndoc[k] < 2):
            raise ConfigError(f"analysis.newton.{k} must be an integer >= 2")
    newton = NewtonWindow(
        re_min=_number(ndoc, "re_min", "analysis.newton", -3.0),
        re_max=_number(ndoc, "re_max", "analysis.newton", 1.0),
        im_min=_number(ndoc, "im_min", "analysis.newton", 0.0),
        im_max=_number(ndoc, "im_max", "analysis.newton", 12.0),
        nx=ndoc.get("nx", 40), ny=ndoc.get("ny", 40))
    analysis = AnalysisConfig(
        tau=_number(adoc, "tau", "analysis", 0.0),
        dt=dt,
        t_end=_number(adoc, "t_end", "analysis", 500.0),
        initial=tuple(float(v) for v in initial),
        j_max=j_max,
        newton=newton,
        tol_residual=_number(tdoc, "residual", "analysis.tol", 1e-9),
        tol_root=_number(tdoc, "root", "analysis.tol", 1e-10))
    if analysis.tau < 0:
        raise ConfigError("analysis.tau must be nonnegative")

    odoc = doc.get("output", {})
    _check_keys(odoc, _OUTPUT_KEYS, "output")
    svg = odoc.get("svg", False)
    if not isinstance(svg, bool):
        raise ConfigError("output.svg must be a boolean")
    out = odoc.get("dir", "out")
    if not isinstance(out, str):
        raise ConfigError("output.dir must be a string")
    if out_dir is not None:
        out = out_dir
    return RunConfig(model=model, analysis=analysis,
                     output=OutputConfig(dir=out, svg=svg))


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _cfmt(z: complex) -> str:
    return f"{z.real:.12g} {z.imag:+.12g}i"


def _write_csv(cfg: RunConfig, name: str, header: str,
               rows: Sequence[Sequence]) -> Path:
    directory = Path(cfg.output.dir)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(c) if isinstance(c, str) else _fmt(c)
                              for c in row) + "\n")
    return path


def _interior(p: ModelParams) -> list:
    """Interior equilibria ordered by descending wage share, so index 1 is
    the branch that stays stable without delay in the reference setup."""
    eqs = find_e4(p)
    return sorted(eqs, key=lambda e: -e.omega_star)


def _select(p: ModelParams, index: int) -> Equilibrium:
    eqs = _interior(p)
    if index < 1 or index > len(eqs):
        raise IndexError(f"interior equilibrium index {index} out of range "
                         f"(found {len(eqs)})")
    return eqs[index - 1]


def cmd_equilibria(cfg: RunConfig) -> int:
    p = cfg.model
    eqs = find_all(p)
    if not eqs:
        print("no equilibria found", file=sys.stderr)
        return 3
    rows = []
    print("kind      omega          lambda         b              pi             "
          "infl           admissible residual")
    for e in eqs:
        z = mc.inflation(p, e.omega_star) if math.isfinite(e.omega_star) else math.nan
        lam_txt = "free" if e.lambda_free else _fmt(e.lambda_star)
        print(f"{e.kind:<9} {_fmt(e.omega_star):<14} {lam_txt:<14} "
              f"{_fmt(e.b_star):<14} {_fmt(e.pi_star):<14} {_fmt(z):<14} "
              f"{int(e.admissible):<10} {_fmt(e.residual)}")
        rows.append((e.kind, e.omega_star, e.lambda_star, e.b_star,
                     e.pi_star, z, int(e.admissible), e.residual))
    path = _write_csv(cfg, "equilibria.csv",
                      "kind,omega,lambda,b,pi,infl,admissible,residual", rows)
    print(f"wrote {path}")
    return 0


def cmd_stability(cfg: RunConfig, eq_index: int) -> int:
    p = cfg.model
    eq = _select(p, eq_index)
    K = k_constants(p, eq)
    print(f"equilibrium {eq_index}: omega={_fmt(eq.omega_star)} "
          f"lambda={_fmt(eq.lambda_star)} b={_fmt(eq.b_star)}")
    for i in range(12):
        print(f"K{i} = {_fmt(getattr(K, f'k{i}'))}")
    rh = routh_hurwitz(K)
    print(f"condition 1 (must be < 0): {_fmt(rh.cond1)}")
    print(f"condition 2 (must be > 0): {_fmt(rh.cond2)}")
    print(f"condition 3 (must be < 0): {_fmt(rh.cond3)}")
    print(f"derived product (reported): {_fmt(rh.derived)}")
    print(f"Routh-Hurwitz: {'satisfied' if rh.satisfied else 'violated'}")
    a, b, c, d = char_cubic(K)
    for x in cubic_roots(a, b, c, d):
        print(f"zero-delay root: {_cfmt(x)}")
    return 0


def cmd_critical_delay(cfg: RunConfig, eq_index: int) -> int:
    p = cfg.model
    eq = _select(p, eq_index)
    K = k_constants(p, eq)
    verdict = ds.stability_verdict(K, j_max=cfg.analysis.j_max)
    hz = ds.hz_coefficients(K)
    print(f"frequency cubic: p={_fmt(hz.p)} q={_fmt(hz.q)} "
          f"r={_fmt(hz.r_tilde)} disc={_fmt(hz.delta_disc)}")
    print(f"root case: {verdict.root_case}")
    zroots, _ = ds.positive_roots(hz)
    for z in zroots:
        print(f"positive root z={_fmt(z)} mu={_fmt(math.sqrt(z))}")
    if verdict.case == "no-switch":
        _write_csv(cfg, "critical_delays.csv", "mu,z,j,tau", [])
        print("verdict: no-switch (stable for every delay)")
        return 0
    cds = verdict.delays
    rows = []
    for e in cds.entries:
        for j, tau in enumerate(e.taus):
            rows.append((e.mu, e.z, j, tau))
    path = _write_csv(cfg, "critical_delays.csv", "mu,z,j,tau",
                      sorted(rows, key=lambda r: r[3]))
    resid = abs(ds.quasipoly(1j * cds.mu0, cds.tau0, K))
    print(f"tau0 = {_fmt(cds.tau0)}")
    print(f"mu0 = {_fmt(cds.mu0)}")
    print(f"h'(z0) = {_fmt(cds.hprime_at_z0)}")
    print(f"characteristic residual at the crossing: {_fmt(resid)}")
    print(f"verdict: {verdict.classification}")
    print(f"wrote {path}")
    return 0


def cmd_normal_form(cfg: RunConfig, eq_index: int) -> int:
    p = cfg.model
    eq = _select(p, eq_index)
    K = k_constants(p, eq)
    verdict = ds.stability_verdict(K, j_max=cfg.analysis.j_max)
    if verdict.case != "switch-at-tau0":
        print("no stability switch: nothing to classify", file=sys.stderr)
        return 4
    cds = verdict.delays
    hz = ds.hz_coefficients(K)
    tv = ds.transversality(hz, cds.z0)
    if tv.degenerate:
        print("transversality is degenerate at the crossing", file=sys.stderr)
        return 4
    inter, res, log = nf.analyze_normal_form(p, K, eq, cds.mu0, cds.tau0)
    print(f"tau0 = {_fmt(cds.tau0)}  mu0 = {_fmt(cds.mu0)}")
    print(f"c1(0) = {_cfmt(res.c1)}")
    print(f"c1(0) derived route = {_cfmt(res.c1_derived)}")
    print(f"root speed across the crossing: {_cfmt(res.x0prime)}")
    print(f"mu_bar2 = {_fmt(res.mu_bar2)}")
    print(f"beta2 = {_fmt(res.beta2)}")
    print(f"T2 = {_fmt(res.t2)}")
    print(f"direction: {res.direction}")
    print(f"periodic solutions {res.orbit_stability}")
    trend = "increases" if res.period_trend == "increasing" else "decreases"
    print(f"period {trend} along the branch")
    for line in log.lines():
        print(line)
    return 0


_SVG_COLORS = ("#1f6fb4", "#c23b22", "#2c8a4b")
_SVG_NAMES = ("omega", "lambda", "b")


def write_svg(path: Path, traj: Trajectory) -> None:
    """Minimal polyline plot of the three series against time."""
    w, h = 900, 420
    ml, mr, mt, mb = 60, 20, 24, 40
    t = traj.times
    y = traj.states
    tmin, tmax = float(t[0]), float(t[-1])
    ymin = float(y.min())
    ymax = float(y.max())
    if ymax <= ymin:
        ymax = ymin + 1.0
    pad = 0.05 * (ymax - ymin)
    ymin -= pad
    ymax += pad
    tspan = tmax - tmin if tmax > tmin else 1.0

    def sx(tv: float) -> float:
        return ml + (tv - tmin) / tspan * (w - ml - mr)

    def sy(v: float) -> float:
        return mt + (ymax - v) / (ymax - ymin) * (h - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="{ml}" y="{mt}" width="{w - ml - mr}" height="{h - mt - mb}" '
        'fill="none" stroke="#444" stroke-width="1"/>',
    ]
    # thin the polyline to at most ~2000 points per series
    stride = max(1, len(t) // 2000)
    idx = list(range(0, len(t), stride))
    if idx[-1] != len(t) - 1:
        idx.append(len(t) - 1)
    for col, (color, name) in enumerate(zip(_SVG_COLORS, _SVG_NAMES)):
        pts = " ".join(f"{sx(float(t[i])):.2f},{sy(float(y[i, col])):.2f}"
                       for i in idx)
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{color}" stroke-width="1.2"/>')
        parts.append(f'<text x="{ml + 10 + 110 * col}" y="{mt - 8}" '
                     f'fill="{color}" font-size="13">{name}</text>')
    parts.append(f'<text x="{ml}" y="{h - 12}" font-size="12" fill="#333">'
                 f't in [{_fmt(tmin)}, {_fmt(tmax)}]</text>')
    parts.append(f'<text x="{w - mr - 260}" y="{h - 12}" font-size="12" '
                 f'fill="#333">values in [{_fmt(ymin)}, {_fmt(ymax)}]</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def _sim_config(cfg: RunConfig) -> SimConfig:
    a = cfg.analysis
    dt = a.dt
    if dt is None:
        dt = a.tau / 64.0 if a.tau > 0 else 0.01
    return SimConfig(tau=a.tau, dt=dt, t_end=a.t_end,
                     initial=State(*a.initial))


def cmd_simulate(cfg: RunConfig) -> int:
    p = cfg.model
    sim = _sim_config(cfg)
    traj = simulate(p, sim)
    rows = [(traj.times[i], traj.states[i, 0], traj.states[i, 1],
             traj.states[i, 2]) for i in range(len(traj.times))]
    path = _write_csv(cfg, "trajectory.csv", "t,omega,lambda,b", rows)
    print(f"wrote {path} ({len(rows)} rows)")
    if cfg.output.svg and len(traj.times) >= 2:
        svg_path = Path(cfg.output.dir) / "trajectory.svg"
        write_svg(svg_path, traj)
        print(f"wrote {svg_path}")
    if not traj.complete:
        kind, t_halt = traj.events[0]
        print(f"integration halted at t={_fmt(t_halt)}: {kind}",
              file=sys.stderr)
        return 5
    final = traj.final_state()
    print(f"final state: omega={_fmt(final.omega)} lambda={_fmt(final.lam)} "
          f"b={_fmt(final.b)}")
    try:
        eqs = _interior(p)
    except NoRootError:
        eqs = []
    if eqs:
        x0 = np.array(cfg.analysis.initial)
        ref = min(eqs, key=lambda e: float(np.sum((np.array(
            [e.omega_star, e.lambda_star, e.b_star]) - x0) ** 2)))
        met = oscillation_metrics(traj, ref)
        for i, amp in enumerate(met.window_amplitudes):
            print(f"window {i + 1} amplitude: {_fmt(amp)}")
        if met.insufficient:
            print("period estimate: too few oscillations")
        else:
            print(f"period estimate: {_fmt(met.period)} "
                  f"({met.crossings} upward crossings)")
    return 0


def cmd_scan(cfg: RunConfig, tau_min: float, tau_max: float, steps: int) -> int:
    p = cfg.model
    eq = _select(p, 1)
    K = k_constants(p, eq)
    rh = routh_hurwitz(K)
    if not rh.satisfied:
        print("zero-delay stability fails; scan is void", file=sys.stderr)
        return 4
    if steps < 2 or tau_max <= tau_min or tau_min < 0:
        print("scan range must satisfy 0 <= tau-min < tau-max, steps >= 2",
              file=sys.stderr)
        return 2
    nw = cfg.analysis.newton
    region = (nw.re_min, nw.re_max, nw.im_min, nw.im_max)
    grid = (nw.nx, nw.ny)
    rows = []
    for i in range(steps):
        tau = tau_min + (tau_max - tau_min) * i / (steps - 1)
        found = ds.rightmost_roots(K, tau, region=region, grid=grid,
                                   tol_root=cfg.analysis.tol_root)
        if not found:
            print(f"no roots located at tau={_fmt(tau)}", file=sys.stderr)
            return 4
        top = found[0]
        rows.append((tau, top.real, top.imag))
    path = _write_csv(cfg, "scan.csv", "tau,max_re,im_at_max", rows)
    crossings = sum(1 for a, b in zip(rows, rows[1:])
                    if a[1] < 0.0 <= b[1] or b[1] < 0.0 <= a[1])
    print(f"wrote {path} ({steps} points, {crossings} sign changes of max_re)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="keen-delay",
        description="Delay-dependent stability analysis and simulation of a "
                    "three-variable debt-wage-employment model.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--set", action="append", default=[], metavar="K=V",
                        help="dotted-path override, value is a JSON literal")
        sp.add_argument("--out", default=None, help="output directory override")

    def with_eq(sp):
        common(sp)
        sp.add_argument("--eq", type=int, default=1,
                        help="1-based interior equilibrium index, ordered by "
                             "descending wage share (default 1)")

    common(sub.add_parser("equilibria", help="list every equilibrium"))
    with_eq(sub.add_parser("stability", help="zero-delay stability report"))
    with_eq(sub.add_parser("critical-delay", help="delay thresholds"))
    with_eq(sub.add_parser("normal-form", help="crossing classification"))
    common(sub.add_parser("simulate", help="integrate the delayed system"))
    scan = sub.add_parser("scan", help="rightmost root across a delay range")
    common(scan)
    scan.add_argument("--tau-min", type=float, default=0.0)
    scan.add_argument("--tau-max", type=float, default=1.2)
    scan.add_argument("--steps", type=int, default=121)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "equilibria":
            return cmd_equilibria(cfg)
        if args.command == "stability":
            return cmd_stability(cfg, args.eq)
        if args.command == "critical-delay":
            return cmd_critical_delay(cfg, args.eq)
        if args.command == "normal-form":
            return cmd_normal_form(cfg, args.eq)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "scan":
            return cmd_scan(cfg, args.tau_min, args.tau_max, args.steps)
    except SimConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NoRootError, IndexError) as exc:
        print(f"equilibrium error: {exc}", file=sys.stderr)
        return 3
    except (ds.HypothesisError, ds.DegenerateError, nf.DegenerateError,
            nf.SingularSystemError, nf.SingularDenominatorError) as exc:
        print(f"analysis degenerate: {exc}", file=sys.stderr)
        return 4
    raise AssertionError(f"unhandled command {args.command}")


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
