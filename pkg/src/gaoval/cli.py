"""Command-line front end.

Subcommands: ``fit`` (Gompertz parameters from a table), ``rh``
(implicit guaranteed rates), ``value`` (full valuation report),
``sweep`` (price surface over r and h), ``scenarios`` (value functions
and death densities under two mortality models), ``verify`` (Monte
Carlo and PDE-residual checks of the closed forms).

Outputs are pure functions of config file, bundled data and seed;
re-runs are byte-identical.  Text views round currency to whole units;
CSV files carry full precision.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import __version__
from .annuity import annuity_factor, implicit_rate
from .config import ScenarioConfig
from .errors import GaovalError, NoSolutionError
from .mortality import fit_gompertz, load_table, resolve_model, write_model_file
from .simulate import BACKEND, run_verification
from .valuation import (
    build_report,
    indifference_price,
    merton_constants,
    phi,
    value_calU,
    value_calV,
)

_NUM_FMT = ".12g"


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, _NUM_FMT)
    return str(x)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _money(x: float) -> str:
    return f"{x:,.0f}"


def _grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1 or hi < lo:
        raise GaovalError("grid needs steps >= 1 and max >= min")
    return np.linspace(lo, hi, steps)


def _fraction(text: str) -> float:
    if "/" in text:
        num, _, den = text.partition("/")
        return float(num) / float(den)
    return float(text)


def cmd_fit(args) -> int:
    table = load_table(args.table, base_age=args.base_age)
    params = fit_gompertz(table)
    print(f"fitted Gompertz parameters (base age {table.base_age}):")
    print(f"  m        = {params.m:.6f}")
    print(f"  varsigma = {params.varsigma:.6f}")
    out = f"{args.out}.model"
    write_model_file(out, params, label=f"fit:{args.table}")
    print(f"wrote {out}")
    return 0


def cmd_rh(args) -> int:
    model = resolve_model(args.model)
    if args.h:
        hs = [_fraction(h) for h in args.h]
    else:
        hs = list(_grid(_fraction(args.h_min), _fraction(args.h_max), args.h_steps))
    rows = []
    for h in hs:
        try:
            r_h = implicit_rate(model, args.age, h)
            rows.append((h, r_h, "ok"))
        except NoSolutionError:
            rows.append((h, "", "unattainable"))
    out = f"{args.out}_rh.csv"
    _write_csv(out, ["h", "r_h", "status"], rows)
    print(f"implicit rates for {model.label}, age {args.age:g}:")
    for h, r_h, status in rows:
        shown = f"{r_h:.6f}" if status == "ok" else status
        print(f"  h = {h:.6f}  ->  r_h = {shown}")
    print(f"wrote {out}")
    return 0


def cmd_value(args) -> int:
    cfg = ScenarioConfig.load(args.config, args.set, seed=args.seed)
    report = build_report(
        cfg.policy, cfg.market, cfg.preference, cfg.subjective, cfg.objective,
        x0=cfg.x0, l12_mode=args.l12_mode,
    )
    print(f"fund A                 = {_money(report.A)}")
    print(f"premium P              = {_money(report.P)} /year")
    print(f"guaranteed income H    = {_money(report.H)} /year")
    print(f"implicit rate r_h      = {report.r_h:.6f}")
    print(f"delta                  = {report.delta:.6f}")
    print(f"b                      = {report.b:.6f}")
    print(f"phi(t0)                = {report.phi_t0:.6f}")
    print(f"phi(T)                 = {report.phi_T:.6f}")
    print(f"indifference value L*  = {_money(report.L_star)}")
    print(f"exercise at maturity   = {'yes' if report.exercise else 'no'}"
          + ("  (worthless guarantee)" if report.worthless else ""))
    print(f"monthly premium p12    = {_money(report.p12)}")
    print(f"monthly equivalent l12 = {_money(report.l12)}  [{args.l12_mode} mode]")
    print(f"monthly total          = {_money(report.total_monthly)}")
    out = f"{args.out}_value.csv"
    _write_csv(
        out,
        ["A", "P", "H", "r_h", "delta", "b", "phi_t0", "phi_T", "x0",
         "calU", "calV", "L_star", "exercise", "p12", "l12", "total"],
        [(report.A, report.P, report.H, report.r_h, report.delta, report.b,
          report.phi_t0, report.phi_T, report.x0, report.calU, report.calV,
          report.L_star, report.exercise, report.p12, report.l12,
          report.total_monthly)],
    )
    print(f"wrote {out}")
    return 0


def cmd_sweep(args) -> int:
    cfg = ScenarioConfig.load(args.config, args.set, seed=args.seed)
    rs = _grid(_fraction(args.r_min), _fraction(args.r_max), args.r_steps)
    hs = _grid(_fraction(args.h_min), _fraction(args.h_max), args.h_steps)
    if rs[0] <= 0 or hs[0] <= 0:
        raise GaovalError("sweep ranges must be positive")
    _, A = cfg.policy.resolve(cfg.market.r)
    rows = []
    for r in rs:
        for h in hs:
            rows.append((r, h, indifference_price(A, h, r, cfg.policy.T,
                                                  cfg.policy.t0)))
    out = f"{args.out}_sweep.csv"
    _write_csv(out, ["r", "h", "L_star"], rows)
    print(f"wrote {out} ({len(rows)} cells)")
    return 0


def cmd_scenarios(args) -> int:
    cfg = ScenarioConfig.load(args.config, args.set, seed=args.seed)
    model_a = resolve_model(args.model_a)
    model_b = resolve_model(args.model_b)
    market, pref, policy = cfg.market, cfg.preference, cfg.policy
    _, A = policy.resolve(market.r)
    L_star = indifference_price(A, policy.h, market.r, policy.T, policy.t0)
    x_lo = L_star + 1.0
    x_hi = 10.0 * A
    xs = np.linspace(x_lo, x_hi, args.points)
    rows = []
    for x0 in xs:
        rows.append((
            x0,
            value_calU(x0, policy.t0, policy, market, pref, model_a),
            value_calV(x0, 0.0, policy.t0, policy, market, pref, model_a),
            value_calU(x0, policy.t0, policy, market, pref, model_b),
            value_calV(x0, 0.0, policy.t0, policy, market, pref, model_b),
        ))
    values_csv = f"{args.out}_scenarios_values.csv"
    _write_csv(values_csv, ["x0", "calU_a", "calV_a", "calU_b", "calV_b"], rows)

    t_max = min(90.0, model_a.max_age - policy.chi, model_b.max_age - policy.chi)
    ts = np.linspace(0.0, t_max, args.points)
    dens = [
        (t, policy.chi + t,
         float(model_a.death_density(policy.chi, t)),
         float(model_b.death_density(policy.chi, t)))
        for t in ts
    ]
    density_csv = f"{args.out}_scenarios_density.csv"
    _write_csv(density_csv, ["t", "age", "density_a", "density_b"], dens)

    print(f"model A = {model_a.label}, model B = {model_b.label}")
    print(f"L* (identical under both models) = {_money(L_star)}")
    print(f"wrote {values_csv}")
    print(f"wrote {density_csv}")
    return 0


def cmd_verify(args) -> int:
    cfg = ScenarioConfig.load(args.config, args.set, seed=args.seed)
    # Validate the full pipeline (including well-posedness) up front.
    merton_constants(cfg.market, cfg.preference)
    _, A = cfg.policy.resolve(cfg.market.r)
    sim = cfg.sim
    if args.paths:
        from dataclasses import replace

        sim = replace(sim, paths=args.paths)
    age_T = cfg.policy.chi + (cfg.policy.T - cfg.policy.t0)
    report = run_verification(
        cfg.subjective, age_T, cfg.market, cfg.preference, A, cfg.policy.h,
        sim, phi_scale=1.0 + args.perturb_phi,
    )
    print(f"backend: {report.backend}; paths = {sim.paths}, dt = {sim.dt:g}, "
          f"horizon = {sim.horizon:g}, seed = {sim.seed}")
    rows = []
    for c in report.mc_checks:
        print(f"{c.name}: estimate = {c.estimate:.8g} +/- {c.stderr:.3g}, "
              f"closed form = {c.reference:.8g}, z = {c.z_score:+.2f}, "
              f"ruined = {c.ruined}, tail <= {c.tail_bound:.3g}")
        rows.append((c.name, c.estimate, c.stderr, c.reference, c.z_score,
                     c.ruined, c.tail_bound))
    for c in report.residual_checks:
        print(f"{c.name}: max relative residual = {c.residual:.3e}")
        rows.append((c.name, "", "", "", "", "", c.residual))
    out = f"{args.out}_verify.csv"
    _write_csv(
        out,
        ["check", "estimate", "stderr", "closed_form", "z", "ruined",
         "residual_or_tail"],
        rows,
    )
    print(f"wrote {out}")
    ok = report.passed(z_limit=4.0, residual_limit=1e-4)
    print("verification " + ("PASSED" if ok else "FAILED"))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaoval",
        description="Indifference valuation of guaranteed annuity conversion options.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="scenario config file")
    common.add_argument("--out", default="gaoval", help="output file prefix")
    common.add_argument("--seed", type=int, default=None, help="override sim.seed")
    common.add_argument(
        "--l12-mode", choices=("table", "text"), default="table",
        help="convention for the monthly equivalent of L*",
    )
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a config entry (repeatable)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common],
                       help="fit Gompertz parameters to an age,lx table")
    p.add_argument("table", help="CSV file with header age,lx")
    p.add_argument("--base-age", type=int, default=35)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rh", parents=[common],
                       help="implicit guaranteed rates over a grid of h")
    p.add_argument("--model", default="ON-female-1970")
    p.add_argument("--age", type=float, default=65.0)
    p.add_argument("--h", action="append", default=[],
                   help="single conversion rate (repeatable; accepts a/b)")
    p.add_argument("--h-min", default="1/15")
    p.add_argument("--h-max", default="1/6")
    p.add_argument("--h-steps", type=int, default=19)
    p.set_defaults(func=cmd_rh)

    p = sub.add_parser("value", parents=[common], help="full valuation report")
    p.set_defaults(func=cmd_value)

    p = sub.add_parser("sweep", parents=[common],
                       help="indifference value over an (r, h) grid")
    p.add_argument("--r-min", default="0.02")
    p.add_argument("--r-max", default="0.12")
    p.add_argument("--r-steps", type=int, default=21)
    p.add_argument("--h-min", default="1/15")
    p.add_argument("--h-max", default="1/6")
    p.add_argument("--h-steps", type=int, default=21)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scenarios", parents=[common],
                       help="value functions and death densities for two models")
    p.add_argument("--model-a", default="ON-female-1970")
    p.add_argument("--model-b", default="ON-female-2004")
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_scenarios)

    p = sub.add_parser("verify", parents=[common],
                       help="Monte Carlo and PDE-residual verification")
    p.add_argument("--paths", type=int, default=None,
                   help="override sim.paths for this run")
    p.add_argument("--perturb-phi", type=float, default=0.0,
                   help="relative phi perturbation (negative control)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GaovalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
