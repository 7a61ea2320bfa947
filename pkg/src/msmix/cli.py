"""The msmix command line.

Subcommands:

* ``msmix run --config scenario.ini [--set section.key=value]...`` runs a
  simulation and writes the state history as CSV;
* ``msmix verify --suite NAME --seed S --samples N --report PATH`` runs the
  randomized verification harness and writes its report as CSV;
* ``msmix chart --config scenario.ini (--state r1,...,rN | --point
  s,w1,...,wN)`` prints the change of variables at one state.

Exit codes: 0 success, 1 verification failure, 2 energy-audit failure,
3 configuration or input error.
"""

import argparse
import sys

import numpy as np

from . import chart, config, sim1d, thermo, verify
from .errors import AuditFailure, ConfigError, MsmixError


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def cmd_run(args) -> int:
    try:
        scenario = config.parse_file(args.config, overrides=args.set or ())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3

    cfg = scenario.cfg
    rows = []

    def sink(snap):
        ledger = snap["ledger"]
        for i, xi in enumerate(snap["x"]):
            cells = [snap["t"], xi, *snap["rho"][i], snap["v"][i], snap["p"][i], *snap["w"][i],
                     ledger["free_energy"], ledger["kinetic"],
                     ledger["dissipation_diffusive"], ledger["dissipation_viscous"]]
            rows.append(",".join(_fmt(c) for c in cells))

    try:
        sim1d.run(cfg, list(scenario.rho_profiles), scenario.v_profile, sink=sink)
    except AuditFailure as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return 2
    except MsmixError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 2

    n_sp = cfg.species.n_species
    header = ("t,x," + ",".join(f"rho_{i+1}" for i in range(n_sp)) + ",v,p,"
              + ",".join(f"w_{i+1}" for i in range(n_sp))
              + ",free_energy,kinetic,diss_diffusive,diss_viscous")
    text = header + "\n" + "\n".join(rows) + "\n"
    if scenario.csv_path:
        with open(scenario.csv_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    try:
        results = verify.run_suite(args.suite, args.seed, args.samples,
                                   friction_constant=args.friction == "constant")
    except MsmixError as exc:
        print(f"verification run failed: {exc}", file=sys.stderr)
        return 1
    text = verify.report_csv(results, args.suite, args.seed, args.samples)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"FAIL {r.suite}/{r.name}: worst residual {r.worst:.3e}", file=sys.stderr)
    return 1 if failed else 0


def cmd_chart(args) -> int:
    try:
        scenario = config.parse_file(args.config, overrides=args.set or ())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    sp = scenario.cfg.species

    try:
        if args.state:
            rho = np.array([float(t) for t in args.state.split(",")])
            if rho.size != sp.n_species or np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
                raise ValueError("state must list one positive density per species")
            s, w = chart.inverse_chart(sp, rho)
            print(f"p = {_fmt(s)}")
            print("w = " + ", ".join(_fmt(v) for v in w))
            f, f_up, f_lo = chart.quotients(sp, s, w)
            print("F = " + ", ".join(_fmt(v) for v in f))
            print("F_upper = " + ", ".join(_fmt(v) for v in f_up))
            print("F_lower = " + ", ".join(_fmt(v) for v in f_lo))
        else:
            vals = [float(t) for t in args.point.split(",")]
            if len(vals) != sp.n_species + 1:
                raise ValueError("point must be s followed by one w entry per species")
            s, w = vals[0], np.array(vals[1:])
            x = chart.forward_chart(sp, s, w)
            print("X = " + ", ".join(_fmt(v) for v in x))
            f, f_up, f_lo = chart.quotients(sp, s, w)
            print("F = " + ", ".join(_fmt(v) for v in f))
            print("F_upper = " + ", ".join(_fmt(v) for v in f_up))
            print("F_lower = " + ", ".join(_fmt(v) for v in f_lo))
            print(f"p_check = {_fmt(thermo.pressure(sp, x))}")
    except (ValueError, MsmixError) as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msmix")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario simulation")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify", help="run the verification harness")
    p_ver.add_argument("--suite", required=True, choices=verify.SUITES)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--samples", type=int, default=1000)
    p_ver.add_argument("--report", default="")
    p_ver.add_argument("--friction", choices=["model", "constant"], default="model")
    p_ver.set_defaults(func=cmd_verify)

    p_chart = sub.add_parser("chart", help="print the change of variables at a state")
    p_chart.add_argument("--config", required=True)
    p_chart.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    group = p_chart.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", help="comma-separated densities r1,...,rN")
    group.add_argument("--point", help="comma-separated s,w1,...,wN")
    p_chart.set_defaults(func=cmd_chart)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
