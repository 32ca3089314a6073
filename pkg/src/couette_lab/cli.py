"""Command-line entry point.

Subcommands: simulate, linear-decay, threshold, inviscid, verify.
Config files are flat ``key = value`` text; individual keys can be
overridden with repeated ``--set key=value``.

Environment overrides:
  COUETTE_LAB_OUTDIR   default output directory (flag --outdir wins)
  COUETTE_LAB_WORKERS  worker-pool size for sweep points (default 1)

Exit codes: 0 = PASS, 2 = any FAIL, 3 = resolution-guard flags only.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict

from couette_lab.grid import l2_norm
from couette_lab import lab
from couette_lab.lab import (SimConfig, CONFIG_KEYS, parse_config,
                             RunManifest, SUITE_IDS)

EXIT_PASS = 0
EXIT_FAIL = 2
EXIT_FLAGGED = 3


def _load_config(args) -> SimConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = SimConfig()
    if args.set:
        d = asdict(cfg)
        for item in args.set:
            if "=" not in item:
                raise SystemExit(f"--set expects key=value, got {item!r}")
            key, val = (s.strip() for s in item.split("=", 1))
            if key not in CONFIG_KEYS:
                raise SystemExit(f"unknown config key {key!r}")
            d[key] = CONFIG_KEYS[key](val)
        cfg = SimConfig(**d)
    return cfg


def _outdir(args) -> str:
    return (args.outdir or os.environ.get("COUETTE_LAB_OUTDIR") or "runs")


def _finish(man: RunManifest, args, default_name: str) -> int:
    outdir = _outdir(args)
    path = man.save(outdir, args.name or default_name)
    status = "PASS" if man.passed else "FAIL"
    print(f"{status}: manifest written to {path}")
    for flag in man.flags:
        print(f"  flag: {flag}")
    if not man.passed:
        return EXIT_FAIL
    if any("resolution" in f for f in man.flags):
        return EXIT_FLAGGED
    return EXIT_PASS


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    res = lab.run_simulate(cfg)
    man = lab.RunManifest(kind="simulate", config=asdict(cfg))
    man.time = res["time"]
    man.series = {"l2_omega": res["l2_omega"],
                  "w_l2_omega": res["w_l2_omega"]}
    man.extra["status"] = res["status"]
    man.extra["dt_halvings"] = res["halvings"]
    if res["norm0"] > 0:
        man.extra["sup_growth"] = max(res["l2_omega"]) / res["norm0"]
    man.passed = res["status"] == "ok"
    grid = res["grid"]
    man.resolution = {"k_min": grid.k_min, "k_max": grid.k_max,
                      "guard_k_min_le_nu": bool(grid.k_min <= cfg.nu)}
    if grid.k_min > cfg.nu:
        man.flags.append("resolution: k_min > nu")
    return _finish(man, args, "simulate")


def cmd_linear_decay(args) -> int:
    cfg = _load_config(args)
    man = lab.run_linear_decay(cfg)
    return _finish(man, args, "linear-decay")


def cmd_threshold(args) -> int:
    cfg = _load_config(args)
    nu_list = [float(x) for x in args.nu.split(",")] if args.nu else None
    man = lab.run_threshold_sweep(cfg, nu_list=nu_list)
    return _finish(man, args, "threshold")


def cmd_inviscid(args) -> int:
    cfg = _load_config(args)
    man = lab.run_inviscid_damping(cfg)
    return _finish(man, args, "inviscid")


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    suite = args.suite.split(",") if args.suite else None
    man = lab.verify_inequality_suite(cfg, suite=suite)
    for name, verdict in man.extra["verdicts"].items():
        tag = "PASS" if verdict["pass"] else "FAIL"
        print(f"  {tag} {name}: measured {verdict['measured']:.6g} "
              f"(bound {verdict['bound']:.6g})")
    return _finish(man, args, "verify")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="couette-lab",
        description="Pseudo-spectral channel shear-flow verification lab")
    parser.add_argument("--outdir", help="output directory "
                        "(default $COUETTE_LAB_OUTDIR or ./runs)")
    parser.add_argument("--name", help="basename for manifest files")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a single config key")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", help="full nonlinear vorticity run")
    sub.add_parser("linear-decay", help="closed-form decay fits")
    p = sub.add_parser("threshold", help="amplitude bisection sweep")
    p.add_argument("--nu", help="comma-separated viscosities")
    sub.add_parser("inviscid", help="inviscid-damping integral")
    p = sub.add_parser("verify", help="inequality verification suite")
    p.add_argument("--suite", help="comma-separated suite ids "
                   f"(default all: {','.join(SUITE_IDS)})")

    args = parser.parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "linear-decay": cmd_linear_decay,
        "threshold": cmd_threshold,
        "inviscid": cmd_inviscid,
        "verify": cmd_verify,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
