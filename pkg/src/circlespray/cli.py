"""Command line entry point: ``circlespray simulate | verify | converge``.

Exit codes: 0 success, 1 usage or configuration error, 2 breakdown
detected, 3 identity-suite failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .harness.config import ConfigError, load_config
from .harness.convergence import run_convergence_study
from .harness.identities import run_identity_suite
from .harness.scenario import (
    EXIT_BREAKDOWN,
    EXIT_CONFIG,
    EXIT_IDENTITY_FAILURE,
    EXIT_OK,
    run_scenario,
    write_json,
)

log = logging.getLogger("circlespray")


def _parse_dts(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError("--dts", f"cannot parse {text!r}") from None


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.set)
    result = run_scenario(cfg)
    s = result.summary
    for name, d in s["drifts"].items():
        print(
            f"{name}: energy drift {d['energy_drift']:.3e}, "
            f"momentum-mean drift {d['momentum_mean_drift']:.3e}, "
            f"max spectral tail {d['max_spectral_tail']:.3e}"
        )
    if s["equivalence_gap"] is not None:
        print(f"equivalence gap {s['equivalence_gap']:.3e}")
    if s["breakdown"]:
        print(f"breakdown: {s['breakdown_message']}")
    print(f"wrote {Path(cfg.output_dir) / 'summary.json'}")
    return result.exit_code


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise ConfigError("--trials", "must be >= 1")
    try:
        report = run_identity_suite(
            n=args.n,
            operator=args.operator,
            trials=args.trials,
            seed=args.seed,
            corrupt=args.corrupt_symbol,
        )
    except ValueError as exc:
        raise ConfigError("--operator", str(exc)) from None
    for line in report.lines():
        print(line)
    print("identity suite:", "PASS" if report.ok else "FAIL")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_json({"residuals": report.to_dict()}, args.out)
    return EXIT_OK if report.ok else EXIT_IDENTITY_FAILURE


def cmd_converge(args) -> int:
    cfg = load_config(args.config, args.set)
    tables = run_convergence_study(cfg, _parse_dts(args.dts))
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, table in tables.items():
        table.write_csv(out / f"convergence_{name}.csv")
        fitted = "n/a" if table.fitted_order is None else f"{table.fitted_order:.3f}"
        print(f"{name}: reference dt {table.reference_dt:g}, fitted order {fitted}")
        for dt, err, order in table.rows():
            shown = "n/a" if order is None else f"{order:.3f}"
            print(f"  dt={dt:<10g} error={err:.3e} order={shown}")
    write_json({"config": cfg.echo(), "convergence": {k: t.to_dict() for k, t in tables.items()}},
               out / "convergence.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circlespray", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a scenario and write CSV/JSON output")
    sim.add_argument("--config", required=True, help="flat key = value scenario file")
    sim.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run the randomised identity suite")
    ver.add_argument("--n", type=int, default=128)
    ver.add_argument("--operator", default="helmholtz", help="helmholtz | sobolev:S | custom:a0,a1,...")
    ver.add_argument("--trials", type=int, default=50)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", help="write the report as JSON")
    ver.add_argument("--corrupt-symbol", action="store_true", help=argparse.SUPPRESS)
    ver.set_defaults(func=cmd_verify)

    con = sub.add_parser("converge", help="temporal self-convergence study")
    con.add_argument("--config", required=True)
    con.add_argument("--dts", required=True, help="comma separated, decreasing; last is the reference")
    con.add_argument("--set", action="append", metavar="KEY=VALUE")
    con.set_defaults(func=cmd_converge)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print(f"breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
