"""Command-line entry point.

Subcommands::

    splitdg run CONFIG                      # exit 0 done, 2 blow-up, 1 error
    splitdg sweep CONFIG --axis degree --values 3,4,5
    splitdg analyze-linear --scheme mkep --elements 4 --degree 3 [--fd --cells 16]
    splitdg check-sbp --degree 6

``SPLITDG_WORKERS`` sets the number of worker processes used by ``sweep``.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .fluxes import TABLE_ORDER, Flux
from .solver import RunResult, run_simulation

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BLOWUP = 2

WORKERS_ENV = "SPLITDG_WORKERS"
CSV_HEADER = ("t", "ke", "en", "total_mass", "min_rho", "min_p")

logger = logging.getLogger("splitdg")


def fmt(x: float) -> str:
    return "%.17g" % x


def write_run_csv(result: RunResult, stream) -> None:
    try:
        ke, en = result.normalized()
    except ValueError:
        ke = en = np.full(len(result.times), np.nan)
    stream.write(",".join(CSV_HEADER) + "\n")
    for t, k, e, d in zip(result.times, ke, en, result.diagnostics):
        stream.write(",".join(fmt(v) for v in (t, k, e, d.mass, d.min_rho, d.min_p)) + "\n")
    if result.blowup_time is None:
        stream.write("# blowup_time=none\n")
    else:
        stream.write(f"# blowup_time={fmt(result.blowup_time)} reason={result.blowup_reason.value}\n")


# {{{ run


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = Path(args.output) if args.output else cfg.output_path
    result = run_simulation(cfg.solver)

    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w") as fh:
            write_run_csv(result, fh)
    if result.blowup_time is not None:
        print(f"blowup t={result.blowup_time:.4g} ({result.blowup_reason.value}) after {result.steps} steps")
        return EXIT_BLOWUP
    print(f"completed t={result.times[-1]:.6g} after {result.steps} steps")
    return EXIT_OK


# }}}


# {{{ sweep

SWEEP_AXES = ("flux", "degree", "cells", "amplitude")


def _sweep_cell(cfg: RunConfig) -> float | None:
    return run_simulation(cfg.solver).blowup_time


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_sweep(base: RunConfig, axis: str, values: list[str], fluxes: list[Flux]) -> list[tuple[str, list[float | None | str]]]:
    """Blow-up time table: one row per swept value, one column per flux."""
    if axis == "flux":
        fluxes = [Flux.parse(v) for v in values]
        rows = [base.source.get("degree", "")]
    else:
        rows = values
    jobs = []
    for row in rows:
        for flux in fluxes:
            entries = {"flux": flux.label}
            if axis != "flux":
                entries[axis] = row
            jobs.append(entries)

    results: list[float | None | str] = []
    configs = []
    for entries in jobs:
        try:
            configs.append(base.replace(**entries))
        except ConfigError as exc:
            configs.append(exc)

    runnable = [c for c in configs if isinstance(c, RunConfig)]
    if _workers() > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=_workers()) as pool:
            times = iter(list(pool.map(_sweep_cell, runnable)))
    else:
        times = (_sweep_cell(c) for c in runnable)
    for c in configs:
        results.append(next(times) if isinstance(c, RunConfig) else "error")

    table = []
    k = 0
    for row in rows:
        table.append((str(row), results[k : k + len(fluxes)]))
        k += len(fluxes)
    return table


def format_table(axis: str, fluxes: list[Flux], table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([axis if axis != "flux" else "degree"] + [f.label for f in fluxes])
    for row, cells in table:
        w.writerow([row] + ["none" if c is None else (c if isinstance(c, str) else fmt(c)) for c in cells])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    try:
        base = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    values = [v.strip() for v in (args.values or "").split(",") if v.strip()]
    if not values:
        print("sweep needs at least one value", file=sys.stderr)
        return EXIT_ERROR
    try:
        fluxes = [Flux.parse(f) for f in args.fluxes.split(",")] if args.fluxes else list(TABLE_ORDER)
        if args.axis == "flux":
            fluxes = [Flux.parse(v) for v in values]
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR

    table = run_sweep(base, args.axis, values, fluxes)
    text = format_table(args.axis, fluxes, table)
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# }}}


# {{{ linear analysis


def cmd_analyze_linear(args) -> int:
    from .linearized import (
        DensityWaveBase,
        PerturbationState,
        assemble_jacobian,
        fd_energy_rate,
        reduced_energy_rate,
        spectral_abscissa,
    )
    from .sbp import make_sbp_operator

    try:
        flux = Flux.parse(args.scheme)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR
    amp = args.amplitude

    def profile(x):
        return 1.0 + amp * np.sin(2.0 * np.pi * x)

    rng = np.random.default_rng(args.seed)
    V = args.velocity
    if args.fd and flux == Flux.KG:
        if V is not None and V != 0.0:
            print("KG finite-difference linearization requires --velocity 0", file=sys.stderr)
            return EXIT_ERROR
        V = 0.0
    V = 0.1 if V is None else V

    rows: list[tuple[str, str]] = []
    ok = True
    try:
        if args.fd:
            base = DensityWaveBase.fd(profile, args.cells, V, args.pressure)
        else:
            base = DensityWaveBase.dg(profile, args.elements, make_sbp_operator(args.degree), V, args.pressure)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR
    pert = PerturbationState(*rng.standard_normal((3,) + base.shape))
    conserving = flux in (Flux.MKEP, Flux.KEEP_PE)

    if args.fd:
        computed, closed = fd_energy_rate(flux, base, pert)
        rows += [("energy_rate_computed", fmt(computed)), ("energy_rate_closed_form", fmt(closed))]
        agree = abs(computed - closed) <= 1e-12 * max(1.0, abs(closed))
        rows.append(("closed_form_agrees", str(agree)))
        ok &= agree
        if conserving:
            ok &= abs(computed) <= 1e-11
        J = assemble_jacobian(flux, base)
    elif flux == Flux.KG:
        rows.append(("energy_rate", "n/a"))
        J = assemble_jacobian(flux, base, method="nonlinear")
    else:
        rate = reduced_energy_rate(flux, base, pert)
        rows.append(("energy_rate", fmt(rate)))
        if conserving:
            ok &= abs(rate) <= 1e-11
        J = assemble_jacobian(flux, base)

    rows.append(("spectral_abscissa", fmt(spectral_abscissa(J))))
    rows.append(("identities_pass", str(bool(ok))))

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["quantity", "value"])
    w.writerows(rows)
    return EXIT_OK if ok else EXIT_ERROR


# }}}


def cmd_check_sbp(args) -> int:
    from .sbp import make_sbp_operator, monomial_error, sbp_residual, symmetric_sum_residual

    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["degree", "sbp_residual", "symmetric_sum_residual", "monomial_error", "weight_sum_error"])
    ok = True
    degrees = range(1, args.degree + 1) if args.all else [args.degree]
    for N in degrees:
        try:
            op = make_sbp_operator(N)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_ERROR
        sym = 0.0
        for _ in range(100):
            a = rng.standard_normal((op.n, op.n))
            f = a + a.T
            sym = max(sym, symmetric_sum_residual(op, f))
        row = [sbp_residual(op), sym, monomial_error(op), abs(op.weights.sum() - 2.0)]
        ok &= max(row[:2]) <= 1e-12
        w.writerow([N] + [fmt(v) for v in row])
    return EXIT_OK if ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="splitdg", description="Split-form DG solver and linear stability lab")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one configuration")
    r.add_argument("config")
    r.add_argument("--output", help="CSV path (overrides output_path)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="blow-up time table over one parameter")
    s.add_argument("config")
    s.add_argument("--axis", choices=SWEEP_AXES, required=True)
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--fluxes", help="comma-separated fluxes (columns); default all five")
    s.add_argument("--output")
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("analyze-linear", help="linearized density-wave analysis")
    a.add_argument("--scheme", required=True)
    a.add_argument("--elements", type=int, default=4)
    a.add_argument("--degree", type=int, default=3)
    a.add_argument("--fd", action="store_true", help="finite-difference linearization")
    a.add_argument("--cells", type=int, default=16)
    a.add_argument("--velocity", type=float, default=None)
    a.add_argument("--pressure", type=float, default=20.0)
    a.add_argument("--amplitude", type=float, default=0.98, help="base density amplitude")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_analyze_linear)

    c = sub.add_parser("check-sbp", help="verify GLL summation-by-parts identities")
    c.add_argument("--degree", type=int, required=True)
    c.add_argument("--all", action="store_true", help="check every degree 1..N")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_check_sbp)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
