"""Kinetic energy and entropy histories for the isentropic vortex or inviscid TGV.

    python scripts/energy_histories.py vortex --cells 16 --out out/vortex
    python scripts/energy_histories.py tgv --cells 8 --t-final 10 --plot

Writes ``<out>_<flux>.csv`` with columns t, ke, en (relative changes) for the
four split forms, and with --plot a two-panel PNG next to them.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from splitdg import Case, CaseSpec, Flux, FluxScheme, SolverConfig, run_simulation

SPLIT_FORMS = [Flux.KG, Flux.MKEP, Flux.DUCROS, Flux.KEEP_PE]


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("case", choices=["vortex", "tgv"])
    p.add_argument("--cells", type=int, default=None)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--fluxes", default=",".join(f.label for f in SPLIT_FORMS))
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true")
    args = p.parse_args()

    if args.case == "vortex":
        case, cells, T = Case.ISENTROPIC_VORTEX, args.cells or 16, args.t_final or 20.0 * math.sqrt(2.0) / 0.5
    else:
        case, cells, T = Case.INVISCID_TGV, args.cells or 8, args.t_final or 10.0
    out = Path(args.out or f"out/{args.case}")
    out.parent.mkdir(parents=True, exist_ok=True)

    series = {}
    for flux in (Flux.parse(f) for f in args.fluxes.split(",")):
        cfg = SolverConfig(CaseSpec(case), degree=args.degree, scheme=FluxScheme(flux),
                           cells=(cells,) * case.dim, t_final=T, diagnostic_interval=T / args.samples)
        res = run_simulation(cfg)
        ke, en = res.normalized()
        series[flux] = (res.times, ke, en)
        np.savetxt(f"{out}_{flux.label}.csv", np.column_stack(series[flux]), delimiter=",",
                   header="t,ke,en", comments="", fmt="%.10e")
        status = "no blow-up" if res.blowup_time is None else f"blow-up at t={res.blowup_time:.4g}"
        print(f"{flux.label:8s} ke(T)={ke[-1]: .3e}  en(T)={en[-1]: .3e}  {status}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
        for flux, (t, ke, en) in series.items():
            a.plot(t, ke, label=flux.label)
            b.plot(t, en, label=flux.label)
        a.set(xlabel="t", ylabel="ke")
        b.set(xlabel="t", ylabel="en")
        a.legend()
        fig.tight_layout()
        fig.savefig(f"{out}.png", dpi=120)


if __name__ == "__main__":
    main()
