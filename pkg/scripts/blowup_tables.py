"""Blow-up time tables for the 2-D density wave.

    python scripts/blowup_tables.py --cells 4 --degrees 3,4,5 --t-final 20
    python scripts/blowup_tables.py --cells 4 --degrees 5 --amplitude 1e-3

Prints one row per degree and one column per flux ("none" = no blow-up by
``--t-final``).  Set SPLITDG_WORKERS to spread runs over processes.
"""

import argparse
import os
import time
from concurrent.futures import ProcessPoolExecutor

from splitdg import Case, CaseSpec, FluxScheme, SolverConfig, run_simulation
from splitdg.fluxes import TABLE_ORDER


def blowup(job):
    degree, flux, cells, amplitude, t_final, cfl = job
    cfg = SolverConfig(CaseSpec(Case.DENSITY_WAVE_2D, amplitude=amplitude), degree=degree, scheme=FluxScheme(flux),
                       cells=(cells, cells), cfl=cfl, t_final=t_final, diagnostic_interval=t_final)
    return run_simulation(cfg).blowup_time


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--cells", type=int, default=4)
    p.add_argument("--degrees", default="3,4,5")
    p.add_argument("--amplitude", type=float, default=0.0)
    p.add_argument("--t-final", type=float, default=20.0)
    p.add_argument("--cfl", type=float, default=0.2)
    args = p.parse_args()

    degrees = [int(d) for d in args.degrees.split(",")]
    jobs = [(N, f, args.cells, args.amplitude, args.t_final, args.cfl) for N in degrees for f in TABLE_ORDER]
    start = time.perf_counter()
    workers = int(os.environ.get("SPLITDG_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            times = list(pool.map(blowup, jobs))
    else:
        times = [blowup(j) for j in jobs]

    print("N," + ",".join(f.label for f in TABLE_ORDER))
    k = 0
    for N in degrees:
        row = times[k : k + len(TABLE_ORDER)]
        k += len(TABLE_ORDER)
        print(f"{N}," + ",".join("none" if t is None else f"{t:.3f}" for t in row))
    print(f"# {args.cells}x{args.cells} cells, A={args.amplitude:g}, T={args.t_final:g}, "
          f"{time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main()
