"""Spectral abscissa and reduced-energy rate of the linearized density-wave schemes.

    python scripts/linear_spectra.py --elements 4 --degrees 1,2,3,4

KG has no linearized form here, so its Jacobian is probed through the
nonlinear DG operator by central differences.
"""

import argparse

import numpy as np

from splitdg import Flux, make_sbp_operator
from splitdg.linearized import DensityWaveBase, PerturbationState, assemble_jacobian, reduced_energy_rate, spectral_abscissa


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--elements", type=int, default=4)
    p.add_argument("--degrees", default="2,3,4")
    p.add_argument("--amplitude", type=float, default=0.98)
    p.add_argument("--velocity", type=float, default=0.1)
    p.add_argument("--pressure", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    print("N,flux,spectral_abscissa,energy_rate")
    for N in (int(d) for d in args.degrees.split(",")):
        base = DensityWaveBase.dg(lambda x: 1.0 + args.amplitude * np.sin(2 * np.pi * x), args.elements,
                                  make_sbp_operator(N), args.velocity, args.pressure)
        pert = PerturbationState(*rng.standard_normal((3,) + base.shape))
        for flux in Flux:
            if flux == Flux.KG:
                J = assemble_jacobian(flux, base, method="nonlinear")
                rate = "n/a"
            else:
                J = assemble_jacobian(flux, base)
                rate = f"{reduced_energy_rate(flux, base, pert):.3e}"
            print(f"{N},{flux.label},{spectral_abscissa(J):.6e},{rate}")


if __name__ == "__main__":
    main()
