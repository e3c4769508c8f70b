"""Symmetric two-point volume fluxes and interface fluxes.

Each flux is written once, in the x-direction, as plain arithmetic on the ten
primitive components of the left and right state.  The same source is used
with numpy arrays (this module's public functions) and compiled with numba
for the DG volume kernel in :mod:`splitdg.solver`; y- and z-fluxes follow by
swapping the normal velocity into the first velocity slot.

Averages are ``{a} = (a_l + a_r) / 2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .euler import GAMMA, physical_flux, prim_to_cons, sound_speed


class Flux(enum.IntEnum):
    CENTRAL = 0
    KG = 1
    DUCROS = 2
    KEEP_PE = 3
    MKEP = 4

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name: str) -> "Flux":
        key = name.strip().lower().replace("-", "_")
        try:
            return _BY_NAME[key]
        except KeyError:
            raise ValueError(f"unknown flux {name!r}; expected one of {sorted(_BY_NAME)}") from None


_BY_NAME = {
    "central": Flux.CENTRAL,
    "kg": Flux.KG,
    "ducros": Flux.DUCROS,
    "keep_pe": Flux.KEEP_PE,
    "mkep": Flux.MKEP,
}
_LABELS = {v: k for k, v in _BY_NAME.items()}

# column order of the blow-up tables
TABLE_ORDER = (Flux.CENTRAL, Flux.DUCROS, Flux.KG, Flux.KEEP_PE, Flux.MKEP)


class SurfaceDissipation(enum.IntEnum):
    NONE = 0
    LAX_FRIEDRICHS = 1

    @classmethod
    def parse(cls, name: str) -> "SurfaceDissipation":
        key = name.strip().lower().replace("-", "_")
        if key == "none":
            return cls.NONE
        if key in ("lax_friedrichs", "lf", "llf"):
            return cls.LAX_FRIEDRICHS
        raise ValueError(f"unknown surface dissipation {name!r}; expected none|lax_friedrichs")


@dataclass(frozen=True)
class FluxScheme:
    flux: Flux = Flux.MKEP
    surface_dissipation: SurfaceDissipation = SurfaceDissipation.NONE

    @classmethod
    def parse(cls, flux: str, surface_dissipation: str = "none") -> "FluxScheme":
        return cls(Flux.parse(flux), SurfaceDissipation.parse(surface_dissipation))


# {{{ x-direction kernels
#
# Arguments are (rho, u, v, w, p) of the left state followed by the right
# state, then gamma.  The returned tuple is (mass, x-mom, y-mom, z-mom, energy).


def central_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g):
    El = pl / (g - 1.0) + 0.5 * rl * (ul * ul + vl * vl + wl * wl)
    Er = pr / (g - 1.0) + 0.5 * rr * (ur * ur + vr * vr + wr * wr)
    f0 = 0.5 * (rl * ul + rr * ur)
    f1 = 0.5 * (pl + rl * ul * ul + pr + rr * ur * ur)
    f2 = 0.5 * (rl * ul * vl + rr * ur * vr)
    f3 = 0.5 * (rl * ul * wl + rr * ur * wr)
    f4 = 0.5 * ((El + pl) * ul + (Er + pr) * ur)
    return f0, f1, f2, f3, f4


def kg_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g):
    rho = 0.5 * (rl + rr)
    u = 0.5 * (ul + ur)
    v = 0.5 * (vl + vr)
    w = 0.5 * (wl + wr)
    p = 0.5 * (pl + pr)
    el = pl / ((g - 1.0) * rl) + 0.5 * (ul * ul + vl * vl + wl * wl)
    er = pr / ((g - 1.0) * rr) + 0.5 * (ur * ur + vr * vr + wr * wr)
    mass = rho * u
    return mass, p + mass * u, mass * v, mass * w, p * u + mass * 0.5 * (el + er)


def ducros_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g):
    # each conserved quantity (and p in the energy row) is averaged, then carried by {u}
    u = 0.5 * (ul + ur)
    p = 0.5 * (pl + pr)
    El = pl / (g - 1.0) + 0.5 * rl * (ul * ul + vl * vl + wl * wl)
    Er = pr / (g - 1.0) + 0.5 * rr * (ur * ur + vr * vr + wr * wr)
    f0 = 0.5 * (rl + rr) * u
    m = 0.5 * (rl * ul + rr * ur)
    f1 = p + m * u
    f2 = 0.5 * (rl * vl + rr * vr) * u
    f3 = 0.5 * (rl * wl + rr * wr) * u
    f4 = (p + 0.5 * (El + Er)) * u
    return f0, f1, f2, f3, f4


def keep_pe_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g):
    rho = 0.5 * (rl + rr)
    u = 0.5 * (ul + ur)
    v = 0.5 * (vl + vr)
    w = 0.5 * (wl + wr)
    p = 0.5 * (pl + pr)
    mass = rho * u
    f4 = p * u / (g - 1.0) + 0.5 * mass * (ul * ur + vl * vr + wl * wr) + 0.5 * (pl * ur + pr * ul)
    return mass, p + mass * u, mass * v, mass * w, f4


def mkep_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g):
    rho = 0.5 * (rl + rr)
    u = 0.5 * (ul + ur)
    v = 0.5 * (vl + vr)
    w = 0.5 * (wl + wr)
    p = 0.5 * (pl + pr)
    k = 0.25 * (ul * ul + vl * vl + wl * wl + ur * ur + vr * vr + wr * wr)
    mass = rho * u
    return mass, p + mass * u, mass * v, mass * w, g / (g - 1.0) * p * u + mass * k


KERNELS_X = (central_x, kg_x, ducros_x, keep_pe_x, mkep_x)

# }}}


def _rotate(q: np.ndarray, axis: int) -> np.ndarray:
    """Swap the ``axis`` velocity into the x slot (an involution)."""
    if axis == 0:
        return q
    idx = [0, 1, 2, 3, 4]
    idx[1], idx[1 + axis] = idx[1 + axis], idx[1]
    return q[..., idx]


def two_point_flux(flux: Flux | FluxScheme | str, ql, qr, axis: int = 0, gamma: float = GAMMA) -> np.ndarray:
    """Symmetric volume flux ``F#(q_l, q_r)`` in direction ``axis``."""
    flux = _as_flux(flux)
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    ql = _rotate(np.asarray(ql, dtype=np.float64), axis)
    qr = _rotate(np.asarray(qr, dtype=np.float64), axis)
    ql, qr = np.broadcast_arrays(ql, qr)
    args = tuple(np.moveaxis(ql, -1, 0)) + tuple(np.moveaxis(qr, -1, 0))
    F = np.stack(KERNELS_X[flux](*args, gamma), axis=-1)
    return _rotate(F, axis)


def max_wave_speed(ql, qr, axis: int, gamma: float = GAMMA) -> np.ndarray:
    """Local Lax-Friedrichs speed ``max(|u_n| + c)`` over the two states."""
    ql = np.asarray(ql)
    qr = np.asarray(qr)
    sl = np.abs(ql[..., 1 + axis]) + sound_speed(ql, gamma)
    sr = np.abs(qr[..., 1 + axis]) + sound_speed(qr, gamma)
    return np.maximum(sl, sr)


def surface_flux(scheme: FluxScheme, ql, qr, axis: int = 0, gamma: float = GAMMA) -> np.ndarray:
    """Interface flux ``F*``: the volume flux, plus local LF dissipation if enabled."""
    F = two_point_flux(scheme.flux, ql, qr, axis, gamma)
    if scheme.surface_dissipation == SurfaceDissipation.LAX_FRIEDRICHS:
        lam = max_wave_speed(ql, qr, axis, gamma)
        F = F - 0.5 * lam[..., None] * (prim_to_cons(qr, gamma) - prim_to_cons(ql, gamma))
    return F


def _as_flux(flux) -> Flux:
    if isinstance(flux, FluxScheme):
        return flux.flux
    if isinstance(flux, str):
        return Flux.parse(flux)
    return Flux(flux)


def check_preservation_condition(
    flux: Flux | FluxScheme | str,
    r_l: float,
    r_r: float,
    V: float,
    P: float,
    gamma: float = GAMMA,
    *,
    tol: float = 1.0e-12,
) -> tuple[bool, tuple[float, float]]:
    """Check whether ``flux`` admits a constant-velocity, constant-pressure solution.

    On the states ``(r_l, V, P)`` and ``(r_r, V, P)`` the momentum flux must be
    ``P + V F_rho`` and the energy flux ``gamma P V / (gamma - 1) + V^2 F_rho / 2``.
    Returns the verdict and the two residuals.
    """
    ql = np.array([r_l, V, 0.0, 0.0, P])
    qr = np.array([r_r, V, 0.0, 0.0, P])
    F = two_point_flux(flux, ql, qr, 0, gamma)
    res_m = F[1] - (P + V * F[0])
    res_E = F[4] - (gamma * P * V / (gamma - 1.0) + 0.5 * V * V * F[0])
    ok = abs(res_m) <= tol * max(1.0, abs(P)) and abs(res_E) <= tol * max(1.0, abs(P * V))
    return bool(ok), (float(res_m), float(res_E))


__all__ = [
    "Flux",
    "FluxScheme",
    "SurfaceDissipation",
    "TABLE_ORDER",
    "KERNELS_X",
    "two_point_flux",
    "surface_flux",
    "max_wave_speed",
    "physical_flux",
    "check_preservation_condition",
]
