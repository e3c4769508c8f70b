"""Compressible Euler state conversions and pointwise functionals.

States are float arrays with a trailing axis of length 5:

* conserved ``U = (rho, rho u, rho v, rho w, E)``
* primitive ``q = (rho, u, v, w, p)``

Nothing here enforces admissibility, so blown-up states stay representable.
"""

from __future__ import annotations

import numpy as np

GAMMA = 1.4

RHO, VX, VY, VZ, PRE = range(5)
ENERGY = 4


def _check_gamma(gamma: float) -> None:
    if not gamma > 1.0:
        raise ValueError(f"ratio of specific heats must exceed 1, got {gamma}")


def prim_to_cons(q, gamma: float = GAMMA) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    rho, u, v, w, p = np.moveaxis(q, -1, 0)
    U = np.empty_like(q)
    U[..., 0] = rho
    U[..., 1] = rho * u
    U[..., 2] = rho * v
    U[..., 3] = rho * w
    U[..., 4] = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v + w * w)
    return U


def cons_to_prim(U, gamma: float = GAMMA) -> np.ndarray:
    """Inverse of :func:`prim_to_cons`.

    ``rho <= 0`` is not an error here: the division produces ``inf``/``nan`` or
    a negative state which :func:`splitdg.cases.detect_blowup` picks up.
    """
    U = np.asarray(U, dtype=np.float64)
    rho = U[..., 0]
    q = np.empty_like(U)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / rho
        u = U[..., 1] * inv
        v = U[..., 2] * inv
        w = U[..., 3] * inv
    q[..., 0] = rho
    q[..., 1] = u
    q[..., 2] = v
    q[..., 3] = w
    with np.errstate(invalid="ignore"):
        q[..., 4] = (gamma - 1.0) * (U[..., 4] - 0.5 * (U[..., 1] * u + U[..., 2] * v + U[..., 3] * w))
    return q


def primitive_rate(q, dU, gamma: float = GAMMA) -> np.ndarray:
    """Map a conserved time derivative ``dU`` at state ``q`` to ``(drho, du, dv, dw, dp)``."""
    q = np.asarray(q)
    dU = np.asarray(dU)
    rho = q[..., 0]
    vel = q[..., 1:4]
    dq = np.empty_like(dU)
    dq[..., 0] = dU[..., 0]
    dq[..., 1:4] = (dU[..., 1:4] - vel * dU[..., :1]) / rho[..., None]
    dq[..., 4] = (gamma - 1.0) * (
        dU[..., 4] - np.sum(vel * dU[..., 1:4], axis=-1) + 0.5 * np.sum(vel * vel, axis=-1) * dU[..., 0]
    )
    return dq


def physical_flux(q, axis: int, gamma: float = GAMMA) -> np.ndarray:
    """Euler flux ``F``, ``G`` or ``H`` (``axis = 0, 1, 2``) of primitive state ``q``."""
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    q = np.asarray(q, dtype=np.float64)
    rho, p = q[..., 0], q[..., 4]
    un = q[..., 1 + axis]
    U = prim_to_cons(q, gamma)
    F = np.empty_like(q)
    F[..., 0] = rho * un
    F[..., 1:4] = U[..., 1:4] * un[..., None]
    F[..., 1 + axis] += p
    F[..., 4] = (U[..., 4] + p) * un
    return F


def kinetic_energy_density(q) -> np.ndarray:
    """``rho (u^2 + v^2 + w^2) / 2``."""
    q = np.asarray(q, dtype=np.float64)
    return 0.5 * q[..., 0] * np.sum(q[..., 1:4] ** 2, axis=-1)


def entropy_density(q, gamma: float = GAMMA, *, check: bool = True) -> np.ndarray:
    """Convex mathematical entropy ``-rho s / (gamma - 1)`` with ``s = ln p - gamma ln rho``."""
    q = np.asarray(q, dtype=np.float64)
    rho, p = q[..., 0], q[..., 4]
    if check and (np.any(rho <= 0.0) or np.any(p <= 0.0)):
        raise ValueError("entropy is undefined for non-positive density or pressure")
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.log(p) - gamma * np.log(rho)
    return -rho * s / (gamma - 1.0)


def sound_speed(q, gamma: float = GAMMA) -> np.ndarray:
    q = np.asarray(q)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.sqrt(gamma * q[..., 4] / q[..., 0])
