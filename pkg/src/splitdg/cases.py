"""Initial conditions of the benchmark problems and integral run diagnostics."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .euler import GAMMA, cons_to_prim, entropy_density, kinetic_energy_density
from .mesh import Mesh
from .sbp import SbpOperator


class Case(enum.Enum):
    DENSITY_WAVE_1D = "density_wave_1d"
    DENSITY_WAVE_2D = "density_wave_2d"
    ISENTROPIC_VORTEX = "isentropic_vortex"
    INVISCID_TGV = "inviscid_tgv"

    @classmethod
    def parse(cls, name: str) -> "Case":
        key = name.strip().lower().replace("-", "_")
        for c in cls:
            if c.value == key:
                return c
        raise ValueError(f"unknown case {name!r}; expected one of {[c.value for c in cls]}")

    @property
    def dim(self) -> int:
        return {"density_wave_1d": 1, "density_wave_2d": 2, "isentropic_vortex": 2, "inviscid_tgv": 3}[self.value]

    @property
    def domain(self) -> tuple[float, float]:
        return {
            "density_wave_1d": (-1.0, 1.0),
            "density_wave_2d": (-1.0, 1.0),
            "isentropic_vortex": (-10.0, 10.0),
            "inviscid_tgv": (0.0, 2.0 * np.pi),
        }[self.value]


@dataclass(frozen=True)
class CaseSpec:
    """Test problem and its parameters.

    Density wave: ``rho = 1 + rho_amp sin(2 pi (x + y))``, ``u = 0.1``,
    ``v = 0.2``, ``p = 20`` plus a velocity perturbation of size ``amplitude``.
    Vortex: strength ``beta``, Mach ``mach``, advection angle ``alpha`` (deg).
    TGV: ``rho0``, ``U0`` and ``mach`` fix the background pressure.
    """

    case: Case
    amplitude: float = 0.0
    rho_amp: float = 0.98
    velocity: tuple[float, float] = (0.1, 0.2)
    pressure: float = 20.0
    beta: float = 5.0
    mach: float | None = None
    alpha: float = 45.0
    center: tuple[float, float] = (0.0, 0.0)
    rho0: float = 1.0
    U0: float = 1.0

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ValueError("perturbation amplitude must be non-negative")
        if self.mach is not None and self.mach <= 0.0:
            raise ValueError("Mach number must be positive")

    @property
    def dim(self) -> int:
        return self.case.dim

    @property
    def effective_mach(self) -> float:
        if self.mach is not None:
            return self.mach
        return 0.1 if self.case == Case.INVISCID_TGV else 0.5


def initial_condition(spec: CaseSpec, *x, gamma: float = GAMMA) -> np.ndarray:
    """Primitive state ``(rho, u, v, w, p)`` at the points ``x`` (broadcast arrays)."""
    x = [np.asarray(xi, dtype=np.float64) for xi in x]
    if len(x) != spec.dim:
        raise ValueError(f"{spec.case.value} needs {spec.dim} coordinates, got {len(x)}")
    shape = np.broadcast_shapes(*(xi.shape for xi in x))
    q = np.zeros(shape + (5,))
    A = spec.amplitude
    two_pi = 2.0 * np.pi

    if spec.case == Case.DENSITY_WAVE_1D:
        (X,) = x
        q[..., 0] = 1.0 + spec.rho_amp * np.sin(two_pi * X)
        q[..., 1] = spec.velocity[0] + A * np.sin(two_pi * X)
        q[..., 4] = spec.pressure
    elif spec.case == Case.DENSITY_WAVE_2D:
        X, Y = x
        q[..., 0] = 1.0 + spec.rho_amp * np.sin(two_pi * (X + Y))
        q[..., 1] = spec.velocity[0] + A * (np.sin(two_pi * X) + np.sin(two_pi * Y))
        q[..., 2] = spec.velocity[1] + A * (np.cos(two_pi * X) + np.cos(two_pi * Y))
        q[..., 4] = spec.pressure
    elif spec.case == Case.ISENTROPIC_VORTEX:
        X, Y = x
        beta, M = spec.beta, spec.effective_mach
        alpha = np.deg2rad(spec.alpha)
        dx = X - spec.center[0]
        dy = Y - spec.center[1]
        r2 = dx * dx + dy * dy
        rho = (1.0 - beta**2 * (gamma - 1.0) / (8.0 * gamma * np.pi**2) * np.exp(1.0 - r2)) ** (1.0 / (gamma - 1.0))
        g = np.exp(0.5 * (1.0 - r2)) / (2.0 * np.pi)
        q[..., 0] = rho
        q[..., 1] = M * np.cos(alpha) - beta * dy * g
        q[..., 2] = M * np.sin(alpha) + beta * dx * g
        q[..., 4] = rho**gamma
    elif spec.case == Case.INVISCID_TGV:
        X, Y, Z = x
        rho0, U0, M = spec.rho0, spec.U0, spec.effective_mach
        P0 = rho0 / (M * M * gamma)
        q[..., 0] = rho0
        q[..., 1] = U0 * np.sin(X) * np.cos(Y) * np.cos(Z)
        q[..., 2] = -U0 * np.cos(X) * np.sin(Y) * np.cos(Z)
        q[..., 3] = 0.0
        q[..., 4] = P0 + rho0 * U0**2 / 16.0 * (
            np.cos(2 * X) * np.cos(2 * Z) + 2 * np.cos(2 * X) + 2 * np.cos(2 * Y) + np.cos(2 * Y) * np.cos(2 * Z)
        )
    else:  # pragma: no cover
        raise ValueError(f"unknown case {spec.case}")
    return q


def default_mesh(spec: CaseSpec, cells: int | tuple[int, ...]) -> Mesh:
    lo, hi = spec.case.domain
    return Mesh.uniform(cells, lo, hi, dim=spec.dim)


def project_initial_condition(spec: CaseSpec, mesh: Mesh, op: SbpOperator, gamma: float = GAMMA) -> np.ndarray:
    """Nodal primitive field of ``spec`` on ``mesh``."""
    if mesh.dim != spec.dim:
        raise ValueError(f"{spec.case.value} is {spec.dim}-D but the mesh is {mesh.dim}-D")
    return initial_condition(spec, *mesh.coordinates(op), gamma=gamma)


# {{{ diagnostics


@dataclass(frozen=True)
class Diagnostics:
    ke: float
    en: float
    mass: float
    min_rho: float
    min_p: float


def integral_diagnostics(U: np.ndarray, mesh: Mesh, op: SbpOperator, gamma: float = GAMMA) -> Diagnostics:
    """Quadrature totals of kinetic energy, entropy and mass, plus nodal minima.

    Non-finite or inadmissible fields give ``nan`` entropy instead of raising.
    """
    q = cons_to_prim(U, gamma)
    W = mesh.quadrature_weights(op)
    with np.errstate(invalid="ignore", over="ignore"):
        ke = float(np.sum(W * kinetic_energy_density(q)))
        en = float(np.sum(W * entropy_density(q, gamma, check=False)))
        mass = float(np.sum(W * U[..., 0]))
    return Diagnostics(ke, en, mass, float(np.min(q[..., 0])), float(np.min(q[..., 4])))


def normalized_series(KE, EN, en_scale: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Relative changes ``(KE - KE0) / KE0`` and ``(EN - EN0) / |EN0|``.

    ``en_scale`` replaces ``|EN0|`` in the entropy denominator.
    """
    KE = np.asarray(KE, dtype=np.float64)
    EN = np.asarray(EN, dtype=np.float64)
    scale = abs(EN[0]) if en_scale is None else en_scale
    if KE[0] == 0.0 or scale == 0.0:
        raise ValueError("initial kinetic energy and entropy must be non-zero")
    return (KE - KE[0]) / KE[0], (EN - EN[0]) / scale


def entropy_scale(en0: float, mass0: float, gamma: float = GAMMA, rtol: float = 1e-10) -> float:
    """Denominator for the normalized entropy series.

    ``|EN0|`` unless it vanishes at round-off level relative to
    ``mass0 / (gamma - 1)``, the change in total entropy caused by a unit
    uniform shift of ``ln p - gamma ln rho``.  The isentropic vortex starts
    from ``p = rho**gamma``, where ``EN0`` is exactly zero in exact arithmetic.
    """
    ref = abs(mass0) / (gamma - 1.0)
    return abs(en0) if abs(en0) > rtol * ref else ref


class Blowup(enum.Enum):
    NON_FINITE = "non-finite value"
    DENSITY = "non-positive density"
    PRESSURE = "non-positive pressure"


def detect_blowup(U: np.ndarray, gamma: float = GAMMA, q: np.ndarray | None = None) -> Blowup | None:
    """First violated admissibility predicate of a conserved field, or ``None``."""
    if not np.all(np.isfinite(U)):
        return Blowup.NON_FINITE
    if np.min(U[..., 0]) <= 0.0:
        return Blowup.DENSITY
    if q is None:
        q = cons_to_prim(U, gamma)
    if np.min(q[..., 4]) <= 0.0:
        return Blowup.PRESSURE
    return None


# }}}
