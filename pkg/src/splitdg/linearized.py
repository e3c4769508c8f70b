"""Linearization of split-form schemes around the density-wave solution.

The base flow has constant velocity ``V`` and pressure ``P`` and a density
``r`` advected at speed ``V``.  Small perturbations ``(rho', u', p')`` of it obey
the linearized Euler equations, which conserve the reduced energy

.. math::

    \\mathcal{E} = \\frac{p'^2}{2 \\gamma P} + \\frac{1}{2} r u'^2

but say nothing about ``rho'``.  This module provides the linearized DG and
finite-difference schemes, their reduced-energy rates (assembled and in closed
form), Jacobian spectra, the symmetrizing change of variables and the KG
pressure drift.

Every linearized scheme is built from two-point flux functions of the
``(r, rho', u', p')`` pair, one per equation: density, the "reduced" momentum
``r u'`` and pressure.  The DG variant plugs them into the same flux
differencing template as the nonlinear solver, the FD variant into a
conservative two-point difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .euler import GAMMA, prim_to_cons, primitive_rate
from .fluxes import Flux, FluxScheme, two_point_flux
from .mesh import Mesh
from .sbp import SbpOperator

MAX_DOF = 10_000


@dataclass(frozen=True)
class DensityWaveBase:
    """Frozen snapshot of the base flow.

    ``r`` has shape ``(elements, N + 1)`` on a DG geometry (``op`` given) and
    ``(cells,)`` on a finite-difference grid.
    """

    r: np.ndarray
    V: float
    P: float
    dx: float
    op: SbpOperator | None = None
    gamma: float = GAMMA
    lo: float = -1.0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=np.float64)
        object.__setattr__(self, "r", r)
        if np.any(r <= 0.0):
            raise ValueError("base density must be positive")
        if not (np.isfinite(self.V) and np.isfinite(self.P)) or self.P <= 0.0:
            raise ValueError("base velocity must be finite and base pressure positive")
        if self.op is not None and (r.ndim != 2 or r.shape[1] != self.op.n):
            raise ValueError(f"DG base density must have shape (elements, {self.op.n})")
        if self.op is None and r.ndim != 1:
            raise ValueError("finite-difference base density must be one-dimensional")

    @classmethod
    def dg(cls, profile: Callable, elements: int, op: SbpOperator, V: float, P: float,
           lo: float = -1.0, hi: float = 1.0, gamma: float = GAMMA) -> "DensityWaveBase":
        mesh = Mesh.uniform(elements, lo, hi)
        x = mesh.axis_coordinates(op, 0)
        return cls(profile(x), V, P, mesh.dx[0], op, gamma, lo)

    @classmethod
    def fd(cls, profile: Callable, cells: int, V: float, P: float,
           lo: float = 0.0, hi: float = 1.0, gamma: float = GAMMA) -> "DensityWaveBase":
        dx = (hi - lo) / cells
        x = lo + dx * np.arange(cells)
        return cls(profile(x), V, P, dx, None, gamma, lo)

    @property
    def is_dg(self) -> bool:
        return self.op is not None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.r.shape

    @property
    def mesh(self) -> Mesh:
        if not self.is_dg:
            raise ValueError("finite-difference base has no DG mesh")
        E = self.r.shape[0]
        return Mesh.uniform(E, self.lo, self.lo + E * self.dx)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights of the total-energy sum."""
        if self.is_dg:
            return np.broadcast_to(0.5 * self.dx * self.op.weights, self.r.shape)
        return np.full(self.r.shape, self.dx)

    def coordinates(self) -> np.ndarray:
        if self.is_dg:
            return self.mesh.axis_coordinates(self.op, 0)
        return self.lo + self.dx * np.arange(self.r.size)


@dataclass(frozen=True)
class PerturbationState:
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray

    @classmethod
    def zeros(cls, shape) -> "PerturbationState":
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape))

    @classmethod
    def from_vector(cls, x: np.ndarray, shape) -> "PerturbationState":
        rho, u, p = np.asarray(x, dtype=np.float64).reshape((3,) + tuple(shape))
        return cls(rho, u, p)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([np.ravel(self.rho), np.ravel(self.u), np.ravel(self.p)])


def reduced_energy(pert: PerturbationState, base: DensityWaveBase) -> tuple[float, np.ndarray]:
    """Total and nodal reduced energy ``p'^2 / (2 gamma P) + r u'^2 / 2``."""
    e = pert.p**2 / (2.0 * base.gamma * base.P) + 0.5 * base.r * pert.u**2
    return float(np.sum(base.weights * e)), e


# {{{ linear two-point fluxes


def _avg(a, b):
    return 0.5 * (a + b)


def _pair_fluxes(flux: Flux, V: float, P: float, gamma: float, fd: bool):
    """Two-point fluxes ``(f_rho, f_m, f_p)`` of a linearized scheme.

    Each takes the left and right ``(r, rho, u, p)`` tuples.  ``f_m`` is the
    flux of the reduced momentum ``r u'``.
    """
    gP = gamma * P

    def f_p(L, R):
        return V * _avg(L[3], R[3]) + gP * _avg(L[2], R[2])

    def f_rho_split(L, R):
        return _avg(L[0], R[0]) * _avg(L[2], R[2]) + V * _avg(L[1], R[1])

    def f_rho_central(L, R):
        return _avg(L[0] * L[2], R[0] * R[2]) + V * _avg(L[1], R[1])

    def f_m_split(L, R):
        return _avg(L[3], R[3]) + V * _avg(L[0], R[0]) * _avg(L[2], R[2])

    def f_m_central(L, R):
        return _avg(L[3], R[3]) + V * _avg(L[0] * L[2], R[0] * R[2])

    if flux in (Flux.MKEP, Flux.KEEP_PE):
        return f_rho_split, f_m_split, f_p
    if flux == Flux.CENTRAL:
        return f_rho_central, f_m_central, f_p
    if flux == Flux.DUCROS:
        return f_rho_split, f_m_central, f_p
    if flux == Flux.KG:
        if not fd:
            raise ValueError("KG has no linearization about the density wave; use the nonlinear Jacobian")
        if V != 0.0:
            raise ValueError("KG only admits the density wave without advection (V = 0)")

        def f_p_kg(L, R):
            # (gamma - 1) P alpha {u} with alpha = 1 + {r}{1/r} / (gamma - 1)
            rr = _avg(L[0], R[0]) * _avg(1.0 / L[0], 1.0 / R[0])
            return P * ((gamma - 1.0) + rr) * _avg(L[2], R[2])

        def f_rho_kg(L, R):
            return _avg(L[0], R[0]) * _avg(L[2], R[2])

        def f_m_kg(L, R):
            return _avg(L[3], R[3])

        return f_rho_kg, f_m_kg, f_p_kg
    raise ValueError(f"unsupported flux {flux!r}")


def _base_flux(V):
    def f_r(L, R):
        return V * _avg(L[0], R[0])

    return f_r


def _dg_rate(f, X, op: SbpOperator, dx: float) -> np.ndarray:
    """Flux-differencing DG rate of the two-point flux ``f`` on nodal states ``X``."""
    Li = tuple(x[:, :, None] for x in X)
    Rj = tuple(x[:, None, :] for x in X)
    vol = 2.0 * np.einsum("ij,eij->ei", op.diff_matrix, f(Li, Rj))
    last = tuple(x[:, -1] for x in X)
    first = tuple(x[:, 0] for x in X)
    fstar = f(last, tuple(np.roll(x, -1) for x in first))  # face e+1/2
    vol[:, -1] += (fstar - f(last, last)) / op.weights[-1]
    vol[:, 0] -= (np.roll(fstar, 1) - f(first, first)) / op.weights[0]
    return -(2.0 / dx) * vol


def _fd_rate(f, X, dx: float) -> np.ndarray:
    right = tuple(np.roll(x, -1) for x in X)
    fface = f(X, right)  # e+1/2
    return -(fface - np.roll(fface, 1)) / dx


@dataclass(frozen=True)
class LinearRates:
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    ru: np.ndarray  # d(r u')/dt
    r: np.ndarray  # base density rate

    @property
    def state(self) -> PerturbationState:
        return PerturbationState(self.rho, self.u, self.p)


def _linear_rates(flux: Flux, base: DensityWaveBase, pert: PerturbationState, fd: bool) -> LinearRates:
    flux = _parse(flux)
    if flux == Flux.KG and not fd:
        raise ValueError("KG has no linearization about the density wave; use the nonlinear Jacobian")
    f_rho, f_m, f_p = _pair_fluxes(flux, base.V, base.P, base.gamma, fd)
    X = (base.r, np.asarray(pert.rho, float), np.asarray(pert.u, float), np.asarray(pert.p, float))
    for x in X[1:]:
        if x.shape != base.shape:
            raise ValueError(f"perturbation shape {x.shape} does not match base {base.shape}")
    if fd:
        rate = lambda f: _fd_rate(f, X, base.dx)  # noqa: E731
    else:
        rate = lambda f: _dg_rate(f, X, base.op, base.dx)  # noqa: E731
    r_t = rate(_base_flux(base.V))
    rho_t = rate(f_rho)
    ru_t = rate(f_m)
    p_t = rate(f_p)
    u_t = (ru_t - X[2] * r_t) / base.r
    return LinearRates(rho_t, u_t, p_t, ru_t, r_t)


def _parse(flux) -> Flux:
    if isinstance(flux, FluxScheme):
        return flux.flux
    if isinstance(flux, str):
        return Flux.parse(flux)
    return Flux(flux)


# }}}


def dg_linearized_rhs(flux, base: DensityWaveBase, pert: PerturbationState) -> PerturbationState:
    """Linearized flux-differencing DG scheme (mKEP / KEEP-PE, central, Ducros)."""
    if not base.is_dg:
        raise ValueError("dg_linearized_rhs needs a DG base (with an SBP operator)")
    return _linear_rates(flux, base, pert, fd=False).state


def fd_linearized_rhs(flux, base: DensityWaveBase, pert: PerturbationState) -> PerturbationState:
    """Linearized two-point finite-difference scheme on a periodic grid.

    ``Flux.KG`` means the advection-free KG linearization and needs ``V = 0``.
    """
    if base.is_dg:
        raise ValueError("fd_linearized_rhs needs a finite-difference base")
    return _linear_rates(flux, base, pert, fd=True).state


def reduced_energy_rate(flux, base: DensityWaveBase, pert: PerturbationState) -> float:
    """``d/dt`` of the total reduced energy, assembled from the linearized rates.

    Uses ``dE/dt = p' p'_t / (gamma P) + u' (r u')_t - u'^2 r_t / 2``.
    """
    R = _linear_rates(flux, base, pert, fd=not base.is_dg)
    u = np.asarray(pert.u, float)
    rate = np.asarray(pert.p, float) * R.p / (base.gamma * base.P) + u * R.ru - 0.5 * u * u * R.r
    return float(np.sum(base.weights * rate))


def fd_energy_rate(flux, base: DensityWaveBase, pert: PerturbationState) -> tuple[float, float]:
    """Assembled and closed-form reduced-energy rates ``dx * sum_e dE_e/dt``."""
    flux = _parse(flux)
    computed = reduced_energy_rate(flux, base, pert)
    r = base.r
    u = np.asarray(pert.u, float)
    p = np.asarray(pert.p, float)
    r1, u1, p1 = np.roll(r, -1), np.roll(u, -1), np.roll(p, -1)
    if flux in (Flux.CENTRAL, Flux.DUCROS):
        # summation by parts of -V sum[u Delta{ru} - u^2 Delta{r} / 2]
        closed = 0.25 * base.V * np.sum((r1 - r) * (u1 - u) ** 2)
    elif flux in (Flux.MKEP, Flux.KEEP_PE):
        closed = 0.0
    elif flux == Flux.KG:
        beta = _avg(r, r1) * _avg(1.0 / r, 1.0 / r1) - 1.0
        closed = np.sum(beta * _avg(u, u1) * (p1 - p)) / base.gamma
    else:  # pragma: no cover
        raise ValueError(flux)
    return computed, float(closed)


def fd_density_perturbation_rate(flux, base: DensityWaveBase, pert: PerturbationState) -> tuple[float, float]:
    """``dx * d/dt sum rho'^2 / 2`` and its advection-free part ``-sum rho' Delta({r}{u'})``."""
    flux = _parse(flux)
    R = _linear_rates(flux, base, pert, fd=True)
    rho = np.asarray(pert.rho, float)
    computed = base.dx * np.sum(rho * R.rho)
    if flux == Flux.CENTRAL:
        face = _avg(base.r * pert.u, np.roll(base.r * pert.u, -1))
    else:
        face = _avg(base.r, np.roll(base.r, -1)) * _avg(pert.u, np.roll(pert.u, -1))
    return float(computed), float(-np.sum(rho * (face - np.roll(face, 1))))


# {{{ nonlinear cross-checks


def _nonlinear_state(base: DensityWaveBase, pert: PerturbationState, eps: float) -> np.ndarray:
    q = np.zeros(base.shape + (5,))
    q[..., 0] = base.r + eps * pert.rho
    q[..., 1] = base.V + eps * pert.u
    q[..., 4] = base.P + eps * pert.p
    return q


def nonlinear_primitive_rate(flux, base: DensityWaveBase, pert: PerturbationState, eps: float = 1.0) -> PerturbationState:
    """``(rho, u, p)`` rates of the nonlinear 1-D DG scheme at ``base + eps * pert``."""
    from .solver import dg_rhs

    q = _nonlinear_state(base, pert, eps)
    U = prim_to_cons(q, base.gamma)
    dU = dg_rhs(U, base.mesh, base.op, FluxScheme(_parse(flux)), base.gamma)
    dq = primitive_rate(q, dU, base.gamma)
    return PerturbationState(dq[..., 0], dq[..., 1], dq[..., 4])


def _nonlinear_directional(flux, base, pert, eps) -> np.ndarray:
    plus = nonlinear_primitive_rate(flux, base, pert, eps).to_vector()
    minus = nonlinear_primitive_rate(flux, base, pert, -eps).to_vector()
    return (plus - minus) / (2.0 * eps)


def linearization_consistency_check(flux, base: DensityWaveBase, pert: PerturbationState, eps: float = 1.0e-5) -> float:
    """Relative max-norm gap between the linearized DG rates and a central
    difference of the nonlinear scheme.  Second order in ``eps``.
    """
    if not 1.0e-8 <= eps <= 1.0e-4:
        raise ValueError("eps must lie in [1e-8, 1e-4]")
    lin = dg_linearized_rhs(flux, base, pert).to_vector()
    fdiff = _nonlinear_directional(flux, base, pert, eps)
    gap = float(np.max(np.abs(lin - fdiff)))
    scale = float(np.max(np.abs(lin)))
    return gap / scale if scale > 0.0 else gap


def assemble_jacobian(flux, base: DensityWaveBase, method: str = "linearized", eps: float = 1.0e-7) -> np.ndarray:
    """Dense Jacobian in ``(rho', u', p')`` ordering by probing unit perturbations.

    ``method="linearized"`` probes the linearized scheme (DG or FD, following
    ``base``); ``method="nonlinear"`` uses central differences of the nonlinear
    DG scheme with step ``eps``, which is the only option for KG.
    """
    ndof = 3 * base.r.size
    if ndof > MAX_DOF:
        raise ValueError(f"{ndof} unknowns exceed the dense-eigensolve cap of {MAX_DOF}")
    if method == "linearized":
        if base.is_dg:
            apply = lambda s: dg_linearized_rhs(flux, base, s).to_vector()  # noqa: E731
        else:
            apply = lambda s: fd_linearized_rhs(flux, base, s).to_vector()  # noqa: E731
    elif method == "nonlinear":
        if not base.is_dg:
            raise ValueError("nonlinear probing is implemented for DG bases only")
        apply = lambda s: _nonlinear_directional(flux, base, s, eps)  # noqa: E731
    else:
        raise ValueError(f"unknown method {method!r}")

    J = np.empty((ndof, ndof))
    e = np.zeros(ndof)
    for k in range(ndof):
        e[k] = 1.0
        J[:, k] = apply(PerturbationState.from_vector(e, base.shape))
        e[k] = 0.0
    return J


def spectral_abscissa(J: np.ndarray) -> float:
    """Largest real part of the eigenvalues of ``J``."""
    J = np.asarray(J, dtype=np.float64)
    if J.size == 0:
        return 0.0
    return float(np.max(scipy.linalg.eigvals(J).real))


# }}}


# {{{ symmetrization


@dataclass(frozen=True)
class SymmetrizerBundle:
    S_inv: np.ndarray
    A_tilde: np.ndarray
    B_tilde: np.ndarray
    C_tilde: np.ndarray
    c: float


def symmetrizer(r: float, r_x: float, P: float, V: float = 0.0, gamma: float = GAMMA) -> SymmetrizerBundle:
    """Change of variables ``W = S^{-1} (rho', u', p')`` that symmetrizes the
    linearized system ``W_t + A W_x + B W = 0``; ``C = B - A_x / 2``.
    """
    if r <= 0.0:
        raise ValueError("base density must be positive")
    g = gamma
    c = np.sqrt(g * P / r)
    sg = np.sqrt(g)
    sgm = np.sqrt((g - 1.0) / g)
    sgg = np.sqrt(g * (g - 1.0))
    S_inv = np.array([
        [c / (sg * r), 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [-c / (r * sgg), 0.0, np.sqrt(g / (g - 1.0)) / (r * c)],
    ])
    A = np.array([
        [V, c / sg, 0.0],
        [c / sg, V, sgm * c],
        [0.0, sgm * c, V],
    ])
    B = r_x * np.array([
        [0.0, c / (r * sg), 0.0],
        [c / (2.0 * r * sg), 0.0, sgm * c / (2.0 * r)],
        [0.0, -c / (r * sgg), 0.0],
    ])
    C = r_x * np.array([
        [0.0, 5.0 * c / (4.0 * r * sg), 0.0],
        [3.0 * c / (4.0 * r * sg), 0.0, sgm * 3.0 * c / (4.0 * r)],
        [0.0, (g - 5.0) * c / (4.0 * r * sgg), 0.0],
    ])
    return SymmetrizerBundle(S_inv, A, B, C, float(c))


def symmetrized_energy_rate(flux, base: DensityWaveBase, pert: PerturbationState) -> float:
    """``d/dt sum_i w_i |W_i|^2`` for the linearized scheme at a frozen base."""
    R = _linear_rates(flux, base, pert, fd=not base.is_dg)
    g, P = base.gamma, base.P
    c = np.sqrt(g * P / base.r)
    r = base.r
    w1 = c / (np.sqrt(g) * r)
    w31 = -c / (r * np.sqrt(g * (g - 1.0)))
    w33 = np.sqrt(g / (g - 1.0)) / (r * c)
    W1, W2, W3 = w1 * pert.rho, pert.u, w31 * pert.rho + w33 * pert.p
    D1, D2, D3 = w1 * R.rho, R.u, w31 * R.rho + w33 * R.p
    return float(2.0 * np.sum(base.weights * (W1 * D1 + W2 * D2 + W3 * D3)))


# }}}


# {{{ KG pressure drift


@dataclass(frozen=True)
class KgDrift:
    cells: tuple[int, ...]
    dx: np.ndarray
    measured: list[np.ndarray]
    prediction: list[np.ndarray]
    orders: np.ndarray  # fitted order of max|dp/dt| between successive grids


def kg_pressure_drift(
    profile: Callable,
    d_profile: Callable,
    d2_profile: Callable,
    V: float,
    P: float,
    cells: int | Sequence[int],
    lo: float = 0.0,
    hi: float = 1.0,
    gamma: float = GAMMA,
) -> KgDrift:
    """Initial pressure rate of the nonlinear KG finite-difference scheme.

    On density-wave data the KG energy flux couples density and pressure and
    ``dp/dt`` picks up ``-P V Delta({r}{1/r}) / dx``.  Its leading Taylor term,

    .. math::

        -\\frac{P V}{2 r^3} (r r' r'' - r'^3) \\Delta x^2,

    is returned alongside for comparison.
    """
    cells = (int(cells),) if np.isscalar(cells) else tuple(int(c) for c in cells)
    measured, predicted, dxs = [], [], []
    for C in cells:
        dx = (hi - lo) / C
        x = lo + dx * np.arange(C)
        q = np.zeros((C, 5))
        q[:, 0] = profile(x)
        q[:, 1] = V
        q[:, 4] = P
        F = two_point_flux(Flux.KG, q, np.roll(q, -1, axis=0), 0, gamma)
        dU = -(F - np.roll(F, 1, axis=0)) / dx
        dp = primitive_rate(q, dU, gamma)[:, 4]
        r, r1, r2 = profile(x), d_profile(x), d2_profile(x)
        measured.append(dp)
        predicted.append(-P * V / (2.0 * r**3) * (r * r1 * r2 - r1**3) * dx**2)
        dxs.append(dx)
    dxs = np.array(dxs)
    peaks = np.array([np.max(np.abs(m)) for m in measured])
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log(peaks[:-1] / peaks[1:]) / np.log(dxs[:-1] / dxs[1:])
    return KgDrift(cells, dxs, measured, predicted, orders)


# }}}
