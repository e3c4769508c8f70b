"""Flux-differencing DG semi-discretization on periodic tensor-product meshes.

Along every tensor line of every element the semi-discrete operator reads

.. math::

    \\frac{\\Delta x}{2} \\frac{dU_i}{dt}
    + 2 \\sum_j D_{ij} F^\\#(U_i, U_j)
    - \\frac{\\delta_{i0}}{w_0} (F^*_{e-1/2} - F^\\#(U_0, U_0))
    + \\frac{\\delta_{iN}}{w_N} (F^*_{e+1/2} - F^\\#(U_N, U_N)) = 0,

and the multi-dimensional right-hand side is the sum over axes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np

from . import fluxes as _fx
from .cases import (
    Blowup,
    CaseSpec,
    Diagnostics,
    default_mesh,
    detect_blowup,
    entropy_scale,
    integral_diagnostics,
    normalized_series,
    project_initial_condition,
)
from .euler import GAMMA, cons_to_prim, prim_to_cons
from .fluxes import Flux, FluxScheme, SurfaceDissipation, surface_flux, two_point_flux
from .mesh import Mesh
from .sbp import SbpOperator, make_sbp_operator

logger = logging.getLogger(__name__)


# {{{ compiled line kernel

_jit_kernels = tuple(numba.njit(inline="always")(k) for k in _fx.KERNELS_X)
_central_x, _kg_x, _ducros_x, _keep_pe_x, _mkep_x = _jit_kernels


@numba.njit(inline="always")
def _flux_x(scheme, rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g):
    if scheme == 0:
        return _central_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g)
    elif scheme == 1:
        return _kg_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g)
    elif scheme == 2:
        return _ducros_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g)
    elif scheme == 3:
        return _keep_pe_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g)
    return _mkep_x(rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g)


@numba.njit
def _axis_kernel(q, D, w0, wN, scheme, lf, axis, g, scale, out):
    """Accumulate ``-scale * (volume + SAT)`` of one axis into ``out``.

    ``q`` and ``out`` have shape ``(A, E, n, B, 5)``.
    """
    A, E, n, B, _ = q.shape
    kn = 1 + axis
    k1 = 2 if axis == 0 else 1
    k2 = 2 if axis == 2 else 3
    acc = np.zeros((n, 5))
    for a in range(A):
        for b in range(B):
            for e in range(E):
                acc[:, :] = 0.0
                for i in range(n):
                    ri = q[a, e, i, b, 0]
                    ui = q[a, e, i, b, kn]
                    vi = q[a, e, i, b, k1]
                    wi = q[a, e, i, b, k2]
                    pi = q[a, e, i, b, 4]
                    for j in range(i, n):
                        f0, f1, f2, f3, f4 = _flux_x(
                            scheme, ri, ui, vi, wi, pi,
                            q[a, e, j, b, 0], q[a, e, j, b, kn], q[a, e, j, b, k1], q[a, e, j, b, k2], q[a, e, j, b, 4],
                            g,
                        )
                        dij = 2.0 * D[i, j]
                        acc[i, 0] += dij * f0
                        acc[i, kn] += dij * f1
                        acc[i, k1] += dij * f2
                        acc[i, k2] += dij * f3
                        acc[i, 4] += dij * f4
                        if j != i:
                            dji = 2.0 * D[j, i]
                            acc[j, 0] += dji * f0
                            acc[j, kn] += dji * f1
                            acc[j, k1] += dji * f2
                            acc[j, k2] += dji * f3
                            acc[j, 4] += dji * f4
                for i in range(n):
                    for v in range(5):
                        out[a, e, i, b, v] -= scale * acc[i, v]

            # interfaces: face between element e (node n-1) and e+1 (node 0)
            for e in range(E):
                en = e + 1
                if en == E:
                    en = 0
                rl = q[a, e, n - 1, b, 0]
                ul = q[a, e, n - 1, b, kn]
                vl = q[a, e, n - 1, b, k1]
                wl = q[a, e, n - 1, b, k2]
                pl = q[a, e, n - 1, b, 4]
                rr = q[a, en, 0, b, 0]
                ur = q[a, en, 0, b, kn]
                vr = q[a, en, 0, b, k1]
                wr = q[a, en, 0, b, k2]
                pr = q[a, en, 0, b, 4]
                s0, s1, s2, s3, s4 = _flux_x(scheme, rl, ul, vl, wl, pl, rr, ur, vr, wr, pr, g)
                if lf:
                    cl = math.sqrt(g * pl / rl)
                    cr = math.sqrt(g * pr / rr)
                    lam = max(abs(ul) + cl, abs(ur) + cr)
                    El = pl / (g - 1.0) + 0.5 * rl * (ul * ul + vl * vl + wl * wl)
                    Er = pr / (g - 1.0) + 0.5 * rr * (ur * ur + vr * vr + wr * wr)
                    h = 0.5 * lam
                    s0 -= h * (rr - rl)
                    s1 -= h * (rr * ur - rl * ul)
                    s2 -= h * (rr * vr - rl * vl)
                    s3 -= h * (rr * wr - rl * wl)
                    s4 -= h * (Er - El)
                l0, l1, l2, l3, l4 = _flux_x(scheme, rl, ul, vl, wl, pl, rl, ul, vl, wl, pl, g)
                r0, r1, r2, r3, r4 = _flux_x(scheme, rr, ur, vr, wr, pr, rr, ur, vr, wr, pr, g)
                cN = scale / wN
                c0 = scale / w0
                out[a, e, n - 1, b, 0] -= cN * (s0 - l0)
                out[a, e, n - 1, b, kn] -= cN * (s1 - l1)
                out[a, e, n - 1, b, k1] -= cN * (s2 - l2)
                out[a, e, n - 1, b, k2] -= cN * (s3 - l3)
                out[a, e, n - 1, b, 4] -= cN * (s4 - l4)
                out[a, en, 0, b, 0] += c0 * (s0 - r0)
                out[a, en, 0, b, kn] += c0 * (s1 - r1)
                out[a, en, 0, b, k1] += c0 * (s2 - r2)
                out[a, en, 0, b, k2] += c0 * (s3 - r3)
                out[a, en, 0, b, 4] += c0 * (s4 - r4)


# }}}


# {{{ numpy reference path


def _axis_numpy(q, op: SbpOperator, scheme: FluxScheme, axis: int, gamma: float, scale: float, out):
    ql = q[:, :, :, None, :, :]
    qr = q[:, :, None, :, :, :]
    F = two_point_flux(scheme.flux, ql, qr, axis, gamma)
    vol = 2.0 * np.einsum("ij,aeijbv->aeibv", op.diff_matrix, F)

    qN = q[:, :, -1]
    q0 = q[:, :, 0]
    Fs = surface_flux(scheme, qN, np.roll(q0, -1, axis=1), axis, gamma)
    FN = two_point_flux(scheme.flux, qN, qN, axis, gamma)
    F0 = two_point_flux(scheme.flux, q0, q0, axis, gamma)
    vol[:, :, -1] += (Fs - FN) / op.weights[-1]
    vol[:, :, 0] -= (np.roll(Fs, 1, axis=1) - F0) / op.weights[0]
    out -= scale * vol


def _axis_standard(q, op: SbpOperator, scheme: FluxScheme, axis: int, gamma: float, scale: float, out):
    """Classical collocation DG: ``D F`` instead of flux differencing."""
    from .euler import physical_flux

    F = physical_flux(q, axis, gamma)
    vol = np.einsum("ij,aejbv->aeibv", op.diff_matrix, F)
    qN = q[:, :, -1]
    q0 = q[:, :, 0]
    Fs = surface_flux(scheme, qN, np.roll(q0, -1, axis=1), axis, gamma)
    vol[:, :, -1] += (Fs - F[:, :, -1]) / op.weights[-1]
    vol[:, :, 0] -= (np.roll(Fs, 1, axis=1) - F[:, :, 0]) / op.weights[0]
    out -= scale * vol


# }}}


def dg_rhs(
    U: np.ndarray,
    mesh: Mesh,
    op: SbpOperator,
    scheme: FluxScheme,
    gamma: float = GAMMA,
    *,
    q: np.ndarray | None = None,
    backend: str = "numba",
) -> np.ndarray:
    """Time derivative of the conserved nodal field ``U``.

    ``backend`` is ``"numba"`` (compiled kernel), ``"numpy"`` (vectorized
    reference) or ``"standard"`` (non-split ``D F`` volume term, only
    meaningful as a comparison for the central flux).
    """
    if U.shape != mesh.field_shape(op):
        raise ValueError(f"field shape {U.shape} does not match mesh/operator {mesh.field_shape(op)}")
    if q is None:
        q = cons_to_prim(U, gamma)
    out = np.zeros_like(U)
    for axis in range(mesh.dim):
        shape = mesh.line_shape(op, axis)
        qa = q.reshape(shape)
        oa = out.reshape(shape)
        scale = 2.0 / mesh.dx[axis]
        if backend == "numba":
            _axis_kernel(
                qa, op.diff_matrix, float(op.weights[0]), float(op.weights[-1]),
                int(scheme.flux), scheme.surface_dissipation == SurfaceDissipation.LAX_FRIEDRICHS,
                axis, float(gamma), scale, oa,
            )
        elif backend == "numpy":
            _axis_numpy(qa, op, scheme, axis, gamma, scale, oa)
        elif backend == "standard":
            _axis_standard(qa, op, scheme, axis, gamma, scale, oa)
        else:
            raise ValueError(f"unknown backend {backend!r}")
    return out


def compute_dt(q: np.ndarray, mesh: Mesh, cfl: float, N: int, gamma: float = GAMMA) -> float:
    """``cfl * min_axis dx / ((2N + 1) * max(|u_axis| + c))`` from a primitive field."""
    if cfl <= 0.0:
        raise ValueError("cfl must be positive")
    with np.errstate(invalid="ignore"):
        c = np.sqrt(gamma * q[..., 4] / q[..., 0])
    dt = np.inf
    for axis in range(mesh.dim):
        smax = float(np.max(np.abs(q[..., 1 + axis]) + c))
        if smax > 0.0:
            dt = min(dt, mesh.dx[axis] / ((2 * N + 1) * smax))
    if not np.isfinite(dt) or dt <= 0.0:
        raise ValueError("degenerate wave speed; cannot choose a time step")
    return cfl * dt


# {{{ time stepping

# Carpenter & Kennedy (1994), five-stage fourth-order 2N-storage scheme
LSRK45_A = np.array([
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
])
LSRK45_B = np.array([
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
])
LSRK45_C = np.array([
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
])


def lsrk45_step(U, rhs_fn: Callable[[np.ndarray], np.ndarray], dt: float):
    """Advance ``dU/dt = rhs_fn(U)`` by one step of the low-storage RK scheme."""
    if not dt > 0.0:
        raise ValueError("time step must be positive")
    U = np.array(U, dtype=np.float64, copy=True)
    k = np.zeros_like(U)
    for a, b in zip(LSRK45_A, LSRK45_B):
        k = a * k + dt * rhs_fn(U)
        U = U + b * k
    return U


# }}}


# {{{ driver


@dataclass(frozen=True)
class SolverConfig:
    case: CaseSpec
    degree: int = 3
    scheme: FluxScheme = field(default_factory=FluxScheme)
    cells: tuple[int, ...] = (4,)
    cfl: float = 0.2
    t_final: float = 1.0
    diagnostic_interval: float = 0.01
    gamma: float = GAMMA
    domain: tuple[float, float] | None = None
    max_steps: int | None = None

    def __post_init__(self):
        if self.cfl <= 0.0:
            raise ValueError("cfl must be positive")
        if self.t_final < 0.0:
            raise ValueError("t_final must be non-negative")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if self.diagnostic_interval <= 0.0:
            raise ValueError("diagnostic_interval must be positive")

    def mesh(self) -> Mesh:
        cells = tuple(np.broadcast_to(self.cells, (self.case.dim,)))
        if self.domain is None:
            return default_mesh(self.case, cells)
        return Mesh.uniform(cells, self.domain[0], self.domain[1], dim=self.case.dim)


@dataclass
class RunResult:
    times: np.ndarray
    diagnostics: list[Diagnostics]
    blowup_time: float | None
    blowup_reason: Blowup | None
    final_field: np.ndarray
    steps: int
    mesh: Mesh
    op: SbpOperator
    gamma: float = GAMMA

    @property
    def KE(self) -> np.ndarray:
        return np.array([d.ke for d in self.diagnostics])

    @property
    def EN(self) -> np.ndarray:
        return np.array([d.en for d in self.diagnostics])

    def normalized(self) -> tuple[np.ndarray, np.ndarray]:
        d0 = self.diagnostics[0]
        return normalized_series(self.KE, self.EN, entropy_scale(d0.en, d0.mass, self.gamma))


def run_simulation(config: SolverConfig, *, backend: str = "numba", progress: Callable | None = None) -> RunResult:
    """Integrate ``config`` to ``t_final`` or until the field stops being admissible.

    The step size is recomputed from the current field before every step.
    Diagnostics are taken at multiples of ``diagnostic_interval``, at
    ``t_final`` and at blow-up.  The blow-up time is the time reached by the first step whose result fails
    :func:`detect_blowup`.
    """
    gamma = config.gamma
    mesh = config.mesh()
    op = make_sbp_operator(config.degree)
    q = project_initial_condition(config.case, mesh, op, gamma)
    U = prim_to_cons(q, gamma)

    def rhs(V):
        return dg_rhs(V, mesh, op, config.scheme, gamma, backend=backend)

    t = 0.0
    steps = 0
    times = [0.0]
    diags = [integral_diagnostics(U, mesh, op, gamma)]
    interval = config.diagnostic_interval
    k_diag = 1
    blowup_time = None
    reason = detect_blowup(U, gamma, q)
    if reason is not None:
        blowup_time = 0.0

    with np.errstate(all="ignore"):
        while blowup_time is None and t < config.t_final:
            if config.max_steps is not None and steps >= config.max_steps:
                break
            # the step that would overshoot a diagnostic time (or t_final) is shortened to land on it
            target = min(k_diag * interval, config.t_final)
            dt = compute_dt(q, mesh, config.cfl, config.degree, gamma)
            if t + dt >= target:
                dt, t_next = target - t, target
            else:
                t_next = t + dt
            U = lsrk45_step(U, rhs, dt)
            steps += 1
            t = t_next
            q = cons_to_prim(U, gamma)
            reason = detect_blowup(U, gamma, q)
            if reason is not None:
                blowup_time = t
                logger.info("blow-up at t=%.6g (%s) after %d steps", t, reason.value, steps)
            if reason is not None or t == target:
                times.append(t)
                diags.append(integral_diagnostics(U, mesh, op, gamma))
                while k_diag * interval <= t:
                    k_diag += 1
                if progress is not None:
                    progress(t, diags[-1])

    return RunResult(
        times=np.array(times),
        diagnostics=diags,
        blowup_time=blowup_time,
        blowup_reason=reason,
        final_field=U,
        steps=steps,
        mesh=mesh,
        op=op,
        gamma=gamma,
    )


# }}}
