"""Gauss-Lobatto-Legendre collocation and its summation-by-parts identities.

The differentiation matrix ``D`` on the ``N + 1`` GLL nodes, together with the
diagonal norm ``M = diag(w)``, satisfies

.. math::

    M D + D^T M = \\mathrm{diag}(-1, 0, \\dots, 0, +1),

which is what every discrete conservation argument in this package rests on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class SbpOperator:
    """Nodal GLL operator of polynomial degree ``degree``.

    .. attribute:: nodes

        Strictly increasing GLL points on ``[-1, 1]``.

    .. attribute:: weights

        Positive quadrature weights summing to 2.

    .. attribute:: diff_matrix

        ``D[i, j] = l_j'(x_i)`` for the Lagrange basis ``l_j``.
    """

    degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    diff_matrix: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.degree + 1

    @property
    def boundary_matrix(self) -> np.ndarray:
        b = np.zeros((self.n, self.n))
        b[0, 0] = -1.0
        b[-1, -1] = 1.0
        return b


def _legendre_pair(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(P_{n-1}(x), P_n(x))`` by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    return p_prev, p


def gll_nodes_weights(N: int, tol: float = 1.0e-15, maxiter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Compute the ``N + 1`` Gauss-Lobatto-Legendre nodes and weights.

    The nodes are the roots of ``(1 - x^2) P_N'(x)``, found by Newton iteration
    started from the Chebyshev-Gauss-Lobatto points.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"GLL operator needs degree N >= 1, got {N!r}")
    N = int(N)

    x = -np.cos(np.pi * np.arange(N + 1) / N)
    for _ in range(maxiter):
        p_prev, p = _legendre_pair(N, x)
        # (x P_N - P_{N-1}) / ((N + 1) P_N) is the Newton update for the
        # interior roots and keeps the endpoints fixed at +-1
        dx = (x * p - p_prev) / ((N + 1) * p)
        x = x - dx
        if np.max(np.abs(dx)) < tol:
            break

    x[0], x[-1] = -1.0, 1.0
    if N % 2 == 0:
        x[N // 2] = 0.0
    x = 0.5 * (x - x[::-1])  # exact antisymmetry

    _, p = _legendre_pair(N, x)
    w = 2.0 / (N * (N + 1) * p**2)
    return x, w


def differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    """Lagrange differentiation matrix ``D[i, j] = l_j'(x_i)``.

    Off-diagonal entries use barycentric weights; the diagonal is fixed by the
    row-sum condition (exact differentiation of constants).
    """
    x = np.asarray(nodes, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need at least two nodes")
    if np.any(np.diff(x) <= 0.0):
        raise ValueError("nodes must be distinct and sorted")

    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    lam = 1.0 / np.prod(dx, axis=1)

    D = (lam[None, :] / lam[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@lru_cache(maxsize=None)
def make_sbp_operator(N: int) -> SbpOperator:
    """Build (and cache) the degree-``N`` GLL operator.

    The arrays are marked read-only so the cached instance can be shared.
    """
    x, w = gll_nodes_weights(N)
    D = differentiation_matrix(x)
    for a in (x, w, D):
        a.setflags(write=False)
    return SbpOperator(degree=int(N), nodes=x, weights=w, diff_matrix=D)


def sbp_residual(op: SbpOperator) -> float:
    """Largest entry of ``|M D + D^T M - B|``."""
    Q = op.weights[:, None] * op.diff_matrix
    return float(np.max(np.abs(Q + Q.T - op.boundary_matrix)))


def sbp_symmetric_sum(op: SbpOperator, f: np.ndarray, *, atol: float = 1.0e-13) -> float:
    """Compute ``sum_ij w_i D_ij f_ij`` for a symmetric two-index array.

    Symmetrizing with the SBP property collapses this to ``(f_NN - f_00) / 2``;
    the doubled sum is what the flux-differencing volume term produces.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (op.n, op.n):
        raise ValueError(f"expected shape {(op.n, op.n)}, got {f.shape}")
    asym = np.max(np.abs(f - f.T))
    if asym > atol:
        raise ValueError(f"array is not symmetric (max asymmetry {asym:.3e})")
    return float(np.sum(op.weights[:, None] * op.diff_matrix * f))


def symmetric_sum_residual(op: SbpOperator, f: np.ndarray) -> float:
    """``|2 sum_ij w_i D_ij f_ij - (f_NN - f_00)|`` for symmetric ``f``."""
    f = np.asarray(f, dtype=np.float64)
    return abs(2.0 * sbp_symmetric_sum(op, f) - (f[-1, -1] - f[0, 0]))


def monomial_error(op: SbpOperator) -> float:
    """Max nodal error of ``D`` applied to ``x^k`` for ``k = 0..N``."""
    x = op.nodes
    err = 0.0
    for k in range(op.degree + 1):
        exact = k * x ** (k - 1) if k > 0 else np.zeros_like(x)
        err = max(err, float(np.max(np.abs(op.diff_matrix @ x**k - exact))))
    return err
