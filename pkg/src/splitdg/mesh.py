"""Uniform periodic tensor-product meshes.

A nodal field in ``dim`` dimensions is stored as an array of shape::

    (cells[0], n, cells[1], n, ..., 5)

with ``n = N + 1`` GLL nodes per axis, i.e. the element index and node index
of every axis sit next to each other.  Reshaping to
``(A, cells[a], n, B, 5)`` then exposes the tensor lines along axis ``a``
without copying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .sbp import SbpOperator


@dataclass(frozen=True)
class Mesh:
    cells: tuple[int, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if not 1 <= len(self.cells) <= 3:
            raise ValueError("mesh dimension must be 1, 2 or 3")
        if not len(self.cells) == len(self.lo) == len(self.hi):
            raise ValueError("cells, lo and hi must have the same length")
        if any(int(c) != c or c < 1 for c in self.cells):
            raise ValueError(f"need at least one cell per axis, got {self.cells}")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("domain bounds must satisfy hi > lo")

    @classmethod
    def uniform(cls, cells: int | Sequence[int], lo: float | Sequence[float], hi: float | Sequence[float], dim: int | None = None) -> "Mesh":
        if dim is None:
            dim = len(cells) if isinstance(cells, Sequence) else 1
        cells = tuple(int(c) for c in np.broadcast_to(cells, (dim,)))
        lo = tuple(float(x) for x in np.broadcast_to(lo, (dim,)))
        hi = tuple(float(x) for x in np.broadcast_to(hi, (dim,)))
        return cls(cells, lo, hi)

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def dx(self) -> tuple[float, ...]:
        return tuple((h - l) / c for l, h, c in zip(self.lo, self.hi, self.cells))

    @property
    def periodic(self) -> tuple[bool, ...]:
        return (True,) * self.dim

    @property
    def volume(self) -> float:
        return float(np.prod([h - l for l, h in zip(self.lo, self.hi)]))

    def field_shape(self, op: SbpOperator, nvars: int = 5) -> tuple[int, ...]:
        shape: list[int] = []
        for c in self.cells:
            shape += [c, op.n]
        return tuple(shape) + (nvars,)

    def axis_coordinates(self, op: SbpOperator, axis: int) -> np.ndarray:
        """Node coordinates along ``axis``, shape ``(cells[axis], n)``."""
        left = self.lo[axis] + self.dx[axis] * np.arange(self.cells[axis])
        return left[:, None] + 0.5 * self.dx[axis] * (op.nodes[None, :] + 1.0)

    def coordinates(self, op: SbpOperator) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis, matching the field layout."""
        out = []
        for a in range(self.dim):
            shape = [1] * (2 * self.dim)
            shape[2 * a] = self.cells[a]
            shape[2 * a + 1] = op.n
            out.append(self.axis_coordinates(op, a).reshape(shape))
        return out

    def quadrature_weights(self, op: SbpOperator) -> np.ndarray:
        """Tensor GLL weights times the element Jacobian, shape of the field minus the variable axis."""
        W = np.ones((1,) * (2 * self.dim))
        for a in range(self.dim):
            shape = [1] * (2 * self.dim)
            shape[2 * a + 1] = op.n
            wa = (0.5 * self.dx[a] * op.weights).reshape(shape)
            W = W * wa
        return np.broadcast_to(W, self.field_shape(op)[:-1])

    def line_shape(self, op: SbpOperator, axis: int, nvars: int = 5) -> tuple[int, int, int, int, int]:
        """Shape ``(A, cells[axis], n, B, nvars)`` exposing tensor lines along ``axis``."""
        full = self.field_shape(op, nvars)
        A = int(np.prod(full[: 2 * axis], dtype=np.int64))
        B = int(np.prod(full[2 * axis + 2 : -1], dtype=np.int64))
        return (A, self.cells[axis], op.n, B, nvars)

    def shift_elements(self, U: np.ndarray, shifts: Sequence[int]) -> np.ndarray:
        """Periodic shift of a field by whole elements along each axis."""
        out = U
        for a, s in enumerate(shifts):
            out = np.roll(out, s, axis=2 * a)
        return out
