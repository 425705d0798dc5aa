"""Second derivatives of gridded fields, explicit (low) and compact (high).

The 1-D entry points assemble their systems in plain numpy and are the
reference path; :func:`field_second_derivatives` runs the compiled pencil
kernels over a whole n-D field.  Both routes share the same Thomas solver
and the same precomputed stencil rows, and the test suite checks them
against each other and against dense elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import TensorGrid
from .stencils import AxisStencils, StencilSet


class DerivativeError(ValueError):
    """Shape/length mismatch between a field and its stencils."""


class SingularSystemError(RuntimeError):
    """A tridiagonal solve hit a vanishing pivot."""

    def __init__(self, row: int):
        super().__init__(f"tridiagonal elimination hit a vanishing pivot at row {row}")
        self.row = row


@dataclass(frozen=True)
class TridiagonalSystem:
    """Tridiagonal system: lower/upper are one entry shorter than diag/rhs."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = self.diag.shape[0]
        if self.rhs.shape[0] != n or self.lower.shape[0] != n - 1 or self.upper.shape[0] != n - 1:
            raise DerivativeError("inconsistent tridiagonal system sizes")
        if np.any(self.diag == 0.0):
            raise DerivativeError("tridiagonal diagonal contains exact zeros")


def tdma_solve(system: TridiagonalSystem) -> np.ndarray:
    """Solve a tridiagonal system with the Thomas algorithm (O(n))."""
    out = np.empty_like(system.diag)
    bad = _kernels.tdma(
        np.ascontiguousarray(system.lower, dtype=np.float64),
        np.ascontiguousarray(system.diag, dtype=np.float64),
        np.ascontiguousarray(system.upper, dtype=np.float64),
        np.ascontiguousarray(system.rhs, dtype=np.float64),
        out,
    )
    if bad >= 0:
        raise SingularSystemError(bad)
    return out


def classical_second_derivative(values: np.ndarray, stencils: AxisStencils) -> np.ndarray:
    """Explicit 3-point second derivative along one line.

    Returns a full-length array; the two endpoint entries are zero sentinels
    (the explicit scheme is not defined there and nothing downstream reads
    them).
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n != stencils.node_count:
        raise DerivativeError(f"line length {n} does not match stencil set ({stencils.node_count})")
    if n < 3:
        raise DerivativeError("need at least 3 nodes")
    out = np.zeros(n)
    out[1:-1] = (
        stencils.classical_a[1:-1] * values[:-2]
        + stencils.classical_b[1:-1] * values[1:-1]
        + stencils.classical_c[1:-1] * values[2:]
    )
    return out


def compact_system(values: np.ndarray, stencils: AxisStencils) -> TridiagonalSystem:
    """Assemble the implicit compact system whose unknowns are the second
    derivative at every node of one line."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n != stencils.node_count:
        raise DerivativeError(f"line length {n} does not match stencil set ({stencils.node_count})")
    if n < 4:
        raise DerivativeError("compact scheme needs at least 4 nodes")
    lower = np.empty(n - 1)
    diag = np.ones(n)
    upper = np.empty(n - 1)
    rhs = np.empty(n)
    upper[0] = stencils.left.beta
    lower[-1] = stencils.right.beta
    lower[:-1] = stencils.alpha[1:-1]
    upper[1:] = stencils.beta[1:-1]
    wl = stencils.left.weights
    wr = stencils.right.weights
    rhs[0] = wl[0] * values[0] + wl[1] * values[1] + wl[2] * values[2] + wl[3] * values[3]
    rhs[-1] = wr[0] * values[-1] + wr[1] * values[-2] + wr[2] * values[-3] + wr[3] * values[-4]
    rhs[1:-1] = (
        stencils.compact_a[1:-1] * values[:-2]
        + stencils.compact_b[1:-1] * values[1:-1]
        + stencils.compact_c[1:-1] * values[2:]
    )
    return TridiagonalSystem(lower=lower, diag=diag, upper=upper, rhs=rhs)


def compact_second_derivative(values: np.ndarray, stencils: AxisStencils) -> np.ndarray:
    """Compact second derivative along one line, at every node."""
    return tdma_solve(compact_system(values, stencils))


def field_second_derivatives(
    field, grid: TensorGrid, stencils: StencilSet, scheme: str
) -> list[np.ndarray]:
    """Per-axis second-derivative fields of an n-D scalar field.

    ``field`` may be a flat array in the grid's linearization or anything
    with a ``.values`` attribute holding one.  ``scheme`` is ``"low"``
    (explicit; pencil-endpoint entries are zero sentinels) or ``"high"``
    (compact, values at every node).  Returns one flat array per axis.
    """
    values = np.asarray(getattr(field, "values", field), dtype=np.float64)
    if values.shape != (grid.node_count,):
        raise DerivativeError(
            f"field has {values.shape} entries, grid has {grid.node_count} nodes"
        )
    if scheme not in ("low", "high"):
        raise DerivativeError(f"scheme must be 'low' or 'high', got {scheme!r}")
    shape = np.asarray(grid.shape, dtype=np.int64)
    strides = np.asarray(grid.strides, dtype=np.int64)
    out = []
    for d in range(grid.dimension):
        ax = stencils.for_axis(d)
        deriv = np.empty_like(values)
        if scheme == "low":
            _kernels.axis_low(
                values, deriv, shape, strides, d, ax.classical_a, ax.classical_b, ax.classical_c
            )
        else:
            bad = _kernels.axis_high(
                values,
                deriv,
                shape,
                strides,
                d,
                ax.alpha,
                ax.beta,
                ax.compact_a,
                ax.compact_b,
                ax.compact_c,
                ax.left.beta,
                np.asarray(ax.left.weights),
                ax.right.beta,
                np.asarray(ax.right.weights),
            )
            if bad >= 0:
                raise SingularSystemError(bad)
        out.append(deriv)
    return out
