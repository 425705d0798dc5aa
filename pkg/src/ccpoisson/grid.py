"""Tensor-product grids on [0, L] per axis: uniform, sinh- and tanh-stretched.

Stretched axes follow the one-sided maps

    sinh:  x_i = L * (1 - sinh(g*(1 - xi_i)) / sinh(g))
    tanh:  x_i = L * (1 - tanh(g*(1 - xi_i)) / tanh(g))

with xi_i = i/M uniform on [0, 1] and g > 0 the stretch parameter.  The sinh
map clusters nodes toward x = L (spacing strictly decreasing along the axis),
the tanh map clusters them toward x = 0; both tend pointwise to the uniform
partition as g -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

FAMILIES = ("uniform", "sinh", "tanh")

#: Hard ceiling on the total node count of a grid (guards accidental blow-up
#: when a study is asked for e.g. 200^4 nodes).
DEFAULT_NODE_CAP = 1 << 26


class GridError(ValueError):
    """Invalid axis or grid specification."""


@dataclass(frozen=True)
class AxisSpec:
    """Recipe for one grid axis.

    Parameters
    ----------
    length : float
        Domain extent; the axis covers [0, length].
    node_count : int
        Number of nodes including both endpoints (>= 3, i.e. at least one
        interior node).
    family : str
        One of ``uniform``, ``sinh``, ``tanh``.
    gamma : float
        Stretch parameter for the sinh/tanh families; ignored for uniform.
    """

    length: float
    node_count: int
    family: str = "uniform"
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.length > 0.0 and math.isfinite(self.length)):
            raise GridError(f"length must be a positive finite real, got {self.length}")
        if self.node_count < 3:
            raise GridError(f"node_count must be >= 3, got {self.node_count}")
        if self.family not in FAMILIES:
            raise GridError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.family != "uniform" and not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise GridError(f"gamma must be a positive finite real, got {self.gamma}")

    @property
    def intervals(self) -> int:
        return self.node_count - 1


@dataclass(frozen=True)
class Axis:
    """Node coordinates and spacings of one axis.

    ``coords`` is strictly increasing with coords[0] == 0 and coords[-1] equal
    to the axis length bit-exactly; ``spacings[i] == coords[i+1] - coords[i]``.
    """

    coords: np.ndarray
    spacings: np.ndarray

    def __post_init__(self):
        self.coords.flags.writeable = False
        self.spacings.flags.writeable = False

    @property
    def node_count(self) -> int:
        return self.coords.shape[0]

    @property
    def length(self) -> float:
        return float(self.coords[-1])


def _stretch_map(family: str) -> Callable[[np.ndarray], np.ndarray]:
    return np.sinh if family == "sinh" else np.tanh


def build_axis(spec: AxisSpec) -> Axis:
    """Construct the node coordinates for one axis.

    Endpoints are overwritten with exact 0 and ``length`` after the mapping is
    evaluated, so Dirichlet data is always sampled at exact domain corners.
    """
    m = spec.intervals
    xi = np.arange(spec.node_count, dtype=np.float64) / m
    if spec.family == "uniform":
        coords = spec.length * xi
    else:
        s = _stretch_map(spec.family)
        with np.errstate(over="ignore", invalid="ignore"):
            coords = spec.length * (1.0 - s(spec.gamma * (1.0 - xi)) / s(spec.gamma))
    coords[0] = 0.0
    coords[-1] = spec.length
    if not np.all(np.isfinite(coords)):
        raise GridError(f"axis mapping produced non-finite coordinates (gamma={spec.gamma})")
    spacings = np.diff(coords)
    if np.any(spacings <= 0.0):
        raise GridError(f"axis mapping is not strictly increasing (gamma={spec.gamma})")
    return Axis(coords=coords, spacings=spacings)


@dataclass(frozen=True)
class TensorGrid:
    """n-dimensional tensor-product grid.

    Fields over the grid are stored flat with axis 0 varying fastest, i.e. the
    flat index of multi-index (i_0, ..., i_{n-1}) is
    ``i_0 + n_0*(i_1 + n_1*(i_2 + ...))`` (Fortran order).
    """

    axes: tuple[Axis, ...]

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.node_count for ax in self.axes)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def interior_count(self) -> int:
        return int(np.prod([n - 2 for n in self.shape]))

    @property
    def strides(self) -> tuple[int, ...]:
        out, s = [], 1
        for n in self.shape:
            out.append(s)
            s *= n
        return tuple(out)

    def linear_index(self, multi_index: Sequence[int]) -> int:
        """Flat index of a multi-index (axis 0 fastest)."""
        if len(multi_index) != self.dimension:
            raise GridError(f"multi-index must have length {self.dimension}")
        flat = 0
        for i, n, s in zip(multi_index, self.shape, self.strides):
            if not 0 <= i < n:
                raise GridError(f"index {i} out of range [0, {n})")
            flat += i * s
        return flat

    def multi_index(self, linear: int) -> tuple[int, ...]:
        """Inverse of :meth:`linear_index`."""
        if not 0 <= linear < self.node_count:
            raise GridError(f"flat index {linear} out of range [0, {self.node_count})")
        out = []
        for n in self.shape:
            out.append(linear % n)
            linear //= n
        return tuple(out)

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``self.shape`` ('ij' indexing)."""
        return tuple(np.meshgrid(*(ax.coords for ax in self.axes), indexing="ij"))

    def node_coordinates(self) -> np.ndarray:
        """All node coordinates as an (node_count, dimension) array in flat order."""
        mesh = self.meshgrid()
        return np.column_stack([m.ravel(order="F") for m in mesh])

    def sample(self, func: Callable) -> np.ndarray:
        """Evaluate a vectorized ``func(x0, ..., x_{n-1})`` at every node (flat order)."""
        mesh = self.meshgrid()
        values = np.asarray(func(*mesh), dtype=np.float64)
        return np.broadcast_to(values, self.shape).ravel(order="F").copy()

    def boundary_mask(self) -> np.ndarray:
        """Boolean flat array, True where any axis index is 0 or last."""
        mask = np.zeros(self.shape, dtype=bool)
        for d in range(self.dimension):
            sl_lo = [slice(None)] * self.dimension
            sl_hi = [slice(None)] * self.dimension
            sl_lo[d] = 0
            sl_hi[d] = -1
            mask[tuple(sl_lo)] = True
            mask[tuple(sl_hi)] = True
        return mask.ravel(order="F")


def build_grid(
    specs: Sequence[AxisSpec],
    max_dimension: int = 4,
    node_cap: int = DEFAULT_NODE_CAP,
) -> TensorGrid:
    """Build a tensor-product grid from per-axis specs.

    Raises :class:`GridError` for an empty spec list, more than
    ``max_dimension`` axes, or a total node count above ``node_cap``.
    """
    if len(specs) == 0:
        raise GridError("at least one axis spec is required")
    if len(specs) > max_dimension:
        raise GridError(f"grid dimension {len(specs)} exceeds the configured maximum {max_dimension}")
    total = 1
    for spec in specs:
        total *= spec.node_count
    if total > node_cap:
        raise GridError(f"total node count {total} exceeds the configured cap {node_cap}")
    return TensorGrid(axes=tuple(build_axis(spec) for spec in specs))
