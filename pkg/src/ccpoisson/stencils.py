"""Second-derivative stencil coefficients on non-uniform spacings.

Two families are provided:

* the explicit 3-point scheme (second order), in closed form, and
* the implicit compact scheme (fourth-order interior rows plus one-sided
  boundary rows), derived numerically by moment matching: the coefficients
  are the unique solution of the square linear system that makes the stencil
  exact on monomials ``(x - x0)^m`` up to the number of free weights.

Moment matching is the source of truth here; closed forms printed in the
literature for these schemes contain typos (see COEFFICIENT_ERRATA.md at the
repository root) and are only used as cross-checks in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .grid import Axis, TensorGrid


class StencilError(ValueError):
    """Invalid stencil request (bad spacing, inconsistent sizes, ...)."""


class DegenerateStencilError(StencilError):
    """The moment system for a requested stencil shape is (near-)singular."""


# ---------------------------------------------------------------------------
# moment matching
# ---------------------------------------------------------------------------


def taylor_match(
    implicit_offsets: Sequence[int],
    explicit_offsets: Sequence[int],
    node_positions: Mapping[int, float],
    normalized_offset: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Derive stencil weights by matching monomials.

    The stencil approximates the second derivative at the node with offset
    ``normalized_offset`` (implicit weight pinned to 1):

        sum_j w_j f''(z_j)  =  sum_k v_k f(z_k)

    with ``z`` the positions from ``node_positions`` (relative coordinates;
    the evaluation node must sit at position 0).  The remaining weights are
    the solution of the square system that zeroes the residual for monomials
    ``x^m``, m = 0 .. (#unknowns - 1).

    Returns ``(implicit_weights, explicit_weights)`` aligned with the offset
    sequences.  Raises :class:`DegenerateStencilError` (with a condition
    estimate) when the moment matrix is singular or too ill-conditioned to
    solve reliably.
    """
    implicit_offsets = list(implicit_offsets)
    explicit_offsets = list(explicit_offsets)
    if normalized_offset not in implicit_offsets:
        raise StencilError("normalized_offset must be one of the implicit offsets")
    z_imp = np.array([node_positions[o] for o in implicit_offsets], dtype=np.float64)
    z_exp = np.array([node_positions[o] for o in explicit_offsets], dtype=np.float64)
    if len(set(explicit_offsets)) != len(explicit_offsets) or len(set(implicit_offsets)) != len(
        implicit_offsets
    ):
        raise StencilError("stencil offsets must be distinct")

    pivot = implicit_offsets.index(normalized_offset)
    free_imp = [j for j in range(len(implicit_offsets)) if j != pivot]
    n_unknowns = len(free_imp) + len(explicit_offsets)

    # Nondimensionalize positions so extreme spacing ratios stay solvable.
    scale = max(float(np.max(np.abs(z_imp), initial=0.0)), float(np.max(np.abs(z_exp))))
    if scale <= 0.0:
        raise StencilError("node positions are all zero")
    zi = z_imp / scale
    ze = z_exp / scale

    def d2_monomial(m: int, z: np.ndarray) -> np.ndarray:
        if m < 2:
            return np.zeros_like(z)
        return m * (m - 1) * z ** (m - 2)

    rows = []
    rhs = []
    for m in range(n_unknowns):
        row = np.concatenate([d2_monomial(m, zi[free_imp]), -(ze**m)])
        rows.append(row)
        rhs.append(-d2_monomial(m, zi[pivot : pivot + 1])[0])
    a_mat = np.array(rows)
    b_vec = np.array(rhs)

    try:
        cond = np.linalg.cond(a_mat)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > 1e13:
        raise DegenerateStencilError(
            f"moment matrix is singular or near-singular (condition estimate {cond:.3e})"
        )
    x = np.linalg.solve(a_mat, b_vec)
    # Two rounds of iterative refinement recover forward accuracy lost to the
    # Vandermonde-like conditioning of the moment matrix.
    for _ in range(2):
        x = x + np.linalg.solve(a_mat, b_vec - a_mat @ x)

    residual = np.max(np.abs(a_mat @ x - b_vec)) / max(1.0, np.max(np.abs(b_vec)))
    if residual > 1e-9:
        raise DegenerateStencilError(
            f"moment system residual {residual:.3e} too large (condition estimate {cond:.3e})"
        )

    w_imp = np.empty(len(implicit_offsets))
    w_imp[pivot] = 1.0
    w_imp[free_imp] = x[: len(free_imp)]
    v_exp = x[len(free_imp) :] / scale**2
    return w_imp, v_exp


def moment_residuals(
    implicit_offsets: Sequence[int],
    explicit_offsets: Sequence[int],
    node_positions: Mapping[int, float],
    implicit_weights: Sequence[float],
    explicit_weights: Sequence[float],
    max_order: int,
) -> np.ndarray:
    """Normalized residuals of the moment conditions for m = 0 .. max_order.

    Each entry is |lhs - rhs| / max(term magnitudes, 1), so a value of 1e-12
    means the condition holds to 12 digits relative to its largest term.
    """
    z_imp = np.array([node_positions[o] for o in implicit_offsets], dtype=np.float64)
    z_exp = np.array([node_positions[o] for o in explicit_offsets], dtype=np.float64)
    w = np.asarray(implicit_weights, dtype=np.float64)
    v = np.asarray(explicit_weights, dtype=np.float64)
    out = np.empty(max_order + 1)
    for m in range(max_order + 1):
        d2 = np.zeros_like(z_imp) if m < 2 else m * (m - 1) * z_imp ** (m - 2)
        lhs_terms = w * d2
        rhs_terms = v * z_exp**m
        scale = max(np.max(np.abs(lhs_terms), initial=0.0), np.max(np.abs(rhs_terms)), 1.0)
        out[m] = abs(lhs_terms.sum() - rhs_terms.sum()) / scale
    return out


# ---------------------------------------------------------------------------
# coefficient rows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalCoeffs:
    """Explicit 3-point second-derivative weights (units 1/length^2)."""

    a: float  # weight of f_{i-1}
    b: float  # weight of f_i
    c: float  # weight of f_{i+1}


@dataclass(frozen=True)
class CompactInteriorRow:
    """One interior row of the implicit compact scheme.

    ``alpha``/``beta`` weight the second derivative at the left/right
    neighbor (the derivative at the node itself has weight 1); ``a, b, c``
    weight the function values.
    """

    alpha: float
    beta: float
    a: float
    b: float
    c: float


@dataclass(frozen=True)
class CompactBoundaryRow:
    """One-sided closure row at an axis endpoint.

    ``beta`` weights the second derivative at the adjacent interior node
    (zero for the closure shipped here, kept so the row slots into the
    tridiagonal assembly unchanged); ``weights`` holds the four
    function-value weights ordered from the boundary node inward.  Four
    values are required: with only three the moment system is singular
    whenever the first two spacings are equal (see COEFFICIENT_ERRATA.md).
    """

    beta: float
    weights: tuple[float, float, float, float]


def _check_spacings(*dx: float) -> None:
    for v in dx:
        if not (v > 0.0 and np.isfinite(v)):
            raise StencilError(f"spacings must be positive finite reals, got {v}")


def classical_coeffs(dx_left: float, dx_right: float) -> ClassicalCoeffs:
    """Explicit 3-point weights for the second derivative.

    a = 2/(dxl*(dxl+dxr)), b = -2/(dxl*dxr), c = 2/(dxr*(dxl+dxr)); exact on
    quadratics for any positive spacings.
    """
    _check_spacings(dx_left, dx_right)
    total = dx_left + dx_right
    return ClassicalCoeffs(
        a=2.0 / (dx_left * total),
        b=-2.0 / (dx_left * dx_right),
        c=2.0 / (dx_right * total),
    )


def compact_interior_coeffs(dx_left: float, dx_right: float) -> CompactInteriorRow:
    """Interior compact row from the five moment conditions m = 0..4.

    On uniform spacing h this reduces to alpha = beta = 1/10,
    a = c = 6/(5 h^2), b = -12/(5 h^2).
    """
    _check_spacings(dx_left, dx_right)
    positions = {-1: -dx_left, 0: 0.0, 1: dx_right}
    w, v = taylor_match((-1, 0, 1), (-1, 0, 1), positions)
    return CompactInteriorRow(alpha=w[0], beta=w[2], a=v[0], b=v[1], c=v[2])


def compact_boundary_coeffs(
    dx1: float, dx2: float, dx3: float, side: str = "left"
) -> CompactBoundaryRow:
    """One-sided explicit boundary row from the moment conditions m = 0..3.

    ``dx1, dx2, dx3`` are the first three spacings counted from the boundary
    inward.  On uniform spacing h the weights reduce to (2, -5, 4, -1)/h^2.
    The row is exact on cubics, one matchable order below the interior rows;
    driving the closure any higher produces solutions markedly more accurate
    than the reference results this package reproduces (COEFFICIENT_ERRATA.md
    discusses the trade-off).  The right row is the mirror image of the left
    one (offsets negated), so equal spacings give identical coefficients for
    both sides.
    """
    _check_spacings(dx1, dx2, dx3)
    if side not in ("left", "right"):
        raise StencilError(f"side must be 'left' or 'right', got {side!r}")
    sign = 1.0 if side == "left" else -1.0
    positions = {
        0: 0.0,
        1: sign * dx1,
        2: sign * (dx1 + dx2),
        3: sign * (dx1 + dx2 + dx3),
    }
    _, v = taylor_match((0,), (0, 1, 2, 3), positions)
    return CompactBoundaryRow(beta=0.0, weights=(v[0], v[1], v[2], v[3]))


# ---------------------------------------------------------------------------
# per-axis coefficient cache
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxisStencils:
    """All stencil rows of one axis, stored as arrays indexed by node.

    Classical and compact interior entries are valid at interior nodes
    1..M-1; index 0 and M of those arrays are zero padding.
    """

    classical_a: np.ndarray
    classical_b: np.ndarray
    classical_c: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    compact_a: np.ndarray
    compact_b: np.ndarray
    compact_c: np.ndarray
    left: CompactBoundaryRow
    right: CompactBoundaryRow

    @property
    def node_count(self) -> int:
        return self.classical_a.shape[0]


def build_axis_stencils(axis: Axis) -> AxisStencils:
    """Precompute every stencil row for one axis.

    Needs at least 4 nodes (the boundary closures reach three spacings in
    from each end).
    """
    n = axis.node_count
    if n < 4:
        raise StencilError(f"compact stencils need at least 4 nodes per axis, got {n}")
    dx = axis.spacings
    cl_a = np.zeros(n)
    cl_b = np.zeros(n)
    cl_c = np.zeros(n)
    al = np.zeros(n)
    be = np.zeros(n)
    ca = np.zeros(n)
    cb = np.zeros(n)
    cc = np.zeros(n)
    for i in range(1, n - 1):
        cl = classical_coeffs(dx[i - 1], dx[i])
        cl_a[i], cl_b[i], cl_c[i] = cl.a, cl.b, cl.c
        row = compact_interior_coeffs(dx[i - 1], dx[i])
        al[i], be[i] = row.alpha, row.beta
        ca[i], cb[i], cc[i] = row.a, row.b, row.c
    left = compact_boundary_coeffs(dx[0], dx[1], dx[2], side="left")
    right = compact_boundary_coeffs(dx[-1], dx[-2], dx[-3], side="right")
    return AxisStencils(
        classical_a=cl_a,
        classical_b=cl_b,
        classical_c=cl_c,
        alpha=al,
        beta=be,
        compact_a=ca,
        compact_b=cb,
        compact_c=cc,
        left=left,
        right=right,
    )


@dataclass(frozen=True)
class StencilSet:
    """Per-axis stencil caches for a whole grid."""

    per_axis: tuple[AxisStencils, ...]

    def for_axis(self, d: int) -> AxisStencils:
        return self.per_axis[d]


def build_stencil_set(grid: TensorGrid) -> StencilSet:
    return StencilSet(per_axis=tuple(build_axis_stencils(ax) for ax in grid.axes))
