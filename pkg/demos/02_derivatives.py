"""Explicit vs compact second derivatives of sin(pi x) on one axis.

Both schemes share the 3-point footprint per row, but the compact scheme
couples the derivative unknowns through a tridiagonal system and gains two
orders of accuracy in the interior.
"""

import numpy as np

from ccpoisson import AxisSpec, build_axis
from ccpoisson.derivative import classical_second_derivative, compact_second_derivative
from ccpoisson.stencils import build_axis_stencils

print(f"{'M':>5} {'explicit max err':>18} {'compact max err':>18} {'ratio':>8}")
prev = None
for m in (8, 16, 32, 64, 128):
    axis = build_axis(AxisSpec(length=1.0, node_count=m + 1))
    st = build_axis_stencils(axis)
    values = np.sin(np.pi * axis.coords)
    exact = -np.pi**2 * np.sin(np.pi * axis.coords)
    lo = classical_second_derivative(values, st)
    hi = compact_second_derivative(values, st)
    err_lo = np.max(np.abs((lo - exact)[1:-1]))
    err_hi = np.max(np.abs((hi - exact)[1:-1]))
    print(f"{m:>5} {err_lo:>18.3e} {err_hi:>18.3e} {err_lo / err_hi:>8.1f}")

print("\nthe explicit error falls ~4x per doubling (second order); the")
print("compact error falls much faster until the boundary rows limit it.")

rng = np.random.default_rng(1)
dx = rng.uniform(0.3, 1.0, size=12)
coords = np.concatenate([[0.0], np.cumsum(dx)])
coords /= coords[-1]
coords[-1] = 1.0
from ccpoisson.grid import Axis

axis = Axis(coords=coords, spacings=np.diff(coords))
st = build_axis_stencils(axis)
d2 = compact_second_derivative(coords**3, st)
print("\non a random non-uniform axis the compact scheme is nodally exact")
print(f"for cubics: max |d2(x^3) - 6x| = {np.max(np.abs(d2 - 6 * coords)):.2e}")
