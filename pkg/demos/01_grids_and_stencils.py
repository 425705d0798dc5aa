"""Grid families and the stencil rows built on them.

Three axis families cover the unit interval: uniform, sinh-stretched
(clusters nodes toward x = 1) and tanh-stretched (clusters toward x = 0).
The second-derivative stencils are derived per node by moment matching, so
they adapt to whatever spacings the axis produces.
"""

import numpy as np

from ccpoisson import AxisSpec, build_axis
from ccpoisson.stencils import build_axis_stencils

M = 10

print("node coordinates on [0, 1], M = 10 intervals, gamma = 1:\n")
axes = {}
for family in ("uniform", "sinh", "tanh"):
    axes[family] = build_axis(AxisSpec(length=1.0, node_count=M + 1, family=family, gamma=1.0))
    print(f"{family:8s}", " ".join(f"{x:.3f}" for x in axes[family].coords))

print("\nspacings (note the direction of clustering):\n")
for family, ax in axes.items():
    print(f"{family:8s}", " ".join(f"{dx:.3f}" for dx in ax.spacings))

print("\ncompact interior rows on the sinh axis (alpha, beta couple the")
print("derivative unknowns; a, b, c weight the function values):\n")
st = build_axis_stencils(axes["sinh"])
print(f"{'node':>4} {'alpha':>9} {'beta':>9} {'a':>11} {'b':>11} {'c':>11}")
for i in range(1, M):
    print(
        f"{i:>4} {st.alpha[i]:>9.4f} {st.beta[i]:>9.4f} "
        f"{st.compact_a[i]:>11.2f} {st.compact_b[i]:>11.2f} {st.compact_c[i]:>11.2f}"
    )

print("\nboundary closures (one-sided, four function values):")
print("  left :", f"beta={st.left.beta:g},", np.round(st.left.weights, 2))
print("  right:", f"beta={st.right.beta:g},", np.round(st.right.weights, 2))

h = axes["uniform"].spacings[0]
st_u = build_axis_stencils(axes["uniform"])
print("\non the uniform axis the interior row collapses to the classic")
print(
    f"alpha = beta = {st_u.alpha[5]:.3f}, a = c = {st_u.compact_a[5]:.1f} "
    f"(= 6/(5h^2)), b = {st_u.compact_b[5]:.1f} (= -12/(5h^2)) at h = {h}"
)
