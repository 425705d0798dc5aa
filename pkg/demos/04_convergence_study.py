"""Refinement studies: observed convergence orders of both methods.

Runs the 2-D sine/cosine problem over a doubling sequence of grids and
tabulates maximum/mean errors with the observed order between consecutive
levels; then a smaller 3-D study on a tanh-stretched grid, which beats the
uniform grid by an order of magnitude at equal node counts because the
solution's sharp layer sits where the nodes cluster.
"""

from ccpoisson import StudySpec, run_study

print("2-D problem, uniform grids, both methods:\n")
for method in ("fdm", "ccfdm"):
    result = run_study(StudySpec(problem_id=1, method=method, levels=(10, 20, 40)))
    print(result.format_table())
    print()

print("3-D boundary-layer problem, tanh-stretched (gamma=1.1) vs uniform:\n")
for family, gamma in (("tanh", 1.1), ("uniform", 1.0)):
    result = run_study(
        StudySpec(problem_id=3, method="ccfdm", levels=(10, 20), family=family, gamma=gamma)
    )
    print(result.format_table())
    print()

print("the second-order method holds order ~2, the corrected one ~4, and")
print("the stretched grid wins wherever the solution varies fastest.")
