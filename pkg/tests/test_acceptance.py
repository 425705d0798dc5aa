"""Acceptance suite: reproduction targets and oracle checks, one test per
criterion, each printing a PASS/FAIL line (run with ``pytest -v -s`` to see
them as they complete).  The reference error values and convergence orders
come from the published study this package reproduces; tolerances are
factor-style windows around them.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from ccpoisson.benchmark import (
    benchmark_config,
    compute_errors,
    convergence_order,
    gamma_sweep,
    problem_catalog,
    study_grid,
)
from ccpoisson.derivative import (
    TridiagonalSystem,
    compact_second_derivative,
    tdma_solve,
)
from ccpoisson.grid import Axis
from ccpoisson.solver import (
    PoissonProblem,
    assemble_operator,
    gauss_seidel_solve,
    solve_ccfdm,
    solve_fdm,
)
from ccpoisson.stencils import (
    build_axis_stencils,
    classical_coeffs,
    compact_interior_coeffs,
    taylor_match,
)

REPO_ROOT = Path(__file__).resolve().parents[1]

#: Every report produced by the desk-scale reproduction runs, for criterion 8.
ALL_REPORTS = []


def _announce(criterion: int, ok: bool, detail: str) -> None:
    print(f"\n[acceptance {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")


def within_factor(value: float, reference: float, factor: float) -> bool:
    return reference / factor <= value <= reference * factor


def run_cell(pid, family, gamma, m, method):
    grid = study_grid(pid, family, gamma, m)
    problem = problem_catalog(pid)
    cfg = benchmark_config()
    report = solve_fdm(problem, grid, cfg) if method == "fdm" else solve_ccfdm(problem, grid, cfg)
    ALL_REPORTS.append(report)
    return compute_errors(report.solution, problem, grid)


@pytest.fixture(scope="module")
def table1():
    t0 = time.perf_counter()
    fdm = {m: run_cell(1, "uniform", 1.0, m, "fdm") for m in (10, 20, 40, 80)}
    ccfdm = {m: run_cell(1, "uniform", 1.0, m, "ccfdm") for m in (10, 20, 40, 80)}
    return fdm, ccfdm, time.perf_counter() - t0


@pytest.fixture(scope="module")
def table2():
    t0 = time.perf_counter()
    out = {
        (method, family): run_cell(2, family, 1.0, 40, method)
        for method in ("fdm", "ccfdm")
        for family in ("sinh", "uniform", "tanh")
    }
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def table3():
    t0 = time.perf_counter()
    stretched = {m: run_cell(3, "tanh", 1.1, m, "ccfdm") for m in (10, 20, 40)}
    uniform = {m: run_cell(3, "uniform", 1.0, m, "ccfdm") for m in (10, 20, 40)}
    return stretched, uniform, time.perf_counter() - t0


@pytest.fixture(scope="module")
def table4():
    t0 = time.perf_counter()
    fdm = {m: run_cell(4, "sinh", 1.0, m, "fdm") for m in (10, 20)}
    ccfdm = {m: run_cell(4, "sinh", 1.0, m, "ccfdm") for m in (10, 20)}
    return fdm, ccfdm, time.perf_counter() - t0


def test_criterion_1_table1(table1):
    fdm, ccfdm, elapsed = table1
    fdm_ref = {10: 2.76e-3, 20: 6.91e-4, 40: 1.73e-4, 80: 4.33e-5}
    cc_ref = {10: 5.19e-4, 20: 3.91e-5, 40: 2.66e-6, 80: 1.72e-7}
    ok = all(within_factor(fdm[m].e_max, fdm_ref[m], 1.5) for m in fdm_ref)
    for a, b in ((10, 20), (20, 40), (40, 80)):
        order = convergence_order(fdm[a].e_max, fdm[b].e_max, a, b)
        ok = ok and abs(order - 2.0) <= 0.2
    ok = ok and all(within_factor(ccfdm[m].e_max, cc_ref[m], 2.0) for m in cc_ref)
    final_order = convergence_order(ccfdm[40].e_max, ccfdm[80].e_max, 40, 80)
    ok = ok and abs(final_order - 4.0) <= 0.3
    ok = ok and elapsed < 60.0
    _announce(
        1,
        ok,
        f"2-D uniform study: FDM e_max x{fdm[10].e_max / fdm_ref[10]:.2f} of reference, "
        f"CCFDM final order {final_order:.2f}, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_2_table2(table2):
    out, elapsed = table2
    fdm_ref = {"sinh": 1.917e-5, "uniform": 2.248e-5, "tanh": 9.391e-5}
    ok = True
    for method in ("fdm", "ccfdm"):
        e = {fam: out[(method, fam)].e_max for fam in ("sinh", "uniform", "tanh")}
        ok = ok and e["sinh"] < e["uniform"] < e["tanh"]
    ok = ok and all(
        within_factor(out[("fdm", fam)].e_max, fdm_ref[fam], 1.5) for fam in fdm_ref
    )
    ok = ok and elapsed < 30.0
    _announce(
        2,
        ok,
        "grid-family ordering sinh < uniform < tanh holds for both methods, "
        f"FDM values on reference, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_3_table3(table3):
    stretched, uniform, elapsed = table3
    ref = {10: 3.02e-4, 20: 2.63e-5, 40: 1.94e-6}
    ok = all(within_factor(stretched[m].e_max, ref[m], 2.0) for m in ref)
    orders = [
        convergence_order(stretched[a].e_ave, stretched[b].e_ave, a, b)
        for a, b in ((10, 20), (20, 40))
    ]
    ok = ok and all(abs(o - 4.0) <= 0.3 for o in orders)
    ok = ok and all(stretched[m].e_max < uniform[m].e_max for m in ref)
    ok = ok and elapsed < 300.0
    _announce(
        3,
        ok,
        f"3-D stretched study: e_ave orders {orders[0]:.2f}/{orders[1]:.2f}, "
        f"stretched beats uniform at every level, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_4_table4(table4):
    fdm, ccfdm, elapsed = table4
    ref = {10: 1.55e-4, 20: 1.19e-5}
    cc_order = convergence_order(ccfdm[10].e_ave, ccfdm[20].e_ave, 10, 20)
    fdm_order = convergence_order(fdm[10].e_ave, fdm[20].e_ave, 10, 20)
    ok = all(within_factor(ccfdm[m].e_max, ref[m], 2.0) for m in ref)
    ok = ok and abs(cc_order - 4.0) <= 0.3
    ok = ok and abs(fdm_order - 2.2) <= 0.3
    ok = ok and elapsed < 600.0
    _announce(
        4,
        ok,
        f"4-D study: CCFDM e_ave order {cc_order:.2f}, FDM e_ave order {fdm_order:.2f}, "
        f"{elapsed:.1f}s",
    )
    assert ok


def test_criterion_5_gamma_sweep():
    t0 = time.perf_counter()
    gammas = [0.01] + [round(0.05 * k, 2) for k in range(1, 21)]
    curves = {}
    for method in ("fdm", "ccfdm"):
        pts = gamma_sweep(2, method, "sinh", 40, gammas)
        curves[method] = (
            np.array([p.gamma for p in pts]),
            np.array([p.e_ave for p in pts]),
        )
    g_f, e_f = curves["fdm"]
    g_c, e_c = curves["ccfdm"]
    min_f = g_f[np.argmin(e_f)]
    min_c = g_c[np.argmin(e_c)]
    range_ratio = np.ptp(e_f) / np.ptp(e_c)
    ok = abs(min_f - 0.75) <= 0.2 and abs(min_c - 0.6) <= 0.2 and range_ratio >= 100.0
    elapsed = time.perf_counter() - t0
    _announce(
        5,
        ok,
        f"gamma sweep minima at {min_f:g} (2nd-order) / {min_c:g} (corrected), "
        f"range ratio {range_ratio:.0f}, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_6_stencil_oracles():
    rng = np.random.default_rng(2024)
    ok = True
    for _ in range(1000):
        dxl, dxr = rng.uniform(1e-3, 1.0, size=2)
        cl = classical_coeffs(dxl, dxr)
        _, v = taylor_match((0,), (-1, 0, 1), {-1: -dxl, 0: 0.0, 1: dxr})
        ok = ok and np.allclose([cl.a, cl.b, cl.c], v, rtol=1e-10, atol=0.0)

    h = 0.37
    row = compact_interior_coeffs(h, h)
    golden = (0.1, 0.1, 6.0 / (5 * h * h), -12.0 / (5 * h * h), 6.0 / (5 * h * h))
    ok = ok and np.allclose(
        [row.alpha, row.beta, row.a, row.b, row.c], golden, rtol=1e-11
    )

    from ccpoisson.stencils import compact_boundary_coeffs, moment_residuals

    max_res = 0.0
    for _ in range(200):
        dxl, dxr, dx3 = rng.uniform(1e-3, 1.0, size=3)
        irow = compact_interior_coeffs(dxl, dxr)
        res_i = moment_residuals(
            (-1, 0, 1), (-1, 0, 1), {-1: -dxl, 0: 0.0, 1: dxr},
            (irow.alpha, 1.0, irow.beta), (irow.a, irow.b, irow.c), max_order=4,
        )
        brow = compact_boundary_coeffs(dxl, dxr, dx3)
        res_b = moment_residuals(
            (0,), (0, 1, 2, 3),
            {0: 0.0, 1: dxl, 2: dxl + dxr, 3: dxl + dxr + dx3},
            (1.0,), brow.weights, max_order=3,
        )
        max_res = max(max_res, res_i.max(), res_b.max())
    ok = ok and max_res <= 1e-12

    errata = REPO_ROOT / "COEFFICIENT_ERRATA.md"
    ok = ok and errata.is_file()
    if errata.is_file():
        text = errata.read_text()
        for marker in ("-12/(5h^2)", "d1 = d2", "(2, -5, 4, -1)/h^2", "exp(x + y + z + u)"):
            ok = ok and marker in text

    _announce(6, ok, f"stencil oracles agree; max moment residual {max_res:.2e}; errata present")
    assert ok


def test_criterion_7_kernel_oracles():
    rng = np.random.default_rng(7)
    ok = True
    for _ in range(100):
        n = 50
        lower = rng.normal(size=n - 1)
        upper = rng.normal(size=n - 1)
        diag = np.abs(rng.normal(size=n)) + 3.0 + np.abs(np.r_[0.0, lower]) + np.abs(np.r_[upper, 0.0])
        rhs = rng.normal(size=n)
        sys = TridiagonalSystem(lower, diag, upper, rhs)
        dense = np.linalg.solve(
            np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1), rhs
        )
        ok = ok and np.allclose(tdma_solve(sys), dense, rtol=1e-10, atol=1e-12)

    worst_cubic = 0.0
    worst_quad = 0.0
    for _ in range(25):
        n = int(rng.integers(5, 14))
        dx = rng.uniform(0.2, 1.0, size=n - 1)
        coords = np.concatenate([[0.0], np.cumsum(dx)])
        coords /= coords[-1]
        coords[-1] = 1.0
        axis = Axis(coords=coords, spacings=np.diff(coords))
        st = build_axis_stencils(axis)
        d2 = compact_second_derivative(coords**3, st)
        worst_cubic = max(worst_cubic, np.max(np.abs(d2 - 6.0 * coords)))
        from ccpoisson.derivative import classical_second_derivative

        dlow = classical_second_derivative(coords**2, st)
        worst_quad = max(worst_quad, np.max(np.abs(dlow[1:-1] - 2.0)))
    ok = ok and worst_cubic <= 1e-9 and worst_quad <= 1e-10

    _announce(
        7,
        ok,
        f"TDMA == dense on 100 systems; cubic defect {worst_cubic:.1e}, "
        f"quadratic defect {worst_quad:.1e}",
    )
    assert ok


def test_criterion_8_solver_properties(table1, table2, table3, table4):
    rng = np.random.default_rng(11)
    ok = True

    # discrete maximum principle for f == 0
    grid = study_grid(1, "sinh", 1.2, 12)
    prob = PoissonProblem(
        forcing=lambda x, y: np.zeros_like(x), dirichlet=lambda x, y: np.cos(3 * x) + y
    )
    coeffs = assemble_operator(grid, prob)
    gvals = grid.sample(prob.dirichlet)
    inner = gauss_seidel_solve(coeffs, gvals)
    mask = grid.boundary_mask()
    lo, hi = gvals[mask].min(), gvals[mask].max()
    ok = ok and inner.field.values[~mask].min() >= lo - 1e-10
    ok = ok and inner.field.values[~mask].max() <= hi + 1e-10

    # explicit zero correction source changes nothing, bit for bit
    grid2 = study_grid(2, "tanh", 0.9, 10)
    prob2 = problem_catalog(2)
    coeffs2 = assemble_operator(grid2, prob2)
    g2 = grid2.sample(prob2.dirichlet)
    plain = gauss_seidel_solve(coeffs2, g2, None)
    zeroed = gauss_seidel_solve(coeffs2, g2, np.zeros(grid2.node_count))
    ok = ok and plain.field.values.tobytes() == zeroed.field.values.tobytes()

    # the 1e-14 stopping tolerance was genuinely reached on every desk-scale
    # reproduction run above
    n_reports = len(ALL_REPORTS)
    converged = all(r.converged for r in ALL_REPORTS)
    final_ok = all(r.residual_history[-1] <= 1e-14 for r in ALL_REPORTS)
    ok = ok and n_reports >= 24 and converged and final_ok

    _announce(
        8,
        ok,
        f"max principle, zero-correction identity, and 1e-14 stopping on all "
        f"{n_reports} desk-scale runs",
    )
    assert ok
