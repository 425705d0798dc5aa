import json

import numpy as np
import pytest

from ccpoisson.benchmark import (
    BenchmarkError,
    ErrorReport,
    StudySpec,
    benchmark_config,
    compute_errors,
    convergence_order,
    gamma_sweep,
    problem_catalog,
    run_study,
    study_grid,
)
from ccpoisson.solver import ScalarField, SolverConfig


class TestProblemCatalog:
    def test_problem1_point_value(self):
        prob = problem_catalog(1)
        assert prob.exact(0.5, 0.0) == pytest.approx(1.0, rel=1e-14)

    def test_problem4_origin(self):
        prob = problem_catalog(4)
        assert prob.exact(0.0, 0.0, 0.0, 0.0) == pytest.approx(1.0)
        assert prob.forcing(0.0, 0.0, 0.0, 0.0) == pytest.approx(4.0)

    def test_unknown_id(self):
        with pytest.raises(BenchmarkError, match="unknown problem id"):
            problem_catalog(5)

    @pytest.mark.parametrize("pid", [1, 2, 3, 4])
    def test_forcing_is_laplacian_of_exact(self, pid):
        # finite-difference Laplacian of the exact solution vs the forcing
        prob = problem_catalog(pid)
        ndim = {1: 2, 2: 2, 3: 3, 4: 4}[pid]
        rng = np.random.default_rng(pid)
        h = 1e-4
        for _ in range(10):
            pt = rng.uniform(0.2, 0.8, size=ndim)
            lap = 0.0
            for d in range(ndim):
                plus = pt.copy()
                minus = pt.copy()
                plus[d] += h
                minus[d] -= h
                lap += (prob.exact(*plus) - 2 * prob.exact(*pt) + prob.exact(*minus)) / h**2
            assert lap == pytest.approx(prob.forcing(*pt), rel=1e-5, abs=1e-5)

    def test_dirichlet_equals_exact(self):
        prob = problem_catalog(2)
        assert prob.dirichlet(0.3, 1.0) == prob.exact(0.3, 1.0)


class TestStudyGrid:
    def test_problem3_stretches_only_xy(self):
        grid = study_grid(3, "tanh", 1.1, 8)
        # stretched axes are non-uniform, z stays uniform
        assert np.ptp(grid.axes[0].spacings) > 1e-3
        assert np.ptp(grid.axes[1].spacings) > 1e-3
        np.testing.assert_allclose(grid.axes[2].spacings, 0.125, rtol=1e-12)

    def test_problem4_stretches_all(self):
        grid = study_grid(4, "sinh", 1.0, 6)
        for ax in grid.axes:
            assert np.ptp(ax.spacings) > 1e-4

    def test_uniform_family(self):
        grid = study_grid(1, "uniform", 1.0, 10)
        for ax in grid.axes:
            np.testing.assert_allclose(ax.spacings, 0.1, rtol=1e-12)


class TestComputeErrors:
    def test_exact_solution_gives_zero(self):
        grid = study_grid(1, "uniform", 1.0, 6)
        prob = problem_catalog(1)
        sol = ScalarField.from_function(grid, prob.exact)
        rep = compute_errors(sol, prob, grid)
        assert rep.e_max == 0.0
        assert rep.e_ave == 0.0

    def test_single_node_perturbation(self):
        grid = study_grid(1, "uniform", 1.0, 10)  # 121 nodes, 81 interior
        prob = problem_catalog(1)
        sol = ScalarField.from_function(grid, prob.exact)
        sol.values[grid.linear_index((5, 5))] += 1e-3
        rep = compute_errors(sol, prob, grid)
        assert rep.e_max == pytest.approx(1e-3, rel=1e-12)
        assert rep.e_ave == pytest.approx(1e-3 / grid.interior_count, rel=1e-12)

    def test_e_ave_le_e_max(self):
        grid = study_grid(2, "sinh", 1.0, 8)
        prob = problem_catalog(2)
        from ccpoisson.solver import solve_fdm

        rep = compute_errors(solve_fdm(prob, grid).solution, prob, grid)
        assert 0.0 < rep.e_ave <= rep.e_max

    def test_requires_exact(self):
        grid = study_grid(1, "uniform", 1.0, 6)
        from ccpoisson.solver import PoissonProblem

        prob = PoissonProblem(forcing=lambda x, y: x, dirichlet=lambda x, y: x)
        sol = ScalarField.zeros(grid)
        with pytest.raises(BenchmarkError, match="exact"):
            compute_errors(sol, prob, grid)


class TestConvergenceOrder:
    def test_factor_four_under_doubling(self):
        assert convergence_order(4.0e-3, 1.0e-3, 10, 20) == pytest.approx(2.0, rel=1e-12)

    def test_reference_pair(self):
        # published pair for the 2-D benchmark: 2.76e-3 -> 6.91e-4 is order 2.0
        assert round(convergence_order(2.76e-3, 6.91e-4, 10, 20), 1) == 2.0

    def test_non_doubling_refinement(self):
        # 20 -> 30 refinement from the 4-D study rounds to 2.0
        assert convergence_order(2.77e-4, 1.23e-4, 20, 30) == pytest.approx(2.0, abs=0.05)

    def test_validation(self):
        with pytest.raises(BenchmarkError, match="positive"):
            convergence_order(0.0, 1e-3, 10, 20)
        with pytest.raises(BenchmarkError, match="n_fine"):
            convergence_order(1e-2, 1e-3, 20, 10)


class TestRunStudy:
    def test_single_level_no_orders(self):
        res = run_study(StudySpec(problem_id=1, method="fdm", levels=(8,)))
        assert len(res.rows) == 1
        assert res.rows[0].errors.order_max is None
        assert res.rows[0].converged

    def test_orders_and_monotonicity(self):
        res = run_study(StudySpec(problem_id=1, method="ccfdm", levels=(8, 16)))
        e0, e1 = res.rows[0].errors, res.rows[1].errors
        assert e1.e_max < e0.e_max
        assert e1.order_max == pytest.approx(4.0, abs=0.6)
        assert e1.e_ave <= e1.e_max

    def test_failure_recorded_not_raised(self):
        # node cap violation at an absurd level is caught per-row
        spec = StudySpec(problem_id=4, method="fdm", levels=(6, 200))
        res = run_study(spec)
        assert res.rows[0].errors is not None
        assert res.rows[1].errors is None
        assert "cap" in res.rows[1].failure

    def test_spec_validation(self):
        with pytest.raises(BenchmarkError, match="increasing"):
            StudySpec(problem_id=1, method="fdm", levels=(10, 10))
        with pytest.raises(BenchmarkError, match="method"):
            StudySpec(problem_id=1, method="sor", levels=(10,))
        with pytest.raises(BenchmarkError, match="problem"):
            StudySpec(problem_id=7, method="fdm", levels=(10,))

    def test_csv_and_json_outputs(self, tmp_path):
        res = run_study(StudySpec(problem_id=1, method="fdm", levels=(6, 12)))
        csv_path = tmp_path / "study.csv"
        json_path = tmp_path / "study.json"
        res.to_csv(csv_path)
        res.to_json(json_path)
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "grid,e_max,order_max,e_ave,order_ave,sweeps,seconds"
        assert len(lines) == 3
        assert lines[1].startswith("6x6,")
        payload = json.loads(json_path.read_text())
        assert payload["problem"] == 1
        assert len(payload["rows"]) == 2
        assert payload["rows"][1]["order_max"] is not None

    def test_format_table(self):
        res = run_study(StudySpec(problem_id=1, method="fdm", levels=(6,)))
        table = res.format_table()
        assert "e_max" in table and "6x6" in table


class TestGammaSweep:
    def test_single_point(self):
        pts = gamma_sweep(2, "fdm", "sinh", 8, [0.5])
        assert len(pts) == 1
        assert pts[0].gamma == 0.5
        assert pts[0].e_ave > 0
        assert pts[0].converged

    def test_validation(self):
        with pytest.raises(BenchmarkError, match="ascending"):
            gamma_sweep(2, "fdm", "sinh", 8, [0.5, 0.3])
        with pytest.raises(BenchmarkError, match="method"):
            gamma_sweep(2, "jacobi", "sinh", 8, [0.5])

    def test_benchmark_config_is_single_pass(self):
        assert benchmark_config().correction_passes == 1
        assert StudySpec(problem_id=1, method="fdm", levels=(4,)).config.correction_passes == 1
