"""Command-line front end.

Subcommands: ``solve``, ``study``, ``gamma-sweep``, ``dump-stencils``,
``dump-grid``.  Every option can also be supplied through a JSON config file
(``--config``) whose keys mirror :class:`RunConfig` field names; explicit
flags override the file, which overrides built-in defaults.  Output files go
to ``--outdir`` (default: the ``CCPOISSON_OUTDIR`` environment variable, or
the working directory).

Exit codes: 0 success, 1 solver non-convergence, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .benchmark import (
    PROBLEM_DIMENSIONS,
    StudySpec,
    compute_errors,
    gamma_sweep,
    problem_catalog,
    run_study,
    study_grid,
)
from .grid import AxisSpec, build_axis, build_grid
from .solver import SolverConfig, export_field_binary, export_field_csv, solve_ccfdm, solve_fdm
from .stencils import build_axis_stencils

OUTDIR_ENV = "CCPOISSON_OUTDIR"

DEFAULT_GAMMAS = (0.01,) + tuple(round(0.05 * k, 2) for k in range(1, 21))


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation."""

    subcommand: str
    problem: int = 1
    method: str = "ccfdm"
    family: str = "uniform"
    gamma: float = 1.0
    size: tuple[int, ...] = (20,)
    levels: tuple[int, ...] = (10, 20)
    gammas: tuple[float, ...] = DEFAULT_GAMMAS
    length: float = 1.0
    residual_tolerance: float = 1e-14
    max_sweeps: int = 1_000_000
    correction_mode: str = "single-pass"
    residual_mode: str = "absolute"
    scheme: str = "compact"
    outdir: Optional[str] = None
    format: str = "csv"
    quiet: bool = False
    dump_derivatives: bool = False

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key in ("size", "levels", "gammas"):
            out[key] = list(out[key])
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("size", "levels", "gammas"):
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            residual_tolerance=self.residual_tolerance,
            max_sweeps=self.max_sweeps,
            residual_mode=self.residual_mode,
            correction_passes=1 if self.correction_mode == "single-pass" else None,
        )

    def resolved_outdir(self) -> str:
        return self.outdir or os.environ.get(OUTDIR_ENV) or "."


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(_positive_int(part) for part in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(_positive_float(part) for part in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccpoisson",
        description="Poisson solves on stretched tensor-product grids "
        "(second-order and compact-corrected fourth-order) plus benchmark studies.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, with_method=True, method_choices=("fdm", "ccfdm")):
        p.add_argument("--config", help="JSON config file mirroring RunConfig fields")
        p.add_argument("--problem", type=int, choices=(1, 2, 3, 4), default=None)
        if with_method:
            p.add_argument("--method", choices=method_choices, default=None)
        p.add_argument(
            "--family", "--grid", choices=("uniform", "sinh", "tanh"), default=None
        )
        p.add_argument("--gamma", type=_positive_float, default=None)
        p.add_argument("--tol", dest="residual_tolerance", type=_positive_float, default=None)
        p.add_argument("--max-sweeps", dest="max_sweeps", type=_positive_int, default=None)
        p.add_argument(
            "--correction-mode",
            dest="correction_mode",
            choices=("single-pass", "fixed-point"),
            default=None,
        )
        p.add_argument(
            "--residual-mode",
            dest="residual_mode",
            choices=("absolute", "relative"),
            default=None,
        )
        p.add_argument("--outdir", default=None)
        p.add_argument("--format", choices=("csv", "json", "both"), default=None)
        p.add_argument("--quiet", action="store_const", const=True, default=None)

    p_solve = sub.add_parser("solve", help="solve one problem on one grid")
    add_common(p_solve)
    p_solve.add_argument("--size", type=_int_list, default=None, help="intervals per axis, e.g. 20 or 20,40")
    p_solve.add_argument(
        "--dump-derivatives",
        dest="dump_derivatives",
        action="store_const",
        const=True,
        default=None,
        help="also write per-axis second derivatives of the solution (debug)",
    )

    p_study = sub.add_parser("study", help="refinement study over a level sequence")
    add_common(p_study, method_choices=("fdm", "ccfdm", "both"))
    p_study.add_argument("--levels", type=_int_list, default=None, help="e.g. 10,20,40")

    p_sweep = sub.add_parser("gamma-sweep", help="error vs stretch parameter")
    add_common(p_sweep)
    p_sweep.add_argument("--size", type=_int_list, default=None)
    p_sweep.add_argument("--gammas", type=_float_list, default=None, help="ascending list, e.g. 0.1,0.2,0.5")

    p_st = sub.add_parser("dump-stencils", help="stencil table of one axis as CSV")
    add_common(p_st, with_method=False)
    p_st.add_argument("--size", type=_int_list, default=None, help="intervals")
    p_st.add_argument("--length", type=_positive_float, default=None)
    p_st.add_argument("--scheme", choices=("compact", "classical"), default=None)

    p_gr = sub.add_parser("dump-grid", help="axis coordinates and spacings as CSV")
    add_common(p_gr, with_method=False)
    p_gr.add_argument("--size", type=_int_list, default=None, help="intervals")
    p_gr.add_argument("--length", type=_positive_float, default=None)

    return parser


def parse_args(argv=None) -> RunConfig:
    """Resolve CLI flags, config file and defaults into a RunConfig.

    Precedence: explicit flags > config-file values > defaults.  Usage
    problems (unknown flags, malformed numbers, conflicting subcommands)
    terminate with exit status 2 via argparse, or raise :class:`UsageError`
    for the caller to translate.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)

    merged: dict = {"subcommand": ns.subcommand}
    if ns.config is not None:
        try:
            with open(ns.config) as fh:
                file_values = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed config file: {exc}") from exc
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a JSON object")
        if "subcommand" in file_values and file_values["subcommand"] != ns.subcommand:
            raise UsageError(
                f"config file is for subcommand {file_values['subcommand']!r}, "
                f"but {ns.subcommand!r} was requested"
            )
        merged.update({k: v for k, v in file_values.items() if k != "subcommand"})

    for key, value in vars(ns).items():
        if key in ("config", "subcommand") or value is None:
            continue
        merged[key] = value

    try:
        return RunConfig.from_dict(merged)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _grid_for_solve(config: RunConfig):
    ndim = PROBLEM_DIMENSIONS[config.problem]
    sizes = config.size
    if len(sizes) == 1:
        sizes = sizes * ndim
    if len(sizes) != ndim:
        raise UsageError(f"problem {config.problem} needs 1 or {ndim} sizes, got {len(sizes)}")
    if config.family == "uniform":
        specs = [AxisSpec(1.0, m + 1) for m in sizes]
        return build_grid(specs)
    from .benchmark import STRETCHED_AXES

    stretched = STRETCHED_AXES[config.problem]
    specs = [
        AxisSpec(
            1.0,
            m + 1,
            family=config.family if d in stretched else "uniform",
            gamma=config.gamma,
        )
        for d, m in enumerate(sizes)
    ]
    return build_grid(specs)


def _say(config: RunConfig, text: str) -> None:
    if not config.quiet:
        print(text)


def _run_solve(config: RunConfig) -> int:
    problem = problem_catalog(config.problem)
    grid = _grid_for_solve(config)
    solver_cfg = config.solver_config()
    if config.method == "fdm":
        report = solve_fdm(problem, grid, solver_cfg)
    else:
        report = solve_ccfdm(problem, grid, solver_cfg)
    errors = compute_errors(report.solution, problem, grid)
    label = "x".join(str(n - 1) for n in grid.shape)
    _say(
        config,
        f"problem {config.problem} {config.method.upper()} on {label} "
        f"({config.family}): e_max={errors.e_max:.5e} e_ave={errors.e_ave:.5e} "
        f"sweeps={report.inner_iterations} passes={report.correction_passes_used} "
        f"seconds={report.wall_time:.2f} converged={report.converged}",
    )
    outdir = config.resolved_outdir()
    base = os.path.join(outdir, f"solve_p{config.problem}_{config.method}")
    os.makedirs(outdir, exist_ok=True)
    export_field_csv(base + ".csv", report.solution, exact=problem.exact)
    export_field_binary(base + ".bin", report.solution)
    _say(config, f"wrote {base}.csv and {base}.bin")
    if config.dump_derivatives:
        from .derivative import field_second_derivatives
        from .stencils import build_stencil_set

        stencils = build_stencil_set(grid)
        path = base + "_derivatives.csv"
        lows = field_second_derivatives(report.solution, grid, stencils, "low")
        highs = field_second_derivatives(report.solution, grid, stencils, "high")
        ndim = grid.dimension
        with open(path, "w") as fh:
            head = (
                [f"i{d}" for d in range(ndim)]
                + [f"low_d2_axis{d}" for d in range(ndim)]
                + [f"high_d2_axis{d}" for d in range(ndim)]
            )
            fh.write(",".join(head) + "\n")
            for flat in range(grid.node_count):
                row = [str(i) for i in grid.multi_index(flat)]
                row += [f"{lows[d][flat]:.5e}" for d in range(ndim)]
                row += [f"{highs[d][flat]:.5e}" for d in range(ndim)]
                fh.write(",".join(row) + "\n")
        _say(config, f"wrote {path}")
    return 0 if report.converged else 1


def _run_study(config: RunConfig) -> int:
    methods = ("fdm", "ccfdm") if config.method == "both" else (config.method,)
    outdir = config.resolved_outdir()
    os.makedirs(outdir, exist_ok=True)
    status = 0
    for method in methods:
        spec = StudySpec(
            problem_id=config.problem,
            method=method,
            levels=config.levels,
            family=config.family,
            gamma=config.gamma,
            config=config.solver_config(),
        )
        result = run_study(spec)
        _say(config, result.format_table())
        base = os.path.join(outdir, f"study_p{config.problem}_{method}")
        if config.format in ("csv", "both"):
            result.to_csv(base + ".csv")
        if config.format in ("json", "both"):
            result.to_json(base + ".json")
        if any(row.errors is None or not row.converged for row in result.rows):
            status = 1
    return status


def _run_gamma_sweep(config: RunConfig) -> int:
    if config.family == "uniform":
        raise UsageError("gamma-sweep needs a stretched family; pass --family sinh or --family tanh")
    size = config.size[0]
    points = gamma_sweep(
        config.problem, config.method, config.family,
        size, list(config.gammas), config.solver_config(),
    )
    outdir = config.resolved_outdir()
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, f"gamma_sweep_p{config.problem}_{config.method}.csv")
    with open(path, "w") as fh:
        fh.write("gamma,e_ave\n")
        for pt in points:
            fh.write(f"{pt.gamma:.5e},{pt.e_ave:.5e}\n")
    finite = [pt for pt in points if np.isfinite(pt.e_ave)]
    if finite:
        best = min(finite, key=lambda pt: pt.e_ave)
        _say(config, f"minimum e_ave={best.e_ave:.5e} at gamma={best.gamma:g}")
    _say(config, f"wrote {path}")
    return 0 if all(pt.converged for pt in points) else 1


def _axis_for_dump(config: RunConfig):
    if len(config.size) != 1:
        raise UsageError("axis dumps take a single --size")
    return build_axis(
        AxisSpec(
            length=config.length,
            node_count=config.size[0] + 1,
            family=config.family,
            gamma=config.gamma,
        )
    )


def _run_dump_stencils(config: RunConfig) -> int:
    axis = _axis_for_dump(config)
    st = build_axis_stencils(axis)
    outdir = config.resolved_outdir()
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, f"stencils_{config.scheme}_{config.family}.csv")
    n = axis.node_count
    with open(path, "w") as fh:
        if config.scheme == "classical":
            fh.write("node,a,b,c\n")
            for i in range(1, n - 1):
                fh.write(
                    f"{i},{st.classical_a[i]:.5e},{st.classical_b[i]:.5e},{st.classical_c[i]:.5e}\n"
                )
        else:
            fh.write("node,alpha,beta,a,b,c,d\n")
            wl, wr = st.left.weights, st.right.weights
            fh.write(
                f"0,0.00000e+00,{st.left.beta:.5e},"
                + ",".join(f"{w:.5e}" for w in wl)
                + "\n"
            )
            for i in range(1, n - 1):
                fh.write(
                    f"{i},{st.alpha[i]:.5e},{st.beta[i]:.5e},"
                    f"{st.compact_a[i]:.5e},{st.compact_b[i]:.5e},{st.compact_c[i]:.5e},0.00000e+00\n"
                )
            fh.write(
                f"{n - 1},{st.right.beta:.5e},0.00000e+00,"
                + ",".join(f"{w:.5e}" for w in wr)
                + "\n"
            )
    _say(config, f"wrote {path}")
    return 0


def _run_dump_grid(config: RunConfig) -> int:
    axis = _axis_for_dump(config)
    outdir = config.resolved_outdir()
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, f"grid_{config.family}.csv")
    with open(path, "w") as fh:
        fh.write("index,coordinate,spacing\n")
        for i, x in enumerate(axis.coords):
            spacing = f"{axis.spacings[i]:.5e}" if i < axis.node_count - 1 else ""
            fh.write(f"{i},{x:.5e},{spacing}\n")
    _say(config, f"wrote {path}")
    return 0


_RUNNERS = {
    "solve": _run_solve,
    "study": _run_study,
    "gamma-sweep": _run_gamma_sweep,
    "dump-stencils": _run_dump_stencils,
    "dump-grid": _run_dump_grid,
}


def run(config: RunConfig) -> int:
    """Execute one resolved configuration; returns the process exit status."""
    try:
        return _RUNNERS[config.subcommand](config)
    except UsageError:
        raise
    except OSError as exc:
        print(f"ccpoisson: I/O error: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    try:
        config = parse_args(argv)
        return run(config)
    except UsageError as exc:
        print(f"ccpoisson: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
