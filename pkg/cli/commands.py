import dataclasses
import functools
import math
import sys
import time
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

import constants
from algebra.groebner import GroebnerResult, Ideal, PositiveDimensionalError, buchberger, fglm
from algebra.polynomial import MonomialOrder, VariableCountError, evaluate
from algebra.zerosolve import NonTriangularBasisError, SolutionSet, filter_real, solve_zero_dim
from cli import report as reports
from cli.config import surroots_config
from model.data import DataFile, ModelFile, data_digest, load_data, load_model, load_table, save
from model.likelihood import (
    IGLSError,
    StationaryPoint,
    igls,
    ols_start,
    profile_values,
    stationary_points,
)
from model.sur import (
    DataValidationError,
    Dataset,
    ObjectiveSystem,
    SparsityPattern,
    build_objective,
    is_monotone,
    random_dataset,
)
from utilities.logs import logger, setup_logging
from utilities.mathutils import nan_count
from utilities.perf_monitor import PerfMonitor
from utilities.utils import budget_from_env, run_in_subprocess


@dataclasses.dataclass
class IdealComputation:
    system: ObjectiveSystem
    gb: GroebnerResult
    timings: Dict[str, float]


@dataclasses.dataclass
class SolveComputation:
    system: ObjectiveSystem
    gb: GroebnerResult
    lex: Optional[GroebnerResult]
    solutions: Optional[SolutionSet]
    points: List[StationaryPoint]
    timings: Dict[str, float]


# ---------------------------------
# Pipelines (module level so they can run in a subprocess)
# ---------------------------------

def likelihood_ideal(system: ObjectiveSystem) -> Ideal:
    generators = [g for g in system.gradient if not g.is_zero()]
    if not generators:
        raise DataValidationError("the objective is constant; no likelihood equations to solve")
    return Ideal(tuple(generators), system.G.nvars)


def compute_ideal(pattern: SparsityPattern, data: Dataset, order_kind: str = "grevlex") -> IdealComputation:
    perf = PerfMonitor("ideal")
    with perf.sample("build"):
        system = build_objective(pattern, data)
    with perf.sample("groebner"):
        gb = buchberger(likelihood_ideal(system), MonomialOrder.named(order_kind, pattern.nparams))
    logger.info(f"Maximum likelihood ideal: dimension {gb.dimension}, degree {gb.degree}")
    logger.debug(perf.summary_str())
    return IdealComputation(system, gb, perf.totals())


def compute_solution(pattern: SparsityPattern, data: Dataset, tol: float = constants.RESIDUAL_TOL,
                     real_tol: float = constants.REAL_TOL, lex_method: str = "fglm") -> SolveComputation:
    perf = PerfMonitor("solve")
    with perf.sample("build"):
        system = build_objective(pattern, data)
    ideal = likelihood_ideal(system)
    n = pattern.nparams
    with perf.sample("groebner"):
        gb = buchberger(ideal, MonomialOrder.grevlex(n))
    logger.info(f"Maximum likelihood ideal: dimension {gb.dimension}, degree {gb.degree}")
    if gb.dimension > 0:
        return SolveComputation(system, gb, None, None, [], perf.totals())
    with perf.sample("lex"):
        if lex_method == "direct":
            lex = buchberger(ideal, MonomialOrder.lex(n))
        else:
            lex = fglm(gb, MonomialOrder.lex(n))
    with perf.sample("solve"):
        solutions = solve_zero_dim(lex, tol, generators=ideal.generators, real_tol=real_tol)
    with perf.sample("classify"):
        points = stationary_points(system, solutions, real_tol)
    logger.info(f"{len(solutions.points)} complex solutions, {len(points)} real stationary points")
    logger.debug(perf.summary_str())
    return SolveComputation(system, gb, lex, solutions, points, perf.totals())


def ideal_invariants(pattern: SparsityPattern, data: Dataset, order_kind: str = "grevlex") -> Tuple[int, int]:
    gb = compute_ideal(pattern, data, order_kind).gb
    return gb.dimension, gb.degree


def gradient_residual(system: ObjectiveSystem, beta) -> float:
    """Largest |dG/db_k| * (1 + |b_k|) relative to G; scale free."""
    point = [float(b) for b in beta]
    value = abs(evaluate(system.G, point))
    if value == 0.0:
        return math.inf
    return max(abs(evaluate(g, point)) * (1 + abs(b)) for g, b in zip(system.gradient, point)) / value


# ---------------------------------
# Helpers
# ---------------------------------

def _load_inputs(config) -> Tuple[ModelFile, SparsityPattern, Dataset]:
    model_file = load_model(config.model)
    pattern = model_file.to_pattern()
    data = load_data(config.data).to_dataset()
    return model_file, pattern, data


def _run_budgeted(func: functools.partial, budget: Optional[float]):
    if budget is None:
        return func()
    return run_in_subprocess(func, ttl=budget)


def _emit(payload: bytes, out: Optional[str]) -> None:
    if out:
        with open(out, "wb") as f:
            f.write(payload)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


def _base_report(command: str, model_file: ModelFile, pattern: SparsityPattern, data: Optional[Dataset]) -> Dict:
    return dict(
        version=constants.__report_version__,
        command=command,
        model=model_file,
        variables=pattern.variable_names(),
        monotone=is_monotone(pattern),
        data_digest=data_digest(data) if data is not None else None,
    )


def _tsv(header: List[str], rows: List[List]) -> bytes:
    def cell(v):
        if isinstance(v, float):
            return constants.GRID_NUMBER_FORMAT % v
        return str(v)

    lines = ["\t".join(header)] + ["\t".join(cell(v) for v in row) for row in rows]
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------
# Subcommands
# ---------------------------------

def cmd_ideal(config) -> int:
    model_file, pattern, data = _load_inputs(config)
    result = _run_budgeted(functools.partial(compute_ideal, pattern, data, config.order), config.budget_secs)
    gb = result.gb
    report = reports.AnalysisReport(
        **_base_report("ideal", model_file, pattern, data),
        dimension=gb.dimension,
        degree=gb.degree,
        basis=reports.basis_summary(gb, pattern.variable_names()),
        timings=result.timings if config.timings else None,
    )
    if config.format == "tsv":
        _emit(_tsv(["dimension", "degree"], [[gb.dimension, gb.degree]]), config.out)
    else:
        _emit(reports.dumps(report), config.out)
    return constants.EXIT_OK


def cmd_solve(config) -> int:
    model_file, pattern, data = _load_inputs(config)
    if is_monotone(pattern):
        logger.info("Monotone pattern: a unique stationary point is expected")
    func = functools.partial(compute_solution, pattern, data, config.tol, config.real_tol, config.lex_method)
    result = _run_budgeted(func, config.budget_secs)
    gb = result.gb
    fields = _base_report("solve", model_file, pattern, data)
    fields.update(dimension=gb.dimension, degree=gb.degree, timings=result.timings if config.timings else None)
    names = pattern.variable_names()
    if result.solutions is None:
        logger.error(f"The ideal is positive-dimensional (dimension {gb.dimension}, degree {gb.degree})")
        report = reports.AnalysisReport(**fields, basis=reports.basis_summary(gb, names))
        _emit(reports.dumps(report), config.out)
        return constants.EXIT_POSITIVE_DIMENSIONAL

    warnings = list(result.solutions.warnings)
    if is_monotone(pattern) and len(result.points) != 1:
        warnings.append(f"monotone pattern with {len(result.points)} real stationary points")
        logger.warning(warnings[-1])
    report = reports.AnalysisReport(
        **fields,
        basis=reports.basis_summary(result.lex, names),
        solutions=reports.solution_entries(result.solutions, config.real_tol),
        stationary_points=reports.stationary_entries(result.points),
        warnings=warnings,
    )
    if config.format == "tsv":
        rows = [list(p.beta) + [p.evaluation.log_likelihood, p.classification, int(p.is_global_max)]
                for p in result.points]
        _emit(_tsv(names + ["log_likelihood", "classification", "global_max"], rows), config.out)
    else:
        _emit(reports.dumps(report), config.out)
    return constants.EXIT_OK


def cmd_igls(config) -> int:
    model_file, pattern, data = _load_inputs(config)
    perf = PerfMonitor("igls")
    with perf.sample("build"):
        system = build_objective(pattern, data)
    start = ols_start(pattern, data)
    with perf.sample("igls"):
        result = igls(pattern, data, start, max_iter=config.max_iter, tol=config.tol)
    residual = gradient_residual(system, result.beta)
    logger.info(f"IGLS {'converged' if result.converged else 'did not converge'} after {result.iterations} "
                f"iterations; gradient residual {residual:.3e}")
    report = reports.AnalysisReport(
        **_base_report("igls", model_file, pattern, data),
        igls=reports.igls_entry(start, result, residual),
        timings=perf.totals() if config.timings else None,
    )
    _emit(reports.dumps(report), config.out)
    return constants.EXIT_OK if result.converged else constants.EXIT_NONCONVERGENCE


def run_search(pattern: SparsityPattern, N: int, trials: int, seed: int, value_range: int,
               tol: float = constants.RESIDUAL_TOL, real_tol: float = constants.REAL_TOL):
    """Solves ``trials`` seeded random datasets; returns (best seed, best dataset, counts)."""
    counts = []
    best = None
    for trial in range(trials):
        trial_seed = seed + trial
        data = random_dataset(pattern, N, trial_seed, value_range)
        result = compute_solution(pattern, data, tol, real_tol)
        if result.solutions is None:
            raise PositiveDimensionalError(result.gb.dimension, result.gb.degree)
        count = len(filter_real(result.solutions, real_tol))
        counts.append(count)
        logger.info(f"Trial {trial} (seed {trial_seed}): {count} real of {len(result.solutions.points)} solutions")
        if best is None or count > best[2]:
            best = (trial_seed, data, count)
    return best[0], best[1], counts


def cmd_search(config) -> int:
    model_file = load_model(config.model)
    pattern = model_file.to_pattern()
    N = config.N if config.N is not None else pattern.R + pattern.C + constants.RANDOM_EXTRA_SUBJECTS
    if config.trials < 1:
        raise ValueError("--trials must be at least 1")
    best_seed, data, counts = run_search(pattern, N, config.trials, config.seed, config.value_range,
                                         config.tol, config.real_tol)
    report = reports.AnalysisReport(
        **_base_report("search", model_file, pattern, data),
        search=reports.SearchEntry(
            seed=config.seed,
            trials=config.trials,
            best_seed=best_seed,
            real_counts=counts,
            best_real_count=max(counts),
            data=DataFile.from_dataset(data),
        ),
    )
    if config.save_data:
        save(report.search.data, config.save_data)
        logger.info(f"Wrote the dataset of seed {best_seed} to {config.save_data}")
    _emit(reports.dumps(report), config.out)
    return constants.EXIT_OK


def profile_grid(pattern: SparsityPattern, data: Dataset, xrange, yrange, steps: int) -> List[List[float]]:
    if pattern.nparams != 2:
        raise ValueError(f"grid needs exactly 2 free parameters, the model has {pattern.nparams}")
    if steps < 1:
        raise ValueError("--steps must be at least 1")
    cells = [
        (xrange[0] + (xrange[1] - xrange[0]) * i / steps, yrange[0] + (yrange[1] - yrange[0]) * j / steps)
        for i in range(steps + 1)
        for j in range(steps + 1)
    ]
    values = profile_values(build_objective(pattern, data), np.array(cells, dtype=np.float64))
    return [[b1, b2, float(value)] for (b1, b2), value in zip(cells, values)]


def cmd_grid(config) -> int:
    model_file, pattern, data = _load_inputs(config)
    rows = profile_grid(pattern, data, config.xrange, config.yrange, config.steps)
    flagged = nan_count([row[2] for row in rows])
    if flagged:
        logger.warning(f"{flagged} grid cells have G <= 0 and are written as nan")
    _emit(_tsv(pattern.variable_names() + ["profile_loglik"], rows), config.out)
    return constants.EXIT_OK


def cmd_tables(config) -> int:
    table_file = load_table(constants.GENSUR_TABLE if config.which == "gensur" else constants.SUBMODEL_TABLE)
    rows = []
    for row in table_file.rows:
        pattern = row.model.to_pattern()
        data = random_dataset(pattern, pattern.R + pattern.C + constants.RANDOM_EXTRA_SUBJECTS, config.seed)
        budget = config.budget_secs or row.budget_secs or budget_from_env()
        label = row.model.label()
        start = time.monotonic()
        dimension = degree = None
        try:
            dimension, degree = run_in_subprocess(
                functools.partial(ideal_invariants, pattern, data, config.order), ttl=budget
            )
            status = "ok" if (dimension, degree) == (row.dimension, row.degree) else "mismatch"
            if status == "ok":
                logger.success(f"{label}: dimension {dimension}, degree {degree}")
        except TimeoutError:
            status = "timeout"
            logger.warning(f"{label}: no result within {budget:g} s")
        except Exception as e:
            status = "error"
            logger.error(f"{label}: {type(e).__name__}: {e}")
        runtime = time.monotonic() - start
        if status == "mismatch":
            logger.warning(f"{label}: computed ({dimension}, {degree}), expected ({row.dimension}, {row.degree})")
        rows.append(reports.TableResultRow(
            label=label,
            expected_dimension=row.dimension,
            expected_degree=row.degree,
            dimension=dimension,
            degree=degree,
            status=status,
            runtime_secs=round(runtime, 3),
        ))

    table = Table(title=f"{table_file.name} (seed {config.seed})")
    table.add_column("pattern", justify="left", style="cyan", no_wrap=True)
    table.add_column("dim", style="magenta")
    table.add_column("degree", style="magenta")
    table.add_column("expected", style="magenta")
    table.add_column("status", style="magenta")
    table.add_column("runtime", style="magenta")
    for r in rows:
        table.add_row(
            r.label,
            "-" if r.dimension is None else str(r.dimension),
            "-" if r.degree is None else str(r.degree),
            f"({r.expected_dimension},{r.expected_degree})",
            r.status,
            f"{r.runtime_secs:.2f} s",
        )
    Console(stderr=not config.out).print(table)

    if not config.timings:
        rows = [r.model_copy(update={"runtime_secs": None}) for r in rows]
    if config.format == "tsv":
        header = ["pattern", "dimension", "degree", "expected_dimension", "expected_degree", "status"]
        if config.timings:
            header.append("runtime_secs")
        body = []
        for r in rows:
            line = [r.label, "-" if r.dimension is None else r.dimension, "-" if r.degree is None else r.degree,
                    r.expected_dimension, r.expected_degree, r.status]
            if config.timings:
                line.append(r.runtime_secs)
            body.append(line)
        _emit(_tsv(header, body), config.out)
    else:
        report = reports.TableReport(version=constants.__report_version__, table=table_file.name,
                                     seed=config.seed, rows=rows)
        _emit(reports.dumps(report), config.out)
    return constants.EXIT_OK


COMMANDS: Dict[str, Callable] = {
    "ideal": cmd_ideal,
    "solve": cmd_solve,
    "igls": cmd_igls,
    "search": cmd_search,
    "grid": cmd_grid,
    "tables": cmd_tables,
}


def main(argv=None) -> int:
    load_dotenv()  # take environment variables from .env.
    config = surroots_config(argv)
    setup_logging(debug=getattr(config, "logging.debug"), trace=getattr(config, "logging.trace"))
    try:
        return COMMANDS[config.command](config)
    except TimeoutError as e:
        logger.error(str(e))
        return constants.EXIT_TIMEOUT
    except PositiveDimensionalError as e:
        logger.error(str(e))
        return constants.EXIT_POSITIVE_DIMENSIONAL
    except IGLSError as e:
        logger.error(str(e))
        return constants.EXIT_NONCONVERGENCE
    except (DataValidationError, VariableCountError, NonTriangularBasisError, ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return constants.EXIT_VALIDATION


def main_entry():
    sys.exit(main())
