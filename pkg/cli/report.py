"""Report models written by the command line tools.

Reports are dumped with sorted keys and fixed indentation so that identical
inputs give byte-identical files; timings only appear when requested.
"""

from typing import Dict, List, Optional

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field

from algebra.groebner import GroebnerResult
from algebra.zerosolve import SolutionSet
from model.data import DataFile, ModelFile
from model.likelihood import IGLSResult, StationaryPoint


class _Frozen(BaseModel):
    # Makes the object "Immutable" once created.
    model_config = ConfigDict(frozen=True, extra="forbid")


class BasisSummary(_Frozen):
    order: str = Field(description="Monomial order of the basis.")
    size: int = Field(description="Number of basis elements.")
    leading_terms: List[str] = Field(description="Leading monomials, ascending in the order.")


class SolutionEntry(_Frozen):
    coordinates: List[List[float]] = Field(description="[real, imaginary] per parameter.")
    real: bool = Field(description="Passes the realness test.")
    max_residual: float = Field(description="Largest absolute generator value at the point.")
    multiplicity: int = Field(description="Number of merged root approximations.")
    verified: bool = Field(description="Residuals are within tolerance.")


class StationaryEntry(_Frozen):
    beta: List[float] = Field(description="Parameter values, one per restriction class.")
    sigma: List[List[float]] = Field(description="Covariance estimate at beta.")
    log_likelihood: float = Field(description="Full Gaussian log-likelihood at (beta, sigma).")
    profile_value: float = Field(description="Profile log-likelihood at beta.")
    objective_G: float = Field(description="det((Y - BX)(Y - BX)') at beta.")
    classification: str = Field(description="local-max, local-min, saddle or degenerate.")
    is_global_max: bool = Field(description="Largest likelihood among the real stationary points.")


class IGLSEntry(_Frozen):
    start: List[float] = Field(description="Starting parameters.")
    beta: List[float] = Field(description="Final parameters.")
    sigma: List[List[float]] = Field(description="Final covariance estimate.")
    iterations: int = Field(description="Number of alternating updates performed.")
    converged: bool = Field(description="Successive parameters agreed within the tolerance.")
    gradient_residual: float = Field(description="Largest absolute gradient entry of G at beta, relative to G.")


class SearchEntry(_Frozen):
    seed: int = Field(description="Seed of the first trial; trial t uses seed + t.")
    trials: int = Field(description="Number of random datasets tried.")
    best_seed: int = Field(description="Seed of the dataset with the most real stationary points.")
    real_counts: List[int] = Field(description="Real stationary point count per trial.")
    best_real_count: int = Field(description="Real stationary points of the best dataset.")
    data: DataFile = Field(description="The best dataset.")


class AnalysisReport(_Frozen):
    version: str = Field(description="Report format version.")
    command: str = Field(description="Subcommand that produced the report.")
    model: ModelFile = Field(description="Echo of the model.")
    variables: List[str] = Field(description="Parameter names in variable order.")
    monotone: bool = Field(description="Covariate sets are totally ordered by inclusion.")
    data_digest: Optional[str] = Field(default=None, description="SHA-256 of the exact data.")
    dimension: Optional[int] = Field(default=None, description="Dimension of the maximum likelihood ideal.")
    degree: Optional[int] = Field(default=None, description="Degree of the maximum likelihood ideal.")
    basis: Optional[BasisSummary] = Field(default=None, description="Groebner basis summary.")
    solutions: Optional[List[SolutionEntry]] = Field(default=None, description="All complex solutions.")
    stationary_points: Optional[List[StationaryEntry]] = Field(
        default=None, description="Real stationary points by descending log-likelihood."
    )
    igls: Optional[IGLSEntry] = Field(default=None, description="IGLS estimate.")
    search: Optional[SearchEntry] = Field(default=None, description="Multimodality search result.")
    warnings: List[str] = Field(default_factory=list, description="Non-fatal issues found on the way.")
    timings: Optional[Dict[str, float]] = Field(default=None, description="Seconds per stage.")


class TableResultRow(_Frozen):
    label: str = Field(description="Pattern and restrictions.")
    expected_dimension: int = Field(description="Published dimension.")
    expected_degree: int = Field(description="Published degree.")
    dimension: Optional[int] = Field(default=None, description="Computed dimension.")
    degree: Optional[int] = Field(default=None, description="Computed degree.")
    status: str = Field(description="ok, mismatch, timeout or error.")
    runtime_secs: Optional[float] = Field(default=None, description="Wall time of the row.")


class TableReport(_Frozen):
    version: str = Field(description="Report format version.")
    table: str = Field(description="gensur or submodels.")
    seed: int = Field(description="Seed of the random data.")
    rows: List[TableResultRow] = Field(description="Rows in table order.")


def basis_summary(gb: GroebnerResult, names: List[str]) -> BasisSummary:
    leads = []
    for monom in gb.leading_monomials():
        factors = [name if e == 1 else f"{name}^{e}" for name, e in zip(names, monom) if e]
        leads.append("*".join(factors) or "1")
    return BasisSummary(order=gb.order.kind, size=len(gb.basis), leading_terms=leads)


def solution_entries(solutions: SolutionSet, real_tol: float) -> List[SolutionEntry]:
    return [
        SolutionEntry(
            coordinates=[[c.real, c.imag] for c in point.coordinates],
            real=point.is_real(real_tol),
            max_residual=max(point.residuals, default=0.0),
            multiplicity=point.multiplicity_hint,
            verified=point.verified,
        )
        for point in solutions.points
    ]


def _matrix(m: np.ndarray) -> List[List[float]]:
    return [[float(v) for v in row] for row in m]


def stationary_entries(points: List[StationaryPoint]) -> List[StationaryEntry]:
    return [
        StationaryEntry(
            beta=list(point.beta),
            sigma=_matrix(point.sigma.sigma),
            log_likelihood=point.evaluation.log_likelihood,
            profile_value=point.evaluation.profile_value,
            objective_G=point.evaluation.objective_G,
            classification=point.classification,
            is_global_max=point.is_global_max,
        )
        for point in points
    ]


def igls_entry(start, result: IGLSResult, gradient_residual: float) -> IGLSEntry:
    return IGLSEntry(
        start=[float(v) for v in start],
        beta=[float(v) for v in result.beta],
        sigma=_matrix(result.sigma.sigma),
        iterations=result.iterations,
        converged=result.converged,
        gradient_residual=gradient_residual,
    )


def dumps(report: BaseModel) -> bytes:
    return orjson.dumps(
        report.model_dump(mode="json", exclude_none=True),
        option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE,
    )
