"""Likelihood evaluation, classification of stationary points, and IGLS.

With residuals E = Y - B(beta) X, the covariance that maximizes the likelihood
at fixed beta is E E' / N, and the profile log-likelihood is a strictly
decreasing function of G(beta) = det(E E').
"""

import dataclasses
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.linalg import LinAlgError, inv

import constants
from algebra.polynomial import evaluate, evaluate_many
from algebra.zerosolve import SolutionSet
from model.sur import Dataset, ObjectiveSystem, SparsityPattern, build_objective, check_compatible, ols_exact
from utilities.logs import logger

LOCAL_MAX = "local-max"
LOCAL_MIN = "local-min"
SADDLE = "saddle"
DEGENERATE = "degenerate"


class DegenerateLikelihoodError(Exception):
    """The residual Gram matrix is singular, so the likelihood is unbounded or undefined."""


class IGLSError(Exception):
    """The IGLS iteration hit a singular covariance or normal-equation matrix."""


@dataclasses.dataclass(frozen=True)
class CovarianceEstimate:
    sigma: np.ndarray

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.sigma))))
        return bool(np.all(np.abs(self.sigma - self.sigma.T) <= tol * scale))

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.sigma)
        except LinAlgError:
            return False
        return True


@dataclasses.dataclass(frozen=True)
class LikelihoodEvaluation:
    log_likelihood: float
    profile_value: float
    objective_G: float


@dataclasses.dataclass(frozen=True)
class StationaryPoint:
    beta: Tuple[float, ...]
    sigma: CovarianceEstimate
    evaluation: LikelihoodEvaluation
    classification: str
    is_global_max: bool = False


@dataclasses.dataclass(frozen=True)
class VectorizationMap:
    """0/1 matrix A with vec(B(beta)) = A beta, vec stacking columns of B."""

    A: np.ndarray
    R: int
    C: int

    def coefficient_matrix(self, beta: Sequence[float]) -> np.ndarray:
        return (self.A @ np.asarray(beta, dtype=np.float64)).reshape((self.R, self.C), order="F")


@dataclasses.dataclass(frozen=True)
class IGLSResult:
    beta: np.ndarray
    sigma: CovarianceEstimate
    iterations: int
    converged: bool


def vectorization_map(pattern: SparsityPattern) -> VectorizationMap:
    A = np.zeros((pattern.R * pattern.C, pattern.nparams), dtype=np.float64)
    for k, group in enumerate(pattern.classes):
        for r, c in group:
            A[(r - 1) + pattern.R * (c - 1), k] = 1.0
    return VectorizationMap(A, pattern.R, pattern.C)


def _residuals(pattern: SparsityPattern, data: Dataset, beta: Sequence[float]) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (pattern.nparams,):
        raise ValueError(f"expected {pattern.nparams} parameters, got shape {beta.shape}")
    if not np.all(np.isfinite(beta)):
        raise ValueError(f"non-finite parameters {beta}")
    B = vectorization_map(pattern).coefficient_matrix(beta)
    return data.y_array() - B @ data.x_array()


def sigma_hat(pattern: SparsityPattern, data: Dataset, beta: Sequence[float]) -> CovarianceEstimate:
    check_compatible(pattern, data)
    E = _residuals(pattern, data, beta)
    sigma = E @ E.T / data.N
    return CovarianceEstimate((sigma + sigma.T) / 2)


def log_likelihood(pattern: SparsityPattern, data: Dataset, beta: Sequence[float], sigma: np.ndarray) -> float:
    """Gaussian log-likelihood at (beta, sigma), constants included."""
    check_compatible(pattern, data)
    E = _residuals(pattern, data, beta)
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise DegenerateLikelihoodError("covariance is not positive definite")
    R, N = data.R, data.N
    trace = float(np.trace(np.linalg.solve(sigma, E @ E.T)))
    return -0.5 * R * N * math.log(2 * math.pi) - 0.5 * N * logdet - 0.5 * trace


def _profile_from_logdet(logdet, R: int, N: int):
    return -0.5 * N * (logdet - R * math.log(N)) - 0.5 * R * N - 0.5 * R * N * math.log(2 * math.pi)


def profile_loglik(pattern: SparsityPattern, data: Dataset, beta: Sequence[float]) -> LikelihoodEvaluation:
    check_compatible(pattern, data)
    E = _residuals(pattern, data, beta)
    sign, logdet = np.linalg.slogdet(E @ E.T)
    if sign <= 0 or not np.isfinite(logdet):
        raise DegenerateLikelihoodError(f"G(beta) is not positive at beta = {list(beta)}")
    profile = _profile_from_logdet(logdet, data.R, data.N)
    full = log_likelihood(pattern, data, beta, sigma_hat(pattern, data, beta).sigma)
    return LikelihoodEvaluation(full, profile, float(np.exp(logdet)))


def profile_values(system: ObjectiveSystem, points: np.ndarray) -> np.ndarray:
    """Profile log-likelihood at the rows of ``points``, from G evaluated in double precision.

    Cells with G <= 0 are nan.
    """
    G = evaluate_many(system.G, points)
    positive = G > 0
    logdet = np.where(positive, np.log(np.where(positive, G, 1.0)), np.nan)
    return _profile_from_logdet(logdet, system.data.R, system.data.N)


def hessian_G(system: ObjectiveSystem, beta: Sequence[float]) -> np.ndarray:
    n = len(system.gradient)
    point = [float(b) for b in beta]
    H = np.empty((n, n), dtype=np.float64)
    for i, g in enumerate(system.gradient):
        for j in range(i, n):
            H[i, j] = H[j, i] = evaluate(g.diff(j), point)
    return H


def classify(pattern: SparsityPattern, data: Dataset, beta: Sequence[float],
             system: Optional[ObjectiveSystem] = None, tol: float = constants.DEGENERACY_TOL) -> str:
    """Local type of a stationary point of the likelihood, read off the Hessian of G.

    The profile log-likelihood decreases strictly in G, so a positive definite
    Hessian of G means a local maximum of the likelihood.
    """
    system = system or build_objective(pattern, data)
    eigenvalues = np.linalg.eigvalsh(hessian_G(system, beta))
    scale = float(np.max(np.abs(eigenvalues)))
    if scale == 0.0 or np.any(np.abs(eigenvalues) < tol * scale):
        return DEGENERATE
    if np.all(eigenvalues > 0):
        return LOCAL_MAX
    if np.all(eigenvalues < 0):
        return LOCAL_MIN
    return SADDLE


def stationary_points(system: ObjectiveSystem, solutions: SolutionSet,
                      real_tol: float = constants.REAL_TOL) -> List[StationaryPoint]:
    """Real solutions as stationary points, by descending log-likelihood, global maximum flagged."""
    pattern, data = system.pattern, system.data
    found = []
    for point in solutions.points:
        if not point.is_real(real_tol):
            continue
        beta = point.real_part()
        try:
            evaluation = profile_loglik(pattern, data, beta)
        except DegenerateLikelihoodError as e:
            logger.warning(f"Skipping stationary point {beta}: {e}")
            continue
        classification = classify(pattern, data, beta, system)
        found.append((beta, evaluation, classification))
    found.sort(key=lambda item: (-item[1].profile_value, item[0]))
    result = []
    for index, (beta, evaluation, classification) in enumerate(found):
        result.append(StationaryPoint(beta, sigma_hat(pattern, data, beta), evaluation, classification, index == 0))
    return result


def ols_start(pattern: SparsityPattern, data: Dataset) -> np.ndarray:
    return np.array([float(v) for v in ols_exact(pattern, data)], dtype=np.float64)


def igls(pattern: SparsityPattern, data: Dataset, beta0: Optional[Sequence[float]] = None,
         max_iter: int = constants.IGLS_MAX_ITER, tol: float = constants.IGLS_TOL) -> IGLSResult:
    """Alternates the covariance update E E' / N with the GLS update
    beta = [A'(XX' kron S^-1)A]^-1 A' vec(S^-1 Y X')."""
    check_compatible(pattern, data)
    beta = ols_start(pattern, data) if beta0 is None else np.asarray(beta0, dtype=np.float64)
    if not np.all(np.isfinite(beta)):
        raise ValueError(f"non-finite start {beta}")
    A = vectorization_map(pattern).A
    X = data.x_array()
    Y = data.y_array()
    XX = X @ X.T
    YX = Y @ X.T
    converged = False
    iterations = 0
    sigma = sigma_hat(pattern, data, beta)
    while iterations < max_iter:
        iterations += 1
        try:
            sigma_inv = inv(sigma.sigma)
            lhs = A.T @ np.kron(XX, sigma_inv) @ A
            rhs = A.T @ (sigma_inv @ YX).reshape(-1, order="F")
            updated = np.linalg.solve(lhs, rhs)
        except LinAlgError as e:
            raise IGLSError(f"singular system at iteration {iterations}: {e}") from e
        delta = float(np.max(np.abs(updated - beta)))
        logger.trace(f"IGLS iteration {iterations}: step {delta:.3e}")
        beta = updated
        sigma = sigma_hat(pattern, data, beta)
        if delta <= tol * (1 + float(np.max(np.abs(beta)))):
            converged = True
            break
    logger.debug(f"IGLS {'converged' if converged else 'stopped'} after {iterations} iterations")
    return IGLSResult(beta, sigma, iterations, converged)
