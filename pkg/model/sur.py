"""SUR models: sparsity patterns, exact datasets and the determinant objective.

Responses are rows of ``Y`` (R x N) and covariates rows of ``X`` (C x N). The
coefficient matrix ``B`` is R x C with free entries on the pattern; restricted
entries share one polynomial variable per restriction class.
"""

import dataclasses
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

import constants
from algebra.linalg import exact_rank, exact_solve
from algebra.polynomial import MultiPoly, PolyMatrix, Scalar, poly_det, to_rational
from utilities.logs import logger

Entry = Tuple[int, int]
Matrix = Tuple[Tuple[Fraction, ...], ...]


class DataValidationError(ValueError):
    """Data that violates the dimension or full-rank requirements of a model."""


class SparsityPattern(BaseModel):
    """Free entries of B (1-based (response, covariate) pairs) and their equality classes."""

    # Makes the object "Immutable" once created.
    model_config = ConfigDict(frozen=True, extra="forbid")

    R: int = Field(gt=0, description="Number of responses.")
    C: int = Field(gt=0, description="Number of covariates.")
    entries: Tuple[Entry, ...] = Field(description="Free coefficients as 1-based (r, c) pairs.")
    restrictions: Tuple[Tuple[Entry, ...], ...] = Field(
        default=(), description="Classes of entries constrained to share one parameter."
    )

    @model_validator(mode="after")
    def check_entries(self) -> "SparsityPattern":
        if not self.entries:
            raise ValueError("a pattern needs at least one free entry")
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("pattern entries must be distinct")
        for r, c in self.entries:
            if not (1 <= r <= self.R and 1 <= c <= self.C):
                raise ValueError(f"entry ({r},{c}) outside a {self.R}x{self.C} coefficient matrix")
        seen = set()
        for group in self.restrictions:
            if not group:
                raise ValueError("restriction classes must be nonempty")
            for entry in group:
                if entry not in self.entries:
                    raise ValueError(f"restricted entry {entry} is not in the pattern")
                if entry in seen:
                    raise ValueError(f"entry {entry} appears in two restriction classes")
                seen.add(entry)
        return self

    @classmethod
    def diagonal(cls, size: int) -> "SparsityPattern":
        return cls(R=size, C=size, entries=tuple((i, i) for i in range(1, size + 1)))

    @property
    def classes(self) -> List[Tuple[Entry, ...]]:
        """Restriction classes (singletons for free entries), ordered row-major by representative."""
        grouped = {entry: tuple(sorted(group)) for group in self.restrictions for entry in group}
        classes = {grouped.get(entry, (entry,)) for entry in self.entries}
        return sorted(classes, key=lambda group: group[0])

    @property
    def nparams(self) -> int:
        return len(self.classes)

    def variable_of(self) -> Dict[Entry, int]:
        return {entry: k for k, group in enumerate(self.classes) for entry in group}

    def variable_names(self) -> List[str]:
        return [f"b{r}{c}" if self.R < 10 and self.C < 10 else f"b{r}_{c}" for r, c in (g[0] for g in self.classes)]

    def covariate_sets(self) -> List[frozenset]:
        return [frozenset(c for r, c in self.entries if r == row) for row in range(1, self.R + 1)]


@dataclasses.dataclass(frozen=True)
class Dataset:
    """Exact observations: X is C x N, Y is R x N."""

    X: Matrix
    Y: Matrix

    @classmethod
    def create(cls, X: Sequence[Sequence[Scalar]], Y: Sequence[Sequence[Scalar]]) -> "Dataset":
        """Parses and validates; raises DataValidationError on shape or rank problems."""
        try:
            x = tuple(tuple(to_rational(v) for v in row) for row in X)
            y = tuple(tuple(to_rational(v) for v in row) for row in Y)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise DataValidationError(f"unreadable data value: {e}") from e
        if not x or not y:
            raise DataValidationError("X and Y need at least one row")
        widths = {len(row) for row in x + y}
        if len(widths) != 1:
            raise DataValidationError(f"rows of X and Y differ in length: {sorted(widths)}")
        data = cls(x, y)
        data.validate()
        return data

    @property
    def R(self) -> int:
        return len(self.Y)

    @property
    def C(self) -> int:
        return len(self.X)

    @property
    def N(self) -> int:
        return len(self.X[0])

    def validate(self) -> None:
        if self.N < self.R + self.C:
            raise DataValidationError(f"need N >= R + C = {self.R + self.C} subjects, got {self.N}")
        rank = exact_rank(self.X + self.Y)
        if rank != self.R + self.C:
            raise DataValidationError(f"stacked X and Y have rank {rank}, need {self.R + self.C}")

    def x_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.X], dtype=np.float64)

    def y_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.Y], dtype=np.float64)


@dataclasses.dataclass(frozen=True)
class ObjectiveSystem:
    """G(beta) = det((Y - BX)(Y - BX)') and its partial derivatives."""

    G: MultiPoly
    gradient: Tuple[MultiPoly, ...]
    pattern: SparsityPattern
    data: Dataset


def check_compatible(pattern: SparsityPattern, data: Dataset) -> None:
    if (pattern.R, pattern.C) != (data.R, data.C):
        raise DataValidationError(
            f"model is {pattern.R}x{pattern.C} but data has {data.R} responses and {data.C} covariates"
        )


def build_B(pattern: SparsityPattern) -> PolyMatrix:
    n = pattern.nparams
    variables = pattern.variable_of()
    rows = []
    for r in range(1, pattern.R + 1):
        row = []
        for c in range(1, pattern.C + 1):
            k = variables.get((r, c))
            row.append(MultiPoly.variable(k, n) if k is not None else MultiPoly.zero(n))
        rows.append(row)
    return PolyMatrix(rows)


def build_objective(pattern: SparsityPattern, data: Dataset) -> ObjectiveSystem:
    check_compatible(pattern, data)
    data.validate()
    n = pattern.nparams
    residual = PolyMatrix.from_rationals(data.Y, n) - build_B(pattern) @ PolyMatrix.from_rationals(data.X, n)
    gram = residual @ residual.transpose()
    G = poly_det(gram)
    gradient = tuple(G.diff(k) for k in range(n))
    logger.debug(f"Objective of total degree {G.total_degree()} with {len(G)} terms in {n} parameters")
    return ObjectiveSystem(G, gradient, pattern, data)


def apply_scaling(data: Dataset, factor: Scalar) -> Dataset:
    factor = to_rational(factor)
    if factor <= 0:
        raise ValueError(f"scaling factor must be positive, got {factor}")
    return Dataset(
        tuple(tuple(v * factor for v in row) for row in data.X),
        tuple(tuple(v * factor for v in row) for row in data.Y),
    )


def random_dataset(pattern: SparsityPattern, N: int, seed: int, value_range: int = constants.RANDOM_RANGE) -> Dataset:
    """Integer data uniform on [-value_range, value_range], redrawn until the rank condition holds."""
    if N < pattern.R + pattern.C:
        raise ValueError(f"need N >= R + C = {pattern.R + pattern.C}, got {N}")
    rng = np.random.default_rng(seed)
    for attempt in range(constants.RANDOM_MAX_RETRIES):
        draw = rng.integers(-value_range, value_range + 1, size=(pattern.C + pattern.R, N))
        rows = tuple(tuple(Fraction(int(v)) for v in row) for row in draw)
        X, Y = rows[:pattern.C], rows[pattern.C:]
        if exact_rank(X + Y) == pattern.R + pattern.C:
            if attempt:
                logger.debug(f"Random data for seed {seed} needed {attempt + 1} draws")
            return Dataset(X, Y)
    raise DataValidationError(f"no full-rank dataset after {constants.RANDOM_MAX_RETRIES} draws")


def transform_responses(data: Dataset, T: Sequence[Sequence[Scalar]]) -> Dataset:
    """Replaces Y by T Y for an invertible rational R x R matrix T."""
    t = [[to_rational(v) for v in row] for row in T]
    if len(t) != data.R or any(len(row) != data.R for row in t):
        raise ValueError(f"transform must be {data.R}x{data.R}")
    if exact_rank(t) != data.R:
        raise ValueError("transform is singular")
    Y = tuple(
        tuple(sum((t[i][k] * data.Y[k][j] for k in range(data.R)), Fraction(0)) for j in range(data.N))
        for i in range(data.R)
    )
    return Dataset(data.X, Y)


def is_monotone(pattern: SparsityPattern) -> bool:
    """True when the covariate sets of the responses are totally ordered by inclusion."""
    sets = sorted(pattern.covariate_sets(), key=len)
    return all(a <= b for a, b in zip(sets, sets[1:]))


def ols_exact(pattern: SparsityPattern, data: Dataset) -> List[Fraction]:
    """Least squares with identity covariance, solved exactly: equation-by-equation OLS
    for unrestricted patterns, pooled over each restriction class otherwise."""
    check_compatible(pattern, data)
    classes = pattern.classes
    xx = [[sum((a * b for a, b in zip(ri, rj)), Fraction(0)) for rj in data.X] for ri in data.X]
    yx = [[sum((a * b for a, b in zip(yi, xj)), Fraction(0)) for xj in data.X] for yi in data.Y]
    normal = [[sum((xx[c - 1][c2 - 1] for r, c in ck for r2, c2 in cl if r == r2), Fraction(0)) for cl in classes]
              for ck in classes]
    rhs = [sum((yx[r - 1][c - 1] for r, c in ck), Fraction(0)) for ck in classes]
    return exact_solve(normal, rhs)
