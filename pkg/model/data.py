import hashlib
from pathlib import Path
from typing import List, Optional, Tuple, Union

import orjson
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError

from model.sur import DataValidationError, Dataset, SparsityPattern


class ModelFile(BaseModel):
    """On-disk description of a SUR model."""

    # Makes the object "Immutable" once created.
    model_config = ConfigDict(frozen=True, extra="forbid")

    R: PositiveInt = Field(description="Number of responses.")
    C: PositiveInt = Field(description="Number of covariates.")
    pattern: List[Tuple[int, int]] = Field(description="Free coefficients as 1-based [r, c] pairs.")
    restrictions: List[List[Tuple[int, int]]] = Field(
        default_factory=list,
        description="Groups of pattern entries that share one parameter.",
    )

    def to_pattern(self) -> SparsityPattern:
        return SparsityPattern(
            R=self.R,
            C=self.C,
            entries=tuple(self.pattern),
            restrictions=tuple(tuple(group) for group in self.restrictions),
        )

    @classmethod
    def from_pattern(cls, pattern: SparsityPattern) -> "ModelFile":
        return cls(
            R=pattern.R,
            C=pattern.C,
            pattern=list(pattern.entries),
            restrictions=[list(group) for group in pattern.restrictions],
        )

    def label(self) -> str:
        text = "{" + ",".join(f"({r},{c})" for r, c in self.pattern) + "}"
        for group in self.restrictions:
            text += " " + "=".join(f"b{r}{c}" for r, c in group)
        return text


class DataFile(BaseModel):
    """Observations as rows of decimal or ratio strings, parsed exactly."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    X: List[List[str]] = Field(description="Covariates, C rows of N values.")
    Y: List[List[str]] = Field(description="Responses, R rows of N values.")

    def to_dataset(self) -> Dataset:
        return Dataset.create(self.X, self.Y)

    @classmethod
    def from_dataset(cls, data: Dataset) -> "DataFile":
        return cls(
            X=[[str(v) for v in row] for row in data.X],
            Y=[[str(v) for v in row] for row in data.Y],
        )


class TableRow(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    model: ModelFile = Field(description="Pattern and restrictions of the row.")
    dimension: int = Field(description="Expected dimension of the maximum likelihood ideal.")
    degree: int = Field(description="Expected degree of the maximum likelihood ideal.")
    budget_secs: Optional[float] = Field(
        default=None, description="Time budget for this row; None uses the default budget."
    )


class TableFile(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(description="Table identifier, e.g. gensur or submodels.")
    rows: List[TableRow] = Field(description="Rows in presentation order.")


PathLike = Union[str, Path]


def _load(path: PathLike, cls):
    try:
        with open(path, "rb") as f:
            return cls.model_validate(orjson.loads(f.read()))
    except orjson.JSONDecodeError as e:
        raise DataValidationError(f"{path}: invalid JSON: {e}") from e
    except ValidationError as e:
        raise DataValidationError(f"{path}: {e}") from e


def load_model(path: PathLike) -> ModelFile:
    return _load(path, ModelFile)


def load_data(path: PathLike) -> DataFile:
    return _load(path, DataFile)


def load_table(path: PathLike) -> TableFile:
    return _load(path, TableFile)


def save(obj: BaseModel, path: PathLike) -> None:
    with open(path, "wb") as f:
        f.write(orjson.dumps(obj.model_dump(mode="json"), option=orjson.OPT_INDENT_2))


def data_digest(data: Dataset) -> str:
    """SHA-256 over the canonical rational text of X and Y."""
    lines = ["X"] + [" ".join(str(v) for v in row) for row in data.X]
    lines += ["Y"] + [" ".join(str(v) for v in row) for row in data.Y]
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()
