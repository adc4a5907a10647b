"""Linear predictors c_hat = omega @ x, optionally with an intercept column."""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import numpy as np
import structlog
from pydantic import BaseModel, Field, ValidationError

from dflregret.errors import DatasetIoError, InvalidDimension, InvalidParam, SchemaError

logger = structlog.get_logger()

MODEL_VERSION = 1


class ModelFile(BaseModel):
    """Model JSON document: omega flattened row-major."""
    version: int = Field(default=MODEL_VERSION, description="Schema version")
    omega: List[float] = Field(description="Row-major n x k parameter matrix")
    n: int = Field(ge=1, description="Rows of omega (cost dimension)")
    k: int = Field(ge=1, description="Columns of omega (features, intercept included)")
    bias: bool = Field(description="True when x is prefixed with a constant 1")


def augment_features(x: np.ndarray, bias: bool) -> np.ndarray:
    """Prefix a column of ones when ``bias`` is set."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if not bias:
        return x
    return np.hstack([np.ones((x.shape[0], 1)), x])


def prediction_operator(x_row: np.ndarray, n: int) -> np.ndarray:
    """Matrix M (n x n*k) with M @ omega.ravel() == omega @ x_row (row-major omega)."""
    return np.kron(np.eye(n), np.asarray(x_row, dtype=float)[None, :])


@dataclass(frozen=True, eq=False)
class LinearModel:
    omega: np.ndarray
    bias: bool = False

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        if omega.ndim != 2:
            raise InvalidDimension(f"omega must be a matrix, got shape {omega.shape}")
        if not np.all(np.isfinite(omega)):
            raise InvalidParam("omega must be finite")
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)

    def __eq__(self, other):
        if not isinstance(other, LinearModel):
            return NotImplemented
        return self.bias == other.bias and np.array_equal(self.omega, other.omega)

    __hash__ = None

    @property
    def n(self) -> int:
        return self.omega.shape[0]

    @property
    def k(self) -> int:
        return self.omega.shape[1]

    @classmethod
    def zeros(cls, n: int, n_features: int, bias: bool = False) -> "LinearModel":
        return cls(omega=np.zeros((n, n_features + int(bias))), bias=bias)

    def check_dimensions(self, n: int, n_features: int) -> None:
        expected = (n, n_features + int(self.bias))
        if self.omega.shape != expected:
            raise InvalidDimension(f"omega has shape {self.omega.shape}, expected {expected}")

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Predicted costs, one row per feature row."""
        chat = augment_features(x, self.bias) @ self.omega.T
        if not np.all(np.isfinite(chat)):
            raise InvalidParam("predictions are not finite")
        return chat

    def scaled(self, alpha: float) -> "LinearModel":
        return LinearModel(omega=alpha * self.omega, bias=self.bias)

    def to_file(self) -> ModelFile:
        return ModelFile(omega=self.omega.reshape(-1).tolist(), n=self.n, k=self.k, bias=self.bias)

    @classmethod
    def from_file(cls, doc: ModelFile) -> "LinearModel":
        if doc.version != MODEL_VERSION:
            raise SchemaError(f"Model schema version {doc.version} is not supported")
        if len(doc.omega) != doc.n * doc.k:
            raise SchemaError(f"omega has {len(doc.omega)} entries, expected n*k = {doc.n * doc.k}")
        return cls(omega=np.array(doc.omega, dtype=float).reshape(doc.n, doc.k), bias=doc.bias)

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.to_file().model_dump_json(indent=1), encoding="utf-8")
        except OSError as e:
            raise DatasetIoError(f"Cannot write model to {path}: {e}") from e
        logger.info("model_saved", path=str(path), n=self.n, k=self.k, bias=self.bias)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LinearModel":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise DatasetIoError(f"Cannot read model {path}: {e}") from e
        try:
            doc = ModelFile.model_validate_json(text)
        except ValidationError as e:
            raise SchemaError(f"{path} is not a valid model file: {e}") from e
        return cls.from_file(doc)
