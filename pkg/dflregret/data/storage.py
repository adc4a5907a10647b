"""Dataset save/load as a single versioned JSON document."""

from pathlib import Path
from typing import Union

import numpy as np
import structlog
from pydantic import ValidationError

from dflregret.data.dataset import Dataset, GenParams
from dflregret.data.schemas import (
    SCHEMA_VERSION,
    DatasetFile,
    GenParamsSchema,
    ProblemSchema,
    SampleSchema,
    SplitSchema,
)
from dflregret.errors import DatasetIoError, InvalidDimension, MalformedProblem, SchemaError
from dflregret.problems import NominalProblem

logger = structlog.get_logger()

PathLike = Union[str, Path]


def to_document(dataset: Dataset) -> DatasetFile:
    params = dataset.gen_params
    return DatasetFile(
        version=SCHEMA_VERSION,
        problem=ProblemSchema(**dataset.problem.describe()),
        gen_params=GenParamsSchema(
            N=params.n_samples,
            K=params.n_features,
            deg=params.deg,
            noise=params.noise,
            seed=params.seed,
            true_omega=None if params.true_omega is None else params.true_omega.tolist(),
            omega_law=params.omega_law,
        ),
        samples=[
            SampleSchema(x=dataset.x[i].tolist(), c=dataset.c[i].tolist())
            for i in range(dataset.n_samples)
        ],
        split=SplitSchema(train=list(dataset.train), test=list(dataset.test)),
    )


def from_document(doc: DatasetFile) -> Dataset:
    if doc.version != SCHEMA_VERSION:
        raise SchemaError(f"Dataset schema version {doc.version} is not supported (expected {SCHEMA_VERSION})")
    try:
        problem = NominalProblem.from_descriptor(doc.problem.model_dump())
    except (KeyError, TypeError, ValueError, MalformedProblem) as e:
        raise SchemaError(f"Problem descriptor is incomplete: {e}") from e
    params = doc.gen_params
    try:
        x = np.array([s.x for s in doc.samples], dtype=float).reshape(len(doc.samples), params.K)
        c = np.array([s.c for s in doc.samples], dtype=float).reshape(len(doc.samples), problem.n)
        return Dataset(
            problem=problem,
            x=x,
            c=c,
            train=tuple(doc.split.train),
            test=tuple(doc.split.test),
            gen_params=GenParams(
                n_samples=params.N,
                n_features=params.K,
                deg=params.deg,
                noise=params.noise,
                seed=params.seed,
                true_omega=None if params.true_omega is None else np.array(params.true_omega, dtype=float),
                omega_law=params.omega_law,
            ),
        )
    except (InvalidDimension, ValueError) as e:
        raise SchemaError(f"Dataset document is inconsistent: {e}") from e


def save(dataset: Dataset, path: PathLike) -> Path:
    """Write ``dataset`` as JSON; floats use the shortest round-trip repr."""
    path = Path(path)
    text = to_document(dataset).model_dump_json(indent=1)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise DatasetIoError(f"Cannot write dataset to {path}: {e}") from e
    logger.info("dataset_saved", path=str(path), n_samples=dataset.n_samples)
    return path


def load(path: PathLike) -> Dataset:
    """Read a dataset written by ``save``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetIoError(f"Cannot read dataset {path}: {e}") from e
    try:
        doc = DatasetFile.model_validate_json(text)
    except ValidationError as e:
        raise SchemaError(f"{path} is not a valid dataset file: {e}") from e
    except ValueError as e:
        raise SchemaError(f"{path} does not match the dataset schema: {e}") from e
    return from_document(doc)
