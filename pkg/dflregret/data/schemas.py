"""Pydantic schemas of the dataset JSON document."""

from typing import List, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = 1


class PolytopeSchema(BaseModel):
    """Explicit polytope of a Custom problem (infinite bounds are null)."""
    matrix: List[List[float]] = Field(description="Row coefficients, one list per row")
    senses: List[str] = Field(description="GE, LE or EQ per row")
    rhs: List[float] = Field(description="Right-hand side per row")
    lower: List[Optional[float]] = Field(description="Variable lower bounds, null for -inf")
    upper: List[Optional[float]] = Field(description="Variable upper bounds, null for +inf")


class ProblemSchema(BaseModel):
    """Descriptor sufficient to rebuild the nominal problem."""
    kind: str = Field(description="ShortestPathGrid, BipartiteMatching or Custom")
    rows: Optional[int] = Field(default=None, description="Grid rows (shortest path)")
    cols: Optional[int] = Field(default=None, description="Grid cols (shortest path)")
    n_left: Optional[int] = Field(default=None, description="Left nodes (matching)")
    n_right: Optional[int] = Field(default=None, description="Right nodes (matching)")
    n_edges: Optional[int] = Field(default=None, description="Sampled edges (matching)")
    seed: Optional[int] = Field(default=None, description="Edge-sampling seed (matching)")
    name: Optional[str] = Field(default=None, description="Name of a custom problem")
    polytope: Optional[PolytopeSchema] = Field(default=None, description="Custom polytope")


class GenParamsSchema(BaseModel):
    N: int = Field(ge=1, description="Number of samples")
    K: int = Field(ge=1, description="Number of features")
    deg: Optional[int] = Field(default=None, description="Polynomial degree of the cost map")
    noise: Optional[float] = Field(default=None, description="Noise half-width")
    seed: Optional[int] = Field(default=None, description="Master seed")
    true_omega: Optional[List[List[float]]] = Field(default=None, description="True parameters (n x K)")
    omega_law: str = Field(default="bernoulli", description="Law of the true parameters")


class SampleSchema(BaseModel):
    x: List[float] = Field(description="Feature vector")
    c: List[float] = Field(description="Cost vector aligned with the problem's edges")


class SplitSchema(BaseModel):
    train: List[int]
    test: List[int]


class DatasetFile(BaseModel):
    """Top-level dataset document."""
    version: int = Field(description="Schema version")
    problem: ProblemSchema
    gen_params: GenParamsSchema
    samples: List[SampleSchema]
    split: SplitSchema
