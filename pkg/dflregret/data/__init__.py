from .dataset import Dataset, GenParams, Sample, Split, train_size
from .generator import (
    conflicting_pair_dataset,
    cost_formula,
    generate,
    square_demo_dataset,
    triangle_demo_dataset,
)
from .storage import load, save

__all__ = [
    "Dataset",
    "GenParams",
    "Sample",
    "Split",
    "train_size",
    "conflicting_pair_dataset",
    "cost_formula",
    "generate",
    "square_demo_dataset",
    "triangle_demo_dataset",
    "load",
    "save",
]
