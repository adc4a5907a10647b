from .zero_regret import (
    Answer,
    UniquenessReport,
    ZeroRegretVerdict,
    check_uniqueness,
    zero_regret_certificate,
)

__all__ = [
    "Answer",
    "UniquenessReport",
    "ZeroRegretVerdict",
    "check_uniqueness",
    "zero_regret_certificate",
]
