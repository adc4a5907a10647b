from .lp_format import export_lp_text, parse_lp_text, sidecar_path
from .qcqp import (
    AuditReport,
    QcqpModel,
    QcqpRow,
    QcqpVariable,
    Variant,
    audit,
    build_exact,
    build_penalized,
    map_penalized_to_exact,
    penalized_point,
    warm_point,
)

__all__ = [
    "export_lp_text",
    "parse_lp_text",
    "sidecar_path",
    "AuditReport",
    "QcqpModel",
    "QcqpRow",
    "QcqpVariable",
    "Variant",
    "audit",
    "build_exact",
    "build_penalized",
    "map_penalized_to_exact",
    "penalized_point",
    "warm_point",
]
