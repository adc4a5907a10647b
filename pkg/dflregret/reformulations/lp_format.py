"""LP-format text export of QCQP models, and the matching reader.

Quadratic parts use the bracket syntax: ``[ 2c a * b ] / 2`` in the objective
and ``[ c a * b ]`` in rows. Coefficients are written with ``repr`` so a
parsed file reproduces every coefficient exactly.
"""

import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import structlog

from dflregret.errors import DatasetIoError, SchemaError
from dflregret.lp import Sense
from dflregret.reformulations.qcqp import (
    BilinearTerms,
    LinearTerms,
    QcqpModel,
    QcqpRow,
    QcqpVariable,
)

logger = structlog.get_logger()

LINE_WIDTH = 200
INFINITY = float("inf")

_RELATIONS = {"<=": Sense.LE, "=<": Sense.LE, ">=": Sense.GE, "=>": Sense.GE, "=": Sense.EQ}
_SENSE_TOKEN = {Sense.LE: "<=", Sense.GE: ">=", Sense.EQ: "="}
_SECTIONS = {
    "minimize": "objective",
    "minimise": "objective",
    "min": "objective",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "end": "end",
}


def sidecar_path(path: Union[str, Path]) -> Path:
    return Path(f"{path}.meta.json")


def _number(value: float) -> str:
    return repr(float(value))


def _signed(coef: float, first: bool) -> List[str]:
    if coef < 0:
        return ["-", _number(-coef)]
    return [_number(coef)] if first else ["+", _number(coef)]


def _expression_tokens(linear: LinearTerms, bilinear: BilinearTerms, objective: bool) -> List[str]:
    tokens: List[str] = []
    for name, coef in linear:
        tokens += _signed(coef, not tokens) + [name]
    if bilinear:
        factor = 2.0 if objective else 1.0
        inner: List[str] = []
        for a, b, coef in bilinear:
            inner += _signed(factor * coef, not inner) + [a, "*", b]
        tokens += ([] if not tokens else ["+"]) + ["["] + inner + ["]"]
        if objective:
            tokens += ["/", "2"]
    if not tokens:
        tokens = ["0"]
    return tokens


def _wrap(head: str, tokens: Iterable[str]) -> List[str]:
    lines, current = [], head
    for token in tokens:
        if len(current) + len(token) + 1 > LINE_WIDTH and current.strip():
            lines.append(current)
            current = "  "
        current += " " + token
    lines.append(current)
    return lines


def _bound_line(var: QcqpVariable) -> str:
    lower, upper = var.lower, var.upper
    if lower == -INFINITY and upper == INFINITY:
        return f" {var.name} free"
    if lower == upper:
        return f" {var.name} = {_number(lower)}"
    if upper == INFINITY:
        return f" {var.name} >= {_number(lower)}"
    return f" {_number(lower)} <= {var.name} <= {_number(upper)}"


def export_lp_text(model: QcqpModel, path: Union[str, Path]) -> Path:
    """Write ``model`` in LP format plus a ``<path>.meta.json`` metadata sidecar."""
    path = Path(path)
    lines = [f"\\ dflregret qcqp variant={model.metadata.get('variant', 'unknown')}", "Minimize"]
    lines += _wrap(" obj:", _expression_tokens(model.objective_linear, model.objective_bilinear, objective=True))
    lines.append("Subject To")
    for row in model.rows:
        tokens = _expression_tokens(row.linear, row.bilinear, objective=False)
        lines += _wrap(f" {row.name}:", tokens + [_SENSE_TOKEN[row.sense], _number(row.rhs)])
    lines.append("Bounds")
    lines += [_bound_line(var) for var in model.variables]
    lines.append("End")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        sidecar_path(path).write_text(json.dumps(model.metadata, indent=1), encoding="utf-8")
    except OSError as e:
        raise DatasetIoError(f"Cannot write LP file {path}: {e}") from e

    logger.info("lp_exported", path=str(path), variables=model.n_variables, rows=model.n_rows)
    return path


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _parse_quadratic(tokens: List[str], scale: float) -> List[Tuple[str, str, float]]:
    terms = []
    i, sign = 0, 1.0
    while i < len(tokens):
        token = tokens[i]
        if token in ("+", "-"):
            sign = -sign if token == "-" else sign
            i += 1
            continue
        coef = 1.0
        if _is_number(token):
            coef = float(token)
            i += 1
        a = tokens[i]
        if tokens[i + 1] == "^":
            b = a
        elif tokens[i + 1] == "*":
            b = tokens[i + 2]
        else:
            raise SchemaError(f"Malformed quadratic term near {tokens[i:i + 3]}")
        terms.append((a, b, sign * coef / scale))
        i, sign = i + 3, 1.0
    return terms


def _parse_expression(tokens: List[str]) -> Tuple[LinearTerms, BilinearTerms]:
    linear: List[Tuple[str, float]] = []
    bilinear: List[Tuple[str, str, float]] = []
    i, sign = 0, 1.0
    while i < len(tokens):
        token = tokens[i]
        if token in ("+", "-"):
            sign = -sign if token == "-" else sign
            i += 1
        elif token == "[":
            try:
                close = tokens.index("]", i)
            except ValueError:
                raise SchemaError("Unclosed '[' in quadratic expression") from None
            scale = 1.0
            after = close + 1
            if after < len(tokens) and tokens[after] == "/":
                scale = float(tokens[after + 1])
                after += 2
            bilinear += [(a, b, sign * c) for a, b, c in _parse_quadratic(tokens[i + 1:close], scale)]
            i, sign = after, 1.0
        else:
            coef = 1.0
            if _is_number(token):
                coef = float(token)
                i += 1
                if i >= len(tokens) or tokens[i] in ("+", "-", "["):
                    # bare constant; only "0" is written for empty expressions
                    sign = 1.0
                    continue
            linear.append((tokens[i], sign * coef))
            i, sign = i + 1, 1.0
    return (
        tuple(t for t in linear if t[1] != 0.0),
        tuple(t for t in bilinear if t[2] != 0.0),
    )


def _split_items(tokens: List[str]) -> List[Tuple[Optional[str], List[str]]]:
    items: List[Tuple[Optional[str], List[str]]] = []
    for token in tokens:
        if token.endswith(":") and len(token) > 1:
            items.append((token[:-1], []))
        elif not items:
            items.append((None, [token]))
        else:
            items[-1][1].append(token)
    return items


def _parse_bound(tokens: List[str], bounds: Dict[str, Tuple[float, float]]) -> None:
    if len(tokens) == 2 and tokens[1].lower() == "free":
        bounds[tokens[0]] = (-INFINITY, INFINITY)
    elif len(tokens) == 3 and tokens[1] in _RELATIONS:
        name, relation, value = tokens[0], _RELATIONS[tokens[1]], float(tokens[2])
        lower, upper = bounds.get(name, (0.0, INFINITY))
        if relation is Sense.EQ:
            lower = upper = value
        elif relation is Sense.GE:
            lower = value
        else:
            upper = value
        bounds[name] = (lower, upper)
    elif len(tokens) == 5 and tokens[1] in ("<=", "=<") and tokens[3] in ("<=", "=<"):
        bounds[tokens[2]] = (float(tokens[0]), float(tokens[4]))
    else:
        raise SchemaError(f"Unsupported bound line: {' '.join(tokens)}")


def parse_lp_text(path: Union[str, Path]) -> QcqpModel:
    """Read a file written by ``export_lp_text`` (and its sidecar, if present)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        meta_file = sidecar_path(path)
        metadata = json.loads(meta_file.read_text(encoding="utf-8")) if meta_file.exists() else {}
    except OSError as e:
        raise DatasetIoError(f"Cannot read LP file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"Metadata sidecar of {path} is not valid JSON: {e}") from e

    sections: Dict[str, List[str]] = {"objective": [], "rows": [], "bounds": []}
    bound_lines: List[List[str]] = []
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        keyword = _SECTIONS.get(line.lower())
        if keyword == "end":
            break
        if keyword:
            current = keyword
            continue
        if current is None:
            raise SchemaError(f"Content before the objective section: {line!r}")
        if current == "bounds":
            bound_lines.append(line.split())
        else:
            sections[current] += line.split()

    objective_items = _split_items(sections["objective"])
    objective_linear, objective_bilinear = _parse_expression(objective_items[0][1] if objective_items else [])

    rows = []
    for name, tokens in _split_items(sections["rows"]):
        position = next((k for k, t in enumerate(tokens) if t in _RELATIONS), None)
        if position is None or position + 2 != len(tokens):
            raise SchemaError(f"Row {name!r} has no relation and right-hand side")
        linear, bilinear = _parse_expression(tokens[:position])
        rows.append(
            QcqpRow(
                name=name or f"r_{len(rows)}",
                linear=linear,
                bilinear=bilinear,
                sense=_RELATIONS[tokens[position]],
                rhs=float(tokens[position + 1]),
            )
        )

    bounds: Dict[str, Tuple[float, float]] = {}
    for tokens in bound_lines:
        _parse_bound(tokens, bounds)

    names = list(bounds)
    seen = set(names)
    for terms in [objective_linear] + [row.linear for row in rows]:
        for name, _ in terms:
            if name not in seen:
                seen.add(name)
                names.append(name)
    for terms in [objective_bilinear] + [row.bilinear for row in rows]:
        for a, b, _ in terms:
            for name in (a, b):
                if name not in seen:
                    seen.add(name)
                    names.append(name)

    variables = tuple(QcqpVariable(name, *bounds.get(name, (0.0, INFINITY))) for name in names)
    logger.debug("lp_parsed", path=str(path), variables=len(variables), rows=len(rows))
    return QcqpModel(
        variables=variables,
        rows=tuple(rows),
        objective_linear=objective_linear,
        objective_bilinear=objective_bilinear,
        metadata=metadata,
    )
