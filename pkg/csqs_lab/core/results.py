"""
场、表格与度量报告的持久化

两种格式:
- CSV: 以 `# key: value` 头部行记录全部参数（值为 JSON 编码），随后一行列名，
  再接逗号分隔的数据行。浮点数保留 17 位有效数字。
- JSON: 信封结构 {"meta": {...}, "data": ...}。

输出字节只取决于数据，与耗时和线程数无关。
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from .exceptions import UsageError
from .measures import MeasureReport
from .phase_space import PhaseGrid, WignerField

logger = logging.getLogger(__name__)

OutputFormat = Literal["csv", "json"]
FLOAT_FORMAT = "%.17g"
REPORT_COLUMNS = (
    "name",
    "variant",
    "closed_value",
    "oracle_value",
    "delta",
    "method",
    "method_notes",
)


def _check_format(fmt: str) -> str:
    if fmt not in ("csv", "json"):
        raise UsageError(f"Unknown output format: {fmt}", details={"format": fmt})
    return fmt


def format_value(value: Any) -> str:
    """渲染 CSV 单元格，浮点数固定 17 位有效数字"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    if isinstance(value, str):
        return value.replace(",", ";").replace("\n", " ")
    return str(value)


def _json_safe(value: Any) -> Any:
    """非有限浮点数转为 null，numpy 标量转为 Python 标量"""
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _header_lines(meta: Dict[str, Any]) -> List[str]:
    return [
        f"# {key}: {json.dumps(_json_safe(value), ensure_ascii=False, sort_keys=True)}"
        for key, value in meta.items()
    ]


def _write_text(path: Path, lines: List[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines))
        f.write("\n")
    logger.debug(f"Wrote {path} ({len(lines)} lines)")
    return path


def write_envelope(path: Path, meta: Dict[str, Any], data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    envelope = {"meta": _json_safe(meta), "data": _json_safe(data)}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(envelope, f, indent=2, ensure_ascii=False, allow_nan=False)
        f.write("\n")
    logger.debug(f"Wrote {path}")
    return path


# --- 写入 ---


def write_field(
    field: WignerField,
    path: Path,
    fmt: OutputFormat = "csv",
    meta: Optional[Dict[str, Any]] = None,
) -> Path:
    """写出场及其网格、积分和调用方参数"""
    meta = {
        "kind": "wigner_field",
        **(meta or {}),
        "grid": field.grid.as_dict(),
        "total_integral": field.total_integral,
        "abs_integral": field.abs_integral,
    }
    if _check_format(fmt) == "json":
        return write_envelope(path, meta, {"grid": field.grid.as_dict(), "values": field.values})

    lines = _header_lines(meta)
    lines.append("x,y,W")
    xs, ys = field.grid.xs, field.grid.ys
    for i, x in enumerate(xs):
        row = field.values[i]
        for j, y in enumerate(ys):
            lines.append(f"{FLOAT_FORMAT % x},{FLOAT_FORMAT % y},{FLOAT_FORMAT % row[j]}")
    return _write_text(path, lines)


def write_table(
    rows: Sequence[Sequence[Any]],
    columns: Sequence[str],
    path: Path,
    fmt: OutputFormat = "csv",
    meta: Optional[Dict[str, Any]] = None,
) -> Path:
    meta = {"kind": "table", **(meta or {}), "columns": list(columns)}
    for row in rows:
        if len(row) != len(columns):
            raise UsageError(
                "table row does not match its columns",
                details={"row": len(row), "columns": len(columns)},
            )
    if _check_format(fmt) == "json":
        return write_envelope(path, meta, [dict(zip(columns, row)) for row in rows])

    lines = _header_lines(meta)
    lines.append(",".join(columns))
    lines.extend(",".join(format_value(value) for value in row) for row in rows)
    return _write_text(path, lines)


def write_reports(
    reports: Sequence[MeasureReport],
    path: Path,
    fmt: OutputFormat = "csv",
    meta: Optional[Dict[str, Any]] = None,
) -> Path:
    meta = {**(meta or {}), "kind": "measure_reports"}
    if _check_format(fmt) == "json":
        return write_envelope(path, meta, [report.model_dump() for report in reports])
    rows = [[getattr(report, column) for column in REPORT_COLUMNS] for report in reports]
    return write_table(rows, REPORT_COLUMNS, path, "csv", meta)


# --- 读取 ---


def _read_csv(path: Path) -> Tuple[Dict[str, Any], List[str], List[List[str]]]:
    meta: Dict[str, Any] = {}
    columns: List[str] = []
    rows: List[List[str]] = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                meta[key] = json.loads(value)
            elif not columns:
                columns = line.split(",")
            else:
                rows.append(line.split(","))
    return meta, columns, rows


def read_table(path: Path) -> Tuple[Dict[str, Any], List[str], List[List[str]]]:
    """CSV 表格的头部元数据、列名与原始单元格字符串"""
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as f:
            envelope = json.load(f)
        data = envelope["data"]
        columns = list(envelope["meta"].get("columns") or (data[0].keys() if data else []))
        rows = [[record.get(column) for column in columns] for record in data]
        return envelope["meta"], columns, rows
    return _read_csv(path)


def read_field(path: Path) -> Tuple[Dict[str, Any], WignerField]:
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as f:
            envelope = json.load(f)
        grid = PhaseGrid(**envelope["data"]["grid"])
        values = np.array(envelope["data"]["values"], dtype=float)
        return envelope["meta"], WignerField.from_values(grid, values)

    meta, columns, rows = _read_csv(path)
    if columns != ["x", "y", "W"]:
        raise UsageError(f"{path} is not a field file", details={"columns": columns})
    grid = PhaseGrid(**meta["grid"])
    values = np.array([float(row[2]) for row in rows]).reshape(grid.nx, grid.ny)
    return meta, WignerField.from_values(grid, values)
