"""
RESULT WRITER - Tulis hasil run ke CSV dan plot-data (17 digit signifikan, UTF-8, LF)
"""

from pathlib import Path

import numpy as np
import pandas as pd

from config.settings import settings
from core.errors import OutputError, ValidationError
from security.logger import get_logger

logger = get_logger(__name__)


def _table(result):
    """DataFrame behind a RunResult, LeverScan, PathComparison or plain table"""
    if isinstance(result, pd.DataFrame):
        return result
    if hasattr(result, "series"):
        return result.series
    if hasattr(result, "table"):
        table = result.table
        return table() if callable(table) else table
    raise ValidationError(f"cannot write a {type(result).__name__} as a table")


def _number(value):
    return f"{value:.{settings.CSV_DIGITS}g}"


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return _number(float(value))
    return str(value)


def _metadata(result, table):
    lines = []
    if isinstance(result, pd.DataFrame):
        result = None
    else:
        result = getattr(result, "result", result)
    name = getattr(result, "name", None)
    if name is not None:
        lines.append(f"experiment: {name}")
    reservoir = getattr(result, "reservoir", None)
    if reservoir is not None:
        lines.append(f"temperature: {_number(reservoir.temperature)}")
        lines.append(f"chemical_potential: {_number(reservoir.chemical_potential)}")
    grid = getattr(result, "grid", None)
    if grid is not None:
        lines.append(f"grid: {grid}")
    if hasattr(result, "w_ext"):
        lines.append(f"W_ext: {_number(result.w_ext)} +- {_number(result.w_ext_error)}")
        lines.append(f"dOmega: {_number(result.delta_omega)}")
    for key, value in table.attrs.items():
        lines.append(f"{key}: {_number(value) if isinstance(value, float) else value}")
    return lines


def _prepare(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"cannot create output directory for {path}: {e}", path=str(path)) from e
    return path


CSV_OPTIONS = {"index": False, "lineterminator": "\n", "na_rep": "nan"}


def csv_text(result):
    """CSV as a string, same rules as emit_csv"""
    return _table(result).to_csv(float_format=f"%.{settings.CSV_DIGITS}g", **CSV_OPTIONS)


def emit_csv(result, path):
    """Header row plus one line per point, columns in the table's order"""
    table = _table(result)
    path = _prepare(path)
    try:
        table.to_csv(path, encoding="utf-8", float_format=f"%.{settings.CSV_DIGITS}g", **CSV_OPTIONS)
    except OSError as e:
        raise OutputError(f"cannot write CSV {path}: {e}", path=str(path)) from e
    logger.info(f"💾 CSV written: {path} ({len(table)} rows, {len(table.columns)} columns)")
    return path


def plotdata_text(result):
    """'#' metadata, then one 'x y' block per curve, blocks split by two blank lines"""
    table = _table(result)
    lines = [f"# {line}" for line in _metadata(result, table)]
    if table.columns.empty:
        return "\n".join(lines) + "\n"

    x_name = table.columns[0]
    x = table[x_name].tolist()
    blocks = []
    for column in table.columns[1:]:
        values = table[column]
        if not pd.api.types.is_numeric_dtype(values) or pd.api.types.is_bool_dtype(values):
            continue
        block = [f"# curve: {column}", f"# columns: {x_name} {column}"]
        block.extend(f"{_cell(a)} {_number(b)}" for a, b in zip(x, values.astype(float).tolist()))
        blocks.append("\n".join(block))
    return "\n".join(lines) + "\n" + "\n\n\n".join(blocks) + "\n"


def emit_plotdata(result, path):
    path = _prepare(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(plotdata_text(result))
    except OSError as e:
        raise OutputError(f"cannot write plot data {path}: {e}", path=str(path)) from e
    logger.info(f"💾 Plot data written: {path}")
    return path


WRITERS = {"csv": emit_csv, "plot": emit_plotdata}


def emit(result, path, output_format="csv"):
    if output_format not in WRITERS:
        raise ValidationError(f"unknown output format '{output_format}', choose from {sorted(WRITERS)}")
    return WRITERS[output_format](result, path)


def render(result, output_format="csv"):
    """Text of the result in the chosen format (for stdout)"""
    renderers = {"csv": csv_text, "plot": plotdata_text}
    if output_format not in renderers:
        raise ValidationError(f"unknown output format '{output_format}', choose from {sorted(renderers)}")
    return renderers[output_format](result)
