import json
import math
import sys
from enum import Enum
from fractions import Fraction
from typing import IO, Iterable, List, Sequence

import numpy as np
from pydantic import BaseModel

from config import settings
from models import CertifiedValue
from schemas import format_rational


class TableWriter:
    """Streams tables as CSV or JSON with fixed number formatting"""

    def __init__(self, fmt: str = "csv", stream: IO[str] = None, digits: int = None):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown table format {fmt!r}")
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self.digits = digits or settings.FLOAT_DIGITS

    # ==================== Scalars ====================

    def format_float(self, value: float) -> str:
        """17 significant digits, round-half-even on the binary value"""
        value = float(value)
        if not math.isfinite(value):
            return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return format(value, f".{self.digits}g")

    def cell(self, value) -> str:
        """CSV text of one cell"""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, Enum):
            return str(value.value)
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, Fraction):
            return format_rational(value)
        if isinstance(value, (float, np.floating)):
            return self.format_float(value)
        if isinstance(value, CertifiedValue):
            return f"{self.format_float(value.value)} ± {self.format_float(value.abs_error)}"
        if value is None:
            return ""
        return str(value)

    def json_value(self, value) -> str:
        """JSON text of a value; floats are written as raw fixed-width tokens"""
        if isinstance(value, BaseModel):
            return self.json_value({name: getattr(value, name) for name in type(value).model_fields})
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, Enum):
            return json.dumps(value.value)
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, Fraction):
            return json.dumps(format_rational(value))
        if isinstance(value, (float, np.floating)):
            return self.format_float(value) if math.isfinite(value) else "null"
        if value is None:
            return "null"
        if isinstance(value, dict):
            items = (f"{json.dumps(str(k))}: {self.json_value(v)}" for k, v in value.items())
            return "{" + ", ".join(items) + "}"
        if isinstance(value, (list, tuple)):
            return "[" + ", ".join(self.json_value(v) for v in value) + "]"
        return json.dumps(str(value))

    # ==================== Tables ====================

    def write_table(self, header: Sequence[str], rows: Iterable[Sequence]) -> int:
        """Write rows as they come; the CSV header is written even for an empty table"""
        count = 0
        if self.fmt == "csv":
            self.stream.write(",".join(header) + "\n")
            for row in rows:
                self.stream.write(",".join(self.cell(v) for v in row) + "\n")
                count += 1
            return count
        self.stream.write("[")
        for row in rows:
            self.stream.write(",\n " if count else "\n ")
            self.stream.write(self.json_value(dict(zip(header, row))))
            count += 1
        self.stream.write("\n]\n" if count else "]\n")
        return count

    def write_models(self, rows: Iterable[BaseModel], header: List[str] = None) -> int:
        """Rows from pydantic models; CertifiedValue fields split into value and _err columns"""
        rows = iter(rows)
        first = next(rows, None)
        if first is None:
            return self.write_table(header or [], [])
        columns = header or _columns(first)
        return self.write_table(columns, (_flatten(row, columns) for row in _chain(first, rows)))

    def write_record(self, record) -> None:
        """A single report; JSON for both formats unless it flattens to one CSV row"""
        if self.fmt == "csv" and isinstance(record, BaseModel) and _is_flat(record):
            self.write_models([record])
            return
        self.stream.write(self.json_value(record) + "\n")

    def write_value(self, value: CertifiedValue) -> None:
        """`value ± bound` on its own line"""
        self.stream.write(f"{self.format_float(value.value)} ± {self.format_float(value.abs_error)}\n")


def _chain(first, rest):
    yield first
    yield from rest


def _columns(model: BaseModel) -> List[str]:
    columns = []
    for name in type(model).model_fields:
        if isinstance(getattr(model, name), CertifiedValue):
            columns += [name, f"{name}_err"]
        else:
            columns.append(name)
    return columns


def _flatten(model: BaseModel, columns: List[str]) -> list:
    values = []
    for column in columns:
        if column.endswith("_err") and column not in type(model).model_fields:
            values.append(getattr(model, column[:-4]).abs_error)
            continue
        value = getattr(model, column)
        values.append(value.value if isinstance(value, CertifiedValue) else value)
    return values


def _is_flat(model: BaseModel) -> bool:
    return not any(isinstance(getattr(model, name), (list, tuple, dict, BaseModel))
                   and not isinstance(getattr(model, name), CertifiedValue)
                   for name in type(model).model_fields)


def get_writer(fmt: str, stream: IO[str] = None) -> TableWriter:
    return TableWriter(fmt=fmt, stream=stream)

