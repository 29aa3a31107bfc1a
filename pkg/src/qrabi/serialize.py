"""Deterministic CSV/JSON table output with a commented metadata header.

Identical inputs must produce byte-identical files: floats are rendered
with repr (shortest round-trip form), metadata order is fixed by insertion,
and nothing time- or environment-dependent is ever written.
"""

import json

import numpy as np

from . import __version__
from .errors import ValidationError

__all__ = ["TableDoc", "format_value", "timeseries_columns"]

COMMENT_PREFIX = "# "


def format_value(value) -> str:
    """Shortest round-trip text for a cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return repr(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return value
    raise ValidationError(f"unsupported cell type {type(value)!r}")


class TableDoc:
    """A column-oriented table plus ordered metadata, writable as CSV or JSON."""

    def __init__(self, command: str):
        self.metadata = [("qrabi_version", __version__), ("command", command)]
        self.columns = []
        self.rows = []

    def meta(self, key: str, value):
        self.metadata.append((key, value))
        return self

    def set_columns(self, names):
        self.columns = list(names)
        return self

    def add_row(self, cells):
        cells = list(cells)
        if len(cells) != len(self.columns):
            raise ValidationError(
                f"row has {len(cells)} cells, table has {len(self.columns)} columns"
            )
        self.rows.append(cells)
        return self

    def to_csv_text(self) -> str:
        lines = [
            f"{COMMENT_PREFIX}{key}: {format_value(val)}"
            for key, val in self.metadata
        ]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(format_value(c) for c in row))
        return "\n".join(lines) + "\n"

    def to_json_text(self) -> str:
        obj = {
            "metadata": {k: v for k, v in self.metadata},
            "columns": self.columns,
            "rows": self.rows,
        }
        return json.dumps(obj, indent=1, sort_keys=False) + "\n"

    def write(self, path: str, fmt: str):
        if fmt == "csv":
            text = self.to_csv_text()
        elif fmt == "json":
            text = self.to_json_text()
        else:
            raise ValidationError(f"unknown format {fmt!r}")
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise ValidationError(f"cannot write {path!r}: {exc}") from exc


def timeseries_columns(series, time_scale: float = 1.0, value_scales=None):
    """(column names, row iterator) for a TimeSeries, complex tracks split.

    time_scale multiplies the time column (omega for dimensionless output);
    value_scales optionally maps track name -> multiplier.
    """
    value_scales = value_scales or {}
    names = ["t"]
    getters = []
    for name in series.tracks:
        arr = np.asarray(series.tracks[name])
        scale = value_scales.get(name, 1.0)
        if np.iscomplexobj(arr):
            names.extend([f"{name}_re", f"{name}_im"])
            getters.append((arr, scale, True))
        else:
            names.append(name)
            getters.append((arr, scale, False))
    times = series.grid.times()

    def rows():
        for i, t in enumerate(times):
            row = [float(t * time_scale)]
            for arr, scale, is_complex in getters:
                if is_complex:
                    row.append(float(arr[i].real * scale))
                    row.append(float(arr[i].imag * scale))
                else:
                    row.append(float(arr[i] * scale))
            yield row

    return names, rows()
