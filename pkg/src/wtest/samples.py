"""Sample container and CSV I/O.

A Sample wraps an (n, d) float64 matrix of observations. The underlying
array is made read-only so samples can be shared freely across worker
processes and threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InputError


@dataclass(frozen=True)
class Sample:
    """n observations in d dimensions, the empirical measure they induce.

    ``unit_box`` is derived from the data: True iff every entry lies in
    [0, 1]. Tests that assume box-valued data treat the flag as advisory.
    """

    data: np.ndarray
    unit_box: bool = field(init=False)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise DimensionError(f"sample must be a 2-D matrix, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"sample must be non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("sample contains non-finite entries")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(
            self, "unit_box", bool(np.all(arr >= 0.0) and np.all(arr <= 1.0))
        )

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def load_csv(path) -> Sample:
    """Read a comma-separated float matrix.

    An optional header row is auto-detected: if the first row fails to
    parse as floats it is treated as a header. Any later malformed row
    raises InputError carrying its 1-based line number.
    """
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                row = [float(v) for v in fields]
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise InputError(f"{path}:{lineno}: malformed CSV row {fields!r}")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputError(
                    f"{path}:{lineno}: expected {width} columns, got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return Sample(np.asarray(rows, dtype=np.float64))


def format_csv(data: np.ndarray, header: list[str] | None = None) -> str:
    """Render a float matrix as CSV text (17 significant digits, lossless)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    lines = []
    if header is not None:
        lines.append(",".join(header))
    for row in arr:
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"
