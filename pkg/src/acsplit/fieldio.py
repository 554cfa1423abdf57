"""Lossless on-disk field format.

One ASCII header line

    ACF1 <dims> <M1> [M2 [M3]] <L1> [L2 [L3]]\n

followed by the raw cell values as IEEE-754 little-endian float64 in C order
(axis 0 slowest), matching the in-memory layout of :class:`acsplit.grid.Field`.
"""

from __future__ import annotations

import os
from typing import Union

import numpy as np

from .grid import Field, GridSpec

__all__ = ["FieldFormatError", "load_field", "save_field"]

MAGIC = "ACF1"


class FieldFormatError(ValueError):
    """Malformed header, wrong payload size, or rejected values."""


def save_field(path: Union[str, os.PathLike], f: Field) -> None:
    g = f.grid
    tokens = [MAGIC, str(g.dims)]
    tokens += [str(m) for m in g.cells]
    tokens += [repr(length) for length in g.lengths]
    header = (" ".join(tokens) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_field(path: Union[str, os.PathLike], allow_nonfinite: bool = False) -> Field:
    with open(path, "rb") as fh:
        header = fh.readline()
        payload = fh.read()
    try:
        tokens = header.decode("ascii").split()
    except UnicodeDecodeError as err:
        raise FieldFormatError(f"{path}: header is not ASCII") from err
    if not tokens or tokens[0] != MAGIC:
        raise FieldFormatError(f"{path}: missing {MAGIC} magic")
    try:
        dims = int(tokens[1])
    except (IndexError, ValueError) as err:
        raise FieldFormatError(f"{path}: unreadable dims") from err
    if len(tokens) != 2 + 2 * dims:
        raise FieldFormatError(
            f"{path}: header has {len(tokens) - 2} fields, expected {2 * dims} for dims={dims}"
        )
    try:
        cells = tuple(int(t) for t in tokens[2 : 2 + dims])
        lengths = tuple(float(t) for t in tokens[2 + dims : 2 + 2 * dims])
        grid = GridSpec(lengths, cells)
    except ValueError as err:
        raise FieldFormatError(f"{path}: bad grid header: {err}") from err
    expected = grid.cell_count * 8
    if len(payload) != expected:
        raise FieldFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(grid.shape)
    if not allow_nonfinite and not np.all(np.isfinite(values)):
        raise FieldFormatError(f"{path}: non-finite values (pass allow_nonfinite=True to keep)")
    return Field(grid, values)
