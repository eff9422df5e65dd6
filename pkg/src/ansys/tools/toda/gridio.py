# Copyright (C) 2025 ANSYS, Inc. and/or its affiliates.
# SPDX-License-Identifier: MIT
#
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.


"""Binary storage of field grids."""

import logging
import os
from typing import Union

import numpy as np

from ansys.tools.toda.errors import GridFormatError
from ansys.tools.toda.laxflow import FieldGrid

LOG = logging.getLogger(__name__)

MAGIC = b"TODA"
VERSION = 1

HEADER = np.dtype(
    [
        ("magic", "S4"),
        ("version", "<u2"),
        ("series", "S1"),
        ("rank", "u1"),
        ("d", "<i4"),
        ("k", "<i4"),
        ("nx", "<u4"),
        ("ny", "<u4"),
        ("h", "<f8"),
        ("kind", "u1"),
        ("low", "<i4"),
    ]
)

_KINDS = {"loop": 0, "cartan": 1}


def _dimension(series: str, rank: int) -> int:
    sizes = {
        "A": lambda n: n * (n + 2),
        "B": lambda n: n * (2 * n + 1),
        "C": lambda n: n * (2 * n + 1),
        "D": lambda n: n * (2 * n - 1),
        "E": lambda n: {6: 78, 7: 133, 8: 248}[n],
        "F": lambda n: 52,
        "G": lambda n: 14,
    }
    try:
        return sizes[series](rank)
    except KeyError:
        raise GridFormatError(f"Unknown algebra {series}{rank} in grid header") from None


def write_grid(grid: FieldGrid, path: Union[str, os.PathLike]) -> None:
    """Write a grid as a fixed header followed by little-endian ``complex128`` values.

    Loop grids store ``(nx + 1, ny + 1, degrees, dim)`` values, Cartan grids
    ``(nx + 1, ny + 1, rank)``.
    """
    header = np.zeros((), dtype=HEADER)
    header["magic"] = MAGIC
    header["version"] = VERSION
    header["series"] = grid.series.encode("ascii")
    header["rank"] = grid.rank
    header["d"] = grid.d
    header["k"] = grid.k
    header["nx"] = grid.nx
    header["ny"] = grid.ny
    header["h"] = grid.h
    header["kind"] = _KINDS[grid.kind]
    header["low"] = grid.low
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(grid.values, dtype="<c16").tobytes())
    LOG.debug(f"Wrote {grid.kind} grid {grid.shape} to {path}")


def read_grid(path: Union[str, os.PathLike]) -> FieldGrid:
    """Read a grid written by :func:`write_grid`.

    Raises
    ------
    GridFormatError
        Bad magic, unsupported version, unknown kind or a data size that does not match the
        header.
    """
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < HEADER.itemsize:
        raise GridFormatError(f"{path}: truncated header")
    header = np.frombuffer(raw[: HEADER.itemsize], dtype=HEADER)[0]
    if bytes(header["magic"]) != MAGIC:
        raise GridFormatError(f"{path}: not a grid file")
    if int(header["version"]) != VERSION:
        raise GridFormatError(f"{path}: unsupported version {int(header['version'])}")
    kinds = {v: k for k, v in _KINDS.items()}
    if int(header["kind"]) not in kinds:
        raise GridFormatError(f"{path}: unknown grid kind {int(header['kind'])}")
    kind = kinds[int(header["kind"])]
    series = bytes(header["series"]).decode("ascii")
    rank = int(header["rank"])
    nodes = (int(header["nx"]) + 1, int(header["ny"]) + 1)
    count = (len(raw) - HEADER.itemsize) // 16
    if (len(raw) - HEADER.itemsize) % 16:
        raise GridFormatError(f"{path}: data is not a whole number of complex values")
    if kind == "cartan":
        shape = nodes + (rank,)
    else:
        dim = _dimension(series, rank)
        per_node = nodes[0] * nodes[1] * dim
        if per_node == 0 or count % per_node:
            raise GridFormatError(f"{path}: data size does not match the header")
        shape = nodes + (count // per_node, dim)
    if int(np.prod(shape)) != count:
        raise GridFormatError(f"{path}: expected {int(np.prod(shape))} values, found {count}")
    values = np.frombuffer(raw[HEADER.itemsize :], dtype="<c16").astype(np.complex128)
    return FieldGrid(
        values.reshape(shape),
        float(header["h"]),
        kind=kind,
        low=int(header["low"]),
        series=series,
        rank=rank,
        k=int(header["k"]),
        d=int(header["d"]),
    )
