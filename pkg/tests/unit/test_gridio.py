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


import numpy as np
import pytest

from ansys.tools.toda.errors import GridFormatError
from ansys.tools.toda.gridio import HEADER, read_grid, write_grid
from ansys.tools.toda.laxflow import FieldGrid


@pytest.fixture
def loop_grid(rng):
    values = rng.normal(size=(3, 4, 9, 8)) + 1j * rng.normal(size=(3, 4, 9, 8))
    return FieldGrid(values, 0.05, low=-4, series="A", rank=2, k=3, d=4)


def test_loop_grid(tmp_path, loop_grid):
    path = tmp_path / "xi.grid"
    write_grid(loop_grid, path)
    assert path.stat().st_size == HEADER.itemsize + 16 * loop_grid.values.size
    grid = read_grid(path)
    assert grid.kind == "loop"
    assert (grid.series, grid.rank, grid.k, grid.d, grid.low) == ("A", 2, 3, 4, -4)
    assert (grid.nx, grid.ny) == (2, 3)
    assert grid.h == 0.05
    assert np.array_equal(grid.values, loop_grid.values)


def test_cartan_grid(tmp_path, rng):
    values = rng.normal(size=(5, 5, 6))
    path = tmp_path / "omega.grid"
    write_grid(FieldGrid(values, 0.1, kind="cartan", series="E", rank=6, k=12, d=13), path)
    grid = read_grid(path)
    assert grid.kind == "cartan"
    assert grid.values.shape == (5, 5, 6)
    assert np.array_equal(grid.values.real, values)


def test_bad_magic(tmp_path, loop_grid):
    path = tmp_path / "bad.grid"
    write_grid(loop_grid, path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(GridFormatError, match="not a grid file"):
        read_grid(path)


def test_unsupported_version(tmp_path, loop_grid):
    path = tmp_path / "v2.grid"
    write_grid(loop_grid, path)
    raw = bytearray(path.read_bytes())
    raw[4:6] = (2).to_bytes(2, "little")
    path.write_bytes(bytes(raw))
    with pytest.raises(GridFormatError, match="unsupported version 2"):
        read_grid(path)


@pytest.mark.parametrize("cut", [1, 16, 16 * 8])
def test_truncated_data(tmp_path, loop_grid, cut):
    path = tmp_path / "short.grid"
    write_grid(loop_grid, path)
    path.write_bytes(path.read_bytes()[:-cut])
    with pytest.raises(GridFormatError):
        read_grid(path)


def test_truncated_header(tmp_path):
    path = tmp_path / "empty.grid"
    path.write_bytes(b"TODA")
    with pytest.raises(GridFormatError, match="truncated header"):
        read_grid(path)


def test_unknown_algebra(tmp_path):
    path = tmp_path / "x.grid"
    write_grid(FieldGrid(np.zeros((2, 2, 1, 3)), 0.1, series="X", rank=1), path)
    with pytest.raises(GridFormatError, match="Unknown algebra"):
        read_grid(path)
