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


"""Residual reports shared by the flow and Toda checks."""

import csv
from dataclasses import asdict, dataclass, field
import logging
import math
import os
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

LOG = logging.getLogger(__name__)

CSV_COLUMNS = ("name", "h", "sup_residual", "order", "drift")


@dataclass
class ResidualRow:
    """One measured quantity at one step size."""

    name: str
    h: float
    sup_residual: float
    order: Optional[float] = None
    drift: Optional[float] = None


@dataclass
class ResidualReport:
    """Named residual series, possibly over several step sizes.

    ``flags`` collects anomalies (non-cyclic nodes, blow-up, loop defects) as short strings.
    """

    rows: List[ResidualRow] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)

    def add(
        self,
        name: str,
        h: float,
        sup_residual: float,
        order: Optional[float] = None,
        drift: Optional[float] = None,
    ) -> ResidualRow:
        if sup_residual < 0 or (isinstance(sup_residual, float) and math.isnan(sup_residual)):
            raise ValueError(f"Residual {name} must be a nonnegative number, got {sup_residual}")
        row = ResidualRow(name, float(h), float(sup_residual), order, drift)
        self.rows.append(row)
        return row

    def flag(self, message: str) -> None:
        LOG.warning(message)
        self.flags.append(message)

    def extend(self, other: "ResidualReport") -> "ResidualReport":
        self.rows.extend(other.rows)
        self.flags.extend(other.flags)
        return self

    @property
    def names(self) -> List[str]:
        return list(dict.fromkeys(row.name for row in self.rows))

    def series(self, name: str) -> List[ResidualRow]:
        """Rows of one quantity, sorted by decreasing step size."""
        return sorted((r for r in self.rows if r.name == name), key=lambda r: -r.h)

    def value(self, name: str) -> float:
        """Residual of the finest row of a quantity."""
        rows = self.series(name)
        if not rows:
            raise KeyError(name)
        return rows[-1].sup_residual

    def fit_orders(self) -> Dict[str, Optional[float]]:
        """Fit the convergence order of every quantity and store it on its finest row."""
        orders = {}
        for name in self.names:
            rows = self.series(name)
            order = convergence_order([r.h for r in rows], [r.sup_residual for r in rows])
            rows[-1].order = order
            orders[name] = order
        return orders

    def __bool__(self) -> bool:
        return bool(self.rows)

    def to_dicts(self) -> List[dict]:
        return [asdict(row) for row in self.rows]

    def to_csv(self, path: Union[str, os.PathLike]) -> None:
        """Write the rows with the columns ``name,h,sup_residual,order,drift``."""
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                values = asdict(row)
                writer.writerow({k: _format(values[k]) for k in CSV_COLUMNS})


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def convergence_order(h: Sequence[float], residuals: Sequence[float]) -> Optional[float]:
    """Least-squares slope of ``log(residual)`` against ``log(h)``.

    Returns ``None`` with fewer than two distinct step sizes or when a residual vanishes.

    Examples
    --------
    >>> round(convergence_order([0.1, 0.05], [1e-4, 6.25e-6]), 6)
    4.0
    """
    h = np.asarray(h, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    if len(np.unique(h)) < 2 or np.any(residuals <= 0):
        return None
    slope, _ = np.polyfit(np.log(h), np.log(residuals), 1)
    return float(slope)
