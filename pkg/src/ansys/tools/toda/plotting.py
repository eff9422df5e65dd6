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


"""Log-log convergence plots of residual reports."""

import logging
import os
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ansys.tools.toda.errors import DomainError  # noqa: E402
from ansys.tools.toda.report import ResidualReport, convergence_order  # noqa: E402

LOG = logging.getLogger(__name__)


def emit_plot(report: ResidualReport, path: Union[str, os.PathLike]) -> None:
    """Plot every residual series of ``report`` against ``h`` on log-log axes as SVG.

    Series with at least two positive residuals are annotated with their least-squares slope.

    Raises
    ------
    DomainError
        The report has no rows.
    OSError
        ``path`` cannot be written.
    """
    if not report:
        raise DomainError("Cannot plot an empty residual report")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    try:
        for name in report.names:
            rows = [row for row in report.series(name) if row.h > 0 and row.sup_residual > 0]
            if not rows:
                continue
            h = [row.h for row in rows]
            residuals = [row.sup_residual for row in rows]
            slope = convergence_order(h, residuals)
            label = name if slope is None else f"{name} (slope {slope:.2f})"
            ax.loglog(h, residuals, "o-", label=label)
        ax.set_xlabel("h")
        ax.set_ylabel("sup residual")
        ax.grid(True, which="both", alpha=0.3)
        if ax.get_legend_handles_labels()[0]:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    LOG.info(f"Wrote convergence plot to {path}")
