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


import pytest

from ansys.tools.toda.report import ResidualReport, convergence_order


def test_convergence_order():
    assert convergence_order([0.1, 0.05, 0.025], [1e-2, 2.5e-3, 6.25e-4]) == pytest.approx(2.0)
    assert convergence_order([0.1], [1e-2]) is None
    assert convergence_order([0.1, 0.1], [1e-2, 1e-3]) is None
    assert convergence_order([0.1, 0.05], [1e-2, 0.0]) is None


def test_series_sorted_by_decreasing_step():
    report = ResidualReport()
    report.add("mc", 0.025, 1e-6)
    report.add("mc", 0.1, 1e-4)
    report.add("toda", 0.1, 3.0)
    report.add("mc", 0.05, 1e-5)
    assert report.names == ["mc", "toda"]
    assert [row.h for row in report.series("mc")] == [0.1, 0.05, 0.025]
    assert report.value("mc") == 1e-6
    with pytest.raises(KeyError):
        report.value("missing")


def test_fit_orders_stores_order_on_finest_row():
    report = ResidualReport()
    report.add("a", 0.2, 4e-2)
    report.add("a", 0.1, 1e-2)
    report.add("b", 0.1, 1.0)
    orders = report.fit_orders()
    assert orders["a"] == pytest.approx(2.0)
    assert orders["b"] is None
    assert report.series("a")[-1].order == pytest.approx(2.0)
    assert report.series("a")[0].order is None


@pytest.mark.parametrize("value", [-1.0, float("nan")])
def test_add_rejects_invalid_residuals(value):
    with pytest.raises(ValueError):
        ResidualReport().add("x", 0.1, value)


def test_extend_and_flags(caplog):
    first, second = ResidualReport(), ResidualReport()
    assert not first
    first.add("a", 0.1, 1.0)
    second.add("b", 0.1, 2.0, drift=0.5)
    with caplog.at_level("WARNING"):
        second.flag("node (1, 2) not cyclic")
    assert "node (1, 2) not cyclic" in caplog.text
    assert first.extend(second) is first
    assert first.names == ["a", "b"]
    assert first.flags == ["node (1, 2) not cyclic"]
    assert first.to_dicts()[1] == {
        "name": "b",
        "h": 0.1,
        "sup_residual": 2.0,
        "order": None,
        "drift": 0.5,
    }


def test_to_csv(tmp_path):
    report = ResidualReport()
    report.add("mc", 0.1, 0.25, order=4.0)
    report.add("killing_sum", 0.1, 0.0, drift=1e-12)
    path = tmp_path / "residuals.csv"
    report.to_csv(path)
    assert path.read_text().splitlines() == [
        "name,h,sup_residual,order,drift",
        "mc,0.1,0.25,4.0,",
        "killing_sum,0.1,0.0,,1e-12",
    ]
