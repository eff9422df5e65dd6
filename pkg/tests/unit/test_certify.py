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

from ansys.tools.toda.certify import (
    CertificationSummary,
    _converges,
    certify_all,
    certify_halving,
)
from ansys.tools.toda.errors import DomainError


@pytest.mark.parametrize("series,rank", [("A", 1), ("A", 2), ("B", 2), ("C", 3), ("G", 2)])
def test_certify_without_flows(series, rank):
    summary = certify_all(series, rank, flows=False)
    assert summary.passed, summary.failures()
    names = [check.name for check in summary.checks]
    assert "jacobi_identity" in names
    assert "coxeter_automorphism" in names
    assert "reflection_control_rejected" in names
    assert "real_form_0_compatible" in names
    assert not summary.report


def test_certify_rejects_invalid_type():
    with pytest.raises(DomainError):
        certify_all("H", 3, flows=False)


def test_summary_rows(tmp_path):
    summary = CertificationSummary()
    summary.check("always", True)
    summary.bound("small", 1e-12, 1e-10)
    summary.bound("large", 1.0, 1e-10)
    assert not summary.passed
    assert [check.name for check in summary.failures()] == ["large"]
    path = tmp_path / "checks.csv"
    summary.to_csv(path)
    assert path.read_text().splitlines() == [
        "name,passed,value,threshold",
        "always,True,,",
        "small,True,1e-12,1e-10",
        "large,False,1.0,1e-10",
    ]
    assert summary.to_dicts()[2] == {
        "name": "large",
        "passed": False,
        "value": 1.0,
        "threshold": 1e-10,
    }


def test_converges():
    summary = CertificationSummary()
    assert _converges(summary, "order", [0.1, 0.05], [1e-4, 6.25e-6], 3.5).passed
    assert not _converges(summary, "slow", [0.1, 0.05], [1e-4, 5e-5], 3.5).passed
    assert _converges(summary, "roundoff", [0.1, 0.05], [1e-13, 2e-13], 3.5).passed
    assert len(summary.checks) == 3


def test_halving_window():
    summary = CertificationSummary()
    assert certify_halving(summary, "rk4", [1.6e-7, 1e-8], (12.0, 20.0)).passed
    assert not certify_halving(summary, "first_order", [2e-3, 1e-3], (12.0, 20.0)).passed
    assert not certify_halving(summary, "too_fast", [1e-5, 1e-8], (12.0, 20.0)).passed
    assert certify_halving(summary, "roundoff", [1e-14, 2e-14], (12.0, 20.0)).passed
    assert summary.checks[1].value == pytest.approx(2.0)


@pytest.mark.slow
def test_certify_a2_with_flows():
    summary = certify_all("A", 2, h=0.01, length=0.1, seed=1, threads=2)
    assert summary.passed, summary.failures()
    names = summary.report.names
    for name in ("mc", "killing_sum", "toda", "bracket_vs_dual", "normalization_spread"):
        assert name in names
    assert "top_coefficient" in names
    assert "w_constancy" in names
    checks = {check.name: check for check in summary.checks}
    for name in (
        "flows_commute",
        "loop_defect_order",
        "w_constancy",
        "recursion_lax_order",
        "recursion_vs_maurer_cartan",
    ):
        assert checks[name].passed
    assert checks["toda_order"].threshold == 1.8
    assert checks["normalization_constant"].threshold == 1e-8
    assert checks["killing_sum_drift"].threshold == 1e-10


def test_certify_flags_small_recursion_grid():
    # h = 0.02 on a side of 0.1 leaves 6 nodes, too few for an order 2 recursion
    summary = certify_all("A", 1, h=0.02, length=0.1, seed=1, threads=1)
    checks = {check.name: check for check in summary.checks}
    assert not checks["recursion_grid"].passed
    assert checks["recursion_grid"].threshold == 9
    assert any("needs 9x9 nodes" in message for message in summary.report.flags)
