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


from dataclasses import replace

import numpy as np
import pytest

from ansys.tools.toda.coxeter import LoopElement, random_loop_element, reality_defect
from ansys.tools.toda.errors import DomainError
from ansys.tools.toda.laxflow import (
    _COLUMN_CHUNK,
    FlowSpec,
    _integrate_line,
    adapted_check,
    central_difference,
    check_degree,
    commutation_defect,
    connection_coefficient,
    conserved_drift,
    d_z,
    d_zbar,
    escaped_node,
    integrate_flow,
    lax_field,
    mc_residual,
    sup_norm,
    unit_circle,
)
from ansys.tools.toda.toda import vacuum_cyclic_element


@pytest.fixture
def spec_a2(a2, sigma_a2, compact_a2):
    xi0 = random_loop_element(a2, sigma_a2, compact_a2, 4, np.random.default_rng(3), scale=0.5)
    return FlowSpec(a2, sigma_a2, compact_a2, xi0, lx=0.1, ly=0.1, h=0.02, threads=1)


@pytest.mark.parametrize("d,k", [(1, 3), (4, 3), (3, 2), (7, 6)])
def test_check_degree_accepts(d, k):
    check_degree(d, k)


@pytest.mark.parametrize("d,k", [(0, 3), (2, 3), (3, 3), (4, 2)])
def test_check_degree_rejects(d, k):
    with pytest.raises(DomainError):
        check_degree(d, k)


def test_connection_coefficient():
    coeffs = np.arange(15, dtype=np.complex128).reshape(5, 3)
    a = connection_coefficient(LoopElement.symmetric(coeffs))
    assert (a.low, a.high) == (0, 1)
    assert np.allclose(a.coefficient(1), coeffs[4])
    assert np.allclose(a.coefficient(0), 0.5 * coeffs[3])


def test_lax_field_is_real(a2, compact_a2, spec_a2):
    x, y = lax_field(a2, compact_a2, spec_a2.xi0)
    assert (x.low, x.high) == (-4, 4)
    assert reality_defect(compact_a2, x) < 1e-12
    assert reality_defect(compact_a2, y) < 1e-12


def test_lax_field_rejects_degree(a2, sigma_a2, compact_a2, rng):
    xi = random_loop_element(a2, sigma_a2, compact_a2, 3, rng)
    with pytest.raises(DomainError):
        lax_field(a2, compact_a2, xi)


def test_validate_rejects_bad_initial_conditions(spec_a2, rng):
    coeffs = spec_a2.xi0.coeffs.copy()
    coeffs[5] += 0.1 * rng.normal(size=coeffs.shape[-1])
    ungraded = LoopElement(coeffs, -4)
    with pytest.raises(DomainError, match="twisted loop"):
        FlowSpec(spec_a2.alg, spec_a2.sigma, spec_a2.conj, ungraded).validate()
    with pytest.raises(DomainError, match="Invalid grid"):
        spec_a2.with_step(0.0).validate()
    unreal = LoopElement(spec_a2.xi0.coeffs * 1j, -4)
    with pytest.raises(DomainError, match="reality"):
        FlowSpec(spec_a2.alg, spec_a2.sigma, spec_a2.conj, unreal).validate()


def test_integrate_flow_grid(spec_a2):
    grid = integrate_flow(spec_a2)
    assert grid.blowup is None
    assert grid.values.shape == (6, 6, 9, 8)
    assert (grid.d, grid.k, grid.low) == (4, 3, -4)
    assert np.allclose(grid.values[0, 0], spec_a2.xi0.coeffs)
    assert grid.projection_defect < 1e-10
    adapted = adapted_check(spec_a2.sigma, grid)
    assert adapted.adapted
    assert adapted.cyclic


def test_integrate_flow_threads_agree(spec_a2):
    spec = spec_a2.with_step(0.01)
    single = integrate_flow(spec)
    spec.threads = 3
    assert np.array_equal(integrate_flow(spec).values, single.values)


def test_maurer_cartan_converges(a2, spec_a2):
    grids = [integrate_flow(spec_a2.with_step(h)) for h in (0.01, 0.005)]
    report = mc_residual(a2, grids)
    coarse, fine = report.series("mc")
    assert fine.sup_residual < 1e-6
    assert fine.sup_residual < 1e-12 or fine.order >= 3.5


def test_vacuum_is_a_fixed_point(a2, sigma_a2, compact_a2):
    w = vacuum_cyclic_element(a2, compact_a2).W
    xi0 = LoopElement(np.stack([compact_a2.apply(w), np.zeros(a2.dim), w]), -1)
    spec = FlowSpec(a2, sigma_a2, compact_a2, xi0, lx=1.0, ly=1.0, h=0.01, threads=2)
    grid = integrate_flow(spec)
    assert grid.shape == (101, 101)
    assert grid.blowup is None
    assert np.abs(grid.values - grid.values[0, 0]).max() < 1e-12


def test_flows_commute(spec_a2):
    corner = (0.1, 0.1)
    coarse, fine = (commutation_defect(spec_a2.with_step(h), corner) for h in (0.01, 0.005))
    assert fine < 1e-6
    # RK4: halving the step divides the defect by about 16
    assert 12 <= coarse / fine <= 20
    with pytest.raises(DomainError):
        commutation_defect(spec_a2, (0.2, 0.0))


def test_unweighted_connection_does_not_commute(spec_a2):
    spec = replace(spec_a2, r=1.0)
    coarse, fine = (commutation_defect(spec.with_step(h), (0.1, 0.1)) for h in (0.01, 0.005))
    assert fine > 1e-8
    assert coarse / fine < 2


def test_conserved_quantities(a2, spec_a2):
    coarse = conserved_drift(a2, integrate_flow(spec_a2))
    fine = conserved_drift(a2, integrate_flow(spec_a2.with_step(0.01)))
    assert coarse.names == ["killing_sum", "trace_ad_2", "trace_ad_4"]
    for name in coarse.names:
        drift = fine.series(name)[0].drift
        assert drift < 1e-4
        assert drift <= max(coarse.series(name)[0].drift / 8, 1e-12)


def test_blowup_truncates(spec_a2):
    spec_a2.blowup_bound = 1e-6
    grid = integrate_flow(spec_a2)
    assert grid.blowup == (0, 0)
    assert grid.shape == (1, 1)


def test_integrate_line_reports_escaped_member(spec_a2):
    xi0 = spec_a2.xi0.coeffs
    start = np.stack([xi0, 10 * xi0, xi0])
    bound = 3 * float(np.sqrt((np.abs(xi0) ** 2).sum()))
    path, done, _, offender = _integrate_line(spec_a2, start, 4, "y", bound)
    assert done == 0
    assert offender == (1,)
    assert path.shape == (5, 3) + xi0.shape
    _, done, _, offender = _integrate_line(spec_a2, start[[0, 2]], 4, "y", bound)
    assert (done, offender) == (4, None)


def test_escaped_node_is_the_exact_column():
    results = [
        (None, 5, 0.0, None),
        (None, 3, 0.0, (2,)),
        (None, 3, 0.0, (0,)),
    ]
    assert escaped_node(results, 3) == (_COLUMN_CHUNK + 2, 4)
    with pytest.raises(DomainError):
        escaped_node(results[:1], 3)


def test_central_difference_exact_on_polynomials():
    h = 0.1
    x = np.arange(9) * h
    values = np.broadcast_to((x**3)[:, None, None], (9, 9, 1))
    fourth = central_difference(values, h, axis=0)
    assert np.isnan(fourth[:2]).all() and np.isnan(fourth[-2:]).all()
    assert np.allclose(fourth[2:-2, :, 0], (3 * x[2:-2] ** 2)[:, None])
    second = central_difference(values, h, axis=1, accuracy=2)
    assert np.allclose(second[:, 1:-1], 0.0)
    with pytest.raises(DomainError):
        central_difference(values, h, axis=0, accuracy=6)
    assert np.isnan(central_difference(values[:4], h, axis=0)).all()


def test_complex_derivatives():
    h = 0.05
    x, y = np.meshgrid(np.arange(7) * h, np.arange(7) * h, indexing="ij")
    z = (x + 1j * y)[..., None]
    assert np.allclose(d_z(z**2, h)[2:-2, 2:-2], 2 * z[2:-2, 2:-2])
    assert np.allclose(d_zbar(z**2, h)[2:-2, 2:-2], 0.0)
    assert np.allclose(d_zbar(np.conj(z), h)[2:-2, 2:-2], 1.0)


def test_sup_norm_and_circle():
    values = np.full((3, 3, 2), np.nan)
    assert np.isnan(sup_norm(values))
    values[1, 1] = [3.0, 4.0]
    assert sup_norm(values) == pytest.approx(5.0)
    assert np.allclose(np.abs(unit_circle(5)), 1.0)
    assert unit_circle(4)[1] == pytest.approx(1j)
