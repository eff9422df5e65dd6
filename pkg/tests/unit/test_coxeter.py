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


from fractions import Fraction

import numpy as np
import pytest

from ansys.tools.toda.chevalley import bracket, build_chevalley_basis, random_element
from ansys.tools.toda.coxeter import (
    LoopElement,
    ad_exp_cartan,
    coxeter,
    grade_decompose,
    graded_dimensions,
    grading_defect,
    is_cyclic,
    loop_bracket,
    loop_conjugate,
    loop_grading_defect,
    project_loop,
    random_loop_element,
    reality_defect,
)
from ansys.tools.toda.errors import DomainError
from ansys.tools.toda.rootsystem import build_root_system


@pytest.mark.parametrize(
    "series,rank,dims",
    [
        ("A", 1, [1, 2]),
        ("A", 2, [2, 3, 3]),
        ("B", 2, [2, 3, 2, 3]),
        ("G", 2, [2, 3, 2, 2, 2, 3]),
    ],
)
def test_graded_dimensions(series, rank, dims):
    sigma = coxeter(build_chevalley_basis(build_root_system(series, rank)))
    assert sigma.k == len(dims)
    assert graded_dimensions(sigma) == dims
    assert sigma.order_defect() < 1e-12


def test_sigma_is_automorphism(a2, sigma_a2, rng):
    x, y = random_element(a2, rng), random_element(a2, rng)
    lhs = sigma_a2(bracket(a2, x, y))
    rhs = bracket(a2, sigma_a2(x), sigma_a2(y))
    assert np.allclose(lhs, rhs)
    assert np.allclose(sigma_a2(x, power=3), x)


def test_projector_matches_average(a2, sigma_a2, rng):
    x = random_element(a2, rng)
    parts = grade_decompose(sigma_a2, x)
    assert np.allclose(parts.sum(axis=0), x)
    for j in range(sigma_a2.k):
        assert np.allclose(sigma_a2.projector.averaged(x, j), parts[j])
        assert grading_defect(sigma_a2, parts[j], j) == 0.0


def test_is_cyclic(a2, sigma_a2):
    x = a2.zeros()
    x[a2.extended_simple_indices] = [1.0, -2.0, 0.5]
    assert is_cyclic(sigma_a2, x, tolerance=1e-12)
    x[a2.extended_simple_indices[0]] = 0.0
    assert not is_cyclic(sigma_a2, x, tolerance=1e-12)
    assert not is_cyclic(sigma_a2, a2.zeros(), tolerance=1e-12)
    with pytest.raises(DomainError):
        is_cyclic(sigma_a2, a2.basis(0), tolerance=1e-12)


def test_is_cyclic_exact(a2, sigma_a2):
    x = np.array([Fraction(0)] * a2.dim, dtype=object)
    for index in a2.extended_simple_indices:
        x[index] = Fraction(1, 2)
    assert is_cyclic(sigma_a2, x, tolerance=1e-12)
    x[a2.extended_simple_indices[1]] = Fraction(0)
    assert not is_cyclic(sigma_a2, x, tolerance=1e-12)
    x[0] = Fraction(1, 3)
    with pytest.raises(DomainError):
        is_cyclic(sigma_a2, x, tolerance=1e-12)


def test_ad_exp_cartan(a1):
    alpha = a1.rs.simple_roots[0]
    x = a1.root_vector(alpha) + a1.root_vector(-alpha) + a1.basis(0)
    out = ad_exp_cartan(a1, np.array([0.3]), x)
    assert out[0] == pytest.approx(1.0)
    assert out[a1.root_index(alpha)] == pytest.approx(np.exp(0.6))
    assert out[a1.root_index(-alpha)] == pytest.approx(np.exp(-0.6))
    grid = ad_exp_cartan(a1, np.zeros((4, 5, 1)), x)
    assert grid.shape == (4, 5, a1.dim)


def test_loop_element_basics(a1):
    coeffs = np.arange(9, dtype=np.complex128).reshape(3, 3)
    xi = LoopElement.symmetric(coeffs)
    assert (xi.low, xi.high, xi.degree) == (-1, 1, 1)
    assert np.array_equal(xi.coefficient(1), coeffs[2])
    assert not xi.coefficient(5).any()
    assert np.allclose(xi.evaluate(1.0), coeffs.sum(axis=0))
    assert np.allclose(xi.shifted(2).coefficient(3), coeffs[2])
    total = xi + LoopElement(np.ones((1, 3)), 3)
    assert (total.low, total.high) == (-1, 3)
    assert np.allclose((xi - xi).coeffs, 0)
    assert np.allclose((2 * xi).coeffs, 2 * coeffs)
    with pytest.raises(DomainError):
        LoopElement.symmetric(np.zeros((2, 3)))
    with pytest.raises(DomainError):
        LoopElement(np.zeros(3))


def test_loop_bracket_evaluates_pointwise(a2, sigma_a2, compact_a2, rng):
    a = random_loop_element(a2, sigma_a2, compact_a2, 2, rng)
    b = random_loop_element(a2, sigma_a2, compact_a2, 3, rng)
    product = loop_bracket(a2, a, b)
    assert (product.low, product.high) == (-5, 5)
    lam = np.exp(0.7j)
    expected = bracket(a2, a.evaluate(lam), b.evaluate(lam))
    assert np.allclose(product.evaluate(lam), expected)
    assert loop_grading_defect(sigma_a2, product) < 1e-12


def test_random_loop_element_is_real_and_graded(a2, sigma_a2, compact_a2, rng):
    xi = random_loop_element(a2, sigma_a2, compact_a2, 4, rng, scale=0.5)
    assert xi.degree == 4
    assert reality_defect(compact_a2, xi) < 1e-14
    assert loop_grading_defect(sigma_a2, xi) == 0.0
    assert np.allclose(loop_conjugate(compact_a2, loop_conjugate(compact_a2, xi)).coeffs, xi.coeffs)
    with pytest.raises(DomainError):
        random_loop_element(a2, sigma_a2, compact_a2, 0, rng)


def test_project_loop(a2, sigma_a2, rng):
    coeffs = rng.normal(size=(2, 5, a2.dim)) + 0j
    xi = project_loop(sigma_a2, LoopElement(coeffs, -2))
    assert xi.batch_shape == (2,)
    assert loop_grading_defect(sigma_a2, xi) == 0.0
