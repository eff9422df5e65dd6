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

from ansys.tools.toda.errors import DomainError
from ansys.tools.toda.rootsystem import (
    Root,
    apply_permutation,
    build_root_system,
    cartan_matrix,
    closure_roots,
    coroot,
    diagram_automorphisms,
    dual_basis,
    extended_diagram,
    height,
    involutions,
    is_involution,
    killing_dual,
    killing_inner,
    validate_type,
    weyl_orbit_roots,
)

# (series, rank, number of roots, Coxeter number, marks)
TYPES = [
    ("A", 1, 2, 2, (1,)),
    ("A", 2, 6, 3, (1, 1)),
    ("A", 4, 20, 5, (1, 1, 1, 1)),
    ("B", 2, 8, 4, (1, 2)),
    ("B", 3, 18, 6, (1, 2, 2)),
    ("C", 3, 18, 6, (2, 2, 1)),
    ("D", 4, 24, 6, (1, 2, 1, 1)),
    ("D", 5, 40, 8, (1, 2, 2, 1, 1)),
    ("E", 6, 72, 12, (1, 2, 2, 3, 2, 1)),
    ("E", 7, 126, 18, (2, 2, 3, 4, 3, 2, 1)),
    ("E", 8, 240, 30, (2, 3, 4, 6, 5, 4, 3, 2)),
    ("F", 4, 48, 12, (2, 3, 4, 2)),
    ("G", 2, 12, 6, (3, 2)),
]


@pytest.mark.parametrize("series,rank,count,k,marks", TYPES)
def test_root_system_invariants(series, rank, count, k, marks):
    rs = build_root_system(series, rank)
    assert len(rs.roots) == count
    assert rs.coxeter_number == k
    assert rs.marks == marks
    assert sum(rs.extended_marks) == k
    assert rs.highest_root.height == k - 1


@pytest.mark.parametrize("series,rank", [("A", 3), ("C", 4), ("F", 4), ("G", 2)])
def test_closure_matches_weyl_orbits(series, rank):
    cartan = cartan_matrix(series, rank)
    positive = closure_roots(cartan)
    assert set(positive) | {-r for r in positive} == set(weyl_orbit_roots(cartan))


def test_root_ordering():
    rs = build_root_system("A", 3)
    positive = [r for r in rs.roots if r.is_positive]
    assert rs.roots[: len(positive)] == tuple(positive)
    heights = [r.height for r in positive]
    assert heights == sorted(heights)
    assert rs.roots[len(positive) :] == tuple(-r for r in positive)


@pytest.mark.parametrize(
    "series,rank", [("C", 2), ("D", 3), ("E", 5), ("E", 9), ("F", 3), ("G", 3), ("X", 2)]
)
def test_invalid_types(series, rank):
    with pytest.raises(DomainError):
        validate_type(series, rank)


def test_validate_type_normalizes():
    assert validate_type("e", "8") == ("E", 8)


def test_cartan_convention():
    # a[i, j] = alpha_j(H_i): the short root of B2 is alpha_2
    b2 = cartan_matrix("B", 2)
    assert b2[1, 0] == -2 and b2[0, 1] == -1
    g2 = cartan_matrix("G", 2)
    assert g2[0, 1] == -3 and g2[1, 0] == -1


def test_height():
    rs = build_root_system("A", 2)
    assert height(rs, Root((1, 1))) == 2
    assert height(rs, Root((-1, 0))) == -1
    with pytest.raises(DomainError):
        height(rs, Root((2, 1)))


def test_killing_form_on_cartan():
    rs = build_root_system("A", 1)
    assert rs.killing_cartan.tolist() == [[8]]
    a2 = build_root_system("A", 2)
    assert a2.killing_cartan.tolist() == [[12, -6], [-6, 12]]


@pytest.mark.parametrize(
    "series,rank,expected", [("A", 1, Fraction(1, 2)), ("A", 2, Fraction(1, 3))]
)
def test_killing_inner_simple_root(series, rank, expected):
    rs = build_root_system(series, rank)
    alpha = rs.simple_roots[0]
    assert killing_inner(rs, alpha, alpha) == expected


def test_killing_inner_ratio_matches_lengths():
    rs = build_root_system("G", 2)
    short, long = rs.simple_roots
    ratio = killing_inner(rs, long, long) / killing_inner(rs, short, short)
    assert ratio == 3


def test_killing_dual_a1():
    rs = build_root_system("A", 1)
    assert killing_dual(rs, rs.simple_roots[0]).tolist() == [Fraction(1, 4)]


@pytest.mark.parametrize(
    "series,rank", [("A", 3), ("B", 3), ("C", 3), ("D", 4), ("F", 4), ("G", 2), ("E", 6)]
)
def test_marks_weighted_duals_cancel(series, rank):
    rs = build_root_system(series, rank)
    pairs = zip(rs.extended_marks, rs.extended_simple_roots)
    total = sum((m * killing_dual(rs, root) for m, root in pairs), np.zeros(rank, dtype=object))
    assert all(x == 0 for x in total)


@pytest.mark.parametrize("series,rank", [("A", 2), ("B", 3), ("G", 2)])
def test_coroots_of_simple_roots(series, rank):
    rs = build_root_system(series, rank)
    for i, alpha in enumerate(rs.simple_roots):
        expected = np.zeros(rank, dtype=np.int64)
        expected[i] = 1
        np.testing.assert_array_equal(coroot(rs, alpha), expected)


def test_dual_basis():
    rs = build_root_system("B", 3)
    for j, eta in enumerate(dual_basis(rs)):
        for i, alpha in enumerate(rs.simple_roots):
            assert rs.evaluate(alpha, eta) == (1 if i == j else 0)


def test_extended_diagram_a2():
    diagram = extended_diagram(build_root_system("A", 2))
    np.testing.assert_array_equal(diagram.cartan, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    assert diagram.graph.number_of_edges() == 3


def test_extended_diagram_a1_double_edge():
    diagram = extended_diagram(build_root_system("A", 1))
    np.testing.assert_array_equal(diagram.cartan, [[2, -2], [-2, 2]])
    assert diagram.graph.edges[0, 1]["multiplicity"] == 4


# (series, rank, automorphisms, involutions)
SYMMETRIES = [
    ("A", 1, 2, 2),
    ("A", 2, 6, 4),
    ("A", 3, 8, 6),
    ("B", 2, 2, 2),
    ("D", 4, 24, 10),
    ("E", 6, 6, 4),
    ("E", 7, 2, 2),
    ("E", 8, 1, 1),
    ("F", 4, 1, 1),
    ("G", 2, 1, 1),
]


@pytest.mark.parametrize("series,rank,autos,invols", SYMMETRIES)
def test_diagram_automorphisms(series, rank, autos, invols):
    diagram = extended_diagram(build_root_system(series, rank))
    perms = diagram_automorphisms(diagram)
    assert len(perms) == autos
    assert perms[0] == tuple(range(rank + 1))
    assert len(involutions(perms)) == invols
    assert all(diagram.is_automorphism(p) for p in perms)


@pytest.mark.parametrize("series,rank", [("A", 3), ("D", 4), ("E", 6)])
def test_automorphism_methods_agree(series, rank):
    diagram = extended_diagram(build_root_system(series, rank))
    assert diagram_automorphisms(diagram, "brute") == diagram_automorphisms(diagram, "backtrack")


def test_unknown_automorphism_method():
    diagram = extended_diagram(build_root_system("A", 2))
    with pytest.raises(DomainError):
        diagram_automorphisms(diagram, "magic")


def test_is_involution():
    assert is_involution((0, 2, 1))
    assert not is_involution((1, 2, 0))


def test_apply_permutation_maps_roots_to_roots():
    rs = build_root_system("A", 2)
    swap = (0, 2, 1)
    assert apply_permutation(rs, swap, Root((1, 0))) == Root((0, 1))
    rotation = (1, 2, 0)
    # alpha_1 -> alpha_2, alpha_2 -> alpha_0
    assert apply_permutation(rs, rotation, Root((1, 0))) == Root((0, 1))
    assert apply_permutation(rs, rotation, Root((0, 1))) == Root((-1, -1))
    images = {apply_permutation(rs, rotation, r) for r in rs.roots}
    assert images == set(rs.roots)


def test_to_dict():
    data = build_root_system("G", 2).to_dict()
    assert data["series"] == "G"
    assert data["coxeter_number"] == 6
    assert len(data["roots"]) == 12
    assert data["cartan_matrix"] == [[2, -3], [-1, 2]]
