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

"""
Root systems of the simple complex Lie algebras.

Roots are integer coefficient vectors in the basis of simple roots (Bourbaki numbering). The
Cartan matrix follows the convention ``cartan_matrix[i, j] = alpha_j(H_i)`` where ``H_i`` is the
coroot of the simple root ``alpha_i``. Everything in this module is exact: integers for roots and
Cartan integers, :class:`fractions.Fraction` for Killing duals and dual bases.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import itertools
import logging
from typing import Dict, Iterable, List, Literal, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism
import numpy as np
import sympy

from ansys.tools.toda.errors import ConstructionError, DomainError

LOG = logging.getLogger(__name__)

SERIES = ("A", "B", "C", "D", "E", "F", "G")

Permutation = Tuple[int, ...]
CartanVector = np.ndarray


def _to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def validate_type(series: str, rank: int) -> Tuple[str, int]:
    """Normalize and validate a simple type.

    Raises
    ------
    DomainError
        When ``(series, rank)`` is not one of A_N (N >= 1), B_N (N >= 2), C_N (N >= 3),
        D_N (N >= 4), E_6, E_7, E_8, F_4, G_2.
    """
    series = str(series).upper()
    try:
        rank = int(rank)
    except (TypeError, ValueError):
        raise DomainError(f"Rank must be an integer, got {rank!r}")
    valid = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 3,
        "D": rank >= 4,
        "E": 6 <= rank <= 8,
        "F": rank == 4,
        "G": rank == 2,
    }
    if not valid.get(series, False):
        raise DomainError(f"{series}{rank} is not a simple type")
    return series, rank


def _dynkin_edges(series: str, rank: int) -> List[Tuple[int, int]]:
    if series in "ABCF" or series == "G":
        return [(i, i + 1) for i in range(rank - 1)]
    if series == "D":
        return [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
    # E series, Bourbaki numbering: 1-3-4-5-6-7-8 with 2 attached to 4
    edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
    return [(i, j) for i, j in edges if i < rank and j < rank]


def cartan_matrix(series: str, rank: int) -> np.ndarray:
    """Cartan matrix with entries ``alpha_j(H_i)``.

    Parameters
    ----------
    series : str
        Series letter.
    rank : int
        Rank of the algebra.

    Returns
    -------
    numpy.ndarray
        Integer ``(rank, rank)`` matrix.
    """
    series, rank = validate_type(series, rank)
    a = 2 * np.eye(rank, dtype=np.int64)
    for i, j in _dynkin_edges(series, rank):
        a[i, j] = a[j, i] = -1
    n = rank - 1
    if series == "B":
        a[n, n - 1] = -2
    elif series == "C":
        a[n - 1, n] = -2
    elif series == "F":
        a[2, 1] = -2
    elif series == "G":
        a[0, 1] = -3
    return a


@dataclass(frozen=True, order=True)
class Root:
    """A root as its coefficient vector in the basis of simple roots."""

    coeffs: Tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    @property
    def is_positive(self) -> bool:
        return self.height > 0

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coeffs))

    def __add__(self, other: "Root") -> "Root":
        return Root(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Root") -> "Root":
        return Root(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scaled(self, factor: int) -> "Root":
        return Root(tuple(factor * c for c in self.coeffs))

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"


def _unit(rank: int, i: int) -> Root:
    return Root(tuple(1 if j == i else 0 for j in range(rank)))


def _pairing(cartan: np.ndarray, coeffs: Sequence[int], i: int) -> int:
    """``beta(H_i)`` for ``beta`` given by its coefficients."""
    return int(sum(c * int(cartan[i, j]) for j, c in enumerate(coeffs)))


def _order_key(root: Root):
    return (abs(root.height), tuple(-abs(c) for c in root.coeffs))


def closure_roots(cartan: np.ndarray) -> List[Root]:
    """Positive roots generated by adding simple roots, using Cartan-integer strings.

    For a positive root ``beta`` and a simple root ``alpha_i`` with ``beta != alpha_i``, let
    ``p`` be the largest ``n`` with ``beta - n alpha_i`` a root. Then ``beta + alpha_i`` is a
    root exactly when ``p - beta(H_i) > 0``.
    """
    rank = cartan.shape[0]
    simple = [_unit(rank, i) for i in range(rank)]
    found = set(simple)
    layer = list(simple)
    while layer:
        next_layer = []
        for beta in layer:
            for i, alpha in enumerate(simple):
                if beta == alpha:
                    continue
                p = 0
                while beta - alpha.scaled(p + 1) in found:
                    p += 1
                if p - _pairing(cartan, beta.coeffs, i) > 0:
                    candidate = beta + alpha
                    if candidate not in found:
                        found.add(candidate)
                        next_layer.append(candidate)
        layer = next_layer
    return sorted(found, key=_order_key)


def weyl_orbit_roots(cartan: np.ndarray) -> List[Root]:
    """All roots as the union of the Weyl orbits of the simple roots.

    Independent of :func:`closure_roots`; reflections ``s_i(beta) = beta - beta(H_i) alpha_i``
    are applied until the orbit closes.
    """
    rank = cartan.shape[0]
    start = [_unit(rank, i) for i in range(rank)]
    seen = set(start)
    queue = deque(start)
    while queue:
        beta = queue.popleft()
        for i in range(rank):
            n = _pairing(cartan, beta.coeffs, i)
            if n == 0:
                continue
            image = beta - _unit(rank, i).scaled(n)
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return sorted(seen, key=lambda r: (r.height < 0, _order_key(r)))


@dataclass(frozen=True, eq=False)
class RootSystem:
    """Root system of a simple complex Lie algebra.

    ``roots`` lists the positive roots by increasing height followed by the negative roots in
    the same order. ``marks`` are the coefficients of the highest root, so that the lowest root
    is ``alpha_0 = -sum(m_j alpha_j)`` with ``m_0 = 1``.
    """

    series: str
    rank: int
    cartan_matrix: np.ndarray
    positive_roots: Tuple[Root, ...]

    @cached_property
    def roots(self) -> Tuple[Root, ...]:
        return self.positive_roots + tuple(-r for r in self.positive_roots)

    @cached_property
    def index(self) -> Dict[Root, int]:
        """Position of each root in :attr:`roots`."""
        return {root: i for i, root in enumerate(self.roots)}

    @cached_property
    def simple_roots(self) -> Tuple[Root, ...]:
        return tuple(_unit(self.rank, i) for i in range(self.rank))

    @cached_property
    def highest_root(self) -> Root:
        return max(self.positive_roots, key=lambda r: r.height)

    @property
    def lowest_root(self) -> Root:
        return -self.highest_root

    @property
    def marks(self) -> Tuple[int, ...]:
        return self.highest_root.coeffs

    @property
    def extended_marks(self) -> Tuple[int, ...]:
        """Marks ``m_0 .. m_N`` with ``m_0 = 1``."""
        return (1,) + self.marks

    @property
    def coxeter_number(self) -> int:
        return self.highest_root.height + 1

    @cached_property
    def extended_simple_roots(self) -> Tuple[Root, ...]:
        """``alpha_0, alpha_1, .., alpha_N``."""
        return (self.lowest_root,) + self.simple_roots

    @cached_property
    def root_values(self) -> np.ndarray:
        """Integer matrix of ``alpha(H_i)``, one row per root in :attr:`roots`."""
        coeffs = np.array([r.coeffs for r in self.roots], dtype=np.int64)
        return coeffs @ self.cartan_matrix.T

    @cached_property
    def root_lengths(self) -> Tuple[Fraction, ...]:
        """Squared lengths of the simple roots, long roots normalized to 2."""
        d: Dict[int, Fraction] = {0: Fraction(1)}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in range(self.rank):
                if j not in d and self.cartan_matrix[i, j] != 0:
                    d[j] = d[i] * int(self.cartan_matrix[i, j]) / int(self.cartan_matrix[j, i])
                    queue.append(j)
        longest = max(d.values())
        return tuple(2 * d[i] / longest for i in range(self.rank))

    def inner(self, a: Root, b: Root) -> Fraction:
        """W-invariant inner product with long roots of squared length 2."""
        lengths = self.root_lengths
        total = Fraction(0)
        for i, ci in enumerate(a.coeffs):
            if ci == 0:
                continue
            for j, cj in enumerate(b.coeffs):
                if cj:
                    total += ci * cj * int(self.cartan_matrix[i, j]) * lengths[i] / 2
        return total

    @cached_property
    def killing_cartan(self) -> np.ndarray:
        """Exact Gram matrix ``kappa(H_i, H_j) = sum over roots of alpha(H_i) alpha(H_j)``.

        This is the trace of ``ad H_i ad H_j``: the Cartan subalgebra contributes nothing and each
        root space contributes ``alpha(H_i) alpha(H_j)``.
        """
        values = self.root_values
        return values.T @ values

    @cached_property
    def _killing_inverse(self) -> sympy.Matrix:
        return sympy.Matrix(self.killing_cartan.tolist()).inv()

    def evaluate(self, root: Root, vector: Sequence) -> object:
        """``alpha(X)`` for a Cartan vector ``X`` given in the ``H_i`` basis."""
        values = [_pairing(self.cartan_matrix, root.coeffs, i) for i in range(self.rank)]
        return sum(v * x for v, x in zip(values, vector))

    def to_dict(self) -> dict:
        """JSON-ready description."""
        return {
            "series": self.series,
            "rank": self.rank,
            "cartan_matrix": self.cartan_matrix.tolist(),
            "roots": [{"coeffs": list(r.coeffs), "height": r.height} for r in self.roots],
            "marks": list(self.marks),
            "coxeter_number": self.coxeter_number,
        }

    def __repr__(self) -> str:
        return f"RootSystem({self.series}{self.rank}, {len(self.roots)} roots)"


def build_root_system(series: str, rank: int) -> RootSystem:
    """Construct the root system of a simple type.

    Roots are generated by closure under addition of simple roots and cross-checked against
    the Weyl orbits of the simple roots.

    Parameters
    ----------
    series : str
        One of ``A``, ``B``, ``C``, ``D``, ``E``, ``F``, ``G``.
    rank : int
        Rank ``N``.

    Returns
    -------
    RootSystem
        The root system.

    Raises
    ------
    DomainError
        Invalid ``(series, rank)``.
    ConstructionError
        The two generation algorithms disagree.

    Examples
    --------
    >>> rs = build_root_system("A", 2)
    >>> len(rs.roots), rs.coxeter_number, rs.marks
    (6, 3, (1, 1))
    """
    series, rank = validate_type(series, rank)
    cartan = cartan_matrix(series, rank)
    positive = closure_roots(cartan)
    orbit = weyl_orbit_roots(cartan)
    if set(positive) | {-r for r in positive} != set(orbit):
        raise ConstructionError(f"Root generation algorithms disagree for {series}{rank}")
    rs = RootSystem(series, rank, cartan, tuple(positive))
    LOG.debug(f"Built {rs!r} with Coxeter number {rs.coxeter_number}")
    return rs


def height(rs: RootSystem, root: Root) -> int:
    """Height of a root of ``rs``.

    Raises
    ------
    DomainError
        ``root`` is not a root of ``rs``.
    """
    if root not in rs.index:
        raise DomainError(f"{root} is not a root of {rs!r}")
    return root.height


def killing_dual(rs: RootSystem, root: Root) -> np.ndarray:
    """Killing dual ``alpha^#`` of a root in the ``H_i`` basis.

    ``alpha^#`` is defined by ``kappa(alpha^#, H) = alpha(H)`` for the Killing form ``kappa``
    of the adjoint representation.

    Returns
    -------
    numpy.ndarray
        Object array of :class:`fractions.Fraction` of length ``N``.
    """
    values = sympy.Matrix([_pairing(rs.cartan_matrix, root.coeffs, i) for i in range(rs.rank)])
    solution = rs._killing_inverse * values
    return np.array([_to_fraction(x) for x in solution], dtype=object)


def killing_inner(rs: RootSystem, a: Root, b: Root) -> Fraction:
    """``kappa(a^#, b^#)``: the Killing form transported to the dual of the Cartan."""
    return Fraction(rs.evaluate(b, killing_dual(rs, a)))


def coroot(rs: RootSystem, root: Root) -> np.ndarray:
    """``H_alpha = 2 alpha^# / kappa(alpha^#, alpha^#)`` in the ``H_i`` basis (integers)."""
    sharp = killing_dual(rs, root)
    scale = 2 / Fraction(rs.evaluate(root, sharp))
    h = [scale * x for x in sharp]
    if any(x.denominator != 1 for x in h):
        raise ConstructionError(f"Coroot of {root} is not integral")
    return np.array([int(x) for x in h], dtype=np.int64)


def dual_basis(rs: RootSystem) -> List[np.ndarray]:
    """Dual basis ``eta_j`` with ``alpha_i(eta_j) = delta_ij``, exactly."""
    transposed = sympy.Matrix(rs.cartan_matrix.T.tolist())
    if transposed.det() == 0:
        raise ConstructionError(f"Singular Cartan matrix for {rs!r}")
    inverse = transposed.inv()
    return [
        np.array([_to_fraction(inverse[l, j]) for l in range(rs.rank)], dtype=object)
        for j in range(rs.rank)
    ]


@dataclass(frozen=True, eq=False)
class ExtendedDiagram:
    """Extended Dynkin diagram on the nodes ``0..N``, node ``0`` being the lowest root.

    ``cartan[i, j] = alpha_j(H_{alpha_i})`` for the extended simple roots. Edges of ``graph``
    carry ``cartan`` (the pair of Cartan integers, ordered by node number), ``multiplicity`` and
    ``arrow`` (the node the arrow points to, or ``None`` for simple edges).
    """

    rs: RootSystem
    cartan: np.ndarray
    graph: nx.Graph

    @property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(range(self.rs.rank + 1))

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        perm = list(perm)
        return bool(np.array_equal(self.cartan[np.ix_(perm, perm)], self.cartan))


def extended_diagram(rs: RootSystem) -> ExtendedDiagram:
    """Build the extended Dynkin diagram of ``rs``."""
    n = rs.rank
    theta_coroot = coroot(rs, rs.highest_root)
    cartan = np.zeros((n + 1, n + 1), dtype=np.int64)
    cartan[1:, 1:] = rs.cartan_matrix
    cartan[0, 0] = 2
    for i in range(n):
        cartan[i + 1, 0] = -_pairing(rs.cartan_matrix, rs.highest_root.coeffs, i)
        cartan[0, i + 1] = -sum(
            int(theta_coroot[l]) * int(rs.cartan_matrix[l, i]) for l in range(n)
        )
    graph = nx.Graph()
    for node, root in enumerate(rs.extended_simple_roots):
        graph.add_node(node, length=rs.inner(root, root))
    for i, j in itertools.combinations(range(n + 1), 2):
        if cartan[i, j] == 0:
            continue
        pair = (int(cartan[i, j]), int(cartan[j, i]))
        arrow = None
        if pair[0] != pair[1]:
            # arrow points to the shorter root
            arrow = j if abs(pair[0]) < abs(pair[1]) else i
        graph.add_edge(i, j, cartan=pair, multiplicity=pair[0] * pair[1], arrow=arrow)
    return ExtendedDiagram(rs, cartan, graph)


def _node_classes(diagram: ExtendedDiagram) -> List[List[int]]:
    classes: Dict[tuple, List[int]] = {}
    for node in diagram.nodes:
        key = (
            diagram.graph.nodes[node]["length"],
            tuple(sorted(int(x) for x in diagram.cartan[node])),
            tuple(sorted(int(x) for x in diagram.cartan[:, node])),
        )
        classes.setdefault(key, []).append(node)
    return list(classes.values())


def _brute_force_automorphisms(diagram: ExtendedDiagram) -> Iterable[Permutation]:
    classes = _node_classes(diagram)
    size = len(diagram.nodes)
    for images in itertools.product(*(itertools.permutations(c) for c in classes)):
        perm = [0] * size
        for source, image in zip(classes, images):
            for s, t in zip(source, image):
                perm[s] = t
        if diagram.is_automorphism(perm):
            yield tuple(perm)


def _matcher_automorphisms(diagram: ExtendedDiagram) -> Iterable[Permutation]:
    directed = nx.DiGraph()
    for node in diagram.nodes:
        directed.add_node(node, length=diagram.graph.nodes[node]["length"])
    for i, j in diagram.graph.edges:
        directed.add_edge(i, j, value=int(diagram.cartan[i, j]))
        directed.add_edge(j, i, value=int(diagram.cartan[j, i]))
    matcher = isomorphism.DiGraphMatcher(
        directed,
        directed,
        node_match=lambda a, b: a["length"] == b["length"],
        edge_match=lambda a, b: a["value"] == b["value"],
    )
    for mapping in matcher.isomorphisms_iter():
        yield tuple(mapping[node] for node in diagram.nodes)


def diagram_automorphisms(
    diagram: ExtendedDiagram,
    method: Literal["auto", "brute", "backtrack"] = "auto",
    brute_force_nodes: int = 9,
) -> List[Permutation]:
    """All permutations of the nodes that preserve the extended Cartan integers.

    Parameters
    ----------
    diagram : ExtendedDiagram
        Diagram to analyse.
    method : str, optional
        ``"brute"`` enumerates permutations inside classes of nodes with equal invariants,
        ``"backtrack"`` uses a VF2 graph matcher, ``"auto"`` picks brute force for diagrams with at
        most ``brute_force_nodes`` nodes.
    brute_force_nodes : int, optional
        Threshold for ``"auto"``.

    Returns
    -------
    list of tuple
        Sorted permutations, ``perm[i]`` being the image of node ``i``.
    """
    if method == "auto":
        method = "brute" if len(diagram.nodes) <= brute_force_nodes else "backtrack"
    if method == "brute":
        perms = set(_brute_force_automorphisms(diagram))
    elif method == "backtrack":
        perms = set(_matcher_automorphisms(diagram))
    else:
        raise DomainError(f"Unknown automorphism method '{method}'")
    return sorted(perms)


def is_involution(perm: Sequence[int]) -> bool:
    return all(perm[perm[i]] == i for i in range(len(perm)))


def involutions(perms: Iterable[Permutation]) -> List[Permutation]:
    """Filter the permutations squaring to the identity (the identity included)."""
    return [p for p in perms if is_involution(p)]


def apply_permutation(rs: RootSystem, perm: Sequence[int], root: Root) -> Root:
    """Image of a root under the linear map ``alpha_j -> alpha_{perm[j]}``, ``j = 1..N``."""
    images = rs.extended_simple_roots
    total = [0] * rs.rank
    for j, c in enumerate(root.coeffs):
        if c:
            for l, x in enumerate(images[perm[j + 1]].coeffs):
                total[l] += c * x
    return Root(tuple(total))
