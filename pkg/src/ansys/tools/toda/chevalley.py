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
Chevalley basis of a simple complex Lie algebra.

The basis is ``H_1 .. H_N`` (coroots of the simple roots) followed by one root vector
``R_alpha`` per root, in the order of :attr:`RootSystem.roots`. Brackets are

* ``[H_i, R_alpha] = alpha(H_i) R_alpha``,
* ``[R_alpha, R_-alpha] = H_alpha`` (the coroot),
* ``[R_alpha, R_beta] = c_{alpha,beta} R_{alpha+beta}``.

The integers ``c_{alpha,beta}`` are fixed by giving every extraspecial pair a positive sign and
propagating with the standard identities; they satisfy ``c_{-alpha,-beta} = -c_{alpha,beta}``
and ``|c_{alpha,beta}| = p + 1``.

Elements are NumPy vectors of length :attr:`ChevalleyAlgebra.dim`. Integer or ``object``
(:class:`fractions.Fraction`) arrays give exact results; ``complex128`` arrays are used for
flows.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import itertools
import logging
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ansys.tools.toda.errors import ConstructionError, DomainError
from ansys.tools.toda.rootsystem import Root, RootSystem, coroot

LOG = logging.getLogger(__name__)

AlgebraElement = np.ndarray

_DENSE_LIMIT = 80


def _is_exact(*arrays: np.ndarray) -> bool:
    return any(np.asarray(a).dtype == object for a in arrays)


def _string_length(rs: RootSystem, alpha: Root, beta: Root) -> int:
    """Largest ``p`` with ``beta - p alpha`` a root."""
    p = 0
    while beta - alpha.scaled(p + 1) in rs.index:
        p += 1
    return p


def _structure_constants(rs: RootSystem) -> Dict[Tuple[Root, Root], int]:
    """``c_{alpha,beta}`` for every pair of roots whose sum is a root."""
    order = {root: i for i, root in enumerate(rs.positive_roots)}
    is_root = rs.index.__contains__
    positive: Dict[Tuple[Root, Root], Fraction] = {}

    lengths = {root: rs.inner(root, root) for root in rs.roots}
    norm = lengths.__getitem__

    def constant(x: Root, y: Root) -> Fraction:
        s = x + y
        if not is_root(s):
            return Fraction(0)
        if x.is_positive and y.is_positive:
            return positive[(x, y)]
        if not x.is_positive and not y.is_positive:
            return -positive[(-x, -y)]
        if not x.is_positive:
            return -constant(y, x)
        # x > 0 > y, x + y + (-s) = 0
        if s.is_positive:
            return norm(s) / norm(x) * constant(y, -s)
        return norm(s) / norm(y) * constant(-s, x)

    for xi in rs.positive_roots:
        if xi.height < 2:
            continue
        special = sorted(
            (
                (a, xi - a)
                for a in rs.positive_roots
                if a.height < xi.height
                and (xi - a) in order
                and order[a] < order[xi - a]
            ),
            key=lambda pair: order[pair[0]],
        )
        a1, b1 = special[0]
        extraspecial = Fraction(_string_length(rs, a1, b1) + 1)
        positive[(a1, b1)] = extraspecial
        positive[(b1, a1)] = -extraspecial
        for a, b in special[1:]:
            total = Fraction(0)
            if is_root(b - a1):
                total += constant(b, -a1) * constant(a, -b1) / norm(b - a1)
            if is_root(a - a1):
                total += constant(-a1, a) * constant(b, -b1) / norm(a - a1)
            value = norm(xi) * total / extraspecial
            positive[(a, b)] = value
            positive[(b, a)] = -value

    constants: Dict[Tuple[Root, Root], int] = {}
    for x, y in itertools.product(rs.roots, repeat=2):
        if is_root(x + y):
            value = constant(x, y)
            if value.denominator != 1:
                raise ConstructionError(f"Non-integral structure constant for {x}, {y}")
            constants[(x, y)] = int(value)
    return constants


@dataclass
class JacobiReport:
    """Outcome of :func:`verify_jacobi`."""

    mode: str
    checked: int
    violations: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


class ChevalleyAlgebra:
    """Simple complex Lie algebra in a Chevalley basis.

    Parameters
    ----------
    rs : RootSystem
        Root system of the algebra.
    constants : dict
        ``c_{alpha,beta}`` keyed by pairs of roots.
    """

    def __init__(self, rs: RootSystem, constants: Dict[Tuple[Root, Root], int]):
        self.rs = rs
        self.constants = constants
        self.rank = rs.rank
        self.dim = rs.rank + len(rs.roots)
        self.coroots = np.array([coroot(rs, r) for r in rs.roots], dtype=np.int64)
        self._table = self._build_table()
        rows, cols, vals = [], [], []
        for i, row in enumerate(self._table):
            for j, entries in row.items():
                for k, c in entries:
                    rows.append(i * self.dim + j)
                    cols.append(k)
                    vals.append(c)
        shape = (self.dim * self.dim, self.dim)
        self._tensor_int = sp.csr_matrix(
            (np.array(vals, dtype=np.int64), (rows, cols)), shape=shape
        )
        self._tensor = self._tensor_int.astype(np.complex128)
        self._dense = None
        if self.dim <= _DENSE_LIMIT:
            self._dense = self._tensor.toarray().reshape(self.dim, self.dim * self.dim)
        # row i holds ad(e_i) flattened as [k, j] -> k * dim + j
        ad_cols = [(k * self.dim + (r % self.dim)) for r, k in zip(rows, cols)]
        ad_rows = [r // self.dim for r in rows]
        self._ad_stack_int = sp.csr_matrix(
            (np.array(vals, dtype=np.int64), (ad_rows, ad_cols)),
            shape=(self.dim, self.dim * self.dim),
        )
        LOG.debug(f"Chevalley basis of {rs!r}: dim {self.dim}, {len(vals)} bracket entries")

    def _build_table(self) -> List[Dict[int, List[Tuple[int, int]]]]:
        rs, n = self.rs, self.rank
        table: List[Dict[int, List[Tuple[int, int]]]] = [dict() for _ in range(self.dim)]
        values = rs.root_values
        for r, root in enumerate(rs.roots):
            for i in range(n):
                value = int(values[r, i])
                if value:
                    table[i][n + r] = [(n + r, value)]
                    table[n + r][i] = [(n + r, -value)]
            opposite = rs.index[-root]
            table[n + r][n + opposite] = [
                (i, int(c)) for i, c in enumerate(self.coroots[r]) if c != 0
            ]
        for (x, y), c in self.constants.items():
            table[n + rs.index[x]][n + rs.index[y]] = [(n + rs.index[x + y], c)]
        return table

    # element helpers
    def zeros(self, exact: bool = False) -> AlgebraElement:
        if exact:
            return np.array([Fraction(0)] * self.dim, dtype=object)
        return np.zeros(self.dim, dtype=np.complex128)

    def basis(self, index: int, exact: bool = False) -> AlgebraElement:
        x = self.zeros(exact)
        x[index] = Fraction(1) if exact else 1.0
        return x

    def root_index(self, root: Root) -> int:
        """Basis index of ``R_root``."""
        return self.rank + self.rs.index[root]

    def root_vector(self, root: Root, exact: bool = False) -> AlgebraElement:
        return self.basis(self.root_index(root), exact)

    def cartan_element(self, vector, exact: bool = False) -> AlgebraElement:
        """Embed a Cartan vector (``H_i`` coordinates) into the algebra."""
        x = self.zeros(exact)
        x[: self.rank] = vector
        return x

    def cartan_part(self, x: AlgebraElement) -> np.ndarray:
        return np.asarray(x)[..., : self.rank]

    @cached_property
    def extended_simple_indices(self) -> np.ndarray:
        """Basis indices of ``R_{alpha_0}, R_{alpha_1}, .., R_{alpha_N}``."""
        return np.array([self.root_index(r) for r in self.rs.extended_simple_roots])

    @cached_property
    def killing_matrix(self) -> np.ndarray:
        """Exact integer Gram matrix ``kappa(e_i, e_j) = trace(ad e_i ad e_j)``."""
        d = self.dim
        stack = self._ad_stack_int.tocoo()
        flat = stack.col
        transposed = (flat % d) * d + flat // d
        swapped = sp.csr_matrix((stack.data, (stack.row, transposed)), shape=stack.shape)
        return np.asarray((self._ad_stack_int @ swapped.T).toarray(), dtype=np.int64)

    @cached_property
    def killing_matrix_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.killing_matrix.astype(np.float64))

    def __repr__(self) -> str:
        return f"ChevalleyAlgebra({self.rs.series}{self.rank}, dim={self.dim})"

    # sparse exact arithmetic on basis dictionaries
    def _bracket_dicts(self, x: Dict[int, object], y: Dict[int, object]) -> Dict[int, object]:
        out: Dict[int, object] = {}
        for i, a in x.items():
            row = self._table[i]
            for j, b in y.items():
                for k, c in row.get(j, ()):
                    out[k] = out.get(k, 0) + c * a * b
        return {k: v for k, v in out.items() if v != 0}


def build_chevalley_basis(rs: RootSystem) -> ChevalleyAlgebra:
    """Chevalley basis with the positive extraspecial-pair sign convention.

    Examples
    --------
    >>> from ansys.tools.toda.rootsystem import build_root_system
    >>> alg = build_chevalley_basis(build_root_system("A", 2))
    >>> alg.dim
    8
    """
    return ChevalleyAlgebra(rs, _structure_constants(rs))


def _as_dict(x: AlgebraElement) -> Dict[int, object]:
    return {i: v for i, v in enumerate(x) if v != 0}


def bracket(alg: ChevalleyAlgebra, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Lie bracket ``[a, b]``.

    ``a`` and ``b`` may carry leading batch dimensions, which are broadcast. Exact inputs
    (``object`` arrays) must be single vectors.

    Raises
    ------
    DomainError
        Trailing dimension differs from the algebra dimension.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[-1] != alg.dim or b.shape[-1] != alg.dim:
        raise DomainError(f"Expected elements of dimension {alg.dim}")
    if _is_exact(a, b):
        out = alg._bracket_dicts(_as_dict(a), _as_dict(b))
        result = alg.zeros(exact=True)
        for k, v in out.items():
            result[k] = Fraction(v)
        return result
    integral = np.issubdtype(a.dtype, np.integer) and np.issubdtype(b.dtype, np.integer)
    shape = np.broadcast_shapes(a.shape, b.shape)
    a = np.broadcast_to(a, shape).reshape(-1, alg.dim)
    b = np.broadcast_to(b, shape).reshape(-1, alg.dim)
    if integral:
        outer = (a[:, :, None] * b[:, None, :]).reshape(len(a), -1)
        result = np.asarray((alg._tensor_int.T @ outer.T).T)
    elif alg._dense is not None:
        partial = (a @ alg._dense).reshape(len(a), alg.dim, alg.dim)
        result = np.einsum("nj,njk->nk", b, partial)
    else:
        outer = (a[:, :, None] * b[:, None, :]).reshape(len(a), -1)
        result = np.asarray((alg._tensor.T @ outer.T).T)
    return result.reshape(shape)


def killing_form(alg: ChevalleyAlgebra, a: AlgebraElement, b: AlgebraElement):
    """Killing form ``trace(ad a ad b)`` (bilinear, batched over leading dimensions)."""
    a, b = np.asarray(a), np.asarray(b)
    if _is_exact(a, b):
        gram = alg.killing_matrix.astype(object)
        return (a @ gram) @ b
    return np.einsum("...i,ij,...j->...", a, alg.killing_matrix, b)


def adjoint_matrix(alg: ChevalleyAlgebra, a: AlgebraElement) -> np.ndarray:
    """Matrix of ``ad a`` in the Chevalley basis, ``ad(a) @ b == bracket(a, b)``.

    Leading batch dimensions of floating inputs give a stack of matrices.
    """
    a = np.asarray(a)
    d = alg.dim
    if _is_exact(a):
        matrix = np.array([[Fraction(0)] * d for _ in range(d)], dtype=object)
        for i, coefficient in _as_dict(a).items():
            for j, entries in alg._table[i].items():
                for k, c in entries:
                    matrix[k, j] += c * coefficient
        return matrix
    if np.issubdtype(a.dtype, np.integer) and a.ndim == 1:
        return np.asarray(alg._ad_stack_int.T @ a).reshape(d, d)
    flat = a.reshape(-1, d).astype(np.complex128)
    stacked = np.asarray((alg._ad_stack_int.T @ flat.T).T)
    return stacked.reshape(a.shape[:-1] + (d, d))


def verify_jacobi(
    alg: ChevalleyAlgebra,
    mode: Literal["auto", "exhaustive", "sampled"] = "auto",
    samples: int = 10_000,
    seed: int = 0,
    exhaustive_dim: int = 60,
) -> JacobiReport:
    """Check the Jacobi identity exactly on basis triples.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Algebra to certify.
    mode : str, optional
        ``"exhaustive"`` checks every triple ``i < j < k``, ``"sampled"`` checks ``samples``
        random triples, ``"auto"`` is exhaustive up to ``exhaustive_dim``.
    samples : int, optional
        Number of sampled triples.
    seed : int, optional
        Seed of the sampler.
    exhaustive_dim : int, optional
        Threshold for ``"auto"``.

    Returns
    -------
    JacobiReport
        Triples violating the identity (empty for a valid algebra).
    """
    if mode == "auto":
        mode = "exhaustive" if alg.dim <= exhaustive_dim else "sampled"
    if mode == "exhaustive":
        triples = itertools.combinations(range(alg.dim), 3)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        triples = (tuple(t) for t in rng.integers(0, alg.dim, size=(samples, 3)))
    else:
        raise DomainError(f"Unknown Jacobi mode '{mode}'")
    report = JacobiReport(mode=mode, checked=0)
    for i, j, k in triples:
        ei, ej, ek = {i: 1}, {j: 1}, {k: 1}
        total: Dict[int, int] = {}
        for x, y, z in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
            for key, value in alg._bracket_dicts(x, alg._bracket_dicts(y, z)).items():
                total[key] = total.get(key, 0) + value
        report.checked += 1
        if any(v != 0 for v in total.values()):
            report.violations.append((int(i), int(j), int(k)))
    LOG.info(
        f"Jacobi identity on {alg!r}: {report.checked} triples ({mode}), "
        f"{len(report.violations)} violations"
    )
    return report


def verify_structure_constants(alg: ChevalleyAlgebra) -> List[Tuple[Root, Root, str]]:
    """Violations of ``c_{-a,-b} = -c_{a,b}`` and ``|c_{a,b}| = p + 1``."""
    violations = []
    for (x, y), c in alg.constants.items():
        if alg.constants.get((-x, -y)) != -c:
            violations.append((x, y, "sign"))
        if abs(c) != _string_length(alg.rs, x, y) + 1:
            violations.append((x, y, "magnitude"))
    return violations


def structure_constant(alg: ChevalleyAlgebra, x: Root, y: Root) -> int:
    """``c_{x,y}``, zero when ``x + y`` is not a root."""
    return alg.constants.get((x, y), 0)


def random_element(
    alg: ChevalleyAlgebra, rng: np.random.Generator, exact: bool = False, scale: float = 1.0
) -> AlgebraElement:
    """Random element: small integers as Fractions when exact, complex Gaussian otherwise."""
    if exact:
        return np.array([Fraction(int(v)) for v in rng.integers(-3, 4, alg.dim)], dtype=object)
    return scale * (rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim))


def element_norm(x: AlgebraElement, axis: Optional[int] = -1) -> np.ndarray:
    """Euclidean norm of the coefficient vector."""
    return np.linalg.norm(np.asarray(x, dtype=np.complex128), axis=axis)
