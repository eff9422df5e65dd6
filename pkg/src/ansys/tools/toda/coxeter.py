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
Coxeter automorphism, its grading and the twisted loop algebra.

The Coxeter automorphism ``sigma`` fixes the Cartan subalgebra and multiplies ``R_alpha`` by
``exp(2 pi i h(alpha) / k)``. It splits the algebra into eigenspaces ``g_j``, ``j`` mod ``k``,
with ``g_0`` the Cartan subalgebra and ``g_1`` spanned by the root vectors of the extended
simple roots. Elements of the twisted loop algebra are Laurent polynomials in ``lambda`` with
coefficient ``xi_j`` in ``g_{j mod k}``, stored as :class:`LoopElement`.
"""

from dataclasses import dataclass
from functools import cached_property
import logging
from typing import List, Optional, Union

import numpy as np

from ansys.tools.toda.chevalley import AlgebraElement, ChevalleyAlgebra, bracket
from ansys.tools.toda.config import get_setting
from ansys.tools.toda.errors import ConstructionError, DomainError
from ansys.tools.toda.involution import AntilinearConjugation

LOG = logging.getLogger(__name__)


class CoxeterAutomorphism:
    """Coxeter automorphism of a Chevalley algebra.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Algebra acted on.
    """

    def __init__(self, alg: ChevalleyAlgebra):
        self.alg = alg
        self.k = alg.rs.coxeter_number
        heights = np.array([root.height for root in alg.rs.roots], dtype=np.int64)
        self.heights = np.concatenate([np.zeros(alg.rank, dtype=np.int64), heights])
        self.grades = np.mod(self.heights, self.k)
        self.diagonal = np.exp(2j * np.pi * self.heights / self.k)

    def apply(self, x: AlgebraElement, power: int = 1) -> AlgebraElement:
        """``sigma^power(x)``, batched over leading dimensions."""
        return np.asarray(x) * self.diagonal**power

    __call__ = apply

    def is_automorphism(self) -> bool:
        """Whether every bracket ``[e_i, e_j] -> e_k`` respects the grading."""
        for i, row in enumerate(self.alg._table):
            for j, entries in row.items():
                for k, _ in entries:
                    if (self.heights[i] + self.heights[j] - self.heights[k]) % self.k:
                        return False
        return True

    def order_defect(self) -> float:
        """``max |sigma^k - id|`` on the basis."""
        return float(np.abs(self.diagonal**self.k - 1).max())

    @cached_property
    def projector(self) -> "GradingProjector":
        return GradingProjector(self)

    def __repr__(self) -> str:
        return f"CoxeterAutomorphism({self.alg.rs.series}{self.alg.rank}, k={self.k})"


def coxeter(alg: ChevalleyAlgebra) -> CoxeterAutomorphism:
    """Build and certify the Coxeter automorphism of ``alg``.

    Raises
    ------
    ConstructionError
        ``sigma`` is not an automorphism of order ``k``.

    Examples
    --------
    >>> from ansys.tools.toda.rootsystem import build_root_system
    >>> from ansys.tools.toda.chevalley import build_chevalley_basis
    >>> sigma = coxeter(build_chevalley_basis(build_root_system("A", 2)))
    >>> sigma.k
    3
    """
    sigma = CoxeterAutomorphism(alg)
    if not sigma.is_automorphism():
        raise ConstructionError(f"{sigma!r} does not preserve brackets")
    if sigma.order_defect() > 1e-12:
        raise ConstructionError(f"{sigma!r} does not have order {sigma.k}")
    LOG.debug(f"Built {sigma!r}, graded dimensions {graded_dimensions(sigma)}")
    return sigma


class GradingProjector:
    """Projections ``pi_j`` onto the eigenspaces ``g_j`` of ``sigma``."""

    def __init__(self, sigma: CoxeterAutomorphism):
        self.sigma = sigma
        self.k = sigma.k
        self.masks = np.array([sigma.grades == j for j in range(self.k)])

    def project(self, x: AlgebraElement, j: int) -> AlgebraElement:
        """``pi_j(x)``."""
        return np.asarray(x) * self.masks[j % self.k]

    __call__ = project

    def averaged(self, x: AlgebraElement, j: int) -> AlgebraElement:
        """``pi_j(x)`` through ``(1/k) sum_l eps^(-jl) sigma^l(x)``, ``eps = exp(2 pi i / k)``."""
        eps = np.exp(2j * np.pi / self.k)
        total = np.zeros(np.shape(x), dtype=np.complex128)
        for power in range(self.k):
            total += eps ** (-j * power) * self.sigma.apply(x, power)
        return total / self.k

    def dimension(self, j: int) -> int:
        return int(self.masks[j % self.k].sum())


def graded_dimensions(sigma: CoxeterAutomorphism) -> List[int]:
    """``dim g_j`` for ``j = 0 .. k-1``."""
    return [sigma.projector.dimension(j) for j in range(sigma.k)]


def grade_decompose(sigma: CoxeterAutomorphism, x: AlgebraElement) -> np.ndarray:
    """Components of ``x`` in ``g_0 .. g_{k-1}``, stacked along a new leading axis."""
    x = np.asarray(x)
    return np.stack([sigma.projector.project(x, j) for j in range(sigma.k)])


def grading_defect(sigma: CoxeterAutomorphism, x: AlgebraElement, j: int) -> float:
    """Relative size of the part of ``x`` outside ``g_j``."""
    x = np.asarray(x)
    scale = np.abs(x).max(initial=0.0)
    if scale == 0:
        return 0.0
    return float(np.abs(x - sigma.projector.project(x, j)).max() / scale)


def ad_exp_cartan(alg: ChevalleyAlgebra, s: np.ndarray, x: AlgebraElement) -> AlgebraElement:
    """``Ad_{exp S} x`` for a Cartan vector ``S``.

    Each root component of ``x`` is multiplied by ``exp(alpha(S))`` and the Cartan part is kept.
    ``S`` (shape ``(..., N)``) and ``x`` (shape ``(..., dim)``) broadcast against each other.
    """
    s = np.asarray(s)
    x = np.asarray(x, dtype=np.complex128)
    factors = np.exp(s @ alg.rs.root_values.T.astype(np.float64))
    shape = np.broadcast_shapes(x.shape[:-1], factors.shape[:-1])
    out = np.array(np.broadcast_to(x, shape + (alg.dim,)))
    out[..., alg.rank :] *= factors
    return out


def is_cyclic(
    sigma: CoxeterAutomorphism, x: AlgebraElement, tolerance: Optional[float] = None
) -> bool:
    """Whether ``x`` in ``g_1`` has a nonzero component on every extended simple root space.

    Parameters
    ----------
    sigma : CoxeterAutomorphism
        Grading.
    x : AlgebraElement
        Element of ``g_1``.
    tolerance : float, optional
        Threshold relative to the largest coefficient. Defaults to the ``cyclic_tolerance``
        setting.

    Raises
    ------
    DomainError
        ``x`` is not in ``g_1``.
    """
    if tolerance is None:
        tolerance = get_setting("cyclic_tolerance")
    x = np.asarray(x)
    if x.dtype == object:
        # exact coefficients: everything outside g_1 must vanish
        outside = x[..., sigma.grades != 1]
        if any(value != 0 for value in outside.ravel()):
            raise DomainError("Element is not in the grade one eigenspace")
    elif grading_defect(sigma, x, 1) > tolerance:
        raise DomainError("Element is not in the grade one eigenspace")
    values = np.abs(x[sigma.alg.extended_simple_indices].astype(np.complex128))
    largest = values.max(initial=0.0)
    if largest == 0:
        return False
    return bool(np.all(values > tolerance * largest))


@dataclass
class LoopElement:
    """Laurent polynomial ``sum_j lambda^j xi_j`` with algebra coefficients.

    ``coeffs[..., n, :]`` holds ``xi_{low + n}``. Leading dimensions index grid nodes.
    """

    coeffs: np.ndarray
    low: int = 0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs)
        if self.coeffs.ndim < 2:
            raise DomainError("Loop coefficients need a degree axis and an algebra axis")
        self.low = int(self.low)

    @classmethod
    def symmetric(cls, coefficients) -> "LoopElement":
        """Element of degree bound ``d`` from ``xi_{-d} .. xi_d`` listed in order."""
        coefficients = np.asarray(coefficients)
        n = coefficients.shape[-2]
        if n % 2 != 1:
            raise DomainError("Symmetric loop elements need an odd number of coefficients")
        return cls(coefficients, -(n // 2))

    @property
    def high(self) -> int:
        return self.low + self.coeffs.shape[-2] - 1

    @property
    def degree(self) -> int:
        """Degree bound ``d`` with ``xi`` supported in ``-d .. d``."""
        return max(-self.low, self.high)

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[:-2]

    @property
    def dim(self) -> int:
        return self.coeffs.shape[-1]

    def coefficient(self, j: int) -> np.ndarray:
        """``xi_j``, zero outside the stored range."""
        if self.low <= j <= self.high:
            return self.coeffs[..., j - self.low, :]
        return np.zeros(self.batch_shape + (self.dim,), dtype=self.coeffs.dtype)

    def padded(self, low: int, high: int) -> "LoopElement":
        """Same element stored on the degree range ``low .. high`` (truncating outside)."""
        out = np.zeros(self.batch_shape + (high - low + 1, self.dim), dtype=np.complex128)
        for j in range(max(low, self.low), min(high, self.high) + 1):
            out[..., j - low, :] = self.coeffs[..., j - self.low, :]
        return LoopElement(out, low)

    truncated = padded

    def shifted(self, power: int) -> "LoopElement":
        """``lambda^power`` times the element."""
        return LoopElement(self.coeffs, self.low + power)

    def evaluate(self, lam: complex) -> np.ndarray:
        """Value at a complex ``lambda``."""
        powers = np.asarray(lam, dtype=np.complex128) ** np.arange(self.low, self.high + 1)
        return np.einsum("n,...nd->...d", powers, self.coeffs)

    def _aligned(self, other: "LoopElement"):
        low, high = min(self.low, other.low), max(self.high, other.high)
        return self.padded(low, high), other.padded(low, high)

    def __add__(self, other: "LoopElement") -> "LoopElement":
        a, b = self._aligned(other)
        return LoopElement(a.coeffs + b.coeffs, a.low)

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        a, b = self._aligned(other)
        return LoopElement(a.coeffs - b.coeffs, a.low)

    def __neg__(self) -> "LoopElement":
        return LoopElement(-self.coeffs, self.low)

    def __mul__(self, scalar: Union[complex, np.ndarray]) -> "LoopElement":
        scalar = np.asarray(scalar)
        if scalar.ndim:
            scalar = scalar[..., None, None]
        return LoopElement(self.coeffs * scalar, self.low)

    __rmul__ = __mul__

    def norm(self) -> np.ndarray:
        """Euclidean norm of all coefficients, per grid node."""
        return np.sqrt((np.abs(self.coeffs) ** 2).sum(axis=(-2, -1)))


def loop_bracket(alg: ChevalleyAlgebra, a: LoopElement, b: LoopElement) -> LoopElement:
    """``[a, b]`` with coefficients ``sum_{i+j=n} [a_i, b_j]``, batched over grid nodes."""
    na, nb = a.coeffs.shape[-2], b.coeffs.shape[-2]
    batch = np.broadcast_shapes(a.batch_shape, b.batch_shape)
    out = np.zeros(batch + (na + nb - 1, alg.dim), dtype=np.complex128)
    for i in range(na):
        out[..., i : i + nb, :] += bracket(alg, a.coeffs[..., i : i + 1, :], b.coeffs)
    return LoopElement(out, a.low + b.low)


def loop_conjugate(conj: AntilinearConjugation, xi: LoopElement) -> LoopElement:
    """The loop element with coefficients ``conj(xi_{-j})``."""
    reversed_coeffs = xi.coeffs[..., ::-1, :]
    return LoopElement(conj.apply(reversed_coeffs), -xi.high)


def reality_defect(conj: AntilinearConjugation, xi: LoopElement) -> float:
    """Relative size of ``xi - conj(xi)`` in the loop sense."""
    scale = float(np.abs(xi.coeffs).max(initial=0.0))
    if scale == 0:
        return 0.0
    difference = xi - loop_conjugate(conj, xi)
    return float(np.abs(difference.coeffs).max() / scale)


def loop_grading_defect(sigma: CoxeterAutomorphism, xi: LoopElement) -> float:
    """Relative size of the coefficients ``xi_j`` lying outside ``g_{j mod k}``."""
    scale = float(np.abs(xi.coeffs).max(initial=0.0))
    if scale == 0:
        return 0.0
    worst = 0.0
    for j in range(xi.low, xi.high + 1):
        x = xi.coefficient(j)
        worst = max(worst, float(np.abs(x - sigma.projector.project(x, j)).max(initial=0.0)))
    return worst / scale


def project_loop(sigma: CoxeterAutomorphism, xi: LoopElement) -> LoopElement:
    """Project every ``xi_j`` onto ``g_{j mod k}``."""
    out = np.array(xi.coeffs, dtype=np.complex128)
    for n in range(out.shape[-2]):
        out[..., n, :] = sigma.projector.project(out[..., n, :], xi.low + n)
    return LoopElement(out, xi.low)


def random_loop_element(
    alg: ChevalleyAlgebra,
    sigma: CoxeterAutomorphism,
    conj: AntilinearConjugation,
    d: int,
    rng: np.random.Generator,
    scale: float = 1.0,
) -> LoopElement:
    """Random real element of degree bound ``d`` with graded coefficients.

    ``xi_j`` for ``j > 0`` is a random element of ``g_{j mod k}``, ``xi_0`` a real element of
    ``g_0`` and ``xi_{-j} = conj(xi_j)``.
    """
    if d < 1:
        raise DomainError(f"Degree bound must be positive, got {d}")
    coeffs = np.zeros((2 * d + 1, alg.dim), dtype=np.complex128)
    for j in range(d + 1):
        x = scale * (rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim))
        x = sigma.projector.project(x, j)
        if j == 0:
            x = 0.5 * (x + conj.apply(x))
        coeffs[d + j] = x
        coeffs[d - j] = conj.apply(x)
    return LoopElement(coeffs, -d)
