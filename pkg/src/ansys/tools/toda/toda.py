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
Affine Toda fields and their polynomial Killing fields.

A Toda frame has ``F^-1 dF = (Omega_z + Ad_{exp Omega} W) dz + (-Omega_zbar + Ad_{exp -Omega}
conj(W)) dzbar`` with ``Omega`` valued in ``i t`` and ``W`` cyclic in ``g_1``. Its integrability
condition is the Toda equation

    2 Omega_{z zbar} = [Ad_{exp Omega} W, Ad_{exp -Omega} conj(W)]
                     = sum_j M_j exp(2 alpha_j(Omega)) alpha_j^#,

the sum running over the extended simple roots. Cartan vectors are stored in the ``H_i`` basis.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ansys.tools.toda.chevalley import ChevalleyAlgebra, adjoint_matrix, bracket
from ansys.tools.toda.config import get_setting, num_threads
from ansys.tools.toda.coxeter import (
    CoxeterAutomorphism,
    LoopElement,
    ad_exp_cartan,
    grading_defect,
    is_cyclic,
)
from ansys.tools.toda.errors import DomainError
from ansys.tools.toda.involution import (
    AntilinearConjugation,
    reality_permutation,
    reality_signs,
)
from ansys.tools.toda.laxflow import (
    FieldGrid,
    check_degree,
    d_z,
    d_zbar,
    lax_field,
    sup_norm,
    unit_circle,
)
from ansys.tools.toda.report import ResidualReport
from ansys.tools.toda.rootsystem import dual_basis, killing_dual, killing_inner

LOG = logging.getLogger(__name__)


def _floats(values) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in values], dtype=np.float64)


@dataclass(eq=False)
class CyclicData:
    """Element ``W = sum_j r_j R_{alpha_j}`` of ``g_1`` together with the real form.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Algebra.
    conj : AntilinearConjugation
        Conjugation of a real form preserved by the Coxeter automorphism.
    r : array_like
        ``r_0 .. r_N``.
    """

    alg: ChevalleyAlgebra
    conj: AntilinearConjugation
    r: np.ndarray
    perm: Tuple[int, ...] = field(init=False)
    eps: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=np.complex128)
        if self.r.shape != (self.alg.rank + 1,):
            raise DomainError(f"Expected {self.alg.rank + 1} coefficients, got {self.r.shape}")
        perm = reality_permutation(self.conj)
        if perm is None:
            raise DomainError("The conjugation does not permute the extended simple roots")
        self.perm = perm
        self.eps = reality_signs(self.conj)

    @property
    def rs(self):
        return self.alg.rs

    @property
    def W(self) -> np.ndarray:
        w = self.alg.zeros()
        w[self.alg.extended_simple_indices] = self.r
        return w

    @property
    def conj_W(self) -> np.ndarray:
        return self.conj.apply(self.W)

    @property
    def root_values(self) -> np.ndarray:
        """``alpha_j(H_i)`` for the extended simple roots, shape ``(N + 1, N)``."""
        rows = [self.rs.index[root] for root in self.rs.extended_simple_roots]
        return self.rs.root_values[rows].astype(np.float64)

    @property
    def duals(self) -> np.ndarray:
        """``alpha_j^#`` in the ``H_i`` basis, shape ``(N + 1, N)``."""
        return _floats(killing_dual(self.rs, root) for root in self.rs.extended_simple_roots)

    @property
    def killing_norms(self) -> Tuple[Fraction, ...]:
        """``kappa(alpha_j^#, alpha_j^#)``."""
        return tuple(killing_inner(self.rs, a, a) for a in self.rs.extended_simple_roots)

    @property
    def masses(self) -> np.ndarray:
        """``M_j`` in ``2 Omega_{z zbar} = sum_j M_j exp(2 alpha_j(Omega)) alpha_j^#``.

        ``M_j = eps_{pi(j)} r_j conj(r_{pi(j)}) 2 / kappa(alpha_j^#, alpha_j^#)`` where
        ``conj(R_{alpha_j}) = eps_j R_{-alpha_{pi(j)}}``.
        """
        out = np.zeros(self.alg.rank + 1, dtype=np.complex128)
        for j, norm in enumerate(self.killing_norms):
            p = self.perm[j]
            out[j] = self.eps[p] * self.r[j] * np.conj(self.r[p]) * 2 / float(norm)
        return out

    def mass_reality_defect(self) -> float:
        """``max |M_{pi(j)} - conj(M_j)|``."""
        m = self.masses
        return float(np.abs(m[list(self.perm)] - np.conj(m)).max())

    def is_cyclic(self, sigma: CoxeterAutomorphism, tolerance: Optional[float] = None) -> bool:
        return is_cyclic(sigma, self.W, tolerance)

    def to_dict(self) -> dict:
        return {"r": [[float(z.real), float(z.imag)] for z in self.r]}

    @classmethod
    def from_dict(
        cls, alg: ChevalleyAlgebra, conj: AntilinearConjugation, data: dict
    ) -> "CyclicData":
        r = np.array([complex(re, im) for re, im in data["r"]])
        return cls(alg, conj, r)


def vacuum_cyclic_element(alg: ChevalleyAlgebra, conj: AntilinearConjugation) -> CyclicData:
    """Cyclic ``W`` with ``[W, conj(W)] = 0``, so that ``Omega = 0`` solves the Toda equation.

    The masses come out as ``c m_j`` with ``c = +-1`` fixed by the reality signs of the nodes
    fixed by ``pi``; the coefficients are ``r_j = sqrt(m_j kappa_j / 2)`` up to signs.

    Raises
    ------
    DomainError
        The fixed nodes carry reality signs of both kinds.
    """
    perm = reality_permutation(conj)
    if perm is None:
        raise DomainError("The conjugation does not permute the extended simple roots")
    eps = reality_signs(conj)
    fixed_signs = {eps[j] for j, p in enumerate(perm) if p == j}
    if len(fixed_signs) > 1:
        raise DomainError("No vacuum: fixed nodes have reality signs of both kinds")
    c = fixed_signs.pop() if fixed_signs else -1
    marks = alg.rs.extended_marks
    norms = [killing_inner(alg.rs, a, a) for a in alg.rs.extended_simple_roots]
    r = np.zeros(alg.rank + 1, dtype=np.complex128)
    for j, p in enumerate(perm):
        rho = np.sqrt(marks[j] * float(norms[j]) / 2)
        if p >= j:
            r[j] = rho
        else:
            r[j] = c * eps[j] * rho
    return CyclicData(alg, conj, r)


@dataclass
class TodaField:
    """Grid of Cartan vectors ``Omega`` on the nodes ``(i h, j h)``.

    ``omega_z`` holds ``Omega_z`` when known exactly (from a Killing field); otherwise it is
    computed by central differences, NaN on the boundary nodes.
    """

    values: np.ndarray
    h: float
    omega_z: Optional[np.ndarray] = field(default=None, repr=False)
    loop_defect: float = 0.0
    reality_defect: float = 0.0

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape[0], self.values.shape[1]

    def derivative_z(self, accuracy: int = 4) -> np.ndarray:
        if self.omega_z is not None:
            return self.omega_z
        return d_z(self.values, self.h, accuracy)

    def margin(self, accuracy: int = 4) -> int:
        """Boundary rings where :meth:`derivative_z` is NaN."""
        return 0 if self.omega_z is not None else accuracy // 2

    def to_grid(self, alg: ChevalleyAlgebra, d: int = 0) -> FieldGrid:
        rs = alg.rs
        return FieldGrid(
            np.asarray(self.values, dtype=np.complex128),
            self.h,
            kind="cartan",
            series=rs.series,
            rank=rs.rank,
            k=rs.coxeter_number,
            d=d,
        )

    @classmethod
    def from_grid(cls, grid: FieldGrid) -> "TodaField":
        if grid.kind != "cartan":
            raise DomainError("Expected a grid of Cartan vectors")
        return cls(np.asarray(grid.values), grid.h)


def _edge_gradient_z(values: np.ndarray, h: float) -> np.ndarray:
    # one-sided at the edges, where the period comparison needs values
    dx = np.gradient(values, h, axis=0, edge_order=2)
    dy = np.gradient(values, h, axis=1, edge_order=2)
    return 0.5 * (dx - 1j * dy)


def cartan_conjugate(conj: AntilinearConjugation, values: np.ndarray) -> np.ndarray:
    """Conjugation restricted to the Cartan subalgebra, on ``H_i`` coordinates."""
    n = conj.alg.rank
    block = conj.matrix[:n, :n]
    return np.conj(np.asarray(values)) @ block.T


def check_reality(
    conj: AntilinearConjugation, omega: TodaField, tolerance: Optional[float] = None
) -> float:
    """Relative size of ``conj(Omega) + Omega``.

    Raises
    ------
    DomainError
        ``Omega`` is not valued in ``i t``.
    """
    if tolerance is None:
        tolerance = get_setting("reality_tolerance")
    scale = max(float(np.abs(omega.values).max(initial=0.0)), 1.0)
    defect = float(np.abs(cartan_conjugate(conj, omega.values) + omega.values).max()) / scale
    if defect > tolerance:
        raise DomainError(f"Omega is not valued in i t (relative defect {defect:.2e})")
    return defect


def toda_rhs(data: CyclicData, values: np.ndarray, masses=None) -> np.ndarray:
    """``sum_j M_j exp(2 alpha_j(Omega)) alpha_j^#`` at every node."""
    masses = data.masses if masses is None else np.asarray(masses, dtype=np.complex128)
    exponent = np.exp(2 * (np.asarray(values) @ data.root_values.T))
    return (exponent * masses) @ data.duals


def toda_bracket_rhs(data: CyclicData, values: np.ndarray) -> np.ndarray:
    """``[Ad_{exp Omega} W, Ad_{exp -Omega} conj(W)]`` at every node (algebra elements)."""
    alg = data.alg
    values = np.asarray(values)
    left = ad_exp_cartan(alg, values, data.W)
    right = ad_exp_cartan(alg, -values, data.conj_W)
    return bracket(alg, left, right)


def _laplacian(values: np.ndarray, h: float) -> np.ndarray:
    out = np.full(values.shape, np.nan, dtype=np.complex128)
    out[1:-1, 1:-1] = (
        values[2:, 1:-1]
        + values[:-2, 1:-1]
        + values[1:-1, 2:]
        + values[1:-1, :-2]
        - 4 * values[1:-1, 1:-1]
    ) / h**2
    return out


def toda_residual_values(data: CyclicData, omega: TodaField, masses=None) -> np.ndarray:
    """``2 Omega_{z zbar} - sum_j M_j exp(2 alpha_j(Omega)) alpha_j^#`` (NaN on the boundary)."""
    # 2 d_z d_zbar = laplacian / 2
    lhs = 0.5 * _laplacian(np.asarray(omega.values, dtype=np.complex128), omega.h)
    return lhs - toda_rhs(data, omega.values, masses)


def toda_residual(
    data: CyclicData,
    omega: Union[TodaField, Sequence[TodaField]],
    masses=None,
) -> ResidualReport:
    """Residual of the Toda equation at the interior nodes.

    Parameters
    ----------
    data : CyclicData
        ``W`` and the real form.
    omega : TodaField or sequence of TodaField
        Fields, possibly at several step sizes for an order estimate.
    masses : array_like, optional
        Override of the masses ``M_j``.

    Returns
    -------
    ResidualReport
        Row ``toda`` per field.
    """
    fields = [omega] if isinstance(omega, TodaField) else list(omega)
    report = ResidualReport()
    for f in fields:
        if min(f.shape) < 3:
            raise DomainError("The Toda residual needs at least 3x3 nodes")
        report.add("toda", f.h, sup_norm(toda_residual_values(data, f, masses)))
    report.fit_orders()
    return report


def toda_bracket_form(data: CyclicData, omega: TodaField) -> ResidualReport:
    """Compare the bracket form and the dual form of the Toda right-hand side at every node.

    Rows: ``bracket_vs_dual`` (Cartan parts) and ``bracket_root_part`` (must vanish).
    """
    n = data.alg.rank
    bracket_form = toda_bracket_rhs(data, omega.values)
    dual_form = toda_rhs(data, omega.values)
    report = ResidualReport()
    report.add("bracket_vs_dual", omega.h, sup_norm(bracket_form[..., :n] - dual_form))
    report.add("bracket_root_part", omega.h, sup_norm(bracket_form[..., n:]))
    return report


@dataclass
class FrameForm:
    """Connection of a Toda frame and its Maurer-Cartan residual."""

    phi_z: np.ndarray
    phi_zbar: np.ndarray
    report: ResidualReport


def toda_frame_form(data: CyclicData, omega: TodaField) -> FrameForm:
    """Toda frame connection and its Maurer-Cartan residual.

    ``phi_z = Omega_z + Ad_{exp Omega} W`` and ``phi_zbar = -Omega_zbar + Ad_{exp -Omega}
    conj(W)``, with ``Omega_z`` by second order central differences. Rows: ``frame_mc`` and
    ``frame_vs_toda``, the distance between the Maurer-Cartan residual and
    ``-2 Omega_{z zbar} + [Ad_{exp Omega} W, Ad_{exp -Omega} conj(W)]`` evaluated with the same
    differences.

    Raises
    ------
    DomainError
        ``Omega`` is not valued in ``i t`` or the grid has fewer than 5x5 nodes.
    """
    if min(omega.shape) < 5:
        raise DomainError("The frame form needs at least 5x5 nodes")
    alg, h = data.alg, omega.h
    check_reality(data.conj, omega)
    values = np.asarray(omega.values, dtype=np.complex128)
    omega_z = d_z(values, h, accuracy=2)
    omega_zbar = d_zbar(values, h, accuracy=2)
    n = alg.rank
    shape = values.shape[:-1] + (alg.dim,)
    cartan_z = np.zeros(shape, dtype=np.complex128)
    cartan_z[..., :n] = omega_z
    cartan_zbar = np.zeros(shape, dtype=np.complex128)
    cartan_zbar[..., :n] = omega_zbar
    ad_w = ad_exp_cartan(alg, values, data.W)
    ad_cw = ad_exp_cartan(alg, -values, data.conj_W)
    phi_z = cartan_z + ad_w
    phi_zbar = -cartan_zbar + ad_cw
    mc = d_z(phi_zbar, h, accuracy=2) - d_zbar(phi_z, h, accuracy=2) + bracket(alg, phi_z, phi_zbar)
    expected = bracket(alg, ad_w, ad_cw)
    expected[..., :n] -= d_z(omega_zbar, h, accuracy=2) + d_zbar(omega_z, h, accuracy=2)
    report = ResidualReport()
    report.add("frame_mc", h, sup_norm(mc))
    report.add("frame_vs_toda", h, sup_norm(mc - expected))
    return FrameForm(phi_z, phi_zbar, report)


def frame_coefficients(alg: ChevalleyAlgebra, grid: FieldGrid) -> np.ndarray:
    """Coefficients ``c_j`` of ``xi_d`` on ``R_{alpha_j}``, shape ``(nx + 1, ny + 1, N + 1)``."""
    return grid.coefficient(grid.d)[..., alg.extended_simple_indices]


def normalization_check(data: CyclicData, c: np.ndarray, h: float = 0.0) -> ResidualReport:
    """Constancy of ``c_0 prod_j c_j^{m_j}`` over a grid of root coefficients.

    Rows: ``normalization_spread`` (relative to the origin value) and ``normalization_vs_r``
    (relative to ``r_0 prod_j r_j^{m_j}``). Zero coefficients flag the report as non-cyclic.
    """
    c = np.asarray(c, dtype=np.complex128)
    marks = np.array(data.rs.extended_marks)
    report = ResidualReport()
    if np.any(np.abs(c) == 0):
        report.flag("Zero root coefficient: the data is not cyclic")
    products = np.prod(c**marks, axis=-1)
    reference = complex(np.prod(data.r**marks))
    origin = products.reshape(-1)[0]
    report.add(
        "normalization_spread",
        h,
        float(np.abs(products - origin).max() / max(abs(origin), np.finfo(float).tiny)),
    )
    report.add(
        "normalization_vs_r",
        h,
        float(np.abs(products - reference).max() / max(abs(reference), np.finfo(float).tiny)),
    )
    return report


def gauge_from_coefficients(data: CyclicData, c: np.ndarray) -> Tuple[np.ndarray, float]:
    """Cartan gauge ``X`` with ``exp(alpha_j(X)) = c_j / r_j`` for ``j = 1..N``.

    Returns
    -------
    numpy.ndarray
        ``X`` in the ``H_i`` basis at every node.
    float
        Largest ``|exp(alpha_0(X)) - c_0 / r_0|``, which vanishes for normalized data.
    """
    c = np.asarray(c, dtype=np.complex128)
    eta = _floats(dual_basis(data.rs))
    logs = np.log(c[..., 1:] / data.r[1:])
    x = logs @ eta
    alpha0 = x @ data.root_values[0]
    defect = float(np.abs(np.exp(alpha0) - c[..., 0] / data.r[0]).max())
    return x, defect


def _cumulative(values: np.ndarray, slopes: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Running integral from the first node: trapezoid minus ``h^2 / 12 (f'(t) - f'(0))``."""
    total = cumulative_trapezoid(values, dx=h, axis=axis, initial=0)
    return total - h**2 / 12 * (slopes - np.take(slopes, [0], axis=axis))


def reconstruct_omega(
    alg: ChevalleyAlgebra,
    conj: AntilinearConjugation,
    grid: FieldGrid,
    loop_tolerance: Optional[float] = None,
) -> TodaField:
    """Toda field of a polynomial Killing field, with ``Omega(0) = 0``.

    ``Omega_z = xi_{d-1} / 2`` and ``Omega_zbar = -conj(Omega_z)``. ``Omega`` is integrated
    along ``x`` then ``y`` with the end-corrected trapezoid rule, fourth order; the slopes of the
    integrands come from the flows themselves, ``X(xi)_{d-1}`` and ``Y(xi)_{d-1}``. The
    disagreement with the ``y`` then ``x`` path is stored as :attr:`TodaField.loop_defect`.
    The result is projected onto ``i t`` and the size of the projection is stored as
    :attr:`TodaField.reality_defect`.

    Raises
    ------
    DomainError
        ``d`` is not ``1 mod k`` or ``xi_{d-1}`` is not in the Cartan subalgebra.
    """
    if grid.kind != "loop":
        raise DomainError("Omega is reconstructed from a grid of loop elements")
    k = alg.rs.coxeter_number
    check_degree(grid.d, k)
    xi = grid.coefficient(grid.d - 1)
    tolerance = get_setting("reality_tolerance")
    sigma = CoxeterAutomorphism(alg)
    if grading_defect(sigma, xi, 0) > tolerance:
        raise DomainError("xi_{d-1} has components outside the Cartan subalgebra")
    h, n = grid.h, alg.rank
    omega_z = 0.5 * xi[..., :n]
    flow_x, flow_y = lax_field(alg, conj, grid.loop(), grid.r)

    def along_x(values):
        return values - cartan_conjugate(conj, values)

    def along_y(values):
        return 1j * (values + cartan_conjugate(conj, values))

    omega_x, omega_y = along_x(omega_z), along_y(omega_z)
    slope_x = along_x(0.5 * flow_x.coefficient(grid.d - 1)[..., :n])
    slope_y = along_y(0.5 * flow_y.coefficient(grid.d - 1)[..., :n])

    row = _cumulative(omega_x[:, 0], slope_x[:, 0], h, axis=0)
    xy = row[:, None] + _cumulative(omega_y, slope_y, h, axis=1)
    column = _cumulative(omega_y[0], slope_y[0], h, axis=0)
    yx = column[None, :] + _cumulative(omega_x, slope_x, h, axis=0)
    loop_defect = float(np.abs(xy - yx).max(initial=0.0))

    projected = 0.5 * (xy - cartan_conjugate(conj, xy))
    reality = float(np.abs(projected - xy).max(initial=0.0))
    if loop_tolerance is not None and loop_defect > loop_tolerance:
        LOG.warning(f"Omega is not integrable on this grid: loop defect {loop_defect:.2e}")
    LOG.info(f"Reconstructed Omega: loop defect {loop_defect:.2e}, reality defect {reality:.2e}")
    return TodaField(projected, h, omega_z, loop_defect, reality)


def cyclic_data_from_grid(
    alg: ChevalleyAlgebra, conj: AntilinearConjugation, grid: FieldGrid
) -> CyclicData:
    """``W = xi_d`` at the origin, matching ``Omega(0) = 0``."""
    return CyclicData(alg, conj, frame_coefficients(alg, grid)[0, 0])


def w_constancy(alg: ChevalleyAlgebra, omega: TodaField, grid: FieldGrid) -> ResidualReport:
    """Drift of ``Ad_{exp -Omega} xi_d`` over the grid, relative to its origin value."""
    values = ad_exp_cartan(alg, -np.asarray(omega.values), grid.coefficient(grid.d))
    origin = values[0, 0]
    scale = max(float(np.linalg.norm(origin)), np.finfo(float).tiny)
    report = ResidualReport()
    report.add("w_constancy", grid.h, sup_norm(values - origin) / scale)
    return report


def period_defect(data: CyclicData, omega: TodaField) -> ResidualReport:
    """Defect of double periodicity of ``exp(alpha_j(Omega))`` and ``Omega_z``.

    The grid rectangle is taken as the asserted period cell: opposite edges are compared.
    """
    exp_values = np.exp(np.asarray(omega.values) @ data.root_values.T)
    omega_z = omega.omega_z
    if omega_z is None:
        omega_z = _edge_gradient_z(omega.values, omega.h)
    report = ResidualReport()
    for name, values in (("period_exp_omega", exp_values), ("period_omega_z", omega_z)):
        defect = max(
            float(np.abs(values[0] - values[-1]).max()),
            float(np.abs(values[:, 0] - values[:, -1]).max()),
        )
        report.add(name, omega.h, defect)
    return report


# Jacobi fields


def _cartan_elements(alg: ChevalleyAlgebra, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    out = np.zeros(values.shape[:-1] + (alg.dim,), dtype=np.complex128)
    out[..., : alg.rank] = values
    return out


def jacobi_residual(
    data: CyclicData,
    omega: TodaField,
    y: Union[LoopElement, np.ndarray],
    omega_dot: np.ndarray,
    lams: Union[int, Sequence[complex]] = 4,
) -> ResidualReport:
    """Residuals of the Jacobi field equations.

    With ``P = lambda Ad_{exp Omega} W`` and ``Q = lambda^-1 Ad_{exp -Omega} conj(W)``:

    * ``jacobi_z``: ``Y_z + [Omega_z + P, Y] - Omegadot_z - [Omegadot, P]``,
    * ``jacobi_zbar``: ``Y_zbar + [-Omega_zbar + Q, Y] + Omegadot_zbar + [Omegadot, Q]``,
    * ``jacobi_elliptic``: ``2 Omegadot_{z zbar} + [P, [Omegadot, Q]] + [Q, [Omegadot, P]]``.

    ``Y`` may be a grid of algebra elements or a loop grid, evaluated at the ``lambda``
    samples. Derivatives are second order central differences; nodes where ``Y`` or a
    derivative is NaN are left out.

    Raises
    ------
    DomainError
        The grid has fewer than 5x5 nodes or no node carries every residual.
    """
    if min(omega.shape) < 5:
        raise DomainError("The Jacobi residuals need at least 5x5 nodes")
    alg, h = data.alg, omega.h
    if isinstance(lams, int):
        lams = unit_circle(lams)
    values = np.asarray(omega.values)
    derivative = omega.derivative_z(accuracy=2)
    omega_z = _cartan_elements(alg, derivative)
    omega_zbar = _cartan_elements(alg, -cartan_conjugate(data.conj, derivative))
    dot = _cartan_elements(alg, omega_dot)
    dot_z = d_z(dot, h, accuracy=2)
    dot_zbar = d_zbar(dot, h, accuracy=2)
    ad_w = ad_exp_cartan(alg, values, data.W)
    ad_cw = ad_exp_cartan(alg, -values, data.conj_W)

    worst = {"jacobi_z": 0.0, "jacobi_zbar": 0.0, "jacobi_elliptic": 0.0}
    for lam in lams:
        y_value = y.evaluate(lam) if isinstance(y, LoopElement) else np.asarray(y)
        p, q = lam * ad_w, ad_cw / lam
        first = (
            d_z(y_value, h, accuracy=2)
            + bracket(alg, omega_z + p, y_value)
            - dot_z
            - bracket(alg, dot, p)
        )
        second = (
            d_zbar(y_value, h, accuracy=2)
            + bracket(alg, -omega_zbar + q, y_value)
            + dot_zbar
            + bracket(alg, dot, q)
        )
        elliptic = (
            2 * d_zbar(dot_z, h, accuracy=2)
            + bracket(alg, p, bracket(alg, dot, q))
            + bracket(alg, q, bracket(alg, dot, p))
        )
        for name, residual in (
            ("jacobi_z", first),
            ("jacobi_zbar", second),
            ("jacobi_elliptic", elliptic),
        ):
            value = sup_norm(residual)
            if np.isnan(value):
                raise DomainError(f"No interior node carries the {name} residual")
            worst[name] = max(worst[name], value)
    report = ResidualReport()
    for name, value in worst.items():
        report.add(name, h, value)
    return report


def build_Yl(y: LoopElement, l: int, k: int) -> Tuple[LoopElement, np.ndarray]:
    """Jacobi field ``Y^l = Y_{-kl} / 2 + sum_{-kl < j <= 1} lambda^{j + kl} Y_j``.

    Parameters
    ----------
    y : LoopElement
        Truncated formal Killing field with coefficients ``Y_j``, ``j <= 1``.
    l : int
        Positive integer.
    k : int
        Coxeter number.

    Returns
    -------
    LoopElement
        ``Y^l`` on the degrees ``0 .. kl + 1``.
    numpy.ndarray
        ``Omegadot^l = Y_{-kl} / 2`` as algebra elements (Cartan valued).

    Raises
    ------
    DomainError
        ``y`` is not known down to degree ``-kl``.
    """
    if l < 1:
        raise DomainError(f"l must be a positive integer, got {l}")
    if y.low > -k * l:
        raise DomainError(f"Y is truncated at degree {y.low}, above -kl = {-k * l}")
    shift = k * l
    top = max(y.high, 1)
    coeffs = np.zeros(y.batch_shape + (shift + top + 1, y.dim), dtype=np.complex128)
    omega_dot = 0.5 * y.coefficient(-shift)
    coeffs[..., 0, :] = omega_dot
    for j in range(-shift + 1, top + 1):
        coeffs[..., j + shift, :] = y.coefficient(j)
    return LoopElement(coeffs, 0), omega_dot


# formal Killing field recursion


@dataclass
class RecursionResult:
    """Output of :func:`formal_killing_recursion`.

    Attributes
    ----------
    x : numpy.ndarray
        ``X_{-1} .. X_{-M}`` as adjoint matrices, shape ``(nx + 1, ny + 1, M, dim, dim)``,
        NaN on flagged nodes and in the boundary margins.
    xi : LoopElement
        ``pi^sigma(lambda Y)`` on the degrees ``1 - M .. 1``, projected back to the algebra,
        with the same NaN nodes.
    flagged : numpy.ndarray
        Nodes where ``Ad_{exp Omega} W`` is not regular semisimple, that is where the rank of
        its adjoint matrix or of the square of it falls below ``dim - N``.
    report : ResidualReport
        ``lax_z_<n>`` and ``lax_zbar_<n>`` per Laurent degree and ``top_coefficient``.
    """

    x: np.ndarray
    xi: LoopElement
    flagged: np.ndarray
    report: ResidualReport


class _Splitting:
    """``gl(dim) = ker ad_P + im ad_P`` on a block of nodes, in the eigenbasis of ``P``.

    With ``P = V diag(p) V^-1`` the commutator ``[P, M]`` multiplies the entry ``(a, b)`` of
    ``V^-1 M V`` by ``p_a - p_b``; the kernel collects the entries where that gap vanishes.
    Built once per node and reused by every recursion level.
    """

    def __init__(self, p: np.ndarray, tolerance: float):
        eigenvalues, self.v = np.linalg.eig(p)
        self.v_inv = np.linalg.inv(self.v)
        gaps = eigenvalues[..., :, None] - eigenvalues[..., None, :]
        scale = np.abs(eigenvalues).max(axis=-1)[..., None, None]
        self.kernel = np.abs(gaps) <= tolerance * scale
        self.inverse_gaps = np.where(self.kernel, 0, 1 / np.where(self.kernel, 1, gaps))

    def _eigen(self, m: np.ndarray) -> np.ndarray:
        return self.v_inv @ m @ self.v

    def _back(self, m: np.ndarray) -> np.ndarray:
        return self.v @ m @ self.v_inv

    def split(self, m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """``(M^V, M^perp)``."""
        kern = self._back(self._eigen(m) * self.kernel)
        return kern, m - kern

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """``X`` in ``im ad_P`` with ``[P, X]`` equal to the image part of ``rhs``."""
        return self._back(self._eigen(rhs) * self.inverse_gaps)


def _regular_semisimple(p: np.ndarray, regular_rank: int, tolerance: float) -> np.ndarray:
    """Nodes where ``rank P = rank P^2 = dim - N``.

    Equal ranks rule out nilpotent parts on the kernel, and a kernel of dimension ``N`` makes
    the semisimple element regular. Zeroing any ``r_j`` of a cyclic ``W`` leaves a nilpotent
    element and fails the test.
    """

    def rank(m):
        s = np.linalg.svd(m, compute_uv=False)
        top = s[..., :1]
        return ((s > tolerance * top) & (top > 0)).sum(axis=-1)

    return (rank(p) == regular_rank) & (rank(p @ p) == regular_rank)


def _level(
    split: _Splitting, z: np.ndarray, xs: Dict[int, np.ndarray], dx: Optional[np.ndarray], n: int
) -> np.ndarray:
    """``X_{n-1}`` on a block of nodes from ``X_{-1} .. X_n`` (``n = 0`` starts)."""
    if n == 0:
        return split.solve(2 * z)
    _, perp = split.split(xs[n] @ z)
    rhs = 2 * perp - dx
    for s in range(n + 1, 0):
        kern, _ = split.split(xs[s] @ z)
        rhs = rhs - 2 * kern @ xs[n - s]
    return split.solve(rhs)


def _series_mul(a: Dict[int, np.ndarray], b: Dict[int, np.ndarray], lowest: int):
    out: Dict[int, np.ndarray] = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j >= lowest:
                out[i + j] = out.get(i + j, 0) + x @ y
    return out


def killing_projection(alg: ChevalleyAlgebra, matrices: np.ndarray) -> np.ndarray:
    """Project ``gl(dim)`` matrices onto the adjoint image of the algebra.

    The projection is orthogonal for the trace form: coefficients are
    ``G^-1 [trace(ad e_i M)]_i`` with ``G`` the Killing matrix.
    """
    d = alg.dim
    stack = alg._ad_stack_int.toarray().astype(np.float64)
    transposed = np.swapaxes(matrices, -1, -2).reshape(matrices.shape[:-2] + (d * d,))
    traces = transposed @ stack.T
    return traces @ alg.killing_matrix_inverse.T


def formal_killing_recursion(
    data: CyclicData,
    omega: TodaField,
    order: int,
    sigma: Optional[CoxeterAutomorphism] = None,
    threads: Optional[int] = None,
    accuracy: int = 4,
) -> RecursionResult:
    """Formal Killing field of a Toda field by the gauge recursion.

    At every node, with ``P = ad(Ad_{exp Omega} W)`` and ``Z = ad(Omega_z)`` in the adjoint
    representation, the coefficients ``X_{-1}, .., X_{-M}`` in ``im ad_P`` solve

    * ``[P, X_{-1}] = 2 Z``,
    * ``[P, X_{n-1}] = 2 (X_n Z)^perp - 2 sum_{s+l=n} (X_s Z)^V X_l - D' X_n`` for ``n <= -1``,

    where ``D' = d/dz - ad_Z`` uses central differences over the grid. Each level loses
    ``accuracy / 2`` boundary rings, which are NaN, and so does ``Omega_z`` when it is not
    stored on ``omega``. Then ``Y = (1 + X)^-1 P (1 + X)`` is truncated at degree ``-M``,
    projected to the algebra and multiplied by ``lambda``; its graded projection ``xi``
    satisfies the Lax equation at the degrees ``>= 2 - M`` up to discretization error.

    Parameters
    ----------
    data : CyclicData
        ``W`` and the real form.
    omega : TodaField
        Toda field. Every residual needs one interior node: at least ``2 e + 1`` nodes per
        side, ``e = (M + 1) accuracy / 2`` without stored ``Omega_z`` and ``M accuracy / 2``
        with it.
    order : int
        Number ``M >= 1`` of coefficients ``X_j``.
    sigma : CoxeterAutomorphism, optional
        Grading; built from the algebra when omitted.
    threads : int, optional
        Worker threads, each taking whole grid rows.
    accuracy : int, optional
        ``2`` or ``4``, the order of the central differences.

    Returns
    -------
    RecursionResult
        Coefficients, projected loop field, flagged nodes and Lax residuals.

    Raises
    ------
    DomainError
        ``order < 1``, unsupported accuracy or a grid too small for the margins.
    """
    if order < 1:
        raise DomainError(f"The recursion order must be at least 1, got {order}")
    if accuracy not in (2, 4):
        raise DomainError(f"Unsupported stencil accuracy {accuracy}")
    edge = omega.margin(accuracy) + order * (accuracy // 2)
    if min(omega.shape) < 2 * edge + 1:
        raise DomainError(
            f"Order {order} at accuracy {accuracy} needs at least {2 * edge + 1}x{2 * edge + 1}"
            f" nodes, got {omega.shape[0]}x{omega.shape[1]}"
        )
    alg, h = data.alg, omega.h
    sigma = sigma or CoxeterAutomorphism(alg)
    tol = get_setting("rank_tolerance")
    threads = threads or num_threads()
    values = np.asarray(omega.values)
    omega_z = omega.derivative_z(accuracy)
    p_elements = ad_exp_cartan(alg, values, data.W)
    p = adjoint_matrix(alg, p_elements)
    z = adjoint_matrix(alg, _cartan_elements(alg, omega_z))
    nx, ny = omega.shape
    dim = alg.dim

    def run(function):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(function, range(nx)))
        return [function(row) for row in range(nx)]

    flagged = ~_regular_semisimple(p, alg.dim - alg.rank, tol)
    if flagged.any():
        LOG.warning(f"{int(flagged.sum())} nodes on the non-cyclic locus skipped in the recursion")
    # flagged nodes get the identity so that the eigenbasis exists; their output is NaN
    regular = np.where(flagged[..., None, None], np.eye(dim), p)
    splits = run(lambda row: _Splitting(regular[row], tol))

    xs: Dict[int, np.ndarray] = {}
    for n in range(0, -order, -1):
        dx = None
        if n < 0:
            dx = d_z(xs[n], h, accuracy) - (z @ xs[n] - xs[n] @ z)

        def level(row, n=n, dx=dx):
            local = {s: xs[s][row] for s in xs}
            return _level(splits[row], z[row], local, None if dx is None else dx[row], n)

        xs[n - 1] = np.stack(run(level))
        xs[n - 1][flagged] = np.nan
        LOG.debug(f"Recursion level {n - 1} done")

    eye = np.broadcast_to(np.eye(dim, dtype=np.complex128), p.shape)
    g = {0: eye}
    g.update(xs)
    minus_x = {s: -x for s, x in xs.items()}
    g_inv = {0: eye}
    power = {0: eye}
    for _ in range(order):
        power = _series_mul(power, minus_x, -order)
        for degree, term in power.items():
            g_inv[degree] = g_inv.get(degree, 0) + term
    y = _series_mul(_series_mul(g_inv, {0: p}, -order), g, -order)

    coeffs = np.zeros((nx, ny, order + 1, dim), dtype=np.complex128)
    for degree in range(1 - order, 2):
        projected = killing_projection(alg, y.get(degree - 1, np.zeros_like(p)))
        coeffs[..., degree - (1 - order), :] = sigma.projector.project(projected, degree)
    xi = LoopElement(coeffs, 1 - order)

    report = _recursion_report(data, omega, xi, p_elements, omega_z, accuracy)
    if flagged.any():
        report.flag(f"{int(flagged.sum())} non-cyclic nodes skipped")
    x_stack = np.stack([xs[-m] for m in range(1, order + 1)], axis=2)
    return RecursionResult(x_stack, xi, flagged, report)


def _recursion_report(
    data, omega, xi: LoopElement, p_elements, omega_z, accuracy: int
) -> ResidualReport:
    alg, h = data.alg, omega.h
    cartan_z = _cartan_elements(alg, omega_z)
    cartan_zbar = _cartan_elements(alg, -cartan_conjugate(data.conj, omega_z))
    q_elements = ad_exp_cartan(alg, -np.asarray(omega.values), data.conj_W)
    report = ResidualReport()
    for n in range(xi.low + 1, xi.high + 1):
        coefficient = xi.coefficient(n)
        residual = (
            d_z(coefficient, h, accuracy)
            - bracket(alg, coefficient, cartan_z)
            - bracket(alg, xi.coefficient(n - 1), p_elements)
        )
        _add_finite(report, f"lax_z_{n}", h, residual)
    for n in range(xi.low, xi.high + 1):
        coefficient = xi.coefficient(n)
        residual = (
            d_zbar(coefficient, h, accuracy)
            + bracket(alg, coefficient, cartan_zbar)
            - bracket(alg, xi.coefficient(n + 1), q_elements)
        )
        _add_finite(report, f"lax_zbar_{n}", h, residual)
    _add_finite(report, "top_coefficient", h, xi.coefficient(1) - p_elements)
    return report


def _add_finite(report: ResidualReport, name: str, h: float, residual: np.ndarray) -> None:
    value = sup_norm(residual)
    if np.isnan(value):
        report.flag(f"{name}: no regular interior node")
    else:
        report.add(name, h, value)
