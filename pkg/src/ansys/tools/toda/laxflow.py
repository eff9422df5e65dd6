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
Commuting Lax flows on a finite-dimensional truncation of the twisted loop algebra.

For a real loop element ``xi`` of degree bound ``d`` with ``d = 1 mod k`` the connection
coefficient ``A(xi) = lambda xi_d + r xi_{d-1}`` (``r = 1/2``) defines

* ``F_z = [xi, A(xi)]`` and ``F_zbar`` its loop conjugate,
* the real vector fields ``X = F_z + F_zbar`` and ``Y = i (F_z - F_zbar)``.

Integrating ``X`` along ``x`` and ``Y`` along ``y`` gives a polynomial Killing field on a grid,
and ``phi = A dz + conj(A) dzbar`` solves the Maurer-Cartan equation for every ``lambda``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import logging
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from ansys.tools.toda.chevalley import ChevalleyAlgebra, adjoint_matrix, bracket, killing_form
from ansys.tools.toda.config import get_setting, num_threads
from ansys.tools.toda.coxeter import (
    CoxeterAutomorphism,
    LoopElement,
    is_cyclic,
    loop_bracket,
    loop_conjugate,
    loop_grading_defect,
    project_loop,
    reality_defect,
)
from ansys.tools.toda.errors import DomainError
from ansys.tools.toda.involution import AntilinearConjugation
from ansys.tools.toda.report import ResidualReport

LOG = logging.getLogger(__name__)

GridKind = Literal["loop", "cartan"]

# columns integrated together; fixed so that results do not depend on the thread count
_COLUMN_CHUNK = 8


def check_degree(d: int, k: int) -> None:
    """Raise unless ``d >= 1`` and ``d = 1 mod k``."""
    if d < 1 or d % k != 1 % k:
        raise DomainError(f"Degree {d} is not congruent to 1 modulo the Coxeter number {k}")


def connection_coefficient(xi: LoopElement, r: float = 0.5) -> LoopElement:
    """``A(xi) = lambda xi_d + r xi_{d-1}`` as a loop element of degrees ``0..1``."""
    d = xi.degree
    coeffs = np.stack([r * xi.coefficient(d - 1), xi.coefficient(d)], axis=-2)
    return LoopElement(coeffs, 0)


def lax_field(
    alg: ChevalleyAlgebra, conj: AntilinearConjugation, xi: LoopElement, r: float = 0.5
) -> Tuple[LoopElement, LoopElement]:
    """The commuting vector fields ``X(xi)`` and ``Y(xi)``.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Algebra.
    conj : AntilinearConjugation
        Conjugation of the real form.
    xi : LoopElement
        Real loop element of degree bound ``d``, possibly batched over grid nodes.
    r : float, optional
        Weight of ``xi_{d-1}`` in the connection. The value ``1/2`` gives commuting flows.

    Returns
    -------
    tuple of LoopElement
        ``X(xi)`` and ``Y(xi)``, on the same degree range ``-d..d`` as ``xi``.

    Raises
    ------
    DomainError
        ``d`` is not congruent to one modulo the Coxeter number.
    """
    d = xi.degree
    check_degree(d, alg.rs.coxeter_number)
    xi = xi.padded(-d, d)
    fz = loop_bracket(alg, xi, connection_coefficient(xi, r)).padded(-d, d)
    fzbar = loop_conjugate(conj, fz)
    return fz + fzbar, (fz - fzbar) * 1j


@dataclass
class FlowSpec:
    """Everything needed to integrate the flows on ``[0, lx] x [0, ly]``."""

    alg: ChevalleyAlgebra
    sigma: CoxeterAutomorphism
    conj: AntilinearConjugation
    xi0: LoopElement
    lx: float = 1.0
    ly: float = 1.0
    h: float = 0.01
    r: float = 0.5
    blowup_bound: Optional[float] = None
    threads: Optional[int] = None

    @property
    def d(self) -> int:
        return self.xi0.degree

    @property
    def k(self) -> int:
        return self.sigma.k

    @property
    def nx(self) -> int:
        return int(round(self.lx / self.h))

    @property
    def ny(self) -> int:
        return int(round(self.ly / self.h))

    def validate(self) -> None:
        """Check degree, grading and reality of the initial condition.

        Raises
        ------
        DomainError
            Any of the checks fails or the grid is empty.
        """
        check_degree(self.d, self.k)
        if self.h <= 0 or self.lx < 0 or self.ly < 0:
            raise DomainError(f"Invalid grid: lx={self.lx}, ly={self.ly}, h={self.h}")
        tolerance = get_setting("reality_tolerance")
        if self.xi0.batch_shape:
            raise DomainError("The initial condition must be a single loop element")
        if loop_grading_defect(self.sigma, self.xi0) > tolerance:
            raise DomainError("Initial condition is not in the twisted loop algebra")
        if reality_defect(self.conj, self.xi0) > tolerance:
            raise DomainError("Initial condition violates the reality condition")

    def with_step(self, h: float) -> "FlowSpec":
        return replace(self, h=h)


@dataclass
class FieldGrid:
    """Values on the nodes ``(i h, j h)``, ``0 <= i <= nx``, ``0 <= j <= ny``.

    ``values`` has shape ``(nx + 1, ny + 1, n, dim)`` for loop grids, coefficient ``n`` being
    ``xi_{low + n}``, and ``(nx + 1, ny + 1, N)`` for Cartan grids.
    """

    values: np.ndarray
    h: float
    kind: GridKind = "loop"
    low: int = 0
    series: str = ""
    rank: int = 0
    k: int = 0
    d: int = 0
    r: float = 0.5
    connection: Optional[np.ndarray] = field(default=None, repr=False)
    blowup: Optional[Tuple[int, int]] = None
    projection_defect: float = 0.0

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape[0], self.values.shape[1]

    @property
    def nx(self) -> int:
        return self.values.shape[0] - 1

    @property
    def ny(self) -> int:
        return self.values.shape[1] - 1

    def loop(self) -> LoopElement:
        """All nodes as one batched :class:`LoopElement`."""
        if self.kind != "loop":
            raise DomainError("Cartan grids have no loop coefficients")
        return LoopElement(self.values, self.low)

    def at(self, i: int, j: int) -> LoopElement:
        return LoopElement(self.values[i, j], self.low)

    def coefficient(self, j: int) -> np.ndarray:
        """Grid of ``xi_j``."""
        return self.loop().coefficient(j)


def _rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _flow_function(spec: FlowSpec, direction: Literal["x", "y"]):
    low = -spec.d

    def f(coeffs: np.ndarray) -> np.ndarray:
        x, y = lax_field(spec.alg, spec.conj, LoopElement(coeffs, low), spec.r)
        return (x if direction == "x" else y).coeffs

    return f


def _integrate_line(
    spec: FlowSpec, start: np.ndarray, steps: int, direction: Literal["x", "y"], bound: float
) -> Tuple[np.ndarray, int, float, Optional[tuple]]:
    """RK4 along one direction for a batch of starting points.

    Returns the trajectory ``(steps + 1, batch..., n, dim)``, the number of steps completed
    before any batch member left the norm bound, the largest projection defect and the batch
    index of the first member out of bound (``None`` when all stay bounded).
    """
    f = _flow_function(spec, direction)
    path = np.zeros((steps + 1,) + start.shape, dtype=np.complex128)
    path[0] = start
    low = -spec.d
    worst = 0.0
    for n in range(steps):
        raw = LoopElement(_rk4_step(f, path[n], spec.h), low)
        worst = max(worst, loop_grading_defect(spec.sigma, raw))
        path[n + 1] = project_loop(spec.sigma, raw).coeffs
        norms = raw.norm()
        escaped = ~np.isfinite(norms) | (norms > bound)
        if np.any(escaped):
            offender = np.unravel_index(int(np.argmax(escaped)), np.shape(escaped))
            return path, n, worst, tuple(int(i) for i in offender)
    return path, steps, worst, None


def integrate_flow(spec: FlowSpec) -> FieldGrid:
    """Integrate ``X`` along ``x`` from the origin, then ``Y`` along ``y`` for every column.

    Each step is followed by a projection onto the grading, whose largest relative defect is
    stored in :attr:`FieldGrid.projection_defect`. Columns run in a thread pool, in fixed
    chunks.

    Parameters
    ----------
    spec : FlowSpec
        Flow and grid parameters.

    Returns
    -------
    FieldGrid
        Loop grid. When some node leaves the norm bound the grid is truncated to the completed
        rectangle and :attr:`FieldGrid.blowup` holds the offending node.
    """
    spec.validate()
    bound = spec.blowup_bound if spec.blowup_bound is not None else get_setting("blowup_bound")
    rs = spec.alg.rs
    meta = dict(series=rs.series, rank=rs.rank, k=spec.k, d=spec.d, r=spec.r)
    xi0 = spec.xi0.padded(-spec.d, spec.d).coeffs
    if not float(np.sqrt((np.abs(xi0) ** 2).sum())) <= bound:
        LOG.warning(f"Initial condition already exceeds the norm bound {bound}")
        values = xi0[None, None]
        return _finish(spec, FieldGrid(values, spec.h, low=-spec.d, blowup=(0, 0), **meta))

    row, done, defect, _ = _integrate_line(spec, xi0, spec.nx, "x", bound)
    blowup = None
    if done < spec.nx:
        blowup = (done + 1, 0)
        LOG.warning(f"Flow left the norm bound at x node {done + 1}, truncating")
    row = row[: done + 1]

    chunks = [row[i : i + _COLUMN_CHUNK] for i in range(0, len(row), _COLUMN_CHUNK)]
    threads = spec.threads or num_threads()

    def column(chunk):
        return _integrate_line(spec, chunk, spec.ny, "y", bound)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(column, chunks))
    else:
        results = [column(chunk) for chunk in chunks]

    ny = min(steps for _, steps, _, _ in results)
    if ny < spec.ny:
        blowup = blowup or escaped_node(results, ny)
        LOG.warning(f"Flow left the norm bound at y node {ny + 1}, truncating")
    defect = max([defect] + [worst for _, _, worst, _ in results])
    # (ny + 1, nx + 1, n, dim) -> (nx + 1, ny + 1, n, dim)
    values = np.concatenate([path[: ny + 1] for path, _, _, _ in results], axis=1)
    values = np.ascontiguousarray(values.swapaxes(0, 1))
    grid = FieldGrid(
        values, spec.h, low=-spec.d, blowup=blowup, projection_defect=defect, **meta
    )
    return _finish(spec, grid)


def escaped_node(results, ny: int) -> Tuple[int, int]:
    """Grid node where the first column chunk stopping after ``ny`` steps left the bound.

    ``results`` are the per-chunk returns of the column integration, in column order.
    """
    for chunk, (_, steps, _, offender) in enumerate(results):
        if steps == ny and offender is not None:
            return chunk * _COLUMN_CHUNK + offender[0], ny + 1
    raise DomainError(f"No column left the norm bound after {ny} steps")


def _finish(spec: FlowSpec, grid: FieldGrid) -> FieldGrid:
    grid.connection = connection_coefficient(grid.loop(), spec.r).coeffs
    LOG.info(
        f"Integrated {grid.nx}x{grid.ny} grid, h={grid.h}, projection defect "
        f"{grid.projection_defect:.2e}"
    )
    return grid


def _flow_to(spec: FlowSpec, start: np.ndarray, steps: int, direction) -> np.ndarray:
    path, done, _, _ = _integrate_line(spec, start, steps, direction, np.inf)
    return path[done]


def commutation_defect(spec: FlowSpec, corner: Tuple[float, float]) -> float:
    """Distance between flowing ``x`` then ``y`` and ``y`` then ``x`` up to ``corner``.

    Parameters
    ----------
    spec : FlowSpec
        Flow parameters; ``spec.h`` is the step size.
    corner : tuple of float
        Physical point ``(x, y)`` inside the grid.

    Returns
    -------
    float
        Euclidean norm of the difference of the two loop elements.
    """
    spec.validate()
    px, py = corner
    if not (0 <= px <= spec.lx and 0 <= py <= spec.ly):
        raise DomainError(f"Corner {corner} lies outside the grid")
    i, j = int(round(px / spec.h)), int(round(py / spec.h))
    start = spec.xi0.padded(-spec.d, spec.d).coeffs
    xy = _flow_to(spec, _flow_to(spec, start, i, "x"), j, "y")
    yx = _flow_to(spec, _flow_to(spec, start, j, "y"), i, "x")
    return float(np.sqrt((np.abs(xy - yx) ** 2).sum()))


def central_difference(values: np.ndarray, h: float, axis: int, accuracy: int = 4) -> np.ndarray:
    """Central first derivative along a grid axis.

    Nodes too close to the boundary for the stencil are set to NaN.

    Parameters
    ----------
    values : numpy.ndarray
        Grid values, grid axes first.
    h : float
        Step size.
    axis : int
        ``0`` for ``x``, ``1`` for ``y``.
    accuracy : int, optional
        ``2`` or ``4``.
    """
    values = np.asarray(values, dtype=np.complex128)
    out = np.full(values.shape, np.nan, dtype=np.complex128)
    n = values.shape[axis]

    def part(start, stop):
        return np.take(values, np.arange(start, stop), axis=axis)

    if accuracy == 2:
        if n < 3:
            return out
        inner = (part(2, n) - part(0, n - 2)) / (2 * h)
        index = np.arange(1, n - 1)
    elif accuracy == 4:
        if n < 5:
            return out
        inner = (-part(4, n) + 8 * part(3, n - 1) - 8 * part(1, n - 3) + part(0, n - 4)) / (12 * h)
        index = np.arange(2, n - 2)
    else:
        raise DomainError(f"Unsupported stencil accuracy {accuracy}")
    slicer = [slice(None)] * values.ndim
    slicer[axis] = index
    out[tuple(slicer)] = inner
    return out


def d_z(values: np.ndarray, h: float, accuracy: int = 4) -> np.ndarray:
    """``d/dz = (d/dx - i d/dy) / 2`` by central differences."""
    return 0.5 * (
        central_difference(values, h, 0, accuracy) - 1j * central_difference(values, h, 1, accuracy)
    )


def d_zbar(values: np.ndarray, h: float, accuracy: int = 4) -> np.ndarray:
    """``d/dzbar = (d/dx + i d/dy) / 2`` by central differences."""
    return 0.5 * (
        central_difference(values, h, 0, accuracy) + 1j * central_difference(values, h, 1, accuracy)
    )


def sup_norm(values: np.ndarray) -> float:
    """Largest Euclidean norm over the grid nodes, ignoring NaN margins."""
    norms = np.sqrt((np.abs(values) ** 2).sum(axis=-1))
    if np.all(np.isnan(norms)):
        return float("nan")
    return float(np.nanmax(norms))


def unit_circle(samples: int) -> np.ndarray:
    """``samples`` equally spaced points ``exp(2 pi i n / samples)``."""
    return np.exp(2j * np.pi * np.arange(samples) / samples)


def connection_forms(grid: FieldGrid, lam: complex) -> Tuple[np.ndarray, np.ndarray]:
    """``phi_z`` and ``phi_zbar`` of the adapted connection at ``lambda`` on every node."""
    d, r = grid.d, grid.r
    xi = grid.loop()
    phi_z = lam * xi.coefficient(d) + r * xi.coefficient(d - 1)
    phi_zbar = xi.coefficient(-d) / lam + r * xi.coefficient(1 - d)
    return phi_z, phi_zbar


def mc_residual_values(
    alg: ChevalleyAlgebra, grid: FieldGrid, lam: complex, accuracy: int = 4
) -> np.ndarray:
    """``d_z phi_zbar - d_zbar phi_z + [phi_z, phi_zbar]`` on every node (NaN margins)."""
    phi_z, phi_zbar = connection_forms(grid, lam)
    return d_z(phi_zbar, grid.h, accuracy) - d_zbar(phi_z, grid.h, accuracy) + bracket(
        alg, phi_z, phi_zbar
    )


def _as_grids(grids: Union[FieldGrid, Sequence[FieldGrid]]) -> List[FieldGrid]:
    if isinstance(grids, FieldGrid):
        return [grids]
    return list(grids)


def mc_residual(
    alg: ChevalleyAlgebra,
    grids: Union[FieldGrid, Sequence[FieldGrid]],
    lams: Union[int, Sequence[complex]] = 8,
    accuracy: int = 4,
) -> ResidualReport:
    """Maurer-Cartan residual of the adapted connection over ``lambda`` samples.

    Parameters
    ----------
    alg : ChevalleyAlgebra
        Algebra.
    grids : FieldGrid or sequence of FieldGrid
        Loop grids of the same flow at different step sizes.
    lams : int or sequence of complex, optional
        Sample values of ``lambda``, or their number on the unit circle.
    accuracy : int, optional
        Accuracy of the central differences.

    Returns
    -------
    ResidualReport
        Row ``mc`` per grid; the order is fitted when two or more grids are given.
    """
    if isinstance(lams, int):
        lams = unit_circle(lams)
    report = ResidualReport()
    for grid in _as_grids(grids):
        if min(grid.shape) < 5:
            raise DomainError(f"The Maurer-Cartan residual needs 5x5 nodes, got {grid.shape}")
        worst = max(sup_norm(mc_residual_values(alg, grid, lam, accuracy)) for lam in lams)
        report.add("mc", grid.h, worst)
    report.fit_orders()
    return report


def lax_residual_values(
    alg: ChevalleyAlgebra, xi: LoopElement, phi_z: np.ndarray, h: float, lam: complex, accuracy=4
) -> np.ndarray:
    """``d_z xi(lambda) - [xi(lambda), phi_z]`` on a grid of loop elements."""
    value = xi.evaluate(lam)
    return d_z(value, h, accuracy) - bracket(alg, value, phi_z)


def conserved_drift(
    alg: ChevalleyAlgebra,
    grid: FieldGrid,
    lam: complex = 1.0,
    powers: Sequence[int] = (1, 2),
) -> ResidualReport:
    """Drift of the conserved quantities relative to the origin.

    Rows: ``killing_sum`` for ``sum_j kappa(xi_j, xi_-j)`` and ``trace_ad_2p`` for
    ``trace((ad xi(lambda))^(2p))``. ``sup_residual`` is the largest absolute change and
    ``drift`` the same change relative to the origin value.
    """
    report = ResidualReport()
    xi = grid.loop()
    coeffs = xi.coeffs
    killing_sum = killing_form(alg, coeffs, coeffs[..., ::-1, :]).sum(axis=-1)
    _drift_row(report, "killing_sum", grid.h, killing_sum)
    ad = adjoint_matrix(alg, xi.evaluate(lam))
    for p in powers:
        traces = np.trace(np.linalg.matrix_power(ad, 2 * p), axis1=-2, axis2=-1)
        _drift_row(report, f"trace_ad_{2 * p}", grid.h, traces)
    return report


def _drift_row(report: ResidualReport, name: str, h: float, values: np.ndarray) -> None:
    origin = values[0, 0]
    change = float(np.abs(values - origin).max())
    report.add(name, h, change, drift=change / max(abs(origin), np.finfo(float).tiny))


@dataclass
class AdaptedReport:
    """Outcome of :func:`adapted_check`."""

    adapted: bool
    max_deviation: float
    cyclic: bool
    noncyclic_nodes: int


def adapted_check(
    sigma: CoxeterAutomorphism, grid: FieldGrid, tolerance: float = 1e-12
) -> AdaptedReport:
    """Compare the stored connection with ``lambda xi_d + r xi_{d-1}`` at every node.

    Grids without a stored connection are adapted by definition. Nodes where ``xi_d`` fails to
    be cyclic are counted.
    """
    expected = connection_coefficient(grid.loop(), grid.r).coeffs
    stored = expected if grid.connection is None else grid.connection
    scale = max(float(np.abs(expected).max(initial=0.0)), 1.0)
    deviation = float(np.abs(stored - expected).max(initial=0.0))
    top = grid.coefficient(grid.d).reshape(-1, sigma.alg.dim)
    cyclic_tolerance = get_setting("cyclic_tolerance")
    noncyclic = sum(not is_cyclic(sigma, x, cyclic_tolerance) for x in top)
    if noncyclic:
        LOG.warning(f"{noncyclic} grid nodes have a non-cyclic top coefficient")
    return AdaptedReport(deviation <= tolerance * scale, deviation, noncyclic == 0, noncyclic)
