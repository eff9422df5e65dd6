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


"""Run every property check on one algebra and collect pass/fail rows."""

import csv
from dataclasses import asdict, dataclass, field
import logging
import os
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ansys.tools.toda.chevalley import (
    ChevalleyAlgebra,
    build_chevalley_basis,
    verify_jacobi,
    verify_structure_constants,
)
from ansys.tools.toda.config import get_setting
from ansys.tools.toda.coxeter import CoxeterAutomorphism, coxeter, random_loop_element
from ansys.tools.toda.involution import (
    AntilinearConjugation,
    certify_coxeter_compatibility,
    enumerate_lifts,
    real_form_conjugation,
    weyl_reflection_automorphism,
)
from ansys.tools.toda.laxflow import (
    FieldGrid,
    FlowSpec,
    adapted_check,
    commutation_defect,
    conserved_drift,
    integrate_flow,
    mc_residual,
)
from ansys.tools.toda.report import ResidualReport, convergence_order
from ansys.tools.toda.rootsystem import build_root_system
from ansys.tools.toda.toda import (
    TodaField,
    cyclic_data_from_grid,
    formal_killing_recursion,
    frame_coefficients,
    normalization_check,
    reconstruct_omega,
    toda_bracket_form,
    toda_residual,
    w_constancy,
)

LOG = logging.getLogger(__name__)

# adjoint matrices of larger algebras make the series products of the recursion too slow
RECURSION_DIM_LIMIT = 30
RECURSION_ACCURACY = 4

# acceptance thresholds of the flow stage
MC_MIN_ORDER = 3.5
TODA_MIN_ORDER = 1.8
LOOP_MIN_ORDER = 1.8
LAX_MIN_ORDER = 1.8
LAX_FLOOR = 1e-10
LAX_TO_MC = 10.0
# RK4: halving the step divides the commutation defect by about 16
COMMUTATION_RATIO = (12.0, 20.0)
KILLING_DRIFT = 1e-10
W_CONSTANCY = 1e-8
NORMALIZATION = 1e-8

CHECK_COLUMNS = ["name", "passed", "value", "threshold"]


@dataclass
class Check:
    """One pass/fail row. ``value`` is compared against ``threshold`` when both are set."""

    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None


@dataclass
class CertificationSummary:
    """Checks of :func:`certify_all` and the residual rows behind them."""

    checks: List[Check] = field(default_factory=list)
    report: ResidualReport = field(default_factory=ResidualReport)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def check(self, name: str, passed: bool, value=None, threshold=None) -> Check:
        entry = Check(name, bool(passed), None if value is None else float(value), threshold)
        self.checks.append(entry)
        LOG.info(f"{name}: {'pass' if entry.passed else 'FAIL'}")
        return entry

    def bound(self, name: str, value: float, threshold: float) -> Check:
        return self.check(name, value <= threshold, value, threshold)

    def to_dicts(self) -> List[dict]:
        return [asdict(check) for check in self.checks]

    def to_csv(self, path: Union[str, os.PathLike]) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CHECK_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for check in self.checks:
                row = asdict(check)
                writer.writerow({k: "" if row[k] is None else row[k] for k in CHECK_COLUMNS})


def _converges(
    summary: CertificationSummary,
    name: str,
    h: Sequence[float],
    residuals: Sequence[float],
    min_order: float,
    floor: float = 1e-10,
) -> Check:
    """Pass when the finest residual is at round-off level or the fitted order is high enough."""
    order = convergence_order(h, residuals)
    finest = residuals[int(np.argmin(h))]
    passed = finest <= floor or (order is not None and order >= min_order)
    return summary.check(name, passed, order if order is not None else finest, min_order)


def certify_algebra(summary: CertificationSummary, alg: ChevalleyAlgebra) -> None:
    rs = alg.rs
    summary.check("marks_sum_to_coxeter_number", sum(rs.extended_marks) == rs.coxeter_number)
    summary.check("root_count", len(rs.roots) == alg.dim - alg.rank, len(rs.roots))
    jacobi = verify_jacobi(
        alg,
        samples=get_setting("sampled_triples"),
        seed=get_setting("seed"),
        exhaustive_dim=get_setting("exhaustive_jacobi_dim"),
    )
    summary.check("jacobi_identity", jacobi.passed, len(jacobi.violations), 0)
    violations = verify_structure_constants(alg)
    summary.check("structure_constants", not violations, len(violations), 0)


def certify_involutions(
    summary: CertificationSummary, alg: ChevalleyAlgebra, sigma: CoxeterAutomorphism
) -> AntilinearConjugation:
    """Lift every diagram involution and check the Coxeter compatibility conditions.

    Returns the conjugation of the compact real form (identity involution).
    """
    lifts = enumerate_lifts(alg)
    compact = None
    for number, theta in enumerate(lifts):
        conj = real_form_conjugation(theta)
        if compact is None:
            compact = conj
        report = certify_coxeter_compatibility(alg, theta, sigma, conj)
        summary.check(f"real_form_{number}_compatible", all(report.as_tuple()))
        summary.check(f"real_form_{number}_involutive", conj.is_involutive(1e-12))
    weyl = weyl_reflection_automorphism(alg, 0)
    control = AntilinearConjugation(alg, weyl @ compact.matrix)
    report = certify_coxeter_compatibility(alg, weyl, sigma, control)
    # for k = 2 the reflection swaps alpha_0 and alpha_1 and is a diagram automorphism
    rejected = sigma.k == 2 or not any(report.as_tuple())
    summary.check("reflection_control_rejected", report.consistent and rejected)
    return compact


def certify_grading(summary: CertificationSummary, sigma: CoxeterAutomorphism) -> None:
    summary.check("coxeter_automorphism", sigma.is_automorphism())
    summary.bound("coxeter_order", sigma.order_defect(), 1e-12)


def certify_flows(
    summary: CertificationSummary,
    alg: ChevalleyAlgebra,
    sigma: CoxeterAutomorphism,
    conj: AntilinearConjugation,
    h: float,
    length: float,
    seed: int,
    order: int,
    threads: Optional[int],
) -> None:
    """Flows of degree ``k + 1`` at ``h`` and ``h / 2``, their Toda fields and recursion."""
    d = sigma.k + 1
    rng = np.random.default_rng(seed)
    xi0 = random_loop_element(alg, sigma, conj, d, rng, scale=0.5)
    spec = FlowSpec(alg, sigma, conj, xi0, lx=length, ly=length, h=h, threads=threads)
    steps = [h, h / 2]
    grids = [integrate_flow(spec.with_step(step)) for step in steps]
    if any(grid.blowup is not None for grid in grids):
        summary.check("flow_bounded", False)
        return

    mc = mc_residual(alg, grids)
    summary.report.extend(mc)
    mc_values = [row.sup_residual for row in mc.series("mc")]
    _converges(summary, "maurer_cartan_order", steps, mc_values, MC_MIN_ORDER)
    corner = (length, length)
    defects = [commutation_defect(spec.with_step(step), corner) for step in steps]
    certify_halving(summary, "flows_commute", defects, COMMUTATION_RATIO)
    drift = conserved_drift(alg, grids[-1])
    summary.report.extend(drift)
    summary.bound("killing_sum_drift", drift.series("killing_sum")[-1].drift, KILLING_DRIFT)
    adapted = adapted_check(sigma, grids[-1])
    summary.check("adapted", adapted.adapted and adapted.cyclic)

    fields = [reconstruct_omega(alg, conj, grid) for grid in grids]
    loops = [omega.loop_defect for omega in fields]
    _converges(summary, "loop_defect_order", steps, loops, LOOP_MIN_ORDER, floor=1e-12)
    data = cyclic_data_from_grid(alg, conj, grids[-1])
    summary.bound("omega_reality_defect", fields[-1].reality_defect, 1e-8)
    constancy = w_constancy(alg, fields[-1], grids[-1])
    summary.report.extend(constancy)
    summary.bound("w_constancy", constancy.value("w_constancy"), W_CONSTANCY)
    toda = toda_residual(data, fields)
    summary.report.extend(toda)
    toda_values = [r.sup_residual for r in toda.series("toda")]
    _converges(summary, "toda_order", steps, toda_values, TODA_MIN_ORDER)
    bracket_form = toda_bracket_form(data, fields[-1])
    summary.report.extend(bracket_form)
    scale = max(1.0, float(np.abs(data.masses).max()))
    summary.bound("bracket_form_agrees", bracket_form.value("bracket_vs_dual"), 1e-12 * scale)
    normalization = normalization_check(data, frame_coefficients(alg, grids[-1]), h / 2)
    summary.report.extend(normalization)
    spread = normalization.value("normalization_spread")
    summary.bound("normalization_constant", spread, NORMALIZATION)

    if alg.dim > RECURSION_DIM_LIMIT:
        summary.report.flag(f"Recursion skipped for dim {alg.dim} > {RECURSION_DIM_LIMIT}")
        return
    certify_recursion(
        summary, alg, sigma, conj, steps, grids, fields, mc_values[-1], order, threads
    )


def certify_halving(
    summary: CertificationSummary,
    name: str,
    defects: Sequence[float],
    window: Tuple[float, float],
    floor: float = 1e-13,
) -> Check:
    """Pass when halving the step divides the defect by a factor inside ``window``.

    A finest defect below ``floor`` is round-off and passes regardless of the ratio.
    """
    coarse, fine = defects[0], defects[-1]
    ratio = coarse / fine if fine > 0 else float("inf")
    passed = fine <= floor or window[0] <= ratio <= window[1]
    if not passed:
        LOG.warning(f"{name}: halving ratio {ratio:.3g} outside {window}")
    return summary.check(name, passed, ratio, window[0])


def certify_recursion(
    summary: CertificationSummary,
    alg: ChevalleyAlgebra,
    sigma: CoxeterAutomorphism,
    conj: AntilinearConjugation,
    steps: Sequence[float],
    grids: Sequence[FieldGrid],
    fields: Sequence[TodaField],
    mc_fine: float,
    order: int,
    threads: Optional[int],
) -> None:
    """Formal Killing field of every Toda field, compared with the flow it came from.

    Every Lax row must converge, and at the finest step the rows of degree ``>= 0`` must stay
    within :data:`LAX_TO_MC` times the Maurer-Cartan residual of the flow.
    """
    needed = 2 * order * (RECURSION_ACCURACY // 2) + 1
    if min(grids[0].shape) < needed:
        summary.report.flag(f"Recursion of order {order} needs {needed}x{needed} nodes")
        summary.check("recursion_grid", False, min(grids[0].shape), needed)
        return
    rows = {}
    for step, grid, omega in zip(steps, grids, fields):
        result = formal_killing_recursion(
            cyclic_data_from_grid(alg, conj, grid),
            omega,
            order,
            sigma,
            threads,
            accuracy=RECURSION_ACCURACY,
        )
        summary.report.extend(result.report)
        for row in result.report.rows:
            if row.name.startswith("lax_"):
                rows.setdefault(row.name, []).append(row.sup_residual)
        top = result.report.value("top_coefficient")
        summary.bound(f"recursion_top_coefficient_{step:g}", top, 1e-10)
    # rows already at round-off carry no order
    orders = [
        convergence_order(steps, values)
        for values in rows.values()
        if values[-1] > LAX_FLOOR
    ]
    slowest = min((o if o is not None else 0.0 for o in orders), default=None)
    passed = slowest is None or slowest >= LAX_MIN_ORDER
    summary.check("recursion_lax_order", passed, slowest, LAX_MIN_ORDER)

    nonnegative = [values[-1] for name, values in rows.items() if _degree(name) >= 0]
    ratio = max(nonnegative) / max(mc_fine, np.finfo(float).tiny)
    summary.bound("recursion_vs_maurer_cartan", ratio, LAX_TO_MC)


def _degree(name: str) -> int:
    return int(name.rsplit("_", 1)[1])


def certify_all(
    series: str,
    rank: int,
    h: float = 0.01,
    length: float = 0.1,
    seed: Optional[int] = None,
    order: int = 2,
    threads: Optional[int] = None,
    flows: bool = True,
) -> CertificationSummary:
    """Certify one algebra end to end.

    Parameters
    ----------
    series, rank : str, int
        Simple type.
    h : float, optional
        Coarse step size; flows are also run at ``h / 2``.
    length : float, optional
        Side of the square domain of the flows.
    seed : int, optional
        Seed of the random initial condition. Defaults to the ``seed`` setting.
    order : int, optional
        Number of recursion coefficients.
    threads : int, optional
        Worker threads.
    flows : bool, optional
        Run the flow, Toda and recursion stages.

    Returns
    -------
    CertificationSummary
        Pass/fail rows; :attr:`CertificationSummary.passed` is the verdict.
    """
    seed = get_setting("seed") if seed is None else seed
    rs = build_root_system(series, rank)
    alg = build_chevalley_basis(rs)
    summary = CertificationSummary()
    certify_algebra(summary, alg)
    sigma = coxeter(alg)
    certify_grading(summary, sigma)
    compact = certify_involutions(summary, alg, sigma)
    if flows:
        certify_flows(summary, alg, sigma, compact, h, length, seed, order, threads)
    verdict = "passed" if summary.passed else f"failed {len(summary.failures())} checks"
    LOG.info(f"Certification of {rs.series}{rs.rank} {verdict}")
    return summary
