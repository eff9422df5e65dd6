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


"""Command line interface ``ansys-toda``.

Exit codes: ``0`` success, ``1`` usage or domain error, ``2`` certification failure, ``3``
numerical blow-up.
"""

import csv
import json
import logging
import sys
from typing import Optional

import click
import numpy as np

from ansys.tools.toda.certify import certify_all
from ansys.tools.toda.chevalley import ChevalleyAlgebra, build_chevalley_basis
from ansys.tools.toda.config import DEFAULTS, clear_configuration, get_settings, save_setting
from ansys.tools.toda.coxeter import LoopElement, coxeter, graded_dimensions, random_loop_element
from ansys.tools.toda.errors import (
    BlowUpError,
    CertificationError,
    DomainError,
    TodaError,
)
from ansys.tools.toda.gridio import read_grid, write_grid
from ansys.tools.toda.involution import (
    AntilinearConjugation,
    certify_coxeter_compatibility,
    enumerate_lifts,
    real_form_conjugation,
)
from ansys.tools.toda.laxflow import FlowSpec, conserved_drift, integrate_flow, mc_residual
from ansys.tools.toda.plotting import emit_plot
from ansys.tools.toda.report import ResidualReport
from ansys.tools.toda.rootsystem import build_root_system
from ansys.tools.toda.toda import (
    CyclicData,
    TodaField,
    cyclic_data_from_grid,
    formal_killing_recursion,
    period_defect,
    reconstruct_omega,
    toda_bracket_form,
    toda_frame_form,
    toda_residual,
)

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CERTIFICATION = 2
EXIT_BLOWUP = 3


class TodaGroup(click.Group):
    """Group mapping package errors to exit codes."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = result if isinstance(result, int) else EXIT_OK
        except click.UsageError as e:
            e.show()
            code = EXIT_USAGE
        except click.ClickException as e:
            e.show()
            code = e.exit_code
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_USAGE
        except CertificationError as e:
            click.echo(f"Certification failed: {e}", err=True)
            code = EXIT_CERTIFICATION
        except BlowUpError as e:
            click.echo(f"Blow-up: {e}", err=True)
            code = EXIT_BLOWUP
        except TodaError as e:
            click.echo(f"Error: {e}", err=True)
            code = EXIT_USAGE
        if standalone_mode:
            sys.exit(code)
        return code


def _algebra(series: str, rank: int) -> ChevalleyAlgebra:
    return build_chevalley_basis(build_root_system(series, rank))


def _conjugation(alg: ChevalleyAlgebra, real_form: int) -> AntilinearConjugation:
    lifts = enumerate_lifts(alg)
    if not 0 <= real_form < len(lifts):
        raise DomainError(f"Real form {real_form} out of range: {alg!r} has {len(lifts)}")
    return real_form_conjugation(lifts[real_form])


def _dump(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _finish_report(report: ResidualReport, path: Optional[str], plot: Optional[str]) -> None:
    if path:
        report.to_csv(path)
    else:
        for row in report.rows:
            order = "" if row.order is None else f" order {row.order:.2f}"
            click.echo(f"{row.name:24s} h={row.h:<10g} {row.sup_residual:.3e}{order}")
    if plot:
        emit_plot(report, plot)
    for message in report.flags:
        click.echo(f"warning: {message}", err=True)


type_option = click.option(
    "--type", "series", required=True, help="Series letter of the simple type (A-G)."
)
rank_option = click.option("--rank", required=True, type=int, help="Rank of the simple type.")
real_form_option = click.option(
    "--real-form",
    default=0,
    show_default=True,
    type=int,
    help="Index of the real form in the list printed by 'involutions' (0 is compact).",
)


@click.group(cls=TodaGroup)
@click.option("-v", "--verbose", count=True, help="Increase log verbosity (-v info, -vv debug).")
def cli(verbose: int) -> None:
    """Chevalley algebras, Coxeter gradings, commuting Lax flows and affine Toda checks."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("ansys.tools.toda").setLevel(level)


@cli.group()
def algebra() -> None:
    """Root systems and structure constants."""


@algebra.command("info")
@type_option
@rank_option
@click.option("--json", "as_json", is_flag=True, help="Print the root system as JSON.")
def algebra_info(series: str, rank: int, as_json: bool) -> None:
    """Describe the root system of a simple type."""
    rs = build_root_system(series, rank)
    if as_json:
        _dump(rs.to_dict())
        return
    positive = sum(root.is_positive for root in rs.roots)
    click.echo(f"{rs.series}{rs.rank}: {len(rs.roots)} roots ({positive} positive)")
    click.echo(f"dimension: {rs.rank + len(rs.roots)}")
    click.echo(f"Coxeter number: {rs.coxeter_number}")
    click.echo(f"marks: {', '.join(str(m) for m in rs.extended_marks)}")
    click.echo(f"highest root: {rs.highest_root}")


@algebra.command("constants")
@type_option
@rank_option
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="Write rows to a file.")
def algebra_constants(series: str, rank: int, csv_path: Optional[str]) -> None:
    """List the structure constants ``[R_a, R_b] = c R_{a+b}`` as ``alpha,beta,c`` rows."""
    alg = _algebra(series, rank)
    rows = [
        (" ".join(map(str, x.coeffs)), " ".join(map(str, y.coeffs)), c)
        for (x, y), c in sorted(alg.constants.items())
    ]
    stream = open(csv_path, "w", newline="") if csv_path else sys.stdout
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["alpha", "beta", "c"])
        writer.writerows(rows)
    finally:
        if csv_path:
            stream.close()


@cli.command()
@type_option
@rank_option
@click.option("--json", "as_json", is_flag=True, help="Print the involutions as JSON.")
def involutions(series: str, rank: int, as_json: bool) -> None:
    """Lift the extended diagram involutions and check their compatibility with sigma."""
    alg = _algebra(series, rank)
    sigma = coxeter(alg)
    entries = []
    for number, theta in enumerate(enumerate_lifts(alg)):
        conj = real_form_conjugation(theta)
        report = certify_coxeter_compatibility(alg, theta, sigma, conj)
        entry = theta.to_dict()
        entry.update(id=number, conditions=report.to_dict())
        entries.append(entry)
    if as_json:
        _dump(entries)
        return
    for entry in entries:
        click.echo(
            f"{entry['id']}: pi={tuple(entry['perm'])} signs={tuple(entry['signs'])} "
            f"certificate={entry['certificate']['kind']} "
            f"consistent={entry['conditions']['consistent']}"
        )


@cli.command()
@type_option
@rank_option
def grading(series: str, rank: int) -> None:
    """Print ``dim g_j`` for the Coxeter grading."""
    sigma = coxeter(_algebra(series, rank))
    for j, dim in enumerate(graded_dimensions(sigma)):
        click.echo(f"g_{j}: {dim}")


@cli.group()
def flow() -> None:
    """Commuting Lax flows."""


def _load_spec(path: str, threads: Optional[int]) -> FlowSpec:
    with open(path) as f:
        data = json.load(f)
    try:
        alg = _algebra(data["type"], int(data["rank"]))
        conj = _conjugation(alg, int(data.get("real_form", 0)))
        sigma = coxeter(alg)
        d = int(data["d"])
        if "xi0" in data:
            coeffs = np.array([[complex(re, im) for re, im in row] for row in data["xi0"]])
            xi0 = LoopElement(coeffs, -d)
        else:
            rng = np.random.default_rng(int(data.get("seed", 0)))
            xi0 = random_loop_element(alg, sigma, conj, d, rng, float(data.get("scale", 0.5)))
        return FlowSpec(
            alg,
            sigma,
            conj,
            xi0,
            lx=float(data.get("Lx", 1.0)),
            ly=float(data.get("Ly", 1.0)),
            h=float(data.get("h", 0.01)),
            r=float(data.get("r", 0.5)),
            blowup_bound=data.get("blowup_bound"),
            threads=threads,
        )
    except KeyError as e:
        raise DomainError(f"Flow spec {path} misses the key {e}") from None


@flow.command("run")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Binary grid output.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="CSV report.")
@click.option("--plot", type=click.Path(dir_okay=False), help="SVG residual plot.")
@click.option("--threads", type=int, help="Worker threads (default from settings).")
def flow_run(
    spec_path: str, out: str, report_path: Optional[str], plot: Optional[str], threads
) -> None:
    """Integrate the flows described by a JSON spec and write the grid."""
    spec = _load_spec(spec_path, threads)
    grid = integrate_flow(spec)
    write_grid(grid, out)
    report = ResidualReport()
    if grid.blowup is not None:
        report.flag(f"blow-up at node {grid.blowup}, grid truncated to {grid.shape}")
        if report_path:
            report.to_csv(report_path)
        raise BlowUpError(f"flow left the norm bound at node {grid.blowup}", grid.blowup)
    report.extend(mc_residual(spec.alg, grid))
    report.extend(conserved_drift(spec.alg, grid))
    _finish_report(report, report_path, plot)


@cli.group()
def toda() -> None:
    """Affine Toda fields of flow grids."""


def _load_w(path: str) -> CyclicData:
    with open(path) as f:
        data = json.load(f)
    alg = _algebra(data["type"], int(data["rank"]))
    conj = _conjugation(alg, int(data.get("conjugation", 0)))
    return CyclicData.from_dict(alg, conj, data)


def _load_omega(path: str, data: CyclicData) -> TodaField:
    grid = read_grid(path)
    rs = data.rs
    if (grid.series, grid.rank) != (rs.series, rs.rank):
        raise DomainError(f"{path} holds a field of {grid.series}{grid.rank}, not {rs!r}")
    return TodaField.from_grid(grid)


@toda.command("reconstruct")
@click.option("--grid", "grid_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Omega grid output.")
@click.option("--w-out", type=click.Path(dir_okay=False), help="JSON output of W.")
@real_form_option
def toda_reconstruct(grid_path: str, out: str, w_out: Optional[str], real_form: int) -> None:
    """Integrate ``Omega`` from a flow grid with ``Omega(0) = 0``."""
    grid = read_grid(grid_path)
    alg = _algebra(grid.series, grid.rank)
    conj = _conjugation(alg, real_form)
    omega = reconstruct_omega(alg, conj, grid)
    write_grid(omega.to_grid(alg, grid.d), out)
    click.echo(f"loop defect {omega.loop_defect:.3e}, reality defect {omega.reality_defect:.3e}")
    if w_out:
        data = cyclic_data_from_grid(alg, conj, grid).to_dict()
        data.update(type=alg.rs.series, rank=alg.rank, conjugation=real_form)
        with open(w_out, "w") as f:
            json.dump(data, f, indent=2, sort_keys=True)


@toda.command("check")
@click.option("--omega", "omega_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--W", "w_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="CSV report.")
@click.option("--periodic", is_flag=True, help="Treat the grid rectangle as a period cell.")
def toda_check(omega_path: str, w_path: str, report_path: Optional[str], periodic: bool) -> None:
    """Residuals of the Toda equation in its dual, bracket and frame forms."""
    data = _load_w(w_path)
    omega = _load_omega(omega_path, data)
    report = toda_residual(data, omega)
    report.extend(toda_bracket_form(data, omega))
    if min(omega.shape) >= 5:
        report.extend(toda_frame_form(data, omega).report)
    if periodic:
        report.extend(period_defect(data, omega))
    _finish_report(report, report_path, None)


@toda.command("recursion")
@click.option("--omega", "omega_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--W", "w_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--order", default=2, show_default=True, type=int, help="Number of coefficients.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="CSV report.")
@click.option("--accuracy", default=4, show_default=True, type=int, help="Stencil order, 2 or 4.")
@click.option("--threads", type=int, help="Worker threads (default from settings).")
def toda_recursion(
    omega_path, w_path, order: int, report_path: Optional[str], accuracy: int, threads
) -> None:
    """Formal Killing field of a Toda field and its Lax residuals.

    Each recursion level loses boundary rings to the central differences, so the grid needs
    at least 2 (order + 1) accuracy / 2 + 1 nodes per side.
    """
    data = _load_w(w_path)
    omega = _load_omega(omega_path, data)
    result = formal_killing_recursion(data, omega, order, threads=threads, accuracy=accuracy)
    _finish_report(result.report, report_path, None)


@cli.group()
def certify() -> None:
    """End-to-end certification."""


@certify.command("all")
@type_option
@rank_option
@click.option("--h", "h", default=0.01, show_default=True, type=float, help="Coarse step size.")
@click.option("--length", default=0.1, show_default=True, type=float, help="Domain side.")
@click.option("--seed", type=int, help="Seed of the random initial condition.")
@click.option("--order", default=2, show_default=True, type=int, help="Recursion order.")
@click.option("--no-flows", is_flag=True, help="Skip the flow, Toda and recursion stages.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Pass/fail CSV.")
@click.option("--residuals", type=click.Path(dir_okay=False), help="Residual CSV.")
@click.option("--plot", type=click.Path(dir_okay=False), help="SVG residual plot.")
@click.option("--threads", type=int, help="Worker threads (default from settings).")
def certify_all_command(
    series, rank, h, length, seed, order, no_flows, report_path, residuals, plot, threads
) -> None:
    """Run every property check and report pass or fail per check."""
    summary = certify_all(
        series,
        rank,
        h=h,
        length=length,
        seed=seed,
        order=order,
        threads=threads,
        flows=not no_flows,
    )
    if report_path:
        summary.to_csv(report_path)
    if residuals:
        summary.report.to_csv(residuals)
    if plot and summary.report:
        emit_plot(summary.report, plot)
    for check in summary.checks:
        click.echo(f"{'pass' if check.passed else 'FAIL'}  {check.name}")
    if not summary.passed:
        names = ", ".join(check.name for check in summary.failures())
        raise CertificationError(f"failed checks: {names}", summary)
    click.echo("pass")


@cli.group()
def config() -> None:
    """Persistent settings."""


@config.command("show")
def config_show() -> None:
    """Print the effective settings."""
    _dump(get_settings())


@config.command("set")
@click.argument("name", type=click.Choice(sorted(DEFAULTS)))
@click.argument("value")
def config_set(name: str, value: str) -> None:
    """Save a setting, for example ``config set cyclic_tolerance 1e-10``."""
    default = DEFAULTS[name]
    try:
        parsed = type(default)(float(value)) if isinstance(default, int) else float(value)
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a number", param_hint="VALUE") from None
    save_setting(name, parsed)


@config.command("clear")
@click.argument("name", default="all")
def config_clear(name: str) -> None:
    """Remove a saved setting (or ``all``)."""
    clear_configuration(name)


def main() -> None:
    cli(prog_name="ansys-toda")
