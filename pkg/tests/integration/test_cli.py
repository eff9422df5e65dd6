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


import csv
import json

from click.testing import CliRunner
import pytest

from ansys.tools.toda.cli import cli
from ansys.tools.toda.gridio import read_grid


@pytest.fixture
def runner():
    return CliRunner()


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


@pytest.fixture
def flow_spec(tmp_path):
    path = tmp_path / "spec.json"
    spec = {"type": "A", "rank": 2, "d": 4, "seed": 0, "Lx": 0.1, "Ly": 0.1, "h": 0.02}
    path.write_text(json.dumps(spec))
    return path


def test_algebra_info(runner):
    result = runner.invoke(cli, ["algebra", "info", "--type", "A", "--rank", "2"])
    assert result.exit_code == 0, result.output
    assert "A2: 6 roots (3 positive)" in result.output
    assert "Coxeter number: 3" in result.output


def test_algebra_info_json(runner):
    result = runner.invoke(cli, ["algebra", "info", "--type", "g", "--rank", "2", "--json"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert data["series"] == "G"
    assert data["coxeter_number"] == 6
    assert data["marks"] == [3, 2]
    assert len(data["roots"]) == 12


def test_invalid_type_is_usage_error(runner):
    result = runner.invoke(cli, ["algebra", "info", "--type", "B", "--rank", "1"])
    assert result.exit_code == 1
    assert "not a simple type" in result.output


def test_algebra_constants_csv(runner, tmp_path):
    path = tmp_path / "constants.csv"
    args = ["algebra", "constants", "--type", "A", "--rank", "2", "--csv", str(path)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    rows = read_csv(path)
    assert rows
    assert set(rows[0]) == {"alpha", "beta", "c"}
    assert {abs(int(row["c"])) for row in rows} == {1}


def test_involutions(runner):
    result = runner.invoke(cli, ["involutions", "--type", "A", "--rank", "2", "--json"])
    assert result.exit_code == 0, result.output
    entries = json.loads(result.output)
    assert len(entries) == 4
    assert entries[0]["perm"] == [0, 1, 2]
    assert all(entry["conditions"]["consistent"] for entry in entries)


@pytest.mark.slow
def test_involutions_e8(runner):
    result = runner.invoke(cli, ["involutions", "--type", "E", "--rank", "8"])
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert len(lines) == 1
    assert "certificate=fixed-node" in lines[0]


def test_grading(runner):
    result = runner.invoke(cli, ["grading", "--type", "A", "--rank", "2"])
    assert result.exit_code == 0, result.output
    assert result.output.splitlines() == ["g_0: 2", "g_1: 3", "g_2: 3"]


def test_flow_run(runner, tmp_path, flow_spec):
    out, report = tmp_path / "xi.grid", tmp_path / "flow.csv"
    args = ["flow", "run", "--spec", str(flow_spec), "--out", str(out), "--report", str(report)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    grid = read_grid(out)
    assert grid.values.shape == (6, 6, 9, 8)
    names = [row["name"] for row in read_csv(report)]
    assert names == ["mc", "killing_sum", "trace_ad_2", "trace_ad_4"]


def test_flow_run_blowup(runner, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"type": "A", "rank": 1, "d": 3, "blowup_bound": 1e-9}))
    out = tmp_path / "xi.grid"
    result = runner.invoke(cli, ["flow", "run", "--spec", str(spec), "--out", str(out)])
    assert result.exit_code == 3
    assert "Blow-up" in result.output
    assert read_grid(out).shape == (1, 1)


def test_flow_run_bad_degree(runner, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"type": "A", "rank": 2, "d": 3}))
    out = tmp_path / "xi.grid"
    result = runner.invoke(cli, ["flow", "run", "--spec", str(spec), "--out", str(out)])
    assert result.exit_code == 1
    assert "congruent" in result.output


def test_toda_pipeline(runner, tmp_path, flow_spec):
    xi, omega, w = tmp_path / "xi.grid", tmp_path / "omega.grid", tmp_path / "w.json"
    runner.invoke(cli, ["flow", "run", "--spec", str(flow_spec), "--out", str(xi)])
    args = ["toda", "reconstruct", "--grid", str(xi), "--out", str(omega), "--w-out", str(w)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert "loop defect" in result.output
    data = json.loads(w.read_text())
    assert (data["type"], data["rank"], data["conjugation"]) == ("A", 2, 0)
    assert len(data["r"]) == 3
    assert read_grid(omega).kind == "cartan"

    report = tmp_path / "toda.csv"
    args = ["toda", "check", "--omega", str(omega), "--W", str(w), "--report", str(report)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    rows = {row["name"]: float(row["sup_residual"]) for row in read_csv(report)}
    assert set(rows) == {
        "toda",
        "bracket_vs_dual",
        "bracket_root_part",
        "frame_mc",
        "frame_vs_toda",
    }
    assert rows["bracket_vs_dual"] < 1e-10

    # 6x6 nodes: Omega_z and one level at accuracy 2 leave the centre rings
    args = ["toda", "recursion", "--omega", str(omega), "--W", str(w), "--order", "1"]
    result = runner.invoke(cli, args + ["--accuracy", "2"])
    assert result.exit_code == 0, result.output
    assert "top_coefficient" in result.output
    result = runner.invoke(cli, args + ["--order", "2"])
    assert result.exit_code == 1
    assert "needs at least 13x13 nodes" in result.output


def test_certify_without_flows(runner, tmp_path):
    report = tmp_path / "checks.csv"
    args = ["certify", "all", "--type", "A", "--rank", "1", "--no-flows", "--report", str(report)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[-1] == "pass"
    assert all(row["passed"] == "True" for row in read_csv(report))


@pytest.mark.slow
def test_certify_with_flows(runner, tmp_path):
    plot = tmp_path / "residuals.svg"
    args = ["certify", "all", "--type", "A", "--rank", "2", "--seed", "1", "--plot", str(plot)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert plot.exists()


def test_config_commands(runner, fs, monkeypatch):
    monkeypatch.delenv("ANSYS_TOOLS_TODA_THREADS", raising=False)
    result = runner.invoke(cli, ["config", "set", "num_threads", "4"])
    assert result.exit_code == 0, result.output
    result = runner.invoke(cli, ["config", "show"])
    assert json.loads(result.output)["num_threads"] == 4
    assert runner.invoke(cli, ["config", "set", "num_threads", "four"]).exit_code == 1
    assert runner.invoke(cli, ["config", "set", "rank_tolerance", "-1"]).exit_code == 1
    assert runner.invoke(cli, ["config", "set", "unknown", "1"]).exit_code == 1
    assert runner.invoke(cli, ["config", "clear"]).exit_code == 0
    result = runner.invoke(cli, ["config", "show"])
    assert json.loads(result.output)["num_threads"] == 1
