"""Run persistence and reporting.

Each run turns into three artifacts: a replayable JSON archive holding
every evaluated genotype with its verdict, a CSV summary row with the
T/P/I/F counts and the Frechet-distance aggregates over the failing
tests, and one SVG per failing test showing the road and the driven
trajectory colored by out-of-bounds percentage.

``replay`` rebuilds a road from an archived genotype and re-runs the
built-in simulator, raising :class:`ReplayDivergence` if the stored
verdict no longer reproduces (nondeterminism or version skew).
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import ControlPointSet
from .road import RoadParams, RoadSpec, build_road, validate
from .search import RunReport
from .simulator import (
    DT,
    FAIL,
    MAX_TIME,
    TestResult,
    VehicleParams,
    invalid_result,
    run_test,
)
from .protocol import SutDescriptor, external_evaluate
from .config import serialize_config

__all__ = [
    "ReplayDivergence",
    "archive_to_dict",
    "write_report",
    "write_summary_csv",
    "summary_row",
    "load_archive",
    "replay",
    "render_test_svg",
]

SUMMARY_COLUMNS = ["Run", "T", "P", "I", "F", "AvgFrechet", "MaxFrechet"]


class ReplayDivergence(RuntimeError):
    """Stored and freshly computed results disagree."""

    def __init__(self, test_id, stored, fresh):
        super().__init__(
            f"replay divergence on test {test_id}: "
            f"stored verdict={stored[0]} max_oob={stored[1]:.6f}, "
            f"fresh verdict={fresh[0]} max_oob={fresh[1]:.6f}"
        )
        self.test_id = test_id
        self.stored = stored
        self.fresh = fresh


def archive_to_dict(report: RunReport, road_params: RoadParams,
                    vparams: VehicleParams, sut: SutDescriptor,
                    dt: float = DT, max_time: float = MAX_TIME) -> dict:
    cfg = serialize_config(report.config, road_params, vparams, sut)
    return {
        "version": __version__,
        "config": cfg,
        "dt": dt,
        "max_time": max_time,
        "parallel": report.parallel,
        "records": [
            {
                "id": r.id,
                "genotype": r.genotype.points.tolist(),
                "verdict": r.verdict,
                "fitness": r.fitness,
                "eval_time": r.eval_time,
                "error": r.error,
            }
            for r in report.records
        ],
        "events": report.events,
        "aggregates": report.aggregates,
    }


def _fmt_frechet(value) -> str:
    return "n/a" if value is None else f"{value:.3f}"


def summary_row(report: RunReport, run_id=1) -> dict:
    agg = report.aggregates
    return {
        "Run": run_id,
        "T": agg["T"],
        "P": agg["P"],
        "I": agg["I"],
        "F": agg["F"],
        "AvgFrechet": _fmt_frechet(agg["avg_frechet_failures"]),
        "MaxFrechet": _fmt_frechet(agg["max_frechet_failures"]),
    }


def write_summary_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def write_report(report: RunReport, out_dir, *, road_params: RoadParams,
                 vparams: VehicleParams, sut: SutDescriptor,
                 dt: float = DT, max_time: float = MAX_TIME, run_id=1) -> dict:
    """Emit archive + summary + failure SVGs for one run.

    Returns a dict of the written paths. Trajectories in the SVGs are
    re-simulated with the built-in SUT; for external-SUT archives only
    the road geometry is drawn.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    archive = archive_to_dict(report, road_params, vparams, sut, dt, max_time)
    archive_path = out / f"run{run_id:02d}.json"
    with open(archive_path, "w", encoding="utf-8") as fh:
        json.dump(archive, fh)
    paths["archive"] = archive_path

    summary_path = out / f"run{run_id:02d}_summary.csv"
    write_summary_csv([summary_row(report, run_id)], summary_path)
    paths["summary"] = summary_path

    svg_paths = []
    for rec in report.records:
        if rec.verdict != FAIL:
            continue
        road = build_road(rec.genotype, road_params)
        result = None
        if sut.kind == "builtin":
            result = run_test(road, vparams, dt=dt, max_time=max_time)
        svg_path = out / f"run{run_id:02d}_fail_{rec.id:04d}.svg"
        render_test_svg(road, result, svg_path,
                        title=f"test {rec.id}: fitness {rec.fitness:.1f}")
        svg_paths.append(svg_path)
    paths["svgs"] = svg_paths
    return paths


def load_archive(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    for key in ("config", "records", "events", "aggregates"):
        if key not in data:
            raise ValueError(f"archive missing {key!r}")
    return data


def _archive_params(archive: dict):
    cfg = archive["config"]
    road_params = RoadParams(**cfg["road"])
    vparams = VehicleParams(**cfg["vehicle"])
    sut = SutDescriptor(**cfg["sut"])
    return road_params, vparams, sut


def replay(archive, test_id: int, sut_command: str | None = None) -> TestResult:
    """Re-run one archived test and check the stored verdict still holds.

    Archives recorded against an external SUT are only replayed when the
    identical SUT command is supplied again; without it, replay refuses
    rather than silently substituting the built-in simulator.
    """
    if not isinstance(archive, dict):
        archive = load_archive(archive)
    road_params, vparams, sut = _archive_params(archive)
    record = next((r for r in archive["records"] if r["id"] == test_id), None)
    if record is None:
        raise ValueError(f"archive has no test {test_id}")

    if sut.kind == "external":
        if sut_command is None:
            raise ValueError(
                "archive was recorded against an external SUT; "
                f"pass its command ({sut.command!r}) to replay")
        if sut_command != sut.command:
            raise ValueError(
                f"SUT command mismatch: archive used {sut.command!r}")

    cps = ControlPointSet(np.asarray(record["genotype"], dtype=float),
                          road_params.map_size)
    road = build_road(cps, road_params)
    report = validate(road)
    if not report.valid:
        result = invalid_result()
    elif sut.kind == "external":
        result = external_evaluate(road, sut)
    else:
        result = run_test(road, vparams, dt=archive.get("dt", DT),
                          max_time=archive.get("max_time", MAX_TIME))

    stored = (record["verdict"], float(record["fitness"]))
    fresh = (result.verdict, result.max_oob)
    if stored[0] != fresh[0] or abs(stored[1] - fresh[1]) > 1e-9:
        raise ReplayDivergence(test_id, stored, fresh)
    return result


def _oob_color(oob: float) -> str:
    # green -> red as the vehicle leaves its lane
    f = min(max(oob / 100.0, 0.0), 1.0)
    r = int(40 + 215 * f)
    g = int(170 * (1.0 - f) + 30)
    return f"#{r:02x}{g:02x}28"


def render_test_svg(road: RoadSpec, result: TestResult | None, path,
                    title: str = "") -> None:
    """Draw road boundaries, centerline and (if given) the trajectory,
    1 px per meter, colored by instantaneous out-of-bounds percentage."""
    size = road.params.map_size

    def pts(poly):
        return " ".join(f"{x:.2f},{size - y:.2f}" for x, y in poly)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" '
        f'height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}">',
        f'<rect width="{size:.0f}" height="{size:.0f}" fill="#f8f8f4"/>',
        f'<polyline points="{pts(road.left_boundary)}" fill="none" '
        'stroke="#444444" stroke-width="0.8"/>',
        f'<polyline points="{pts(road.right_boundary)}" fill="none" '
        'stroke="#444444" stroke-width="0.8"/>',
        f'<polyline points="{pts(road.centerline)}" fill="none" '
        'stroke="#999999" stroke-width="0.5" stroke-dasharray="3,3"/>',
    ]
    if result is not None and len(result.trajectory) > 1:
        states = result.trajectory
        oobs = [s.oob_percent for s in result.oob_trace]
        for i in range(1, len(states)):
            x0, y0 = states[i - 1].position
            x1, y1 = states[i].position
            color = _oob_color(oobs[i] if i < len(oobs) else 0.0)
            lines.append(
                f'<line x1="{x0:.2f}" y1="{size - y0:.2f}" x2="{x1:.2f}" '
                f'y2="{size - y1:.2f}" stroke="{color}" stroke-width="1.4"/>'
            )
    if title:
        lines.append(f'<text x="4" y="12" font-size="8" fill="#222222">{title}</text>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines), encoding="utf-8")
