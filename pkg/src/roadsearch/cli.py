"""Command-line entry point.

    roadsearch run    --config cfg.json --variant B --seed 7 \
                      --budget-evals 300 --out results/ [--runs 5] [--novelty]
    roadsearch replay --archive results/run01.json --test 42
    roadsearch render --archive results/run01.json --out svgs/

``--sut "<command>"`` swaps the built-in simulator for an external
system under test spoken to over the line protocol. The environment
variable ``ROADSEARCH_LOG`` (DEBUG/INFO/WARNING/...) controls verbosity.
Exit code 0 on success, 1 on configuration, protocol or replay errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config, parse_config_dict
from .geometry import ControlPointSet
from .protocol import SutDescriptor, external_evaluate
from .report import (
    ReplayDivergence,
    load_archive,
    render_test_svg,
    replay,
    summary_row,
    write_report,
    write_summary_csv,
    _archive_params,
)
from .road import build_road, validate
from .search import Individual, builtin_evaluator, run_search
from .simulator import DT, INVALID, MAX_TIME, run_test

log = logging.getLogger("roadsearch")


def _setup_logging():
    level = os.environ.get("ROADSEARCH_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roadsearch", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more seeded searches")
    run.add_argument("--config", help="JSON config file (defaults apply if omitted)")
    run.add_argument("--variant", choices=("A", "B", "C"))
    run.add_argument("--seed", type=int)
    budget = run.add_mutually_exclusive_group()
    budget.add_argument("--budget-evals", type=int, metavar="N")
    budget.add_argument("--budget-seconds", type=float, metavar="S")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--sut", metavar="COMMAND", help="external SUT command")
    run.add_argument("--runs", type=int, default=1, metavar="N",
                     help="independent seeded runs (seed, seed+1, ...)")
    run.add_argument("--novelty", action="store_true",
                     help="enable the Frechet-distance novelty filter")

    rep = sub.add_parser("replay", help="re-run one archived test")
    rep.add_argument("--archive", required=True)
    rep.add_argument("--test", type=int, required=True)
    rep.add_argument("--sut", metavar="COMMAND",
                     help="SUT command for external-SUT archives")

    ren = sub.add_parser("render", help="render SVGs for archived failures")
    ren.add_argument("--archive", required=True)
    ren.add_argument("--out", required=True)
    return parser


def _external_evaluator(road_params, sut: SutDescriptor):
    def _eval(ind: Individual) -> Individual:
        road = build_road(ind.genotype, road_params)
        ind.centerline = road.centerline
        if not validate(road).valid:
            ind.verdict, ind.fitness = INVALID, 0.0
            return ind
        result = external_evaluate(road, sut)
        ind.verdict, ind.fitness, ind.error = result.verdict, result.max_oob, result.error
        return ind
    return _eval


def _cmd_run(args) -> int:
    if args.config:
        search_cfg, road_params, vparams, sut = parse_config(args.config)
    else:
        search_cfg, road_params, vparams, sut = parse_config_dict({})

    overrides = {}
    if args.variant:
        overrides["variant"] = args.variant
        if args.variant != search_cfg.variant and "population_size" not in overrides:
            overrides["population_size"] = None  # re-resolve the variant default
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.budget_evals is not None:
        overrides.update(max_evaluations=args.budget_evals, wall_time=None)
    if args.budget_seconds is not None:
        overrides.update(max_evaluations=None, wall_time=args.budget_seconds)
    if args.novelty:
        overrides["novelty_filter"] = True
    if overrides:
        base = dataclasses.asdict(search_cfg)
        base.update(overrides)
        search_cfg = type(search_cfg)(**base)
    if args.sut:
        sut = SutDescriptor(kind="external", command=args.sut, timeout=sut.timeout)

    if sut.kind == "external":
        evaluator_for = lambda: _external_evaluator(road_params, sut)
    else:
        evaluator_for = lambda: builtin_evaluator(road_params, vparams)
    validity = lambda cps: validate(build_road(cps, road_params)).valid
    phenotype = lambda cps: build_road(cps, road_params).centerline

    rows = []
    out = Path(args.out)
    for i in range(args.runs):
        cfg = dataclasses.replace(search_cfg, seed=search_cfg.seed + i)
        log.info("run %d/%d: variant %s seed %d", i + 1, args.runs,
                 cfg.variant, cfg.seed)
        report = run_search(cfg, evaluator_for(), validity=validity,
                            phenotype=phenotype,
                            reporter=lambda ev: log.debug("event %s", ev))
        write_report(report, out, road_params=road_params, vparams=vparams,
                     sut=sut, run_id=i + 1)
        row = summary_row(report, run_id=i + 1)
        rows.append(row)
        log.info("run %d: T=%s P=%s I=%s F=%s", i + 1, row["T"], row["P"],
                 row["I"], row["F"])
    write_summary_csv(rows, out / "summary.csv")
    print(f"{args.runs} run(s) complete; summary at {out / 'summary.csv'}")
    return 0


def _cmd_replay(args) -> int:
    result = replay(args.archive, args.test, sut_command=args.sut)
    print(f"test {args.test}: verdict {result.verdict}, "
          f"max_oob {result.max_oob:.3f} (matches archive)")
    return 0


def _cmd_render(args) -> int:
    archive = load_archive(args.archive)
    road_params, vparams, sut = _archive_params(archive)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for rec in archive["records"]:
        if rec["verdict"] != "FAIL":
            continue
        cps = ControlPointSet(np.asarray(rec["genotype"], dtype=float),
                              road_params.map_size)
        road = build_road(cps, road_params)
        result = None
        if sut.kind == "builtin":
            result = run_test(road, vparams, dt=archive.get("dt", DT),
                              max_time=archive.get("max_time", MAX_TIME))
        render_test_svg(road, result, out / f"fail_{rec['id']:04d}.svg",
                        title=f"test {rec['id']}: fitness {rec['fitness']:.1f}")
        count += 1
    print(f"rendered {count} failing test(s) to {out}")
    return 0


def main(argv=None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "replay":
            return _cmd_replay(args)
        return _cmd_render(args)
    except (ConfigError, ReplayDivergence, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
