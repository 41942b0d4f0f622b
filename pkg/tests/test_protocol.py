import io
import json
import sys

import numpy as np
import pytest

from roadsearch.protocol import (
    ERR_PROTOCOL,
    ERR_SPAWN,
    ERR_TIMEOUT,
    SutDescriptor,
    external_evaluate,
    parse_reply,
    serialize_road_line,
    serve_builtin,
)
from roadsearch.road import RoadParams, build_road, road_from_dict, validate
from roadsearch.search import SearchConfig, random_individual
from roadsearch.simulator import INVALID, VehicleParams, run_test

PY = sys.executable


def valid_road(seed=3):
    rng = np.random.default_rng(seed)
    rp = RoadParams()
    cfg = SearchConfig(seed=0)
    while True:
        ind = random_individual(rng, cfg)
        road = build_road(ind.genotype, rp)
        if validate(road).valid:
            return road


class TestSutDescriptor:
    def test_external_requires_command(self):
        with pytest.raises(ValueError):
            SutDescriptor(kind="external")

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            SutDescriptor(kind="remote")

    def test_builtin_default(self):
        assert SutDescriptor().kind == "builtin"


class TestReplyParsing:
    def test_good_reply(self):
        r = parse_reply('{"verdict": "PASS", "max_oob": 1.25, "completed": true}')
        assert r.verdict == "PASS" and r.max_oob == 1.25 and r.completed

    def test_reply_with_trajectory(self):
        r = parse_reply('{"verdict": "FAIL", "max_oob": 97.0, '
                        '"trajectory": [[0, 0], [1, 2]]}')
        assert len(r.trajectory) == 2
        assert np.allclose(r.trajectory[1].position, [1, 2])

    @pytest.mark.parametrize("line", [
        '{"verdict": "MAYBE", "max_oob": 0}',
        '{"verdict": "PASS", "max_oob": 150}',
        '{"verdict": "PASS", "max_oob": "high"}',
        '{"verdict": "PASS"}',
        '[1, 2, 3]',
        'not json at all',
    ])
    def test_malformed_rejected(self, line):
        with pytest.raises((ValueError, TypeError)):
            parse_reply(line)


class TestServeBuiltin:
    def test_round_trip_lines(self):
        road = valid_road()
        request = serialize_road_line(road)
        stdin = io.StringIO(request + "\n" + request + "\n")
        stdout = io.StringIO()
        serve_builtin(stdin, stdout, VehicleParams(speed=25.0), max_time=45.0)
        lines = [ln for ln in stdout.getvalue().splitlines() if ln]
        assert len(lines) == 2
        direct = run_test(road, VehicleParams(speed=25.0), max_time=45.0)
        for line in lines:
            reply = json.loads(line)
            assert reply["verdict"] == direct.verdict
            assert reply["max_oob"] == direct.max_oob

    def test_garbage_line_answered_invalid(self):
        stdin = io.StringIO("this is not a road\n")
        stdout = io.StringIO()
        serve_builtin(stdin, stdout)
        reply = json.loads(stdout.getvalue().splitlines()[0])
        assert reply["verdict"] == INVALID

    def test_road_serialization_round_trip(self):
        road = valid_road()
        again = road_from_dict(json.loads(serialize_road_line(road)))
        assert np.array_equal(again.centerline, road.centerline)
        assert again.params == road.params


class TestExternalEvaluate:
    def test_differential_against_in_process(self):
        road = valid_road()
        sut = SutDescriptor(kind="external",
                            command=f"{PY} -m roadsearch.protocol --speed 25 --max-time 45",
                            timeout=120.0)
        ext = external_evaluate(road, sut)
        ref = run_test(road, VehicleParams(speed=25.0), max_time=45.0)
        assert ext.verdict == ref.verdict
        assert abs(ext.max_oob - ref.max_oob) <= 1e-9

    def test_garbage_reply_flagged(self):
        road = valid_road()
        sut = SutDescriptor(kind="external", command=f"{PY} -c 'print(42)'",
                            timeout=60.0)
        r = external_evaluate(road, sut)
        assert r.verdict == INVALID and r.error == ERR_PROTOCOL

    def test_timeout_flagged(self):
        road = valid_road()
        sut = SutDescriptor(kind="external",
                            command=f"{PY} -c 'import time; time.sleep(60)'",
                            timeout=1.0)
        r = external_evaluate(road, sut)
        assert r.verdict == INVALID and r.error == ERR_TIMEOUT

    def test_spawn_failure_flagged(self):
        road = valid_road()
        sut = SutDescriptor(kind="external", command="no-such-binary-zq9",
                            timeout=5.0)
        r = external_evaluate(road, sut)
        assert r.verdict == INVALID and r.error == ERR_SPAWN

    def test_builtin_descriptor_rejected(self):
        with pytest.raises(ValueError):
            external_evaluate(valid_road(), SutDescriptor())


class TestRunLevelEquivalence:
    def test_whole_run_identical_through_protocol(self):
        # a search driven through the wrapped built-in SUT must reproduce
        # the direct in-process run record for record
        from roadsearch.cli import _external_evaluator
        from roadsearch.search import SearchConfig, builtin_evaluator, run_search

        rp = RoadParams()
        vp = VehicleParams(speed=25.0)
        cfg = SearchConfig(variant="B", max_evaluations=12, seed=4)
        direct = run_search(cfg, builtin_evaluator(rp, vp, max_time=45.0))

        sut = SutDescriptor(
            kind="external",
            command=f"{PY} -m roadsearch.protocol --speed 25 --max-time 45",
            timeout=120.0)
        wrapped = run_search(cfg, _external_evaluator(rp, sut))

        assert [e["kind"] for e in direct.events] == \
               [e["kind"] for e in wrapped.events]
        assert [(r.verdict, r.fitness) for r in direct.records] == \
               [(r.verdict, r.fitness) for r in wrapped.records]
        assert direct.aggregates == wrapped.aggregates
