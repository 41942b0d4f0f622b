"""Plugging in your own system under test.

The harness talks to an external SUT over a one-line-JSON-per-test
protocol on stdin/stdout: it sends the serialized road, the SUT answers
with a verdict and the peak out-of-bounds percentage. Anything that
reads one line and prints one line can be a SUT; here the built-in
simulator itself is wrapped behind the protocol and checked against
direct in-process execution. Broken SUTs (garbage output, hangs,
missing binaries) are absorbed as INVALID results with an error tag.
"""
import sys

import numpy as np

from roadsearch import ControlPointSet, RoadParams, VehicleParams, build_road, run_test, validate
from roadsearch.protocol import SutDescriptor, external_evaluate

params = RoadParams()
rng = np.random.default_rng(12)

# a few random valid roads
roads = []
while len(roads) < 5:
    pts = np.sort(rng.uniform(0, 200, (7, 2)), axis=0)
    road = build_road(ControlPointSet(pts, 200.0), params)
    if validate(road).valid:
        roads.append(road)

sut = SutDescriptor(
    kind="external",
    command=f"{sys.executable} -m roadsearch.protocol --speed 25 --max-time 45",
    timeout=120.0)

print("road  in-process            behind the protocol")
for i, road in enumerate(roads):
    ref = run_test(road, VehicleParams(speed=25.0), max_time=45.0)
    ext = external_evaluate(road, sut)
    print(f"{i:4d}  {ref.verdict:7s} {ref.max_oob:7.3f}%   "
          f"{ext.verdict:7s} {ext.max_oob:7.3f}%   "
          f"identical={ext.max_oob == ref.max_oob}")

# a misbehaving SUT does not kill the run
broken = SutDescriptor(kind="external",
                       command=f"{sys.executable} -c 'print(\"gibberish\")'",
                       timeout=30.0)
result = external_evaluate(roads[0], broken)
print(f"\ngibberish SUT -> verdict {result.verdict}, error tag {result.error!r}")
