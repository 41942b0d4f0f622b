"""Search-based generation of challenging roads for lane-keeping systems.

A road is a Bezier curve over a handful of control points; a genetic
algorithm evolves those control points toward roads that make a
lane-keeping vehicle leave its lane, with a discrete-Frechet-distance
report of how diverse the discovered failures are.
"""

__version__ = "0.1.0"

from .geometry import (
    ControlPointSet,
    bezier_point,
    discrete_frechet,
    frechet_bruteforce,
    min_curvature_radius,
    sample_bezier,
    self_intersects,
)
from .road import RoadParams, RoadSpec, ValidityReport, build_road, validate
from .simulator import (
    FAIL,
    INVALID,
    PASS,
    TestResult,
    VehicleParams,
    VehicleState,
    oob_percent,
    pure_pursuit,
    run_test,
    step,
)
from .search import (
    FailureArchive,
    Individual,
    RunReport,
    SearchConfig,
    builtin_evaluator,
    crossover,
    evaluate,
    mutate,
    novelty_accept,
    population_avg_frechet,
    random_individual,
    run_search,
    select,
)
from .protocol import SutDescriptor, external_evaluate
from .config import ConfigError, parse_config, serialize_config
from .report import ReplayDivergence, render_test_svg, replay, write_report
