"""Genetic search over control-point sets.

One individual is one :class:`ControlPointSet`; fitness is the maximum
out-of-bounds percentage the built road provokes in the system under
test. Three restart policies are supported:

* variant A -- never restart, keep exploiting the population;
* variant B -- on every failing test, throw the population away and
  reseed at random;
* variant C -- like B, but reseeding prefers candidates whose road passes
  the validity check (invalid candidates are still admitted with a small
  probability, never strictly excluded).

Offspring admission can optionally be gated by a novelty rule based on
the population's average pairwise Frechet distance.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .geometry import ControlPointSet, discrete_frechet
from .road import RoadParams, build_road, validate
from .simulator import (
    DT,
    FAIL,
    INVALID,
    MAX_TIME,
    PASS,
    VehicleParams,
    run_test,
)

__all__ = [
    "SearchConfig",
    "Individual",
    "FailureArchive",
    "TestRecord",
    "RunReport",
    "random_individual",
    "guided_seed_individual",
    "evaluate",
    "builtin_evaluator",
    "select",
    "crossover",
    "mutate",
    "population_avg_frechet",
    "novelty_accept",
    "run_search",
    "INVALID_SEED_ACCEPT_PROB",
]

VARIANTS = ("A", "B", "C")
RESTART_VARIANTS = ("B", "C")

# chance that a validity-guided reseed admits an invalid candidate anyway
INVALID_SEED_ACCEPT_PROB = 0.25


@dataclass
class SearchConfig:
    """Everything one search run needs, including the RNG seed.

    The budget is either ``max_evaluations`` or ``wall_time`` seconds
    (exactly one); with neither given, a desk-scale default of 300
    evaluations applies. ``population_size`` defaults to 25 for variants
    A/B and 15 for variant C.
    """

    variant: str = "A"
    population_size: int | None = None
    num_control_points: int = 7
    max_evaluations: int | None = None
    wall_time: float | None = None
    mutation_prob: float = 0.2
    mutation_range: float = 25.0
    tournament_size: int = 2
    elitism: int = 1
    crossover_prob: float = 0.8
    novelty_filter: bool = False
    seed: int = 0
    map_size: float = 200.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.population_size is None:
            self.population_size = 15 if self.variant == "C" else 25
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.num_control_points < 3:
            raise ValueError("num_control_points must be >= 3")
        if self.max_evaluations is None and self.wall_time is None:
            self.max_evaluations = 300
        if self.max_evaluations is not None and self.wall_time is not None:
            raise ValueError("give max_evaluations or wall_time, not both")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if self.wall_time is not None and self.wall_time <= 0:
            raise ValueError("wall_time must be positive")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must be in [0, 1]")
        if self.mutation_range <= 0:
            raise ValueError("mutation_range must be positive")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        if self.elitism < 0:
            raise ValueError("elitism must be >= 0")
        if self.map_size <= 0:
            raise ValueError("map_size must be positive")


@dataclass(eq=False)  # identity semantics; fields hold numpy arrays
class Individual:
    genotype: ControlPointSet
    fitness: float | None = None
    verdict: str | None = None
    centerline: np.ndarray | None = None
    error: str | None = None

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass
class TestRecord:
    __test__ = False  # not a pytest class

    id: int
    genotype: ControlPointSet
    verdict: str
    fitness: float
    eval_time: float
    error: str | None = None


@dataclass
class RunReport:
    config: SearchConfig
    records: list = field(default_factory=list)
    events: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    parallel: bool = False


class FailureArchive:
    """Failing individuals plus a cache of their pairwise Frechet distances."""

    def __init__(self):
        self.failures: list[Individual] = []
        self._cache: dict[tuple[int, int], float] = {}

    def __len__(self) -> int:
        return len(self.failures)

    def add(self, ind: Individual):
        if ind.verdict != FAIL:
            raise ValueError("archive only holds failing individuals")
        self.failures.append(ind)

    def pairwise(self) -> np.ndarray:
        n = len(self.failures)
        mat = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) not in self._cache:
                    a, b = self.failures[i].centerline, self.failures[j].centerline
                    self._cache[(i, j)] = discrete_frechet(a, b)
                mat[i, j] = mat[j, i] = self._cache[(i, j)]
        return mat

    def avg_frechet(self) -> float | None:
        n = len(self.failures)
        if n < 2 or any(f.centerline is None for f in self.failures):
            return None
        mat = self.pairwise()
        return float(mat[np.triu_indices(n, k=1)].mean())

    def max_frechet(self) -> float | None:
        n = len(self.failures)
        if n < 2 or any(f.centerline is None for f in self.failures):
            return None
        return float(self.pairwise().max())


def _sorted_by_x(points: np.ndarray) -> np.ndarray:
    return points[np.argsort(points[:, 0], kind="stable")]


def random_individual(rng, config: SearchConfig) -> Individual:
    """Uniform control points in the map, kept sorted by x so roads run
    across the map instead of folding back at random."""
    pts = rng.uniform(0.0, config.map_size, size=(config.num_control_points, 2))
    return Individual(ControlPointSet(_sorted_by_x(pts), config.map_size))


def guided_seed_individual(rng, config: SearchConfig, validity) -> Individual:
    """Draw a seed candidate with a soft preference for valid roads.

    Valid candidates are accepted immediately; invalid ones only with
    probability INVALID_SEED_ACCEPT_PROB, so they are disfavoured but
    never strictly excluded. Used by variant C when reseeding.
    """
    while True:
        ind = random_individual(rng, config)
        if validity(ind.genotype) or rng.random() < INVALID_SEED_ACCEPT_PROB:
            return ind


def evaluate(ind: Individual, road_params: RoadParams, vparams: VehicleParams,
             dt: float = DT, max_time: float = MAX_TIME) -> Individual:
    """Build, validate and (if valid) simulate one individual.

    Invalid roads get verdict INVALID and fitness 0 without being driven;
    valid roads get fitness = max out-of-bounds percentage.
    """
    if ind.evaluated:
        raise ValueError("individual already evaluated")
    road = build_road(ind.genotype, road_params)
    ind.centerline = road.centerline
    report = validate(road)
    if not report.valid:
        ind.verdict, ind.fitness = INVALID, 0.0
        return ind
    try:
        result = run_test(road, vparams, dt=dt, max_time=max_time)
    except ValueError as exc:
        ind.verdict, ind.fitness, ind.error = INVALID, 0.0, str(exc)
        return ind
    ind.verdict, ind.fitness = result.verdict, result.max_oob
    return ind


def builtin_evaluator(road_params: RoadParams, vparams: VehicleParams,
                      dt: float = DT, max_time: float = MAX_TIME):
    """Evaluator closure over the built-in simulator for :func:`run_search`."""
    def _eval(ind: Individual) -> Individual:
        return evaluate(ind, road_params, vparams, dt=dt, max_time=max_time)
    return _eval


def select(pop: list, rng, config: SearchConfig) -> Individual:
    """Tournament selection; contestants drawn with replacement, ties
    broken by lower population index."""
    if not pop:
        raise ValueError("empty population")
    contestants = rng.integers(0, len(pop), size=config.tournament_size)
    best = int(contestants[0])
    for c in contestants[1:]:
        c = int(c)
        if pop[c].fitness > pop[best].fitness or (
                pop[c].fitness == pop[best].fitness and c < best):
            best = c
    return pop[best]


def crossover(a: Individual, b: Individual, rng, config: SearchConfig):
    """One-point crossover with probability crossover_prob; children are
    re-sorted by x and returned unevaluated."""
    ga, gb = a.genotype.points, b.genotype.points
    if len(ga) != len(gb):
        raise ValueError("genotype length mismatch")
    if rng.random() < config.crossover_prob:
        cut = int(rng.integers(1, len(ga)))
        c1 = np.vstack([ga[:cut], gb[cut:]])
        c2 = np.vstack([gb[:cut], ga[cut:]])
    else:
        c1, c2 = ga.copy(), gb.copy()
    mk = a.genotype.map_size
    return (Individual(ControlPointSet(_sorted_by_x(c1), mk)),
            Individual(ControlPointSet(_sorted_by_x(c2), mk)))


def mutate(ind: Individual, rng, config: SearchConfig) -> Individual:
    """Per point, with probability mutation_prob, redraw it uniformly from
    the square of half-side mutation_range around its old position,
    clipped to the map. Result is re-sorted by x and unevaluated."""
    pts = ind.genotype.points.copy()
    mask = rng.random(len(pts)) < config.mutation_prob
    if mask.any():
        old = pts[mask]
        drawn = rng.uniform(old - config.mutation_range, old + config.mutation_range)
        pts[mask] = np.clip(drawn, 0.0, ind.genotype.map_size)
    return Individual(ControlPointSet(_sorted_by_x(pts), ind.genotype.map_size))


def _pairwise_frechet(curves) -> np.ndarray:
    n = len(curves)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mat[i, j] = mat[j, i] = discrete_frechet(curves[i], curves[j])
    return mat


def population_avg_frechet(curves) -> float | None:
    """Mean pairwise Frechet distance over the given centerlines; None
    ("n/a") with fewer than two of them."""
    n = len(curves)
    if n < 2:
        return None
    mat = _pairwise_frechet(curves)
    return float(mat[np.triu_indices(n, k=1)].mean())


def novelty_accept(candidate, curves) -> bool:
    """Would swapping the candidate in for its most-similar population
    member strictly raise the population's average Frechet distance?"""
    n = len(curves)
    if n < 2:
        return True
    d = np.array([discrete_frechet(candidate, c) for c in curves])
    j = int(np.argmin(d))
    mat = _pairwise_frechet(curves)
    pairs = n * (n - 1) / 2
    old_sum = mat[np.triu_indices(n, k=1)].sum()
    new_sum = old_sum - mat[j].sum() + (d.sum() - d[j])
    return new_sum / pairs > old_sum / pairs


def _copy_evaluated(ind: Individual) -> Individual:
    return Individual(ind.genotype.copy(), ind.fitness, ind.verdict,
                      ind.centerline, ind.error)


def _best_index(pop: list) -> int:
    best = 0
    for i in range(1, len(pop)):
        if pop[i].fitness > pop[best].fitness:
            best = i
    return best


def _worst_index(pop: list) -> int:
    worst = 0
    for i in range(1, len(pop)):
        if pop[i].fitness < pop[worst].fitness:
            worst = i
    return worst


def run_search(config: SearchConfig, evaluator, *, validity=None,
               phenotype=None, reporter=None) -> RunReport:
    """Run one seeded search and report every evaluated test.

    ``evaluator(ind) -> ind`` fills in fitness/verdict (and ideally the
    centerline, used by the Frechet aggregates). ``validity(cps) -> bool``
    is required for variant C's guided reseeds; ``phenotype(cps) ->
    centerline`` is required when the novelty filter is on. ``reporter``
    is an optional callable invoked with every event as it happens.

    The returned report satisfies T = P + I + F, and in variants B/C every
    FAIL event is immediately followed by a RESEED event.
    """
    if config.variant == "C" and validity is None:
        raise ValueError("variant C needs a validity predicate for reseeding")
    if config.novelty_filter and phenotype is None:
        raise ValueError("novelty filter needs a phenotype function")

    rng = np.random.default_rng(config.seed)
    records: list[TestRecord] = []
    events: list[dict] = []
    archive = FailureArchive()
    deadline = time.monotonic() + config.wall_time if config.wall_time else None
    seed_cut_short = False

    def out_of_budget() -> bool:
        if config.max_evaluations is not None and len(records) >= config.max_evaluations:
            return True
        return deadline is not None and time.monotonic() >= deadline

    def emit(kind: str, **detail):
        event = {"kind": kind, **detail}
        events.append(event)
        if reporter is not None:
            reporter(event)

    def run_eval(ind: Individual):
        t0 = time.perf_counter()
        evaluator(ind)
        rec = TestRecord(len(records), ind.genotype, ind.verdict, ind.fitness,
                         time.perf_counter() - t0, ind.error)
        records.append(rec)
        if ind.verdict == FAIL:
            archive.add(ind)
            emit("FAIL", test=rec.id, fitness=ind.fitness)
        return ind

    def draw_seed(guided: bool) -> Individual:
        if guided:
            return guided_seed_individual(rng, config, validity)
        return random_individual(rng, config)

    def admit_offspring(child: Individual, parent: Individual, pop: list) -> Individual:
        if not config.novelty_filter:
            return child
        curve = phenotype(child.genotype)
        child.centerline = curve
        curves = [p.centerline if p.centerline is not None else phenotype(p.genotype)
                  for p in pop]
        if novelty_accept(curve, curves):
            return child
        return _copy_evaluated(parent)  # admission denied: the slot keeps the parent

    epoch = 0
    pop: list[Individual] = []
    need_seed = True
    gen_index = 0

    while not out_of_budget():
        if need_seed:
            guided = config.variant == "C" and epoch > 0
            emit("SEED", epoch=epoch, guided=guided)
            pop = []
            reseed = False
            for _ in range(config.population_size):
                if out_of_budget():
                    seed_cut_short = True
                    break
                ind = run_eval(draw_seed(guided))
                pop.append(ind)
                if ind.verdict == FAIL and config.variant in RESTART_VARIANTS:
                    emit("RESEED", epoch=epoch)
                    epoch += 1
                    reseed = True
                    break
            if reseed:
                continue
            if out_of_budget():
                break
            need_seed = False
            gen_index = 0
            continue

        gen_index += 1
        emit("GENERATION", epoch=epoch, index=gen_index)
        offspring: list[Individual] = []
        while len(offspring) < config.population_size:
            p1 = select(pop, rng, config)
            p2 = select(pop, rng, config)
            c1, c2 = crossover(p1, p2, rng, config)
            for child, parent in ((c1, p1), (c2, p2)):
                if len(offspring) >= config.population_size:
                    break
                child = mutate(child, rng, config)
                offspring.append(admit_offspring(child, parent, pop))

        new_pop: list[Individual] = []
        reseed = False
        for ind in offspring:
            if not ind.evaluated:
                if out_of_budget():
                    break
                run_eval(ind)
            new_pop.append(ind)
            if ind.verdict == FAIL and config.variant in RESTART_VARIANTS:
                emit("RESEED", epoch=epoch)
                epoch += 1
                reseed = True
                need_seed = True
                break
        if reseed:
            continue
        if len(new_pop) < config.population_size:
            break  # budget ran out mid-generation

        for _ in range(config.elitism):
            bi = _best_index(pop)
            wi = _worst_index(new_pop)
            if pop[bi].fitness > new_pop[wi].fitness:
                new_pop[wi] = pop.pop(bi)
            else:
                break
        pop = new_pop

    emit("BUDGET_EXHAUSTED", evaluations=len(records), partial_seed=seed_cut_short)

    counts = {PASS: 0, INVALID: 0, FAIL: 0}
    for rec in records:
        counts[rec.verdict] += 1
    aggregates = {
        "T": len(records),
        "P": counts[PASS],
        "I": counts[INVALID],
        "F": counts[FAIL],
        "avg_frechet_failures": archive.avg_frechet(),
        "max_frechet_failures": archive.max_frechet(),
    }
    return RunReport(config=config, records=records, events=events,
                     aggregates=aggregates)
