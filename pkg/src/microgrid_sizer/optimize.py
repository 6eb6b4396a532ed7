"""Search over compositions: exhaustive enumeration and archive-based NSGA-II.

All objectives are minimized. Random draws use numpy's PCG64 bit generator and
happen on the coordinating process before any evaluation is dispatched, so the
number of worker processes never changes a result.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .simulate import Composition, Scenario, SimulationMetrics, run_simulation
from .validation import check_int, check_objectives, check_scalar

OBJECTIVES: dict[str, Callable[[SimulationMetrics], float]] = {
    "embodied": lambda m: m.embodied_tco2,
    "operational": lambda m: m.operational_tco2_per_day,
    "uncovered": lambda m: 100.0 - m.coverage_percent,
    "export": lambda m: m.export_kwh,
    "cycles": lambda m: m.battery_cycles or 0.0,
}
DEFAULT_OBJECTIVES = ("embodied", "operational")
MUTATIONS = ("creep", "reset")


def make_rng(seed: int) -> np.random.Generator:
    """The single RNG used by the search: numpy ``Generator`` over ``PCG64(seed)``."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ParameterSpace:
    """Inclusive integer bounds per gene (wind turbines, solar units, battery units)."""

    wind: tuple[int, int] = (0, 10)
    solar: tuple[int, int] = (0, 10)
    battery: tuple[int, int] = (0, 8)

    def __post_init__(self):
        for name in ("wind", "solar", "battery"):
            lo, hi = getattr(self, name)
            check_int(lo, f"space.{name}[0]", lo=0)
            check_int(hi, f"space.{name}[1]", lo=lo)
            object.__setattr__(self, name, (int(lo), int(hi)))

    @property
    def bounds(self) -> tuple[tuple[int, int], ...]:
        return (self.wind, self.solar, self.battery)

    @property
    def size(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in self.bounds)

    def __contains__(self, c: Composition) -> bool:
        return all(lo <= g <= hi for g, (lo, hi) in zip(c.as_tuple(), self.bounds))

    def sample(self, rng: np.random.Generator) -> Composition:
        return Composition(*(int(rng.integers(lo, hi + 1)) for lo, hi in self.bounds))


def parameter_grid(space: ParameterSpace = ParameterSpace()) -> list[Composition]:
    """Every composition in ``space``, lexicographic in (wind, solar, battery)."""
    axes = [range(lo, hi + 1) for lo, hi in space.bounds]
    return [Composition(*genes) for genes in itertools.product(*axes)]


@dataclass(frozen=True)
class ObjectivePoint:
    composition: Composition
    objectives: tuple[float, ...]
    metrics: SimulationMetrics | None = None

    def to_dict(self, names: Sequence[str] | None = None) -> dict:
        out = {
            "wind_turbines": self.composition.wind_turbines,
            "solar_units": self.composition.solar_units,
            "battery_units": self.composition.battery_units,
            "objectives": (dict(zip(names, self.objectives)) if names
                           else list(self.objectives)),
        }
        if self.metrics is not None:
            out["metrics"] = self.metrics.to_dict()
        return out


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    strictly = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly


@dataclass(frozen=True)
class ParetoFront:
    points: tuple[ObjectivePoint, ...]
    objective_names: tuple[str, ...] = DEFAULT_OBJECTIVES

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=lambda p: (p.objectives, p.composition)))
        for p, q in itertools.permutations(pts, 2):
            if dominates(p.objectives, q.objectives):
                raise ValueError(f"{p.composition} dominates {q.composition}; not a Pareto front")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "objective_names", tuple(self.objective_names))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def compositions(self) -> set[Composition]:
        return {p.composition for p in self.points}

    def objective_array(self) -> np.ndarray:
        return np.array([p.objectives for p in self.points], dtype=np.float64)

    def to_dict(self) -> dict:
        return {"objectives": list(self.objective_names),
                "points": [p.to_dict(self.objective_names) for p in self.points]}


def non_dominated_sort(points) -> list[list[int]]:
    """Fast non-dominated sort; returns fronts as lists of indices, rank 0 first.

    ``points`` is a sequence of equal-length objective vectors. Identical vectors
    do not dominate each other and share a front.
    """
    objs = check_objectives(points)
    n = len(objs)
    if n == 0:
        return []
    # le[i, j]: i <= j in every objective; lt[i, j]: i < j in at least one.
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dom = le & lt
    dominated_count = dom.sum(axis=0)
    fronts = []
    current = [int(i) for i in np.flatnonzero(dominated_count == 0)]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in np.flatnonzero(dom[i]):
                dominated_count[j] -= 1
                if dominated_count[j] == 0:
                    nxt.append(int(j))
        current = sorted(nxt)
    return fronts


def crowding_distance(front) -> np.ndarray:
    """Crowding distance of each point of one front.

    Boundary points of every objective get ``inf``; an objective whose range is
    zero contributes nothing to interior points.
    """
    objs = check_objectives(front)
    n = len(objs)
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for m in range(objs.shape[1]):
        order = np.argsort(objs[:, m], kind="stable")
        col = objs[order, m]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = col[-1] - col[0]
        if span == 0:
            continue
        gaps = (col[2:] - col[:-2]) / span
        interior = order[1:-1]
        dist[interior] = dist[interior] + gaps
    return dist


def pareto_filter(points: Iterable[ObjectivePoint]) -> list[ObjectivePoint]:
    points = list(points)
    if not points:
        return []
    front0 = non_dominated_sort([p.objectives for p in points])[0]
    return [points[i] for i in front0]


def evaluate(scenario: Scenario, composition: Composition, cache: dict | None = None,
             objectives: Sequence[str] = DEFAULT_OBJECTIVES) -> ObjectivePoint:
    """Simulate one composition and extract its objective vector, memoized in ``cache``."""
    if cache is not None and composition in cache:
        return cache[composition]
    metrics = run_simulation(scenario, composition)
    point = ObjectivePoint(composition, tuple(float(OBJECTIVES[o](metrics)) for o in objectives),
                           metrics)
    if cache is not None:
        cache[composition] = point
    return point


_WORKER_SCENARIO: Scenario | None = None


def _init_worker(scenario):
    global _WORKER_SCENARIO
    _WORKER_SCENARIO = scenario


def _simulate_in_worker(composition):
    return run_simulation(_WORKER_SCENARIO, composition)


class Evaluator:
    """Memoizing evaluator; ``jobs > 1`` fans uncached simulations out to processes."""

    def __init__(self, scenario: Scenario, objectives: Sequence[str] = DEFAULT_OBJECTIVES,
                 jobs: int = 1):
        unknown = [o for o in objectives if o not in OBJECTIVES]
        if unknown:
            raise ValueError(f"unknown objective(s) {unknown}; choose from {sorted(OBJECTIVES)}")
        self.scenario = scenario
        self.objectives = tuple(objectives)
        self.jobs = check_int(jobs, "jobs", lo=1)
        self.cache: dict[Composition, ObjectivePoint] = {}
        self.n_simulations = 0
        self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def _point(self, composition, metrics):
        return ObjectivePoint(composition,
                              tuple(float(OBJECTIVES[o](metrics)) for o in self.objectives),
                              metrics)

    def __call__(self, composition: Composition) -> ObjectivePoint:
        return self.evaluate_many([composition])[0][0]

    def evaluate_many(self, compositions: Sequence[Composition]) -> list[tuple[ObjectivePoint, bool]]:
        """Evaluate in order; returns ``(point, cache_hit)`` pairs.

        A composition repeated inside one batch is simulated once; later copies
        count as cache hits.
        """
        todo = list(dict.fromkeys(c for c in compositions if c not in self.cache))
        if todo:
            if self.jobs > 1 and len(todo) > 1:
                if self._pool is None:
                    self._pool = ProcessPoolExecutor(self.jobs, initializer=_init_worker,
                                                     initargs=(self.scenario,))
                results = list(self._pool.map(_simulate_in_worker, todo))
            else:
                results = [run_simulation(self.scenario, c) for c in todo]
            for c, metrics in zip(todo, results):
                self.cache[c] = self._point(c, metrics)
            self.n_simulations += len(todo)
        fresh = set(todo)
        out = []
        for c in compositions:
            out.append((self.cache[c], c not in fresh))
            fresh.discard(c)
        return out


@dataclass(frozen=True)
class SearchConfig:
    population_size: int = 50
    max_evaluations: int = 350
    crossover_prob: float = 0.9
    mutation_prob: float = 1.0 / 3.0
    seed: int = 0
    objectives: tuple[str, ...] = DEFAULT_OBJECTIVES
    mutation: str = "creep"
    """``"creep"`` moves a gene one step to a neighbouring value; ``"reset"`` redraws it uniformly."""

    def __post_init__(self):
        if self.mutation not in MUTATIONS:
            raise ValueError(f"mutation must be one of {MUTATIONS}, got {self.mutation!r}")
        check_int(self.population_size, "population_size", lo=2)
        if self.population_size % 2:
            raise ValueError("population_size must be even")
        check_int(self.max_evaluations, "max_evaluations", lo=self.population_size)
        check_scalar(self.crossover_prob, "crossover_prob", lo=0, hi=1)
        check_scalar(self.mutation_prob, "mutation_prob", lo=0, hi=1)
        check_int(self.seed, "seed", lo=0)
        object.__setattr__(self, "objectives", tuple(self.objectives))
        if len(self.objectives) < 2:
            raise ValueError("multi-objective search needs at least two objectives")
        unknown = [o for o in self.objectives if o not in OBJECTIVES]
        if unknown:
            raise ValueError(f"unknown objective(s) {unknown}")


@dataclass(frozen=True)
class LogEntry:
    index: int
    generation: int
    point: ObjectivePoint
    cache_hit: bool


@dataclass
class SearchResult:
    points: list[ObjectivePoint]
    front: ParetoFront
    log: list[LogEntry] = field(default_factory=list)
    n_simulations: int = 0


def exhaustive_run(scenario: Scenario, space: ParameterSpace = ParameterSpace(),
                   objectives: Sequence[str] = DEFAULT_OBJECTIVES, jobs: int = 1,
                   evaluator: Evaluator | None = None) -> SearchResult:
    """Evaluate every grid point once and return all points plus their Pareto front."""
    own = evaluator is None
    evaluator = evaluator or Evaluator(scenario, objectives, jobs)
    try:
        results = evaluator.evaluate_many(parameter_grid(space))
    finally:
        if own:
            evaluator.close()
    points = [p for p, _ in results]
    log = [LogEntry(i, 0, p, hit) for i, (p, hit) in enumerate(results)]
    front = ParetoFront(tuple(pareto_filter(points)), evaluator.objectives)
    return SearchResult(points, front, log, evaluator.n_simulations)


def _rank_and_crowd(points: Sequence[ObjectivePoint]):
    fronts = non_dominated_sort([p.objectives for p in points])
    rank = np.empty(len(points), dtype=int)
    crowd = np.empty(len(points))
    for r, idx in enumerate(fronts):
        rank[idx] = r
        crowd[idx] = crowding_distance([points[i].objectives for i in idx])
    return fronts, rank, crowd


def _select_survivors(points: Sequence[ObjectivePoint], k: int) -> list[ObjectivePoint]:
    fronts, _, crowd = _rank_and_crowd(points)
    chosen: list[int] = []
    for idx in fronts:
        if len(chosen) + len(idx) <= k:
            chosen.extend(idx)
            continue
        # Stable sort keeps index order among equal crowding distances.
        by_crowd = sorted(idx, key=lambda i: -crowd[i])
        chosen.extend(by_crowd[: k - len(chosen)])
        break
    return [points[i] for i in chosen]


class _Variation:
    """Tournament selection, uniform crossover and creep or reset mutation on integer genomes."""

    def __init__(self, rng, space: ParameterSpace, config: SearchConfig):
        self.rng = rng
        self.bounds = space.bounds
        self.config = config

    def tournament(self, rank, crowd) -> int:
        a, b = (int(i) for i in self.rng.integers(0, len(rank), size=2))
        if rank[a] != rank[b]:
            return a if rank[a] < rank[b] else b
        if crowd[a] != crowd[b]:
            return a if crowd[a] > crowd[b] else b
        return a

    def crossover(self, g1, g2):
        if self.rng.random() >= self.config.crossover_prob:
            return list(g1), list(g2)
        c1, c2 = list(g1), list(g2)
        for i in range(len(c1)):
            if self.rng.random() < 0.5:
                c1[i], c2[i] = c2[i], c1[i]
        return c1, c2

    def mutate(self, genes):
        out = list(genes)
        for i, (lo, hi) in enumerate(self.bounds):
            if self.rng.random() >= self.config.mutation_prob or lo == hi:
                continue
            if self.config.mutation == "reset":
                out[i] = int(self.rng.integers(lo, hi + 1))
            else:
                # creep: one step up or down, reflected back inside the bounds
                step = 1 if self.rng.random() < 0.5 else -1
                if not lo <= out[i] + step <= hi:
                    step = -step
                out[i] += step
        return out


MAX_REDRAWS = 10
MAX_STALLED_GENERATIONS = 20


def nsga2_run(scenario: Scenario, space: ParameterSpace = ParameterSpace(),
              config: SearchConfig = SearchConfig(), jobs: int = 1,
              evaluator: Evaluator | None = None) -> SearchResult:
    """NSGA-II over the composition genome with a Pareto archive of every evaluation.

    At most ``config.max_evaluations`` distinct compositions are simulated. The
    returned front is the rank-0 set of the whole archive, not of the final
    population.
    """
    rng = make_rng(config.seed)
    variation = _Variation(rng, space, config)
    own = evaluator is None
    evaluator = evaluator or Evaluator(scenario, config.objectives, jobs)
    archive: dict[Composition, ObjectivePoint] = {}
    log: list[LogEntry] = []
    budget = config.max_evaluations

    def unique(draw, batch):
        c = draw()
        for _ in range(MAX_REDRAWS):
            if c not in archive and c not in batch:
                break
            c = draw()
        return c

    def run_batch(batch, generation):
        # Trim the batch so the distinct-simulation budget is never exceeded.
        kept, new = [], set()
        for c in batch:
            if c not in archive and c not in new:
                if len(archive) + len(new) >= budget:
                    continue
                new.add(c)
            kept.append(c)
        results = evaluator.evaluate_many(kept)
        points = []
        for c, (p, hit) in zip(kept, results):
            hit = hit or c in archive
            archive.setdefault(c, p)
            log.append(LogEntry(len(log), generation, p, hit))
            points.append(p)
        return points, len(new)

    try:
        batch: list[Composition] = []
        for _ in range(config.population_size):
            batch.append(unique(lambda: space.sample(rng), set(batch)))
        population, _ = run_batch(batch, 0)

        generation, stalled = 0, 0
        while (len(archive) < budget and len(archive) < space.size
               and stalled < MAX_STALLED_GENERATIONS):
            generation += 1
            _, rank, crowd = _rank_and_crowd(population)
            offspring: list[Composition] = []
            taken: set[Composition] = set()
            while len(offspring) < config.population_size:
                g1 = population[variation.tournament(rank, crowd)].composition.as_tuple()
                g2 = population[variation.tournament(rank, crowd)].composition.as_tuple()
                for child in variation.crossover(g1, g2):
                    c = unique(lambda child=child: Composition(*variation.mutate(child)), taken)
                    offspring.append(c)
                    taken.add(c)
            offspring = offspring[: config.population_size]
            points, n_new = run_batch(offspring, generation)
            stalled = 0 if n_new else stalled + 1
            population = _select_survivors(population + points, config.population_size)
    finally:
        if own:
            evaluator.close()

    evaluated = list(archive.values())
    front = ParetoFront(tuple(pareto_filter(evaluated)), config.objectives)
    return SearchResult(evaluated, front, log, evaluator.n_simulations)


def pareto_recovery(found: ParetoFront, reference: ParetoFront) -> float:
    """Share of the reference front's compositions that ``found`` also contains."""
    ref = reference.compositions()
    if not ref:
        return 1.0
    return len(ref & found.compositions()) / len(ref)
