import itertools

import numpy as np
import pytest

from microgrid_sizer.candidates import (candidate_rows, format_table, greedy_diversity,
                                        kmeans_select, normalized_objectives, rows_to_csv,
                                        threshold_select)
from microgrid_sizer.carbon import embodied
from microgrid_sizer.optimize import ObjectivePoint, ParetoFront
from microgrid_sizer.simulate import Composition

# (wind turbines, solar units, battery units, operational tCO2/day) per candidate row
HOUSTON = [(0, 0, 0, 15.54), (4, 0, 1, 5.88), (3, 2, 3, 1.90), (4, 3, 7, 0.24), (10, 10, 8, 0.02)]
BERKELEY = [(0, 0, 0, 9.33), (1, 1, 3, 4.65), (0, 3, 5, 1.33), (3, 3, 7, 0.08), (10, 10, 8, 0.02)]


def front_from(rows):
    pts = []
    for w, s, b, op in rows:
        c = Composition(w, s, b)
        pts.append(ObjectivePoint(c, (embodied(c), op)))
    return ParetoFront(tuple(pts))


def comps(points):
    return [p.composition.as_tuple() for p in points]


def test_threshold_houston():
    picked = threshold_select(front_from(HOUSTON))
    assert [p.objectives[0] for p in picked] == [0, 4649, 9573, 14999, 39380]
    assert picked[1].composition == Composition(4, 0, 1) and picked[1].objectives[1] == 5.88


def test_threshold_berkeley():
    picked = threshold_select(front_from(BERKELEY))
    assert [p.objectives[0] for p in picked] == [0, 4961, 9885, 13953, 39380]
    assert picked[2].composition == Composition(0, 3, 5)


def test_threshold_infeasible_budgets():
    picked = threshold_select(front_from(HOUSTON), budgets=[100.0, 200.0])
    assert comps(picked) == [(0, 0, 0), (10, 10, 8)]


def test_threshold_rejects_unsorted_budgets():
    with pytest.raises(ValueError):
        threshold_select(front_from(HOUSTON), budgets=[10000.0, 5000.0])


def line(n):
    return ParetoFront(tuple(ObjectivePoint(Composition(i, 0, 0), (float(i), float(n - 1 - i)))
                             for i in range(n)))


def test_greedy_endpoints_and_exhaustion():
    assert comps(greedy_diversity(line(3), 2)) == [(0, 0, 0), (2, 0, 0)]
    assert len(greedy_diversity(line(4), 4)) == 4
    assert len(greedy_diversity(line(4), 10)) == 4


def test_greedy_matches_subset_brute_force():
    xs = [0.0, 0.1, 0.35, 0.7, 1.0]
    pts = tuple(ObjectivePoint(Composition(i, 0, 0), (x, (1 - x) ** 2)) for i, x in enumerate(xs))
    front = ParetoFront(pts)
    x = normalized_objectives(front.points)
    ends = {0, len(xs) - 1}

    def spread(subset):
        return min(np.linalg.norm(x[a] - x[b]) for a, b in itertools.combinations(subset, 2))

    subsets = [s for s in itertools.combinations(range(len(xs)), 3) if ends <= set(s)]
    best = max(subsets, key=spread)
    picked = greedy_diversity(front, 3)
    assert sorted(p.composition.wind_turbines for p in picked) == list(best)


def test_kmeans_single_cluster_picks_nearest_to_centroid():
    front = line(5)
    (rep,) = kmeans_select(front, 1)
    assert rep.composition == Composition(2, 0, 0)


def test_kmeans_one_per_pair():
    pts = (ObjectivePoint(Composition(0, 0, 0), (0.0, 10.0)),
           ObjectivePoint(Composition(1, 0, 0), (0.1, 9.9)),
           ObjectivePoint(Composition(2, 0, 0), (9.9, 0.1)),
           ObjectivePoint(Composition(3, 0, 0), (10.0, 0.0)))
    for seed in range(5):
        picked = kmeans_select(ParetoFront(pts), 2, seed=seed)
        groups = sorted(p.composition.wind_turbines // 2 for p in picked)
        assert groups == [0, 1]
    assert len(kmeans_select(ParetoFront(pts), 4)) == 4


def test_selectors_are_deterministic():
    front = front_from(HOUSTON)
    assert kmeans_select(front, 3, seed=4) == kmeans_select(front, 3, seed=4)
    assert greedy_diversity(front, 3) == greedy_diversity(front, 3)


def test_empty_front_and_bad_k():
    with pytest.raises(ValueError):
        threshold_select([])
    with pytest.raises(ValueError):
        greedy_diversity(line(3), 0)


def test_rows_and_table():
    rows = candidate_rows(threshold_select(front_from(HOUSTON)))
    assert rows[1]["wind_mw"] == 12 and rows[1]["battery_mwh"] == 7.5
    assert rows[3]["solar_mw"] == 12 and rows[3]["battery_mwh"] == 52.5
    table = format_table(rows)
    assert "4,649" in table and "--" in table
    csv_text = rows_to_csv(rows)
    assert csv_text.splitlines()[0].startswith("wind_mw,solar_mw,battery_mwh")
    assert len(csv_text.splitlines()) == 6
