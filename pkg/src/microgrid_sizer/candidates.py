"""Reduce a Pareto front to a short list of decision-ready compositions.

The selectors treat objective 0 as embodied tCO2 and objective 1 as operational
tCO2/day. Distances are measured after min-max normalizing each objective over
the front.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

DEFAULT_BUDGETS = (5000.0, 10000.0, 15000.0)
TABLE_COLUMNS = ("wind_mw", "solar_mw", "battery_mwh", "embodied_tco2",
                 "operational_tco2_per_day", "coverage_percent", "battery_cycles")


def _points(front) -> list:
    points = list(getattr(front, "points", front))
    if not points:
        raise ValueError("empty Pareto front")
    return points


def _tiebreak(p):
    return (p.objectives[0], p.objectives[1:], p.composition)


def _dedupe(points):
    seen, out = set(), []
    for p in points:
        if p.composition not in seen:
            seen.add(p.composition)
            out.append(p)
    return out


def threshold_select(front, budgets: Sequence[float] = DEFAULT_BUDGETS) -> list:
    """Baseline, best point under each embodied budget, then the global operational minimum."""
    points = _points(front)
    if list(budgets) != sorted(budgets):
        raise ValueError("budgets must be sorted ascending")

    def best(pool):
        return min(pool, key=lambda p: (p.objectives[1], p.objectives[0], p.composition))

    out = [p for p in sorted(points, key=_tiebreak) if p.objectives[0] == 0][:1]
    for budget in budgets:
        feasible = [p for p in points if p.objectives[0] <= budget]
        if feasible:
            out.append(best(feasible))
    out.append(best(points))
    return _dedupe(out)


def normalized_objectives(points) -> np.ndarray:
    objs = np.array([p.objectives for p in points], dtype=np.float64)
    lo, hi = objs.min(axis=0), objs.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return (objs - lo) / span


def greedy_diversity(front, k: int) -> list:
    """Max-min distance selection seeded with the two objective extremes.

    Ties are broken towards lower embodied emissions (then the remaining
    objectives, then the composition), so the output is unique and stable.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    points = sorted(_points(front), key=_tiebreak)
    if k >= len(points):
        return points
    x = normalized_objectives(points)
    first = 0  # lowest embodied after sorting
    second = min(range(len(points)), key=lambda i: (points[i].objectives[1], i))
    chosen = [first] if second == first or k == 1 else [first, second]
    # min distance from every point to the chosen set
    min_d = np.min(np.linalg.norm(x[:, None, :] - x[None, chosen, :], axis=2), axis=1)
    while len(chosen) < k:
        best = max((i for i in range(len(points)) if i not in chosen),
                   key=lambda i: (min_d[i], -i))
        chosen.append(best)
        min_d = np.minimum(min_d, np.linalg.norm(x - x[best], axis=1))
    return [points[i] for i in chosen]


def kmeans_select(front, k: int, seed: int = 0, max_iter: int = 100, tol: float = 1e-9) -> list:
    """Lloyd's k-means on the normalized front; one representative per cluster.

    Centroids start at ``k`` distinct points drawn by a PCG64 generator. The
    representative is the member nearest its centroid. Output is ordered by
    embodied emissions.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    points = sorted(_points(front), key=_tiebreak)
    if k >= len(points):
        return points
    x = normalized_objectives(points)
    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = x[np.sort(rng.choice(len(points), size=k, replace=False))].copy()
    for _ in range(max_iter):
        d = np.linalg.norm(x[:, None, :] - centroids[None, :, :], axis=2)
        labels = np.argmin(d, axis=1)
        new = centroids.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new[j] = x[members].mean(axis=0)
            else:
                # Re-seat an empty cluster on the point farthest from its centroid.
                far = int(np.argmax(d[np.arange(len(x)), labels]))
                new[j] = x[far]
        shift = float(np.max(np.linalg.norm(new - centroids, axis=1)))
        centroids = new
        if shift < tol:
            break
    d = np.linalg.norm(x[:, None, :] - centroids[None, :, :], axis=2)
    labels = np.argmin(d, axis=1)
    reps = []
    for j in range(k):
        members = np.flatnonzero(labels == j)
        if members.size:
            reps.append(int(members[np.argmin(d[members, j])]))
    return [points[i] for i in sorted(set(reps))]


def candidate_rows(points, solar_unit_kw: float = 4000.0, turbine_kw: float = 3000.0,
                   battery_unit_kwh: float = 7500.0) -> list[dict]:
    """Rows in table order: Wind MW, Solar MW, Battery MWh, Embodied, Operational, Coverage, Cycles."""
    rows = []
    for p in points:
        c, m = p.composition, p.metrics
        rows.append({
            "wind_mw": c.wind_turbines * turbine_kw / 1000.0,
            "solar_mw": c.solar_units * solar_unit_kw / 1000.0,
            "battery_mwh": c.battery_units * battery_unit_kwh / 1000.0,
            "embodied_tco2": m.embodied_tco2 if m else p.objectives[0],
            "operational_tco2_per_day": m.operational_tco2_per_day if m else p.objectives[1],
            "coverage_percent": m.coverage_percent if m else None,
            "battery_cycles": m.battery_cycles if m else None,
        })
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row[k] is None else repr(row[k])) for k in TABLE_COLUMNS})
    return buf.getvalue()


def format_table(rows: list[dict]) -> str:
    """Aligned text table; missing cycle counts render as ``--``."""
    header = ["Wind (MW)", "Solar (MW)", "Battery (MWh)", "Embodied (tCO2)",
              "Operat. (tCO2/d)", "Cov. (%)", "Battery cycles"]
    body = []
    for r in rows:
        body.append([
            f"{r['wind_mw']:g}", f"{r['solar_mw']:g}", f"{r['battery_mwh']:.1f}",
            f"{r['embodied_tco2']:,.0f}", f"{r['operational_tco2_per_day']:.2f}",
            "--" if r["coverage_percent"] is None else f"{r['coverage_percent']:.2f}",
            "--" if r["battery_cycles"] is None else f"{r['battery_cycles']:.0f}",
        ])
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines) + "\n"
