"""Threshold filtering, multiple-testing helpers, threshold sweeps and PN graphs."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .measures import DEFAULT_DELTA, canonical_name, compute
from .mine import Rule, count_arrays, format_value
from .questgen import PatternLog, is_covered
from .txdb import ItemCatalog

# measures where smaller values are stronger evidence
_LOWER_IS_STRONGER = {"fisher_p_value"}


def default_grid(measure: str) -> np.ndarray:
    """Threshold grid used by sweeps when none is given."""
    name = canonical_name(measure)
    if name in ("lift", "hyper_lift"):
        return np.round(np.linspace(1.0, 3.0, 21), 10)
    if name in ("confidence", "support"):
        return np.round(np.linspace(0.0, 1.0, 21), 10)
    if name in ("hyper_confidence", "hyper_confidence_sub"):
        return np.array([0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.995, 0.999, 0.9995, 0.9999])
    if name == "chi_square":
        return np.array([0.0, 1.0, 2.0, 3.841, 5.0, 6.635, 10.0, 10.828, 20.0, 50.0, 100.0])
    return np.array([0.1, 0.05, 0.01, 0.005, 0.001, 0.0001])


def pn_grid(measure: str) -> np.ndarray:
    """Dense grid over the sweep range of a measure, for PN graphs."""
    name = canonical_name(measure)
    if name in ("lift", "hyper_lift"):
        return np.round(np.linspace(1.0, 3.0, 81), 10)
    if name in ("confidence", "support"):
        return np.round(np.linspace(0.0, 1.0, 101), 10)
    if name in ("hyper_confidence", "hyper_confidence_sub"):
        return np.concatenate((np.linspace(0.5, 0.9, 41), 1.0 - np.geomspace(0.1, 1e-4, 40)[1:]))
    if name == "chi_square":
        return np.concatenate(([0.0], np.geomspace(0.01, 1e4, 121)))
    return np.concatenate((np.linspace(0.5, 0.1, 41), np.geomspace(0.1, 1e-4, 40)[1:]))


def default_inclusive(measure: str) -> bool:
    """Hyper-confidence thresholds are met-or-exceeded; the others are strict."""
    return canonical_name(measure) == "hyper_confidence"


def accept_mask(values: np.ndarray, threshold: float, measure: str,
                inclusive: bool | None = None) -> np.ndarray:
    """Boolean mask of accepted values; NaN (undefined) never passes."""
    name = canonical_name(measure)
    if inclusive is None:
        inclusive = default_inclusive(name)
    v = np.asarray(values, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        if name in _LOWER_IS_STRONGER:
            mask = v <= threshold if inclusive else v < threshold
        else:
            mask = v >= threshold if inclusive else v > threshold
    return mask & ~np.isnan(v)


def measure_values(rules: Sequence[Rule], measure: str, delta: float = DEFAULT_DELTA,
                   two_sided_chi: bool = False) -> np.ndarray:
    """Measure values used for filtering; NaN marks rules that can never pass.

    A chi-square threshold screens for positive correlation: rules whose
    co-occurrence does not exceed its expectation get NaN unless
    ``two_sided_chi`` is set.
    """
    name = canonical_name(measure)
    if not rules:
        return np.empty(0)
    cx, cy, cxy, m = count_arrays(rules)
    v = compute([name], cx, cy, cxy, m, delta=delta)[name]
    if name == "chi_square" and not two_sided_chi:
        v = np.where(cxy * m > cx * cy, v, np.nan)
    return v


def filter(rules: Sequence[Rule], measure: str, threshold: float,
           inclusive: bool | None = None, delta: float = DEFAULT_DELTA,
           two_sided_chi: bool = False) -> list[Rule]:
    """Rules whose measure passes ``threshold``.

    Comparison is strict except for hyper-confidence, whose gamma threshold
    is met-or-exceeded; pass ``inclusive`` to override.
    """
    name = canonical_name(measure)
    if not rules:
        return []
    values = measure_values(rules, name, delta, two_sided_chi)
    mask = accept_mask(values, threshold, name, inclusive)
    return [r for r, ok in zip(rules, mask) if ok]


def count_accepted(values: np.ndarray, thresholds, measure: str,
                   inclusive: bool | None = None) -> np.ndarray:
    return np.array([int(accept_mask(values, t, measure, inclusive).sum()) for t in thresholds],
                    dtype=np.int64)


def bonferroni_gamma(alpha: float, n_tests: int) -> float:
    """Hyper-confidence threshold 1 - alpha/n controlling the family-wise error at alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if n_tests < 1:
        raise ValueError("n_tests must be >= 1")
    return 1.0 - alpha / n_tests


def spurious_estimate(n_tests: int, gamma: float, n_accepted: int) -> float:
    """Rough share of spurious rules among accepted ones: n (1 - gamma) / accepted."""
    if n_accepted <= 0:
        raise ValueError("n_accepted must be positive")
    return n_tests * (1.0 - gamma) / n_accepted


# -- sweeps ---------------------------------------------------------------------

@dataclass(frozen=True)
class SweepCurve:
    measure: str
    points: tuple[tuple[float, int, int], ...]  # (threshold, accepted real, accepted null)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["threshold", "acceptedReal", "acceptedNull"])
        for t, a, b in self.points:
            w.writerow([format_value(t), a, b])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"measure": self.measure,
                "points": [{"threshold": t, "acceptedReal": a, "acceptedNull": b}
                           for t, a, b in self.points]}


def sweep(real_rules: Sequence[Rule], null_rules: Sequence[Rule], measure: str,
          thresholds=None, delta: float = DEFAULT_DELTA, inclusive: bool = False,
          two_sided_chi: bool = False) -> SweepCurve:
    """Accepted rule counts on real and null data per threshold (strict by default)."""
    name = canonical_name(measure)
    grid = default_grid(name) if thresholds is None else np.asarray(thresholds, dtype=np.float64)
    real = count_accepted(measure_values(real_rules, name, delta, two_sided_chi), grid, name, inclusive)
    null = count_accepted(measure_values(null_rules, name, delta, two_sided_chi), grid, name, inclusive)
    return SweepCurve(name, tuple((float(t), int(a), int(b)) for t, a, b in zip(grid, real, null)))


# -- PN graphs --------------------------------------------------------------------

@dataclass(frozen=True)
class PNPoint:
    threshold: float
    P: float
    N: float


def pn_graph(rules: Sequence[Rule], log: PatternLog, measure: str, thresholds=None,
             catalog: ItemCatalog | None = None, delta: float = DEFAULT_DELTA,
             inclusive: bool = False, two_sided_chi: bool = False) -> list[PNPoint]:
    """Covered positives (rules inside a generating pattern) and negatives per threshold."""
    name = canonical_name(measure)
    grid = pn_grid(name) if thresholds is None else np.asarray(thresholds, dtype=np.float64)
    values = measure_values(rules, name, delta, two_sided_chi)
    covered = np.fromiter((is_covered(r, log, catalog) for r in rules), dtype=bool, count=len(rules))
    out = []
    for t in grid:
        mask = accept_mask(values, t, name, inclusive)
        p = int((mask & covered).sum())
        out.append(PNPoint(float(t), p, int(mask.sum()) - p))
    return out


def average_pn(runs: Sequence[Sequence[PNPoint]]) -> list[PNPoint]:
    """Mean P and N per threshold index over runs sharing one grid."""
    if not runs:
        raise ValueError("no PN graphs to average")
    k = len(runs[0])
    if any(len(r) != k for r in runs):
        raise ValueError("PN graphs must share the same threshold grid")
    out = []
    for idx in range(k):
        pts = [r[idx] for r in runs]
        out.append(PNPoint(pts[0].threshold,
                           sum(p.P for p in pts) / len(pts),
                           sum(p.N for p in pts) / len(pts)))
    return out


def pn_to_csv(points: Sequence[PNPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["threshold", "P", "N"])
    for pt in points:
        w.writerow([format_value(pt.threshold), format_value(pt.P), format_value(pt.N)])
    return buf.getvalue()


def pn_to_json(points: Sequence[PNPoint], measure: str) -> str:
    return json.dumps({"measure": canonical_name(measure),
                       "points": [{"threshold": p.threshold, "P": p.P, "N": p.N} for p in points]})


def interpolate_p(points: Sequence[PNPoint], n_value: float) -> float | None:
    """P of the piecewise-linear PN curve at ``n_value``; None outside its N range.

    Where several points share an N, the largest P is used.
    """
    best: dict[float, float] = {}
    for pt in points:
        best[pt.N] = max(best.get(pt.N, -np.inf), pt.P)
    ns = np.array(sorted(best))
    ps = np.array([best[n] for n in ns])
    if ns.size == 0 or n_value < ns[0] or n_value > ns[-1]:
        return None
    return float(np.interp(n_value, ns, ps))


def dominance_violations(upper: Sequence[PNPoint], lower: Sequence[PNPoint],
                         tol: float = 1e-9) -> list[tuple[float, float, float]]:
    """Points of ``lower`` that rise above ``upper`` at the same N.

    Returns (N, P_lower, P_upper) for every violation; N values outside the
    range covered by ``upper`` are not compared.
    """
    bad = []
    for pt in lower:
        pu = interpolate_p(upper, pt.N)
        if pu is not None and pt.P > pu + tol:
            bad.append((pt.N, pt.P, pu))
    return bad
