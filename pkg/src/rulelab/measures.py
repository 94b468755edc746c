"""Interest measures computed from a rule's 2x2 contingency counts.

Under independence with fixed margins the co-occurrence count C of X and Y
is hyper-geometric: ``c_Y`` marked transactions among ``m``, ``c_X`` drawn.
The probabilistic measures read off its distribution:

* hyper-confidence  ``P(C < c_XY)``
* substitutes       ``P(C > c_XY)``
* hyper-lift_delta  ``c_XY / Q_delta(C)`` with ``Q_delta`` the smallest q
  satisfying ``P(C <= q) >= delta``
* Fisher p-value    ``P(C >= c_XY)`` (one-sided, positive association)

Undefined values (division by zero) are ``None`` in the scalar API and NaN
in the vectorized :func:`compute`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _core

DEFAULT_DELTA = 0.99

MEASURES = (
    "support",
    "confidence",
    "lift",
    "hyper_lift",
    "hyper_confidence",
    "hyper_confidence_sub",
    "chi_square",
    "fisher_p_value",
)

_ALIASES = {
    "supp": "support",
    "conf": "confidence",
    "hyperlift": "hyper_lift",
    "hyperconfidence": "hyper_confidence",
    "hyper_conf": "hyper_confidence",
    "hyperconfidence_sub": "hyper_confidence_sub",
    "chi2": "chi_square",
    "chisquare": "chi_square",
    "chisq": "chi_square",
    "fisher": "fisher_p_value",
    "p_value": "fisher_p_value",
}


def canonical_name(name: str) -> str:
    """Normalize a measure name (``hyper-lift`` -> ``hyper_lift``)."""
    key = name.strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in MEASURES:
        raise ValueError(f"unknown measure {name!r}; choose from {', '.join(MEASURES)}")
    return key


@dataclass(frozen=True)
class ContingencyCounts:
    """Margins and co-occurrence count of a rule X => Y in a database of m transactions."""

    cX: int
    cY: int
    cXY: int
    m: int

    def __post_init__(self):
        for name in ("cX", "cY", "cXY", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ValueError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        cX, cY, cXY, m = self.cX, self.cY, self.cXY, self.m
        if m < 0 or not (0 <= cX <= m) or not (0 <= cY <= m):
            raise ValueError(f"invalid margins cX={cX}, cY={cY}, m={m}")
        if not (max(0, cX + cY - m) <= cXY <= min(cX, cY)):
            raise ValueError(f"cXY={cXY} inconsistent with cX={cX}, cY={cY}, m={m}")

    @property
    def support_range(self) -> tuple[int, int]:
        """Smallest and largest co-occurrence count the margins allow."""
        return max(0, self.cX + self.cY - self.m), min(self.cX, self.cY)

    def swapped(self) -> ContingencyCounts:
        return ContingencyCounts(self.cY, self.cX, self.cXY, self.m)

    def table(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Cells ((X&Y, X&~Y), (~X&Y, ~X&~Y))."""
        a = self.cXY
        return ((a, self.cX - a), (self.cY - a, self.m - self.cX - self.cY + a))


@dataclass(frozen=True)
class MeasureVector:
    support: float | None
    confidence: float | None
    lift: float | None
    hyper_lift: float | None
    hyper_confidence: float
    hyper_confidence_sub: float
    chi_square: float | None
    fisher_p_value: float
    delta: float = DEFAULT_DELTA

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in MEASURES}


# -- hyper-geometric kernel ----------------------------------------------

def hypergeom_pmf(r: int, counts: ContingencyCounts) -> float:
    """P(C = r) given the margins of ``counts``."""
    return _core.hyper_pmf(int(r), counts.cX, counts.cY, counts.m)


def hypergeom_cdf(r: int, counts: ContingencyCounts) -> float:
    """P(C <= r)."""
    return _core.hyper_cdf(int(r), counts.cX, counts.cY, counts.m)


def hypergeom_tail_gt(r: int, counts: ContingencyCounts) -> float:
    """P(C > r), summed over the upper tail directly when it is the small side."""
    return _core.hyper_sf(int(r), counts.cX, counts.cY, counts.m)


def expected_count(counts: ContingencyCounts) -> float:
    if counts.m == 0:
        return 0.0
    return counts.cX * counts.cY / counts.m


def quantile(counts: ContingencyCounts, delta: float = DEFAULT_DELTA) -> int:
    """Minimal q with P(C < q) <= delta and P(C > q) <= 1 - delta."""
    _check_delta(delta)
    q = _core.hyper_quantile(float(delta), counts.cX, counts.cY, counts.m)
    # the second inequality is the defining one; the first holds by minimality
    if hypergeom_cdf(q - 1, counts) > delta:
        raise ArithmeticError(f"no {delta}-quantile found for {counts}")
    return q


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


# -- measures ---------------------------------------------------------------

def support(counts: ContingencyCounts) -> float | None:
    return counts.cXY / counts.m if counts.m else None


def confidence(counts: ContingencyCounts) -> float | None:
    return counts.cXY / counts.cX if counts.cX else None


def lift(counts: ContingencyCounts) -> float | None:
    if counts.cX == 0 or counts.cY == 0:
        return None
    return counts.cXY * counts.m / (counts.cX * counts.cY)


def hyper_lift(counts: ContingencyCounts, delta: float = DEFAULT_DELTA) -> float | None:
    """c_XY over the delta-quantile of C.

    A zero quantile gives ``inf`` when c_XY > 0 and ``None`` (undefined) when
    c_XY = 0.
    """
    q = quantile(counts, delta)
    if q == 0:
        return math.inf if counts.cXY > 0 else None
    return counts.cXY / q


def hyper_confidence(counts: ContingencyCounts) -> float:
    """P(C < c_XY)."""
    return hypergeom_cdf(counts.cXY - 1, counts)


def hyper_confidence_sub(counts: ContingencyCounts) -> float:
    """P(C > c_XY): high for items that co-occur less than chance."""
    return hypergeom_tail_gt(counts.cXY, counts)


def fisher_p_value(counts: ContingencyCounts) -> float:
    """One-sided Fisher exact test p-value P(C >= c_XY)."""
    return hypergeom_tail_gt(counts.cXY - 1, counts)


def chi_square(counts: ContingencyCounts) -> float | None:
    """Pearson chi-square statistic of the 2x2 table (no continuity correction)."""
    cX, cY, m = counts.cX, counts.cY, counts.m
    denom = cX * cY * (m - cX) * (m - cY)
    if denom == 0:
        return None
    (a, b), (c, d) = counts.table()
    diff = a * d - b * c
    return m * diff * diff / denom


def measure_vector(counts: ContingencyCounts, delta: float = DEFAULT_DELTA) -> MeasureVector:
    return MeasureVector(
        support=support(counts),
        confidence=confidence(counts),
        lift=lift(counts),
        hyper_lift=hyper_lift(counts, delta),
        hyper_confidence=hyper_confidence(counts),
        hyper_confidence_sub=hyper_confidence_sub(counts),
        chi_square=chi_square(counts),
        fisher_p_value=fisher_p_value(counts),
        delta=delta,
    )


def measure(name: str, counts: ContingencyCounts, delta: float = DEFAULT_DELTA) -> float | None:
    name = canonical_name(name)
    if name == "hyper_lift":
        return hyper_lift(counts, delta)
    return globals()[name](counts)


# -- vectorized ---------------------------------------------------------------

def _as_i64(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64))


def validate_arrays(cX, cY, cXY, m) -> None:
    cX, cY, cXY, m = (np.asarray(a) for a in (cX, cY, cXY, m))
    bad = ((m < 0) | (cX < 0) | (cX > m) | (cY < 0) | (cY > m)
           | (cXY > np.minimum(cX, cY)) | (cXY < np.maximum(0, cX + cY - m)))
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise ValueError(f"invalid contingency counts at row {k}: "
                         f"cX={cX[k]}, cY={cY[k]}, cXY={cXY[k]}, m={m[k]}")


def compute(names, cX, cY, cXY, m, delta: float = DEFAULT_DELTA) -> dict[str, np.ndarray]:
    """Evaluate several measures over parallel count arrays; NaN marks undefined."""
    cX, cY, cXY = _as_i64(cX), _as_i64(cY), _as_i64(cXY)
    m = _as_i64(np.broadcast_to(m, cX.shape))
    validate_arrays(cX, cY, cXY, m)
    fx, fy, fxy, fm = (a.astype(np.float64) for a in (cX, cY, cXY, m))
    out: dict[str, np.ndarray] = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        for raw in names:
            name = canonical_name(raw)
            if name == "support":
                v = np.where(m > 0, fxy / fm, np.nan)
            elif name == "confidence":
                v = np.where(cX > 0, fxy / fx, np.nan)
            elif name == "lift":
                v = np.where((cX > 0) & (cY > 0), fxy * fm / (fx * fy), np.nan)
            elif name == "hyper_lift":
                _check_delta(delta)
                q = _core.batch_quantile(float(delta), cX, cY, m)
                v = np.where(q > 0, fxy / q, np.where(cXY > 0, np.inf, np.nan))
            elif name == "hyper_confidence":
                v = _core.batch_cdf(cXY - 1, cX, cY, m)
            elif name == "hyper_confidence_sub":
                v = _core.batch_sf(cXY, cX, cY, m)
            elif name == "fisher_p_value":
                v = _core.batch_sf(cXY - 1, cX, cY, m)
            else:
                denom = fx * fy * (fm - fx) * (fm - fy)
                diff = fxy * (fm - fx - fy + fxy) - (fx - fxy) * (fy - fxy)
                v = np.where(denom > 0, fm * diff * diff / denom, np.nan)
            out[name] = np.asarray(v, dtype=np.float64)
    return out
