"""Independence model for transaction data and association-free null databases.

Transactions arrive as a homogeneous Poisson process with intensity theta
over an interval of length t; each transaction contains item i
independently with probability p_i. Item counts are then marginally
Poisson(lambda_i) with lambda_i = p_i * theta * t.

Random streams come from numpy's PCG64 bit generator seeded with the
caller's 64-bit seed, so a seed and a model fix the output exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .txdb import ItemCatalog, TransactionDatabase

_MAX_SEED = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class IndependenceModel:
    theta: float
    t: float
    lam: tuple[float, ...]
    catalog: ItemCatalog

    def __post_init__(self):
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValueError(f"t must be positive, got {self.t}")
        object.__setattr__(self, "lam", tuple(float(x) for x in self.lam))
        if len(self.lam) != len(self.catalog):
            raise ValueError("one rate per catalog item is required")
        if any(not (x >= 0) for x in self.lam):
            raise ValueError("item rates must be non-negative")
        p = self.p
        if np.any(p > 1.0):
            bad = int(np.argmax(p))
            raise ValueError(f"item {self.catalog.labels[bad]!r} has success probability {p[bad]} > 1")

    @property
    def expected_transactions(self) -> float:
        return self.theta * self.t

    @property
    def p(self) -> np.ndarray:
        """Per-item success probabilities lambda_i / (theta t)."""
        return np.asarray(self.lam, dtype=np.float64) / (self.theta * self.t)

    def to_json(self) -> dict:
        return {"theta": self.theta, "t": self.t, "lambda": list(self.lam),
                "labels": list(self.catalog.labels)}

    @classmethod
    def from_json(cls, doc: dict) -> IndependenceModel:
        return cls(float(doc["theta"]), float(doc["t"]), tuple(doc["lambda"]),
                   ItemCatalog(tuple(doc["labels"])))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> IndependenceModel:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def fit(db: TransactionDatabase, t: float) -> IndependenceModel:
    """theta = m / t, lambda_i = observed count c_i."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if db.m == 0:
        raise ValueError("cannot fit a model to an empty database")
    return IndependenceModel(db.m / t, float(t), tuple(float(c) for c in db.item_counts), db.catalog)


def poisson_pmf(k: int, mu: float) -> float:
    """e^-mu mu^k / k!, evaluated in log space."""
    if k < 0 or mu < 0:
        raise ValueError("poisson_pmf needs k >= 0 and mu >= 0")
    if mu == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(mu) - mu - math.lgamma(k + 1))


def _column_rows(rng: np.random.Generator, m: int, p: float) -> np.ndarray:
    # positions of successes in m Bernoulli(p) trials via geometric gaps
    if p <= 0.0 or m == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(m, dtype=np.int64)
    expected = m * p
    chunk = int(expected + 6.0 * math.sqrt(expected) + 16)
    parts = []
    pos = -1
    while True:
        gaps = rng.geometric(p, size=chunk)
        rows = pos + np.cumsum(gaps)
        if rows[-1] >= m:
            parts.append(rows[rows < m])
            break
        parts.append(rows)
        pos = int(rows[-1])
    return np.concatenate(parts).astype(np.int64)


def simulate(model: IndependenceModel, seed: int) -> TransactionDatabase:
    """Draw m ~ Poisson(theta t), then each item's rows as independent Bernoulli(p_i) trials.

    Work is proportional to the number of item occurrences, not to m * n.
    """
    p = model.p
    if np.any(p > 1.0):
        raise ValueError("model has a success probability above 1")
    rng = make_rng(seed)
    m = int(rng.poisson(model.expected_transactions))
    cols = []
    for i, pi in enumerate(p):
        rows = _column_rows(rng, m, float(pi))
        cols.append((rows, np.full(rows.size, i, dtype=np.int64)))
    return _from_columns(model.catalog, m, cols)


def _from_columns(catalog: ItemCatalog, m: int, cols) -> TransactionDatabase:
    if cols:
        rows = np.concatenate([c[0] for c in cols])
        items = np.concatenate([c[1] for c in cols])
    else:
        rows = items = np.empty(0, dtype=np.int64)
    order = np.lexsort((items, rows))
    counts = np.bincount(rows, minlength=m) if m else np.zeros(0, dtype=np.int64)
    indptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    return TransactionDatabase(catalog, indptr, items[order])
