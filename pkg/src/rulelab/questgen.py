"""Quest-style synthetic transactions with a logged set of generating patterns.

Follows the Agrawal-Srikant market-basket generator:

* ``L`` patterns; sizes 1 + Poisson(I - 1); consecutive patterns share a
  fraction of items drawn from an exponential with mean ``correlation``;
  fresh items are drawn by item popularity.
* pattern weights ~ Exp(1), normalized; corruption level per pattern
  ~ Normal(corruption_mean, corruption_sd) clamped to [0, 1).
* transaction sizes ~ Poisson(T); a transaction is filled with patterns
  picked by weight, each item of a picked pattern dropped independently
  with the pattern's corruption level. A pattern that overflows the size
  budget is kept anyway with probability ``overflow_keep``, otherwise it
  opens the next transaction.

Every pattern is logged so rules can be scored against ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .simulate import make_rng
from .txdb import ItemCatalog, Itemset, TransactionDatabase

_ITEM_WEIGHTS = ("exponential", "uniform")
# consecutive picks adding nothing before a transaction is closed short
_MAX_STALL = 200


@dataclass(frozen=True)
class GeneratorConfig:
    n_transactions: int = 100_000
    avg_transaction_size: float = 10.0
    avg_pattern_size: float = 4.0
    n_patterns: int = 2000
    n_items: int = 1000
    corruption_mean: float = 0.5
    seed: int = 0
    corruption_sd: float = 0.1
    correlation: float = 0.5
    overflow_keep: float = 0.5
    item_weights: str = "exponential"

    def __post_init__(self):
        if self.n_transactions < 1:
            raise ValueError("n_transactions must be >= 1")
        if self.avg_transaction_size < 1:
            raise ValueError("avg_transaction_size must be >= 1")
        if self.avg_pattern_size < 1:
            raise ValueError("avg_pattern_size must be >= 1")
        if self.n_patterns < 1:
            raise ValueError("n_patterns must be >= 1")
        if self.n_items < self.avg_pattern_size:
            raise ValueError("n_items must be >= avg_pattern_size")
        if not 0.0 <= self.corruption_mean < 1.0:
            raise ValueError("corruption_mean must lie in [0, 1)")
        if self.corruption_sd < 0 or self.correlation < 0:
            raise ValueError("corruption_sd and correlation must be non-negative")
        if not 0.0 <= self.overflow_keep <= 1.0:
            raise ValueError("overflow_keep must lie in [0, 1]")
        if self.item_weights not in _ITEM_WEIGHTS:
            raise ValueError(f"item_weights must be one of {_ITEM_WEIGHTS}")


@dataclass(frozen=True)
class Pattern:
    items: Itemset
    weight: float
    corruption: float


@dataclass(frozen=True)
class PatternLog:
    patterns: tuple[Pattern, ...]
    _by_item: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_item: dict[int, set[int]] = {}
        for k, pat in enumerate(self.patterns):
            if not pat.items:
                raise ValueError("patterns must be non-empty")
            for i in pat.items:
                by_item.setdefault(i, set()).add(k)
        object.__setattr__(self, "_by_item", by_item)

    def __len__(self) -> int:
        return len(self.patterns)

    def covers(self, items) -> bool:
        """True iff some pattern contains all of ``items``."""
        items = list(items)
        if not items:
            return bool(self.patterns)
        sets = sorted((self._by_item.get(i, set()) for i in items), key=len)
        acc = sets[0]
        for s in sets[1:]:
            if not acc:
                break
            acc = acc & s
        return bool(acc)

    def to_json(self) -> list:
        return [{"items": list(p.items), "weight": p.weight, "corruption": p.corruption}
                for p in self.patterns]

    @classmethod
    def from_json(cls, doc: list) -> PatternLog:
        return cls(tuple(Pattern(tuple(sorted(int(i) for i in d["items"])), float(d["weight"]),
                                 float(d["corruption"])) for d in doc))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> PatternLog:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def is_covered(rule, log: PatternLog, catalog: ItemCatalog | None = None) -> bool:
    """Whether antecedent and consequent together lie inside one logged pattern.

    Rule item ids are generator item ids, or catalog ids whose labels are the
    decimal generator ids when ``catalog`` is given (as :func:`generate` and
    the basket files it writes produce).
    """
    items = rule.antecedent + rule.consequent
    if catalog is not None:
        items = tuple(int(catalog.labels[i]) for i in items)
    return log.covers(items)


class _Stream:
    """Buffered draws so the fill loop does not call the generator per item."""

    def __init__(self, rng: np.random.Generator, weights: np.ndarray, size: int = 1 << 16):
        self._rng = rng
        self._cum = np.cumsum(weights)
        self._cum /= self._cum[-1]
        self._size = size
        self._u = np.empty(0)
        self._ui = 0
        self._pick = np.empty(0, dtype=np.int64)
        self._pi = 0

    def uniforms(self, k: int) -> np.ndarray:
        if self._ui + k > self._u.size:
            self._u = self._rng.random(max(self._size, k))
            self._ui = 0
        out = self._u[self._ui:self._ui + k]
        self._ui += k
        return out

    def pattern(self) -> int:
        if self._pi >= self._pick.size:
            u = self._rng.random(self._size)
            self._pick = np.minimum(np.searchsorted(self._cum, u, side="right"), self._cum.size - 1)
            self._pi = 0
        k = int(self._pick[self._pi])
        self._pi += 1
        return k


def _make_patterns(cfg: GeneratorConfig, rng: np.random.Generator) -> PatternLog:
    n = cfg.n_items
    if cfg.item_weights == "exponential":
        pop = rng.exponential(1.0, size=n)
    else:
        pop = np.ones(n)
    pop_cum = np.cumsum(pop)
    pop_cum /= pop_cum[-1]

    def fresh(k, exclude):
        chosen: list[int] = []
        taken = set(exclude)
        while len(chosen) < k:
            u = rng.random(2 * (k - len(chosen)) + 4)
            for i in np.minimum(np.searchsorted(pop_cum, u, side="right"), n - 1):
                i = int(i)
                if i not in taken:
                    taken.add(i)
                    chosen.append(i)
                    if len(chosen) == k:
                        break
        return chosen

    sizes = 1 + rng.poisson(cfg.avg_pattern_size - 1.0, size=cfg.n_patterns)
    sizes = np.minimum(sizes, n)
    weights = rng.exponential(1.0, size=cfg.n_patterns)
    weights /= weights.sum()
    corr = np.clip(rng.normal(cfg.corruption_mean, cfg.corruption_sd, size=cfg.n_patterns),
                   0.0, np.nextafter(1.0, 0.0))
    patterns = []
    prev: list[int] = []
    for k in range(cfg.n_patterns):
        size = int(sizes[k])
        reused: list[int] = []
        if prev and cfg.correlation > 0:
            frac = min(1.0, rng.exponential(cfg.correlation))
            n_reuse = min(int(frac * size + 0.5), len(prev), size)
            if n_reuse:
                reused = [int(i) for i in rng.choice(prev, size=n_reuse, replace=False)]
        items = reused + fresh(size - len(reused), reused)
        prev = items
        patterns.append(Pattern(tuple(sorted(items)), float(weights[k]), float(corr[k])))
    return PatternLog(tuple(patterns))


def generate(cfg: GeneratorConfig) -> tuple[TransactionDatabase, PatternLog]:
    """Generate ``cfg.n_transactions`` transactions and the patterns behind them.

    The database catalog lists the items that occur, in order of first
    appearance, labelled by their decimal generator id; the log uses
    generator ids.
    """
    rng = make_rng(cfg.seed)
    log = _make_patterns(cfg, rng)
    pats = [np.asarray(p.items, dtype=np.int64) for p in log.patterns]
    levels = [p.corruption for p in log.patterns]
    stream = _Stream(rng, np.array([p.weight for p in log.patterns]))
    budgets = rng.poisson(cfg.avg_transaction_size, size=cfg.n_transactions)
    keep_p = cfg.overflow_keep

    rows: list[list[int]] = []
    carried = -1
    for size in budgets:
        size = int(size)
        tx: set[int] = set()
        stalled = 0
        while len(tx) < size and stalled < _MAX_STALL:
            if carried >= 0:
                k, carried = carried, -1
            else:
                k = stream.pattern()
            items = pats[k]
            kept = items[stream.uniforms(items.size) >= levels[k]]
            if kept.size == 0:
                stalled += 1
                continue
            if tx and len(tx) + kept.size > size:
                if stream.uniforms(1)[0] < keep_p:
                    tx.update(kept.tolist())
                else:
                    carried = k
                break
            before = len(tx)
            tx.update(kept.tolist())
            stalled = stalled + 1 if len(tx) == before else 0
        rows.append(sorted(tx))

    index: dict[int, int] = {}
    id_rows = []
    for row in rows:
        ids = []
        for g in row:
            if g not in index:
                index[g] = len(index)
            ids.append(index[g])
        id_rows.append(ids)
    catalog = ItemCatalog(tuple(str(g) for g in index))
    return TransactionDatabase.from_id_rows(catalog, id_rows), log
