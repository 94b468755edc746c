"""Frequent itemsets by depth-first tid-list intersection, and rule generation."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _core
from .measures import DEFAULT_DELTA, ContingencyCounts, canonical_name, compute
from .txdb import ItemCatalog, Itemset, TransactionDatabase

RULE_COLUMNS = ("antecedent", "consequent", "cX", "cY", "cXY", "m")


@dataclass(frozen=True)
class FrequentItemset:
    itemset: Itemset
    count: int


@dataclass(frozen=True)
class Rule:
    antecedent: Itemset
    consequent: Itemset
    counts: ContingencyCounts

    def __post_init__(self):
        if not self.antecedent or not self.consequent:
            raise ValueError("rule sides must be non-empty")
        if set(self.antecedent) & set(self.consequent):
            raise ValueError("antecedent and consequent must be disjoint")

    @property
    def items(self) -> Itemset:
        return tuple(sorted(self.antecedent + self.consequent))


def min_count(min_support: float, m: int) -> int:
    """Smallest absolute count meeting ``min_support`` (count >= ceil(minSupport * m))."""
    if not 0.0 < min_support <= 1.0:
        raise ValueError(f"min_support must lie in (0, 1], got {min_support}")
    c = min_support * m
    # guard against 0.001 * 10000 = 10.000000000000002
    rc = round(c)
    if abs(c - rc) <= 1e-9 * max(1.0, c):
        return max(int(rc), 1)
    return max(math.ceil(c), 1)


def frequent_itemsets(db: TransactionDatabase, min_support: float) -> list[FrequentItemset]:
    """All itemsets with support >= ``min_support``, sorted by (size, items)."""
    minc = min_count(min_support, db.m)
    found: list[tuple[Itemset, int]] = []
    roots = [(i, db.tids(i)) for i in range(db.n) if db.item_counts[i] >= minc]
    # rarest first keeps equivalence classes small
    roots.sort(key=lambda it: (it[1].size, it[0]))
    _eclat((), roots, minc, found)
    out = [FrequentItemset(tuple(sorted(items)), c) for items, c in found]
    out.sort(key=lambda f: (len(f.itemset), f.itemset))
    return out


def _eclat(prefix, members, minc, out):
    intersect = _core.intersect
    for k, (i, ti) in enumerate(members):
        itemset = prefix + (i,)
        out.append((itemset, int(ti.size)))
        ext = []
        for j, tj in members[k + 1:]:
            t = intersect(ti, tj)
            if t.size >= minc:
                ext.append((j, t))
        if ext:
            _eclat(itemset, ext, minc, out)


def rules_single_consequent(db: TransactionDatabase,
                            frequent_sets: Sequence[FrequentItemset]) -> list[Rule]:
    """Rules Z - {y} => {y} for every frequent Z with at least two items and every y in Z."""
    lookup = {f.itemset: f.count for f in frequent_sets}
    m = db.m
    rules = []
    for f in frequent_sets:
        z = f.itemset
        if len(z) < 2:
            continue
        for k, y in enumerate(z):
            x = z[:k] + z[k + 1:]
            cx = lookup.get(x)
            if cx is None:
                raise ValueError(f"frequent set collection is not downward closed: {x} missing")
            cy = int(db.item_counts[y])
            rules.append(Rule(x, (y,), ContingencyCounts(cx, cy, f.count, m)))
    return rules


def mine_rules(db: TransactionDatabase, min_support: float) -> list[Rule]:
    return rules_single_consequent(db, frequent_itemsets(db, min_support))


def cooccurrence(db: TransactionDatabase, block: int = 4096) -> np.ndarray:
    """Dense n x n matrix of pair counts (diagonal holds item counts)."""
    n = db.n
    out = np.zeros((n, n), dtype=np.float64)
    indptr, indices = db.indptr, db.indices
    for start in range(0, db.m, block):
        stop = min(start + block, db.m)
        dense = np.zeros((stop - start, n), dtype=np.float64)
        lo, hi = indptr[start], indptr[stop]
        rows = np.repeat(np.arange(stop - start), np.diff(indptr[start:stop + 1]))
        dense[rows, indices[lo:hi]] = 1.0
        out += dense.T @ dense
    return np.rint(out).astype(np.int64)


def all_pair_rules(db: TransactionDatabase) -> list[Rule]:
    """Every ordered pair i => j (i != j) of items that occur, with no support floor."""
    co = cooccurrence(db)
    counts = db.item_counts
    present = [i for i in range(db.n) if counts[i] > 0]
    m = db.m
    rules = []
    for i in present:
        ci = int(counts[i])
        row = co[i]
        for j in present:
            if i != j:
                rules.append(Rule((i,), (j,), ContingencyCounts(ci, int(counts[j]), int(row[j]), m)))
    return rules


def count_arrays(rules: Sequence[Rule]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Parallel int64 arrays (cX, cY, cXY, m) for vectorized measures."""
    k = len(rules)
    cx = np.fromiter((r.counts.cX for r in rules), dtype=np.int64, count=k)
    cy = np.fromiter((r.counts.cY for r in rules), dtype=np.int64, count=k)
    cxy = np.fromiter((r.counts.cXY for r in rules), dtype=np.int64, count=k)
    m = np.fromiter((r.counts.m for r in rules), dtype=np.int64, count=k)
    return cx, cy, cxy, m


# -- CSV ----------------------------------------------------------------------

def format_value(v) -> str:
    """12 significant digits; undefined (None/NaN) is an empty field."""
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def _join(items: Iterable[int], catalog: ItemCatalog) -> str:
    labels = [catalog.labels[i] for i in items]
    for lab in labels:
        if "&" in lab:
            raise ValueError(f"label {lab!r} contains '&' and cannot be written")
    return "&".join(labels)


def write_rules_csv(rules: Sequence[Rule], catalog: ItemCatalog, out,
                    measures: Sequence[str] = (), delta: float = DEFAULT_DELTA) -> None:
    """Write rules with their counts and one column per requested measure.

    ``out`` is a path or a text stream.
    """
    names = [canonical_name(n) for n in measures]
    values = compute(names, *count_arrays(rules), delta=delta) if names and rules else {
        n: np.empty(0) for n in names}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(RULE_COLUMNS) + names)
    for k, r in enumerate(rules):
        c = r.counts
        row = [_join(r.antecedent, catalog), _join(r.consequent, catalog), c.cX, c.cY, c.cXY, c.m]
        row.extend(format_value(values[n][k]) for n in names)
        w.writerow(row)
    text = buf.getvalue()
    if hasattr(out, "write"):
        out.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def read_rules_csv(path) -> tuple[list[Rule], ItemCatalog]:
    """Read a rule CSV; the returned catalog numbers labels by first appearance."""
    index: dict[str, int] = {}

    def ids(field: str) -> Itemset:
        out = []
        for lab in field.split("&"):
            if lab not in index:
                index[lab] = len(index)
            out.append(index[lab])
        return tuple(sorted(out))

    rules = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RULE_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        for row in reader:
            counts = ContingencyCounts(int(row["cX"]), int(row["cY"]), int(row["cXY"]), int(row["m"]))
            rules.append(Rule(ids(row["antecedent"]), ids(row["consequent"]), counts))
    return rules, ItemCatalog(tuple(index))
