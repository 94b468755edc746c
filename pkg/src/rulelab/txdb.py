"""Transaction databases as immutable sparse binary incidence structures.

A database keeps both layouts: rows (transaction -> sorted item ids, CSR)
and columns (item -> sorted transaction ids). Counting an itemset is an
intersection of its items' tid-lists, shortest first.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _core

Itemset = tuple[int, ...]

_SPLIT = re.compile(r"[,\s]+")


def make_itemset(items: Iterable[int]) -> Itemset:
    """Sorted, duplicate-free tuple of item ids."""
    return tuple(sorted(set(int(i) for i in items)))


@dataclass(frozen=True)
class ItemCatalog:
    """Ordered item labels with a label -> dense id index."""

    labels: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {label: i for i, label in enumerate(self.labels)}
        if len(index) != len(self.labels):
            raise ValueError("duplicate item labels in catalog")
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.labels)

    def id_of(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise ValueError(f"unknown item label {label!r}") from None

    def label_of(self, item: int) -> str:
        return self.labels[item]

    def save(self, path) -> None:
        Path(path).write_text("".join(f"{lab}\n" for lab in self.labels), encoding="utf-8")

    @classmethod
    def load(cls, path) -> ItemCatalog:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(tuple(line.strip() for line in lines if line.strip()))


class TransactionDatabase:
    """Immutable transaction database over an :class:`ItemCatalog`.

    Parameters
    ----------
    catalog : ItemCatalog
    indptr, indices : array_like
        CSR layout: transaction ``t`` holds ``indices[indptr[t]:indptr[t+1]]``,
        sorted and duplicate-free.
    """

    __slots__ = ("catalog", "m", "item_counts", "_indptr", "_indices", "_tids")

    def __init__(self, catalog: ItemCatalog, indptr, indices):
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        n = len(catalog)
        if indptr.ndim != 1 or indptr.size < 1 or indptr[0] != 0 or indptr[-1] != indices.size:
            raise ValueError("malformed row pointer array")
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise ValueError("item id out of catalog range")
        m = indptr.size - 1
        rows = np.repeat(np.arange(m, dtype=np.int64), np.diff(indptr))
        if indices.size > 1:
            same_row = rows[1:] == rows[:-1]
            if np.any(indices[1:][same_row] <= indices[:-1][same_row]):
                raise ValueError("items within a transaction must be sorted and unique")
        indptr.setflags(write=False)
        indices.setflags(write=False)
        self.catalog = catalog
        self.m = int(m)
        self._indptr = indptr
        self._indices = indices
        counts = np.bincount(indices, minlength=n).astype(np.int64)
        counts.setflags(write=False)
        self.item_counts = counts
        # stable sort by item keeps tids ascending within each column
        order = np.argsort(indices, kind="stable")
        col_tids = rows[order]
        bounds = np.concatenate(([0], np.cumsum(counts)))
        tids = []
        for i in range(n):
            t = col_tids[bounds[i]:bounds[i + 1]]
            t.setflags(write=False)
            tids.append(t)
        self._tids = tuple(tids)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_id_rows(cls, catalog: ItemCatalog, rows: Iterable[Iterable[int]]) -> TransactionDatabase:
        indptr = [0]
        indices: list[int] = []
        for row in rows:
            items = make_itemset(row)
            indices.extend(items)
            indptr.append(len(indices))
        return cls(catalog, indptr, indices)

    @classmethod
    def from_label_rows(cls, rows: Iterable[Iterable[str]],
                        catalog: ItemCatalog | None = None) -> TransactionDatabase:
        """Build from label lists; a new catalog follows first appearance."""
        if catalog is not None:
            id_rows = [[catalog.id_of(lab) for lab in row] for row in rows]
            return cls.from_id_rows(catalog, id_rows)
        index: dict[str, int] = {}
        id_rows = []
        for row in rows:
            ids = []
            for lab in row:
                if lab not in index:
                    index[lab] = len(index)
                ids.append(index[lab])
            id_rows.append(ids)
        return cls.from_id_rows(ItemCatalog(tuple(index)), id_rows)

    # -- access ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.catalog)

    @property
    def indptr(self) -> np.ndarray:
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    def __len__(self) -> int:
        return self.m

    def transaction(self, t: int) -> Itemset:
        return tuple(int(i) for i in self._indices[self._indptr[t]:self._indptr[t + 1]])

    @property
    def transactions(self) -> list[Itemset]:
        return [self.transaction(t) for t in range(self.m)]

    def tids(self, item: int) -> np.ndarray:
        """Sorted ids of the transactions containing ``item``."""
        self._check(item)
        return self._tids[item]

    def transaction_sizes(self) -> np.ndarray:
        return np.diff(self._indptr)

    def _check(self, item: int) -> None:
        if not 0 <= item < self.n:
            raise ValueError(f"invalid item id {item} (catalog has {self.n} items)")

    def cover(self, itemset: Sequence[int]) -> np.ndarray | None:
        """Tid-list of ``itemset``; ``None`` stands for all transactions (empty itemset)."""
        items = make_itemset(itemset)
        for i in items:
            self._check(i)
        if not items:
            return None
        lists = sorted((self._tids[i] for i in items), key=len)
        acc = lists[0]
        for other in lists[1:]:
            if acc.size == 0:
                break
            acc = _core.intersect(acc, other)
        return acc

    def __eq__(self, other):
        if not isinstance(other, TransactionDatabase):
            return NotImplemented
        return (self.catalog.labels == other.catalog.labels
                and np.array_equal(self._indptr, other._indptr)
                and np.array_equal(self._indices, other._indices))

    def __hash__(self):
        return hash((self.catalog.labels, self.m, self._indices.tobytes()))

    def __repr__(self):
        return f"TransactionDatabase(m={self.m}, n={self.n}, nnz={self._indices.size})"


def count(db: TransactionDatabase, itemset: Sequence[int]) -> int:
    """Number of transactions containing every item of ``itemset``."""
    cov = db.cover(itemset)
    return db.m if cov is None else int(cov.size)


def support(db: TransactionDatabase, itemset: Sequence[int]) -> float:
    if db.m == 0:
        raise ValueError("support is undefined on an empty database")
    return count(db, itemset) / db.m


def items_by_support(db: TransactionDatabase) -> list[int]:
    """Item ids by decreasing count, ties broken by label."""
    return sorted(range(db.n), key=lambda i: (-int(db.item_counts[i]), db.catalog.labels[i]))


def summary(db: TransactionDatabase) -> dict:
    """Database characteristics: size, transaction length statistics, distinct items."""
    sizes = db.transaction_sizes()
    return {
        "transactions": db.m,
        "avg_size": float(sizes.mean()) if db.m else 0.0,
        "median_size": float(np.median(sizes)) if db.m else 0.0,
        "distinct_items": int(np.count_nonzero(db.item_counts)),
        "catalog_items": db.n,
    }


# -- basket files -------------------------------------------------------

def parse_basket_line(line: str) -> list[str] | None:
    """Labels of one basket line, or ``None`` for a blank line.

    A line holding only separators (for example ``,``) is an empty transaction.
    """
    stripped = line.strip()
    if not stripped:
        return None
    labels = [tok for tok in _SPLIT.split(stripped) if tok]
    seen = dict.fromkeys(labels)
    return list(seen)


def load_basket(path, catalog: ItemCatalog | None = None) -> TransactionDatabase:
    """Read a basket file: one transaction per line, labels split by commas or whitespace."""
    text = Path(path).read_text(encoding="utf-8")
    rows = []
    for line in text.splitlines():
        labels = parse_basket_line(line)
        if labels is not None:
            rows.append(labels)
    if not rows:
        raise ValueError(f"{path}: no transactions")
    return TransactionDatabase.from_label_rows(rows, catalog)


def format_basket(db: TransactionDatabase) -> str:
    labels = db.catalog.labels
    lines = []
    for t in range(db.m):
        items = db._indices[db._indptr[t]:db._indptr[t + 1]]
        lines.append(",".join(labels[i] for i in items) if items.size else ",")
    return "\n".join(lines) + "\n"


def save_basket(db: TransactionDatabase, path) -> None:
    """Write in basket format; empty transactions become a lone ``,``."""
    for lab in db.catalog.labels:
        if _SPLIT.search(lab) or not lab:
            raise ValueError(f"label {lab!r} cannot be written to a basket file")
    Path(path).write_text(format_basket(db), encoding="utf-8")
