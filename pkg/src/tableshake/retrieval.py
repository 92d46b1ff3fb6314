"""Lexical table retrieval for the column-adding perturbation.

Tables are represented as tf-idf bags of terms over the header names
plus the first two rows, scored with cosine similarity. Tokenization
is fixed (lowercase, split on non-alphanumerics, drop tokens shorter
than 2 characters) so index and query sides always agree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import Table
from .rng import SplitMix64

_SPLIT = re.compile(r"[^a-z0-9]+")

DEFAULT_K = 3


def tokenize(text: str) -> list[str]:
    return [t for t in _SPLIT.split(text.lower()) if len(t) >= 2]


def table_terms(table: Table) -> list[str]:
    """Index/query text: header names plus the first two rows."""
    terms: list[str] = []
    for name in table.header:
        terms.extend(tokenize(name))
    for row in table.rows[:2]:
        for cell in row:
            terms.extend(tokenize(cell))
    return terms


@dataclass(frozen=True)
class TableIndex:
    tables: tuple[Table, ...]
    vocabulary: dict[str, int]
    idf: np.ndarray          # (vocab,)
    vectors: np.ndarray      # (docs, vocab), L2-normalized tf-idf

    def __len__(self) -> int:
        return len(self.tables)


def _idf(doc_count: int, df: np.ndarray) -> np.ndarray:
    # smooth idf: ln((1 + N) / (1 + df)) + 1, never zero or negative
    return np.log((1.0 + doc_count) / (1.0 + df)) + 1.0


def _vectorize(terms: Sequence[str], vocabulary: dict[str, int],
               idf: np.ndarray) -> np.ndarray:
    vec = np.zeros(len(vocabulary))
    for term in terms:
        idx = vocabulary.get(term)
        if idx is not None:
            vec[idx] += 1.0
    vec *= idf
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


def index_corpus(tables: Sequence[Table]) -> TableIndex:
    """Build an immutable tf-idf index; identical corpora produce
    identical scores."""
    if not tables:
        raise ValueError("empty corpus")
    docs = [table_terms(t) for t in tables]
    vocabulary: dict[str, int] = {}
    for doc in docs:
        for term in doc:
            if term not in vocabulary:
                vocabulary[term] = len(vocabulary)
    df = np.zeros(len(vocabulary))
    for doc in docs:
        for term in set(doc):
            df[vocabulary[term]] += 1.0
    idf = _idf(len(docs), df)
    vectors = np.stack([_vectorize(doc, vocabulary, idf) for doc in docs]) \
        if vocabulary else np.zeros((len(docs), 0))
    return TableIndex(tables=tuple(tables), vocabulary=vocabulary, idf=idf,
                      vectors=vectors)


def _same_table(a: Table, b: Table) -> bool:
    return a.header == b.header and a.rows == b.rows


def retrieve(index: TableIndex, query: Table,
             k: int = DEFAULT_K) -> list[tuple[Table, float]]:
    """Top-k corpus tables by cosine similarity, ties broken by corpus
    order. The query table itself is excluded when it appears in the
    corpus."""
    if k < 1:
        raise ValueError("k must be >= 1")
    query_vec = _vectorize(table_terms(query), index.vocabulary, index.idf)
    scores = index.vectors @ query_vec if index.vectors.size else \
        np.zeros(len(index.tables))
    ranked = sorted(range(len(index.tables)), key=lambda i: (-scores[i], i))
    out: list[tuple[Table, float]] = []
    for i in ranked:
        if _same_table(index.tables[i], query):
            continue
        out.append((index.tables[i], float(scores[i])))
        if len(out) == k:
            break
    return out


# --- column adding -----------------------------------------------------------

class NoInsertableColumn(ValueError):
    pass


def _cycle_to(values: Sequence[str], count: int) -> list[str]:
    """Pad or truncate by cycling; keeps cells domain-plausible when the
    candidate table is shorter than the host."""
    if count == 0:
        return []
    if not values:
        raise NoInsertableColumn("candidate column has no cells to cycle")
    return [values[i % len(values)] for i in range(count)]


def add_columns(table: Table, candidates: Sequence[Table], n: int,
                seed: int) -> tuple[Table, list[str]]:
    """Insert n (1 or 2) columns drawn from the candidate tables at
    seeded random positions. Cells cycle to the host row count. The
    host's own columns keep their relative order and values, so
    deleting the added columns reproduces the original table."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    taken = {h.lower() for h in table.header}
    pool: list[tuple[str, list[str]]] = []
    for cand in candidates:
        for idx, name in enumerate(cand.header):
            key = name.lower()
            if key in taken:
                continue
            if table.rows and not cand.rows:
                continue  # nothing to cycle into a non-empty host
            taken.add(key)  # first candidate occurrence of a name wins
            pool.append((name, cand.column(idx)))
    if not pool:
        raise NoInsertableColumn("no insertable column available")

    rng = SplitMix64(seed)
    count = min(n, len(pool))
    chosen: list[tuple[str, list[str]]] = []
    remaining = list(pool)
    for _ in range(count):
        chosen.append(remaining.pop(rng.below(len(remaining))))

    header = list(table.header)
    columns = [list(table.column(i)) for i in range(table.width)]
    added_names = []
    for name, cells in chosen:
        position = rng.below(len(header) + 1)
        header.insert(position, name)
        columns.insert(position, _cycle_to(cells, len(table.rows)))
        added_names.append(name)
    rows = [tuple(col[i] for col in columns) for i in range(len(table.rows))]
    return Table(header, rows, table.caption), added_names
