"""Macro-classes over map units and the tables built from them.

Three ways to group units: connected components (disconnected strings),
rays plus center (stars), and Ward agglomeration of the code-vectors (any
map, used for grids).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from ._io import csv_text, fmt6
from .dataset import SampleTable
from .quality import rqe_macro
from .som import CodebookMap
from .topology import MacroPartition, MapTopology, components

__all__ = [
    "MacroPartition",
    "Merge",
    "MergeTrace",
    "macro_from_components",
    "macro_from_star",
    "hac",
    "hac_curve",
    "ClassProfile",
    "class_means",
    "CrossTab",
    "cross_tab",
    "SliceDistribution",
    "slice_distribution",
]


def macro_from_components(topo: MapTopology) -> MacroPartition:
    return components(topo)


def macro_from_star(topo: MapTopology) -> MacroPartition:
    """One class per ray (class r for ray r) and a last class for the center."""
    if topo.kind != "star":
        raise ValueError("not a star topology")
    n_rays = topo.shape[0]
    labels = [n_rays + 1] + [topo.ray(u) for u in range(2, topo.unit_count + 1)]
    return MacroPartition(np.array(labels), "star_rays")


class Merge(NamedTuple):
    step: int
    class_a: int
    class_b: int
    cost: float


@dataclass(frozen=True)
class MergeTrace:
    """Full Ward dendrogram over K units.

    A cluster is named by its smallest member unit id; ``class_a < class_b``
    and the merged cluster keeps the name ``class_a``. ``cost`` is the
    increase in within-cluster sum of squares caused by the merge.
    """

    unit_count: int
    merges: tuple[Merge, ...]
    rqe_macro_curve: tuple[tuple[int, float], ...] = field(default=())

    def partition_at(self, n_classes: int) -> MacroPartition:
        k = self.unit_count
        if not 1 <= n_classes <= k:
            raise ValueError(f"number of classes must lie in 1..{k}, got {n_classes}")
        root = list(range(1, k + 1))
        for m in self.merges[: k - n_classes]:
            root = [m.class_a if r == m.class_b else r for r in root]
        # relabel 1..S in order of smallest member unit
        order = {r: i + 1 for i, r in enumerate(sorted(set(root)))}
        return MacroPartition(np.array([order[r] for r in root]), f"hac({n_classes})")

    def partitions(self):
        """Partitions for S = K, K-1, ..., 1."""
        for s in range(self.unit_count, 0, -1):
            yield s, self.partition_at(s)


def _ward_trace(vectors: np.ndarray) -> MergeTrace:
    k = len(vectors)
    members = {u: [u] for u in range(1, k + 1)}
    merges = []
    for step in range(1, k):
        names = sorted(members)
        cent = np.array([vectors[np.array(members[n]) - 1].mean(axis=0) for n in names])
        size = np.array([len(members[n]) for n in names], dtype=float)
        diff = cent[:, None, :] - cent[None, :, :]
        sq = np.einsum("abd,abd->ab", diff, diff)
        cost = size[:, None] * size[None, :] / (size[:, None] + size[None, :]) * sq
        cost[np.tril_indices(len(names))] = np.inf
        # row-major argmin over the strict upper triangle is the
        # lexicographically smallest (a, b) among minimal costs
        i, j = np.unravel_index(np.argmin(cost), cost.shape)
        a, b = names[i], names[j]
        merges.append(Merge(step, a, b, float(cost[i, j])))
        members[a] = sorted(members[a] + members.pop(b))
    return MergeTrace(k, tuple(merges))


def hac(som, n_classes: int) -> tuple[MacroPartition, MergeTrace]:
    """Ward agglomeration of the code-vectors, cut at ``n_classes``.

    ``som`` is a :class:`CodebookMap` or a K x D array. Units are unweighted.
    """
    vectors = som.codebook if isinstance(som, CodebookMap) else np.asarray(som, dtype=float)
    k = len(vectors)
    if not 1 <= n_classes <= k:
        raise ValueError(f"number of classes must lie in 1..{k}, got {n_classes}")
    trace = _ward_trace(vectors)
    return trace.partition_at(n_classes), trace


def hac_curve(trace: MergeTrace, table, labels) -> MergeTrace:
    """Fill the trace's RQE_macro curve for S = 1..K."""
    curve = tuple(sorted((s, rqe_macro(table, labels, p).ratio) for s, p in trace.partitions()))
    return replace(trace, rqe_macro_curve=curve)


def _check_labels(table: SampleTable, labels) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (len(table),):
        raise ValueError(f"need one label per row: {labels.shape} labels for {len(table)} rows")
    return labels


@dataclass(frozen=True)
class ClassProfile:
    """Per-class feature means. ``means[s-1]`` is NaN for an empty class."""

    feature_names: tuple[str, ...]
    sizes: np.ndarray
    means: np.ndarray
    overall: np.ndarray

    @property
    def empty_classes(self) -> list[int]:
        return [s + 1 for s, n in enumerate(self.sizes) if n == 0]

    def row_max(self) -> np.ndarray:
        """1-indexed class with the largest mean for each feature."""
        filled = np.where(np.isnan(self.means), -np.inf, self.means)
        return np.argmax(filled, axis=0) + 1

    def to_text(self) -> str:
        s = len(self.sizes)
        header = ["feature", *(f"class_{c}" for c in range(1, s + 1)), "whole_sample", "max_class"]
        rows = [["size", *(int(n) for n in self.sizes), int(self.sizes.sum()), ""]]
        for j, name in enumerate(self.feature_names):
            cells = ["" if np.isnan(v) else fmt6(v) for v in self.means[:, j]]
            rows.append([name, *cells, fmt6(self.overall[j]), int(self.row_max()[j])])
        return csv_text(header, rows)


def class_means(
    table: SampleTable,
    labels,
    partition: MacroPartition,
    raw: SampleTable | None = None,
) -> ClassProfile:
    """Class means per feature, on ``raw`` (same rows, original units) if given."""
    labels = _check_labels(table, labels)
    source = table if raw is None else raw
    if len(source) != len(table):
        raise ValueError("raw table must hold the same rows as the labelled table")
    classes = partition.classes_of(labels)
    s = partition.n_classes
    x = source.features
    sizes = np.bincount(classes, minlength=s + 1)[1:]
    means = np.full((s, x.shape[1]), np.nan)
    for c in range(1, s + 1):
        if sizes[c - 1]:
            means[c - 1] = x[classes == c].mean(axis=0)
    return ClassProfile(source.schema.names, sizes, means, x.mean(axis=0))


@dataclass(frozen=True)
class CrossTab:
    row_labels: tuple
    col_labels: tuple
    counts: np.ndarray

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def cell(self, a, b) -> int:
        return int(self.counts[self.row_labels.index(a), self.col_labels.index(b)])

    def with_totals(self) -> np.ndarray:
        body = np.column_stack([self.counts, self.row_totals])
        return np.vstack([body, np.append(self.col_totals, self.total)])

    def transpose(self) -> "CrossTab":
        return CrossTab(self.col_labels, self.row_labels, self.counts.T.copy())

    def to_text(self) -> str:
        full = self.with_totals()
        header = ["a\\b", *self.col_labels, "total"]
        rows = [[lab, *full[i]] for i, lab in enumerate(self.row_labels)]
        rows.append(["total", *full[-1]])
        return csv_text(header, rows)


def cross_tab(labels_a: Sequence, labels_b: Sequence) -> CrossTab:
    """Contingency counts of two labelings of the same rows."""
    a, b = list(labels_a), list(labels_b)
    if len(a) != len(b):
        raise ValueError(f"label lists differ in length: {len(a)} vs {len(b)}")
    rows, cols = tuple(sorted(set(a))), tuple(sorted(set(b)))
    ri = {v: i for i, v in enumerate(rows)}
    ci = {v: i for i, v in enumerate(cols)}
    counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for x, y in zip(a, b):
        counts[ri[x], ci[y]] += 1
    return CrossTab(rows, cols, counts)


@dataclass(frozen=True)
class SliceDistribution:
    """Percent of each attribute value's rows falling in classes ``1..S``."""

    attribute: str
    values: tuple
    percent: np.ndarray
    counts: np.ndarray

    def to_text(self) -> str:
        s = self.percent.shape[1]
        header = [self.attribute, *(f"class_{c}" for c in range(1, s + 1)), "n"]
        rows = [[v, *(fmt6(p) for p in self.percent[i]), int(self.counts[i].sum())]
                for i, v in enumerate(self.values)]
        return csv_text(header, rows)


def slice_distribution(
    labels, table: SampleTable, attribute: str, n_classes: int | None = None
) -> SliceDistribution:
    labels = _check_labels(table, labels)
    if attribute == "period":
        column = table.periods
    elif attribute in table.attributes:
        column = table.attributes[attribute]
    else:
        raise KeyError(f"attribute {attribute!r} not present in the table")
    s = n_classes or (int(labels.max()) if labels.size else 0)
    values = tuple(sorted(set(column.tolist()), key=str))
    counts = np.zeros((len(values), s), dtype=np.int64)
    for i, v in enumerate(values):
        counts[i] = np.bincount(labels[column == v], minlength=s + 1)[1:]
    percent = 100.0 * counts / counts.sum(axis=1, keepdims=True)
    return SliceDistribution(attribute, values, percent, counts)
