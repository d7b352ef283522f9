"""Relative quantization errors at unit, neighbourhood and macro-class level.

Every indicator is a sum of squared Euclidean distances divided by the total
sum of squares about the sample mean. Reductions go through ``math.fsum`` so
the result does not depend on summation order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._io import atomic_write
from .dataset import SampleTable
from .som import CodebookMap, _as_matrix, _sq_dists, assign
from .topology import MacroPartition

__all__ = [
    "QualityError",
    "Ratio",
    "QualityReport",
    "total_sum_of_squares",
    "rqe",
    "rqe_ext",
    "rqe_macro",
    "quality_report",
]

log = logging.getLogger(__name__)


class QualityError(ValueError):
    """Metric undefined for the given data (e.g. zero total variance)."""


class Ratio(NamedTuple):
    sc: float
    sc_total: float
    ratio: float


def _rows(table) -> np.ndarray:
    x = table.features if isinstance(table, SampleTable) else np.asarray(table, dtype=float)
    if x.ndim != 2 or len(x) == 0:
        raise QualityError("metrics need a non-empty table")
    return x


def total_sum_of_squares(table) -> float:
    x = _rows(table)
    centered = x - x.mean(axis=0)
    sc_total = math.fsum(np.einsum("nd,nd->n", centered, centered))
    if sc_total == 0:
        raise QualityError("total sum of squares is zero (all rows identical)")
    return sc_total


def _ratio(sc: float, sc_total: float) -> Ratio:
    return Ratio(sc, sc_total, sc / sc_total)


def rqe(som: CodebookMap, table) -> Ratio:
    """Sum of squared distances to the BMU code-vector, relative to total."""
    x = _as_matrix(_rows(table), som.dim)
    sc_total = total_sum_of_squares(x)
    d2 = _sq_dists(x, som.codebook)
    return _ratio(math.fsum(d2.min(axis=1)), sc_total)


def rqe_ext(som: CodebookMap, table) -> Ratio:
    """Mean squared distance to the BMU's lattice neighbours, summed over rows.

    A BMU without neighbours contributes its own quantization term.
    """
    x = _as_matrix(_rows(table), som.dim)
    sc_total = total_sum_of_squares(x)
    d2 = _sq_dists(x, som.codebook)
    c = np.argmin(d2, axis=1)
    adj = som.topology.adjacency.astype(float)
    deg = adj.sum(axis=1)
    own = d2[np.arange(len(x)), c]
    with np.errstate(invalid="ignore", divide="ignore"):
        nbr = (d2 * adj[c]).sum(axis=1) / deg[c]
    terms = np.where(deg[c] > 0, nbr, own)
    return _ratio(math.fsum(terms), sc_total)


def macro_means(x: np.ndarray, classes: np.ndarray, n_classes: int) -> np.ndarray:
    """Per-class means of ``x`` (NaN rows for empty classes)."""
    means = np.full((n_classes, x.shape[1]), np.nan)
    for s in range(1, n_classes + 1):
        members = classes == s
        if members.any():
            means[s - 1] = x[members].mean(axis=0)
    return means


def rqe_macro(table, labels, partition: MacroPartition) -> Ratio:
    """Squared distance of each row to the mean of its macro-class members."""
    x = _rows(table)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (len(x),):
        raise QualityError(f"need one label per row: {labels.shape} labels for {len(x)} rows")
    classes = partition.classes_of(labels)
    means = macro_means(x, classes, partition.n_classes)
    empty = [s + 1 for s in range(partition.n_classes) if np.isnan(means[s, 0])]
    if empty:
        log.warning("macro-classes without members: %s", empty)
    diff = x - means[classes - 1]
    return _ratio(math.fsum(np.einsum("nd,nd->n", diff, diff)), total_sum_of_squares(x))


@dataclass(frozen=True)
class QualityReport:
    sc_within: float
    sc_total: float
    sc_extended: float
    sc_macro: float | None = None

    def __post_init__(self):
        sums = [self.sc_within, self.sc_total, self.sc_extended]
        if self.sc_macro is not None:
            sums.append(self.sc_macro)
        if not all(math.isfinite(v) and v >= 0 for v in sums) or self.sc_total <= 0:
            raise QualityError("quality sums must be finite and non-negative")

    @property
    def rqe(self) -> float:
        return self.sc_within / self.sc_total

    @property
    def rqe_ext(self) -> float:
        return self.sc_extended / self.sc_total

    @property
    def rqe_macro(self) -> float | None:
        return None if self.sc_macro is None else self.sc_macro / self.sc_total

    def items(self) -> list[tuple[str, float]]:
        out = [
            ("sc_within", self.sc_within),
            ("sc_total", self.sc_total),
            ("sc_extended", self.sc_extended),
            ("rqe", self.rqe),
            ("rqe_ext", self.rqe_ext),
        ]
        if self.sc_macro is not None:
            out += [("sc_macro", self.sc_macro), ("rqe_macro", self.rqe_macro)]
        return out

    def to_text(self) -> str:
        return "".join(f"{k}={v:.6g}\n" for k, v in self.items())

    def write(self, path) -> None:
        atomic_write(path, self.to_text())


def quality_report(som: CodebookMap, table, partition: MacroPartition | None = None) -> QualityReport:
    within = rqe(som, table)
    ext = rqe_ext(som, table)
    sc_macro = None
    if partition is not None:
        sc_macro = rqe_macro(table, assign(som, table), partition).sc
    return QualityReport(within.sc, within.sc_total, ext.sc, sc_macro)
