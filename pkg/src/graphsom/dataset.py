"""Panel observation tables: loading, cleaning, standardization, synthesis.

A :class:`SampleTable` is column-oriented: one entry per (individual, time)
observation in each array. Feature cells that were empty in the source file
are stored as NaN and removed by :func:`clean`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ._io import atomic_write, csv_text

__all__ = [
    "DataError",
    "FeatureSchema",
    "SampleTable",
    "Standardization",
    "Rejection",
    "RejectionReport",
    "GaussianComponent",
    "SyntheticConfig",
    "PSID_SCHEMA",
    "load_samples",
    "write_samples",
    "clean",
    "standardize",
    "correlation_matrix",
    "generate_synthetic_panel",
    "five_cluster_config",
]

ROLES = ("id", "time", "period", "multiplier")


class DataError(ValueError):
    """Malformed or inconsistent observation data."""


@dataclass(frozen=True)
class FeatureSchema:
    names: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        if not names or any(not n for n in names):
            raise DataError("feature names must be non-empty")
        if len(set(names)) != len(names):
            raise DataError("feature names must be unique")
        bounds = tuple(self.bounds) or tuple((-math.inf, math.inf) for _ in names)
        if len(bounds) != len(names):
            raise DataError("one (min, max) bound per feature is required")
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        for name, (lo, hi) in zip(names, bounds):
            if lo > hi:
                raise DataError(f"bound for {name!r} has min > max")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "bounds", bounds)

    def __len__(self):
        return len(self.names)


# Eight quantitative labour-market variables and their admissible ranges.
PSID_SCHEMA = FeatureSchema(
    names=("nbhtrav", "nbstrav", "nbschom", "nbsret", "salhor", "nbex", "hortex", "anctrav"),
    bounds=((0, 112), (0, 52), (0, 52), (0, 52), (0, 83.85), (0, 5), (0, 1664), (0, 780)),
)


@dataclass(frozen=True)
class SampleTable:
    schema: FeatureSchema
    ids: np.ndarray
    times: np.ndarray
    periods: np.ndarray
    features: np.ndarray
    attributes: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.ids)
        feats = np.asarray(self.features, dtype=float).reshape(n, len(self.schema))
        ids = np.asarray(self.ids, dtype=object)
        times = np.asarray(self.times, dtype=np.int64)
        periods = np.asarray(self.periods, dtype=np.int64)
        if len(times) != n or len(periods) != n:
            raise DataError("ids, times and periods must have equal length")
        attrs = {k: np.asarray(v, dtype=object) for k, v in self.attributes.items()}
        for key, col in attrs.items():
            if len(col) != n:
                raise DataError(f"attribute {key!r} has {len(col)} values for {n} rows")
        for arr in (ids, times, periods, feats, *attrs.values()):
            arr.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "attributes", attrs)
        _check_unique_keys(ids, times)

    def __len__(self):
        return len(self.ids)

    @property
    def n_features(self) -> int:
        return len(self.schema)

    def take(self, rows) -> "SampleTable":
        """Sub-table of the given row indices (or boolean mask), order kept."""
        rows = np.asarray(rows)
        if rows.dtype == bool:
            rows = np.flatnonzero(rows)
        return SampleTable(
            self.schema,
            self.ids[rows],
            self.times[rows],
            self.periods[rows],
            self.features[rows],
            {k: v[rows] for k, v in self.attributes.items()},
        )

    def with_features(self, features) -> "SampleTable":
        return replace(self, features=np.asarray(features, dtype=float))


def _check_unique_keys(ids, times, row_numbers=None) -> None:
    seen: dict = {}
    for i, key in enumerate(zip(ids.tolist(), times.tolist())):
        if key in seen:
            rn = row_numbers if row_numbers is not None else range(1, len(ids) + 1)
            raise DataError(
                f"duplicate (individual, time) key {key} on rows {rn[seen[key]]} and {rn[i]}"
            )
        seen[key] = i


@dataclass(frozen=True)
class Standardization:
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        stds = np.asarray(self.stds, dtype=float)
        if means.shape != stds.shape or means.ndim != 1:
            raise DataError("means and stds must be vectors of equal length")
        if np.any(stds <= 0):
            raise DataError("standard deviations must be strictly positive")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)

    def apply(self, features) -> np.ndarray:
        return (np.asarray(features, dtype=float) - self.means) / self.stds

    def inverse(self, features) -> np.ndarray:
        return np.asarray(features, dtype=float) * self.stds + self.means

    def to_text(self, names: Sequence[str]) -> str:
        rows = [(n, repr(float(m)), repr(float(s))) for n, m, s in zip(names, self.means, self.stds)]
        return csv_text(("feature", "mean", "std"), rows)

    @classmethod
    def read(cls, path) -> "Standardization":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls([float(r["mean"]) for r in rows], [float(r["std"]) for r in rows])


@dataclass(frozen=True)
class Rejection:
    row_number: int
    reason: str
    feature: str
    value: float


@dataclass(frozen=True)
class RejectionReport:
    rejections: tuple[Rejection, ...] = ()

    def __len__(self):
        return len(self.rejections)

    def to_text(self) -> str:
        rows = [(r.row_number, r.reason, r.feature, "" if math.isnan(r.value) else repr(r.value))
                for r in self.rejections]
        return csv_text(("row_number", "reason", "feature", "value"), rows)


def _parse_float(cell: str, row_number: int, column: str) -> float:
    cell = cell.strip()
    if cell == "":
        return math.nan
    try:
        return float(cell)
    except ValueError:
        raise DataError(
            f"row {row_number}: cannot parse {cell!r} in column {column!r} as a number"
        ) from None


def _parse_int(cell: str, row_number: int, column: str) -> int:
    try:
        value = float(cell)
    except ValueError:
        value = math.nan
    if not math.isfinite(value) or value != int(value):
        raise DataError(f"row {row_number}: column {column!r} needs an integer, got {cell!r}")
    return int(value)


def load_samples(
    path,
    schema: FeatureSchema,
    column_map: Mapping[str, str] | None = None,
    scaled_features: Sequence[str] | None = None,
) -> SampleTable:
    """Read a comma-delimited observation file with a header row.

    ``column_map`` maps header names to roles: ``id``, ``time``, ``period``,
    ``multiplier``, ``attr:<key>`` or a schema feature name. Without a map,
    headers are matched by name (``id``, ``time``, ``period``, features) and
    any other column becomes a categorical attribute. Unmapped columns are
    ignored when a map is given.

    An optional ``multiplier`` column (a deflator) is applied at load to
    ``scaled_features``, or to every feature when that is None.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        body = list(reader)

    if column_map is None:
        column_map = {h: h for h in header if h in ROLES or h in schema.names}
        column_map.update({h: f"attr:{h}" for h in header if h not in column_map})
    role_to_col: dict[str, int] = {}
    for col, role in column_map.items():
        if col not in header:
            raise DataError(f"{path}: mapped column {col!r} not found in header")
        role_to_col[role] = header.index(col)
    for role in ("id", "time", "period", *schema.names):
        if role not in role_to_col:
            missing = next((c for c, r in column_map.items() if r == role), role)
            raise DataError(f"{path}: missing column for {missing!r}")

    feat_cols = [role_to_col[n] for n in schema.names]
    attr_cols = {r[5:]: c for r, c in role_to_col.items() if r.startswith("attr:")}
    mult_col = role_to_col.get("multiplier")
    if scaled_features is None:
        scale_mask = np.ones(len(schema), dtype=bool)
    else:
        unknown = set(scaled_features) - set(schema.names)
        if unknown:
            raise DataError(f"scaled features not in schema: {sorted(unknown)}")
        scale_mask = np.array([n in scaled_features for n in schema.names])

    ids, times, periods, feats, rownums = [], [], [], [], []
    attrs: dict[str, list] = {k: [] for k in attr_cols}
    for offset, cells in enumerate(body):
        row_number = offset + 2  # 1-based file line, header is line 1
        if not any(c.strip() for c in cells):
            continue
        if len(cells) < len(header):
            raise DataError(f"row {row_number}: expected {len(header)} cells, got {len(cells)}")
        ids.append(cells[role_to_col["id"]].strip())
        times.append(_parse_int(cells[role_to_col["time"]], row_number, header[role_to_col["time"]]))
        periods.append(_parse_int(cells[role_to_col["period"]], row_number, header[role_to_col["period"]]))
        x = np.array([_parse_float(cells[c], row_number, header[c]) for c in feat_cols])
        if mult_col is not None:
            m = _parse_float(cells[mult_col], row_number, header[mult_col])
            x[scale_mask] *= m
        feats.append(x)
        rownums.append(row_number)
        for key, c in attr_cols.items():
            attrs[key].append(cells[c].strip())

    ids_arr = np.array(ids, dtype=object)
    times_arr = np.array(times, dtype=np.int64)
    _check_unique_keys(ids_arr, times_arr, rownums)
    return SampleTable(
        schema,
        ids_arr,
        times_arr,
        np.array(periods, dtype=np.int64),
        np.array(feats, dtype=float).reshape(len(ids), len(schema)),
        attrs,
    )


def write_samples(table: SampleTable, path) -> None:
    """Inverse of :func:`load_samples` with the default (by-name) mapping."""
    attr_keys = sorted(table.attributes)
    header = ["id", "time", "period", *table.schema.names, *attr_keys]
    rows = []
    for i in range(len(table)):
        feats = ["" if math.isnan(v) else repr(float(v)) for v in table.features[i]]
        attrs = [str(table.attributes[k][i]) for k in attr_keys]
        rows.append([table.ids[i], int(table.times[i]), int(table.periods[i]), *feats, *attrs])
    atomic_write(path, csv_text(header, rows))


def clean(table: SampleTable) -> tuple[SampleTable, RejectionReport]:
    """Drop rows with a missing feature or a feature outside its bounds.

    Each rejected row is reported once, citing its first offending feature.
    Row numbers are 1-based positions in ``table``.
    """
    lo = np.array([b[0] for b in table.schema.bounds])
    hi = np.array([b[1] for b in table.schema.bounds])
    x = table.features
    missing = np.isnan(x)
    out_of_range = ~missing & ((x < lo) | (x > hi))
    bad = missing | out_of_range
    rejections = []
    for i in np.flatnonzero(bad.any(axis=1)):
        j = int(np.flatnonzero(bad[i])[0])
        reason = "missing" if missing[i, j] else "out_of_bounds"
        rejections.append(Rejection(int(i) + 1, reason, table.schema.names[j], float(x[i, j])))
    if not rejections:
        return table, RejectionReport()
    return table.take(~bad.any(axis=1)), RejectionReport(tuple(rejections))


def _population_moments(table: SampleTable) -> tuple[np.ndarray, np.ndarray]:
    x = table.features
    means = x.mean(axis=0)
    stds = np.sqrt(((x - means) ** 2).mean(axis=0))
    for name, s, col in zip(table.schema.names, stds, x.T):
        if s == 0 or np.all(col == col[0]):
            raise DataError(f"feature {name!r} has zero variance")
    return means, stds


def standardize(table: SampleTable) -> tuple[SampleTable, Standardization]:
    """Center each feature and scale it to unit population std (divide by N)."""
    if len(table) == 0:
        raise DataError("cannot standardize an empty table")
    means, stds = _population_moments(table)
    z = Standardization(means, stds)
    return table.with_features(z.apply(table.features)), z


def correlation_matrix(table: SampleTable) -> np.ndarray:
    """Pearson correlations; exactly symmetric with a unit diagonal."""
    if len(table) < 2:
        raise DataError("correlation needs at least two rows")
    means, stds = _population_moments(table)
    z = (table.features - means) / stds
    corr = z.T @ z / len(table)
    corr = (corr + corr.T) / 2
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


@dataclass(frozen=True)
class GaussianComponent:
    mean: tuple[float, ...]
    variance: tuple[float, ...]
    weight: float = 1.0


@dataclass(frozen=True)
class SyntheticConfig:
    """Gaussian-mixture panel generator.

    Each individual starts in a component drawn by weight. With a
    ``transition`` matrix the component then evolves as a Markov chain over
    the individual's ``n_times`` observations; without one it is redrawn by
    weight at every time. Individuals are split round-robin over
    ``n_periods`` periods, each period with its own block of years.
    ``attributes`` gives, per key, the values drawn uniformly per individual.
    """

    components: tuple[GaussianComponent, ...]
    n_individuals: int = 100
    n_times: int = 5
    start_time: int = 1984
    time_step: int = 2
    n_periods: int = 1
    transition: tuple[tuple[float, ...], ...] | None = None
    attributes: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    names: tuple[str, ...] | None = None


def generate_synthetic_panel(config: SyntheticConfig, seed: int) -> SampleTable:
    """Draw a complete panel (every individual observed at every time).

    The true component of each row is stored as the ``component`` attribute
    (1-indexed, as text).
    """
    comps = config.components
    if not comps:
        raise DataError("synthetic config needs at least one component")
    dim = len(comps[0].mean)
    for c in comps:
        if len(c.mean) != dim or len(c.variance) != dim:
            raise DataError("all components need mean and variance of the same dimension")
        if c.weight <= 0:
            raise DataError("component weights must be positive")
        if any(v <= 0 for v in c.variance):
            raise DataError("component variances must be positive")
    if config.n_individuals < 1 or config.n_times < 1 or config.n_periods < 1:
        raise DataError("individual count, sequence length and periods must be positive")
    weights = np.array([c.weight for c in comps], dtype=float)
    weights /= weights.sum()
    trans = None
    if config.transition is not None:
        trans = np.asarray(config.transition, dtype=float)
        if trans.shape != (len(comps), len(comps)) or np.any(trans < 0):
            raise DataError("transition must be a non-negative S x S matrix")
        trans = trans / trans.sum(axis=1, keepdims=True)
    names = config.names or tuple(f"f{j + 1}" for j in range(dim))
    if len(names) != dim:
        raise DataError("names must match the component dimension")

    rng = np.random.default_rng(seed)
    n, t = config.n_individuals, config.n_times
    state = np.empty((n, t), dtype=np.int64)
    state[:, 0] = rng.choice(len(comps), size=n, p=weights)
    for step in range(1, t):
        if trans is None:
            state[:, step] = rng.choice(len(comps), size=n, p=weights)
        else:
            u = rng.random(n)
            cdf = np.cumsum(trans[state[:, step - 1]], axis=1)
            state[:, step] = np.minimum((u[:, None] >= cdf).sum(axis=1), len(comps) - 1)
    means = np.array([c.mean for c in comps], dtype=float)
    sds = np.sqrt(np.array([c.variance for c in comps], dtype=float))
    flat = state.ravel()
    features = means[flat] + sds[flat] * rng.standard_normal((n * t, dim))
    indiv_attrs = {k: rng.choice(np.array(v, dtype=object), size=n) for k, v in config.attributes.items()}

    period_of = np.arange(n) % config.n_periods + 1
    time_offset = (period_of - 1) * t * config.time_step
    times = config.start_time + time_offset[:, None] + config.time_step * np.arange(t)[None, :]
    width = len(str(n))
    ids = np.repeat(np.array([f"i{i + 1:0{width}d}" for i in range(n)], dtype=object), t)
    attrs = {k: np.repeat(v, t) for k, v in indiv_attrs.items()}
    attrs["component"] = np.array([str(s + 1) for s in flat], dtype=object)
    return SampleTable(
        FeatureSchema(names),
        ids,
        times.ravel(),
        np.repeat(period_of, t),
        features,
        attrs,
    )


def five_cluster_config(
    n_individuals: int = 1000,
    n_times: int = 5,
    n_periods: int = 1,
    attributes: Mapping[str, tuple[str, ...]] | None = None,
    separation: float = 3.5,
) -> SyntheticConfig:
    """Bundled 8-feature benchmark: five unequal unit-variance Gaussian clusters.

    Cluster ``k`` raises feature ``k`` by ``separation``; the first three also
    raise a secondary feature (6, 7, 8) by half that. Individuals move
    between clusters with a sticky chain whose stationary law is the weights.
    """
    means = []
    for k in range(5):
        m = [0.0] * 8
        m[k] = separation
        if k < 3:
            m[5 + k] = separation / 2
        means.append(tuple(m))
    weights = (0.22, 0.26, 0.14, 0.16, 0.22)
    comps = tuple(GaussianComponent(m, (1.0,) * 8, w) for m, w in zip(means, weights))
    # stay with probability `stay`, else redraw by weight: the cluster shares
    # stay at `weights` at every time
    stay = 0.6
    sticky = tuple(
        tuple(stay * (i == j) + (1 - stay) * weights[j] for j in range(5)) for i in range(5)
    )
    return SyntheticConfig(
        components=comps,
        n_individuals=n_individuals,
        n_times=n_times,
        n_periods=n_periods,
        transition=sticky,
        attributes=dict(attributes or {"gender": ("men", "women")}),
    )
