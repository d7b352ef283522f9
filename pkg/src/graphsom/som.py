"""Online Kohonen training over an arbitrary unit graph.

Each presented sample moves every unit ``i`` by
``alpha * h(d(c, i), sigma) * (x - m_i)`` where ``c`` is the best matching
unit and ``d`` the hop distance on the lattice. Units in a different
component than ``c`` sit at distance ``inf`` and get zero weight.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._io import atomic_write
from .dataset import SampleTable
from .topology import MapTopology, TopologyError, parse_spec

__all__ = [
    "KERNELS",
    "TrainingConfig",
    "CodebookMap",
    "bmu",
    "neighborhood_weight",
    "update_step",
    "initialize",
    "train",
    "assign",
    "write_codebook",
    "read_codebook",
]

KERNELS = ("gaussian", "indicator")


@dataclass(frozen=True)
class TrainingConfig:
    """Learning schedule. ``sigma_start=None`` means half the lattice diameter."""

    epochs: int = 20
    alpha_start: float = 0.5
    alpha_end: float = 0.01
    sigma_start: float | None = None
    sigma_end: float = 0.5
    kernel: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError("epochs must be a positive integer")
        if not 0 < self.alpha_end <= self.alpha_start <= 1:
            raise ValueError("need 0 < alpha_end <= alpha_start <= 1")
        if self.sigma_end <= 0:
            raise ValueError("sigma_end must be positive")
        if self.sigma_start is not None and self.sigma_start < self.sigma_end:
            raise ValueError("need sigma_start >= sigma_end")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")

    def resolved(self, topo: MapTopology) -> "TrainingConfig":
        """Fill in the default starting radius for ``topo``."""
        if self.sigma_start is not None:
            return self
        return replace(self, sigma_start=max(topo.diameter() / 2, self.sigma_end))

    def describe(self) -> str:
        return (
            f"kernel={self.kernel} epochs={self.epochs} "
            f"alpha={self.alpha_start!r}:{self.alpha_end!r} "
            f"sigma={self.sigma_start!r}:{self.sigma_end!r} seed={self.seed}"
        )


@dataclass(frozen=True)
class CodebookMap:
    topology: MapTopology
    codebook: np.ndarray
    config: TrainingConfig
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        cb = np.array(self.codebook, dtype=float)
        if cb.ndim != 2 or cb.shape[0] != self.topology.unit_count:
            raise ValueError(
                f"codebook needs {self.topology.unit_count} rows, got shape {cb.shape}"
            )
        if self.feature_names and len(self.feature_names) != cb.shape[1]:
            raise ValueError("feature_names must match the codebook dimension")
        cb.setflags(write=False)
        object.__setattr__(self, "codebook", cb)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def unit_count(self) -> int:
        return self.codebook.shape[0]

    @property
    def dim(self) -> int:
        return self.codebook.shape[1]


def _as_matrix(data, dim: int) -> np.ndarray:
    x = data.features if isinstance(data, SampleTable) else np.asarray(data, dtype=float)
    x = x.reshape(-1, dim) if x.size == 0 else x
    if x.ndim != 2 or x.shape[1] != dim:
        raise ValueError(f"expected {dim} features per row, got shape {x.shape}")
    return x


def _sq_dists(x: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    # direct differences, never the expanded ||x||^2 - 2x.m + ||m||^2 form,
    # so exact ties stay ties
    diff = x[:, None, :] - codebook[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def bmu(som: CodebookMap, x) -> int:
    """1-indexed nearest unit; ties go to the smallest id."""
    x = np.asarray(x, dtype=float)
    if x.shape != (som.dim,):
        raise ValueError(f"expected a vector of length {som.dim}, got shape {x.shape}")
    return int(np.argmin(_sq_dists(x[None, :], som.codebook)[0])) + 1


def neighborhood_weight(kernel: str, d, sigma: float):
    """``exp(-d^2 / 2 sigma^2)`` or ``1[d < sigma]``; zero at ``d = inf``.

    Works elementwise on arrays of distances.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    d = np.asarray(d, dtype=float)
    if kernel == "gaussian":
        w = np.exp(-(d * d) / (2.0 * sigma * sigma))
    elif kernel == "indicator":
        w = (d < sigma).astype(float)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return float(w) if w.ndim == 0 else w


def _step(codebook: np.ndarray, dist_row: np.ndarray, x: np.ndarray, alpha: float,
          sigma: float, kernel: str) -> None:
    w = alpha * neighborhood_weight(kernel, dist_row, sigma)
    moved = w > 0
    codebook[moved] += w[moved, None] * (x - codebook[moved])


def update_step(som: CodebookMap, x, alpha: float, sigma: float) -> CodebookMap:
    """One competitive + cooperative step; returns a new map."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    c = bmu(som, x)
    cb = som.codebook.copy()
    _step(cb, som.topology.distances[c - 1], x, alpha, sigma, som.config.kernel)
    return replace(som, codebook=cb)


def _rows(table) -> np.ndarray:
    x = table.features if isinstance(table, SampleTable) else np.asarray(table, dtype=float)
    if x.ndim != 2 or len(x) == 0:
        raise ValueError("cannot train on an empty table")
    return x


def _initial_rows(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    return x[rng.choice(len(x), size=k, replace=len(x) < k)]


def initialize(table, topo: MapTopology, config: TrainingConfig) -> CodebookMap:
    """Codebook made of K sampled data rows (without replacement if N >= K)."""
    x = _rows(table)
    rng = np.random.default_rng(config.seed)
    names = table.schema.names if isinstance(table, SampleTable) else ()
    return CodebookMap(topo, _initial_rows(x, topo.unit_count, rng), config.resolved(topo), names)


def _schedule(start: float, end: float, step: int, total: int) -> float:
    if total <= 1:
        return start
    return start + (end - start) * step / (total - 1)


def train(table, topo: MapTopology, config: TrainingConfig, *, observer=None) -> CodebookMap:
    """Online SOM: seeded init, a fresh seeded shuffle per epoch, linear decay.

    ``observer(step, row_index, bmu, codebook)`` is called after every update
    when given; the codebook passed is the live array and must not be kept.
    """
    x = _rows(table)
    cfg = config.resolved(topo)
    rng = np.random.default_rng(cfg.seed)
    cb = _initial_rows(x, topo.unit_count, rng).copy()
    dist = topo.distances
    n = len(x)
    total = cfg.epochs * n
    step = 0
    for _ in range(cfg.epochs):
        for j in rng.permutation(n):
            xj = x[j]
            diff = cb - xj
            c = int(np.argmin(np.einsum("kd,kd->k", diff, diff)))
            alpha = _schedule(cfg.alpha_start, cfg.alpha_end, step, total)
            sigma = _schedule(cfg.sigma_start, cfg.sigma_end, step, total)
            _step(cb, dist[c], xj, alpha, sigma, cfg.kernel)
            if observer is not None:
                observer(step, int(j), c + 1, cb)
            step += 1
    names = table.schema.names if isinstance(table, SampleTable) else ()
    return CodebookMap(topo, cb, cfg, names)


def assign(som: CodebookMap, table, chunk: int = 4096) -> np.ndarray:
    """Per-row BMU labels (1-indexed), same tie rule as :func:`bmu`."""
    x = _as_matrix(table, som.dim)
    out = np.empty(len(x), dtype=np.int64)
    for start in range(0, len(x), chunk):
        block = x[start:start + chunk]
        out[start:start + chunk] = np.argmin(_sq_dists(block, som.codebook), axis=1) + 1
    return out


def write_codebook(som: CodebookMap, path) -> None:
    """One line per unit: ``unit_id`` then the code-vector, full precision."""
    k, d = som.codebook.shape
    names = som.feature_names or tuple(f"f{j + 1}" for j in range(d))
    lines = [
        f"# K={k} D={d} topology={som.topology.descriptor} {som.config.describe()}",
        "unit_id," + ",".join(names),
    ]
    for u, row in enumerate(som.codebook, start=1):
        lines.append(f"{u}," + ",".join(repr(float(v)) for v in row))
    atomic_write(path, "\n".join(lines) + "\n")


def _parse_header(line: str) -> dict[str, str]:
    return dict(tok.split("=", 1) for tok in line.lstrip("#").split() if "=" in tok)


def read_codebook(path, topology: MapTopology | None = None) -> CodebookMap:
    """Load a codebook file; custom lattices need ``topology`` passed in."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing codebook header line")
    meta = _parse_header(lines[0])
    names = tuple(lines[1].split(",")[1:])
    rows = [ln.split(",") for ln in lines[2:]]
    cb = np.array([[float(v) for v in r[1:]] for r in rows])
    if [int(r[0]) for r in rows] != list(range(1, len(rows) + 1)):
        raise ValueError(f"{path}: unit ids must run 1..K in order")
    if int(meta["K"]) != len(rows) or int(meta["D"]) != cb.shape[1]:
        raise ValueError(f"{path}: header K/D disagree with the body")
    if topology is None:
        if meta["topology"].startswith("custom"):
            raise TopologyError(f"{path}: custom topology must be supplied by the caller")
        topology = parse_spec(meta["topology"])
    a0, a1 = meta["alpha"].split(":")
    s0, s1 = meta["sigma"].split(":")
    cfg = TrainingConfig(
        epochs=int(meta["epochs"]),
        alpha_start=float(a0),
        alpha_end=float(a1),
        sigma_start=None if s0 == "None" else float(s0),
        sigma_end=float(s1),
        kernel=meta["kernel"],
        seed=int(meta["seed"]),
    )
    return CodebookMap(topology, cb, cfg, names)
