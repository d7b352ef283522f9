"""Map lattices as undirected graphs with shortest-path unit distances.

Units are numbered from 1. Distances between units in different connected
components are ``numpy.inf``; no large finite stand-in is ever used.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import atomic_write

__all__ = [
    "TopologyError",
    "MapTopology",
    "MacroPartition",
    "grid",
    "strings",
    "star",
    "from_adjacency",
    "components",
    "parse_spec",
    "read_adjacency",
    "write_adjacency",
    "dump_distances",
]


class TopologyError(ValueError):
    """Invalid lattice construction or query."""


@dataclass(frozen=True)
class MacroPartition:
    """Surjective assignment of map units to macro-classes ``1..S``.

    ``unit_to_class[u - 1]`` is the class of unit ``u``.
    """

    unit_to_class: np.ndarray
    provenance: str

    def __post_init__(self):
        labels = np.asarray(self.unit_to_class, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise TopologyError("partition must map at least one unit")
        s = int(labels.max())
        if labels.min() < 1 or np.unique(labels).size != s:
            raise TopologyError("class indices must cover 1..S without gaps")
        labels.setflags(write=False)
        object.__setattr__(self, "unit_to_class", labels)

    @property
    def n_classes(self) -> int:
        return int(self.unit_to_class.max())

    @property
    def unit_count(self) -> int:
        return int(self.unit_to_class.size)

    def members(self, cls: int) -> list[int]:
        """Unit ids (1-indexed) belonging to class ``cls``."""
        return [int(u) + 1 for u in np.flatnonzero(self.unit_to_class == cls)]

    def classes_of(self, units) -> np.ndarray:
        """Map an array of 1-indexed unit labels to class labels."""
        units = np.asarray(units, dtype=np.int64)
        if units.size and (units.min() < 1 or units.max() > self.unit_count):
            raise ValueError("unit label not covered by the partition")
        return self.unit_to_class[units - 1]

    def to_text(self) -> str:
        lines = [f"# S={self.n_classes} provenance={self.provenance}", "unit_id,class_id"]
        lines += [f"{u + 1},{c}" for u, c in enumerate(self.unit_to_class)]
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        atomic_write(path, self.to_text())

    @classmethod
    def read(cls, path) -> "MacroPartition":
        provenance = "unknown"
        pairs = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("provenance="):
                        provenance = tok.split("=", 1)[1]
                continue
            if line.startswith("unit_id"):
                continue
            u, c = line.replace(",", " ").split()
            pairs.append((int(u), int(c)))
        pairs.sort()
        if [u for u, _ in pairs] != list(range(1, len(pairs) + 1)):
            raise ValueError(f"{path}: unit ids must be 1..K, each once")
        return cls(np.array([c for _, c in pairs]), provenance)


@dataclass(frozen=True)
class MapTopology:
    """Undirected unit graph with precomputed all-pairs hop distances.

    ``kind`` is one of ``grid``, ``strings``, ``star`` or ``custom`` and
    ``shape`` holds the constructor arguments (empty for ``custom``).
    """

    adjacency: np.ndarray
    distances: np.ndarray = field(repr=False)
    component_of: np.ndarray = field(repr=False)
    kind: str = "custom"
    shape: tuple = ()

    @property
    def unit_count(self) -> int:
        return int(self.adjacency.shape[0])

    @property
    def n_components(self) -> int:
        return int(self.component_of.max())

    @property
    def descriptor(self) -> str:
        if self.kind == "custom":
            return f"custom:{self.unit_count}"
        return f"{self.kind}:{self.shape[0]}x{self.shape[1]}"

    def _check(self, u: int) -> int:
        if not 1 <= u <= self.unit_count:
            raise TopologyError(f"unit {u} outside 1..{self.unit_count}")
        return u - 1

    def distance(self, i: int, j: int) -> float:
        return float(self.distances[self._check(i), self._check(j)])

    def neighbors(self, u: int) -> list[int]:
        return [int(v) + 1 for v in np.flatnonzero(self.adjacency[self._check(u)])]

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def diameter(self) -> int:
        """Largest finite distance (the diameter of the widest component)."""
        finite = self.distances[np.isfinite(self.distances)]
        return int(finite.max()) if finite.size else 0

    def depth(self, u: int) -> int:
        """Position of ``u`` along its star ray (0 for the center)."""
        if self.kind != "star":
            raise TopologyError("depth is only defined on star topologies")
        self._check(u)
        if u == 1:
            return 0
        return (u - 2) % self.shape[1] + 1

    def ray(self, u: int) -> int:
        """Ray index of ``u`` on a star (0 for the center)."""
        if self.kind != "star":
            raise TopologyError("ray is only defined on star topologies")
        self._check(u)
        if u == 1:
            return 0
        return (u - 2) // self.shape[1] + 1

    def layout(self) -> np.ndarray:
        """Integer (row, col) drawing position per unit, used by plots."""
        k = self.unit_count
        if self.kind in ("grid", "strings"):
            idx = np.arange(k)
            width = self.shape[1]
            return np.column_stack([idx // width, idx % width])
        if self.kind == "star":
            pos = [(0, 0)] + [(self.ray(u), self.depth(u)) for u in range(2, k + 1)]
            return np.array(pos)
        return np.column_stack([np.zeros(k, dtype=int), np.arange(k)])


def _bfs_distances(adj: np.ndarray) -> np.ndarray:
    k = adj.shape[0]
    nbrs = [np.flatnonzero(adj[i]) for i in range(k)]
    dist = np.full((k, k), np.inf)
    for src in range(k):
        row = dist[src]
        row[src] = 0.0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            step = row[u] + 1.0
            for v in nbrs[u]:
                if row[v] == np.inf:
                    row[v] = step
                    queue.append(v)
    return dist


def _label_components(dist: np.ndarray) -> np.ndarray:
    # components numbered by their smallest member unit
    comp = np.zeros(dist.shape[0], dtype=np.int64)
    nxt = 1
    for u in range(dist.shape[0]):
        if comp[u] == 0:
            comp[np.isfinite(dist[u])] = nxt
            nxt += 1
    return comp


def _build(adj: np.ndarray, kind: str = "custom", shape: tuple = ()) -> MapTopology:
    adj = np.asarray(adj, dtype=bool).copy()
    dist = _bfs_distances(adj)
    comp = _label_components(dist)
    for arr in (adj, dist, comp):
        arr.setflags(write=False)
    return MapTopology(adj, dist, comp, kind, tuple(shape))


def _positive(name: str, value) -> int:
    if int(value) != value or value < 1:
        raise TopologyError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def grid(rows: int, cols: int) -> MapTopology:
    """Rectangular lattice, row-major ids, 4-neighbourhood."""
    rows, cols = _positive("rows", rows), _positive("cols", cols)
    k = rows * cols
    adj = np.zeros((k, k), dtype=bool)
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                adj[u, u + 1] = adj[u + 1, u] = True
            if r + 1 < rows:
                adj[u, u + cols] = adj[u + cols, u] = True
    return _build(adj, "grid", (rows, cols))


def _path_edges(adj: np.ndarray, units) -> None:
    for a, b in zip(units[:-1], units[1:]):
        adj[a, b] = adj[b, a] = True


def strings(n_strings: int, length: int) -> MapTopology:
    """Disconnected union of ``n_strings`` path graphs of ``length`` units."""
    n, length = _positive("n_strings", n_strings), _positive("length", length)
    k = n * length
    adj = np.zeros((k, k), dtype=bool)
    for s in range(n):
        _path_edges(adj, list(range(s * length, (s + 1) * length)))
    return _build(adj, "strings", (n, length))


def star(n_rays: int, ray_length: int) -> MapTopology:
    """Center unit 1 with ``n_rays`` paths of ``ray_length`` units attached."""
    n, length = _positive("n_rays", n_rays), _positive("ray_length", ray_length)
    k = 1 + n * length
    adj = np.zeros((k, k), dtype=bool)
    for r in range(n):
        first = 1 + r * length
        _path_edges(adj, [0] + list(range(first, first + length)))
    return _build(adj, "star", (n, length))


def from_adjacency(matrix) -> MapTopology:
    """Topology from a symmetric 0/1 matrix with zero diagonal."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise TopologyError("adjacency must be a non-empty square matrix")
    if not np.isin(m, (0, 1)).all():
        raise TopologyError("adjacency entries must be 0 or 1")
    if np.any(np.diag(m) != 0):
        raise TopologyError("adjacency has a nonzero diagonal (self-loop)")
    if not np.array_equal(m, m.T):
        raise TopologyError("adjacency matrix is not symmetric")
    return _build(m.astype(bool))


def components(topo: MapTopology) -> MacroPartition:
    """Connected components, numbered in order of their smallest unit id."""
    return MacroPartition(topo.component_of.copy(), "components")


def parse_spec(spec: str) -> MapTopology:
    """Build a topology from ``"grid 5x8"``, ``"strings:5x8"``, ``"star 5x8"``
    or ``"adjacency:<path>"``."""
    text = spec.strip()
    for sep in (":", " "):
        if sep in text:
            kind, _, arg = text.partition(sep)
            break
    else:
        raise TopologyError(f"cannot parse topology spec {spec!r}")
    kind, arg = kind.strip().lower(), arg.strip()
    if kind == "adjacency":
        return read_adjacency(arg)
    builders = {"grid": grid, "strings": strings, "star": star}
    if kind not in builders:
        raise TopologyError(f"unknown topology kind {kind!r}")
    try:
        a, b = (int(v) for v in arg.lower().split("x"))
    except ValueError:
        raise TopologyError(f"topology size must look like 5x8, got {arg!r}") from None
    return builders[kind](a, b)


def read_adjacency(path) -> MapTopology:
    """Edge-list file: first line K, then one ``i j`` (1-indexed) per line."""
    lines = [
        ln.split("#", 1)[0].strip()
        for ln in Path(path).read_text(encoding="utf-8").splitlines()
    ]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise TopologyError(f"{path}: empty adjacency file")
    k = int(lines[0])
    if k < 1:
        raise TopologyError(f"{path}: unit count must be positive")
    adj = np.zeros((k, k), dtype=int)
    for lineno, ln in enumerate(lines[1:], start=2):
        i, j = (int(v) for v in ln.replace(",", " ").split())
        if not (1 <= i <= k and 1 <= j <= k):
            raise TopologyError(f"{path}: edge {i} {j} outside 1..{k}")
        if i == j:
            raise TopologyError(f"{path}: self-loop on unit {i}")
        adj[i - 1, j - 1] = adj[j - 1, i - 1] = 1
    return from_adjacency(adj)


def write_adjacency(topo: MapTopology, path) -> None:
    iu, ju = np.nonzero(np.triu(topo.adjacency))
    body = "".join(f"{i + 1} {j + 1}\n" for i, j in zip(iu, ju))
    atomic_write(path, f"{topo.unit_count}\n{body}")


def dump_distances(topo: MapTopology, path=None) -> str:
    """Distance matrix as comma-delimited text, ``inf`` across components."""
    k = topo.unit_count
    header = "unit," + ",".join(str(u) for u in range(1, k + 1))
    rows = [header]
    for u in range(k):
        cells = ("inf" if np.isinf(d) else str(int(d)) for d in topo.distances[u])
        rows.append(f"{u + 1}," + ",".join(cells))
    text = "\n".join(rows) + "\n"
    if path is not None:
        atomic_write(path, text)
    return text
