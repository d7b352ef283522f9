"""Macro-class sequences of individuals treated as a finite Markov chain.

Consecutive observations of an individual form one chain step whatever the
calendar gap between them. States are numbered ``1..S``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._io import atomic_write
from .dataset import SampleTable

__all__ = [
    "MarkovError",
    "ReducibleChainError",
    "ConvergenceError",
    "TrajectorySet",
    "TransitionMatrix",
    "build_trajectories",
    "transition_matrix",
    "from_probabilities",
    "communicating_classes",
    "is_irreducible",
    "stationary",
    "empirical_distribution",
    "filter_trajectories",
    "simulate_chain",
    "read_matrix",
    "write_matrix",
]

log = logging.getLogger(__name__)


class MarkovError(ValueError):
    """Transition data unsuitable for the requested computation."""


class ReducibleChainError(MarkovError):
    def __init__(self, classes: list[list[int]]):
        self.classes = classes
        sets = "; ".join("{" + ", ".join(map(str, c)) + "}" for c in classes)
        super().__init__(f"chain is reducible; communicating state sets: {sets}")


class ConvergenceError(MarkovError):
    pass


@dataclass(frozen=True)
class TrajectorySet:
    """``sequences[id] = (times, labels)``, times strictly increasing."""

    sequences: dict
    n_states: int
    period: int | None = None

    def __len__(self):
        return len(self.sequences)

    @property
    def n_observations(self) -> int:
        return sum(len(t) for t, _ in self.sequences.values())

    @property
    def n_transitions(self) -> int:
        return sum(max(len(t) - 1, 0) for t, _ in self.sequences.values())


def build_trajectories(
    labels, table: SampleTable, n_states: int, period: int | None = None
) -> TrajectorySet:
    """Group per-row class labels by individual and sort them by time.

    With ``period`` set only rows carrying that period tag are kept.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (len(table),):
        raise MarkovError(f"need one label per row: {labels.shape} labels for {len(table)} rows")
    if labels.size and (labels.min() < 1 or labels.max() > n_states):
        raise MarkovError(f"labels must lie in 1..{n_states}")
    keep = np.ones(len(table), dtype=bool) if period is None else table.periods == period
    by_id: dict = {}
    for i in np.flatnonzero(keep):
        by_id.setdefault(table.ids[i], []).append((int(table.times[i]), int(labels[i])))
    sequences = {}
    for ident, obs in by_id.items():
        obs.sort()
        times = np.array([t for t, _ in obs], dtype=np.int64)
        if np.any(np.diff(times) == 0):
            raise MarkovError(f"individual {ident!r} has repeated observation times")
        sequences[ident] = (times, np.array([s for _, s in obs], dtype=np.int64))
    return TrajectorySet(sequences, n_states, period)


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-normalized transition estimate. Rows never observed as a source
    keep zero probabilities and are listed in ``empty_rows`` (1-indexed)."""

    counts: np.ndarray
    probs: np.ndarray

    @property
    def n_states(self) -> int:
        return self.probs.shape[0]

    @property
    def row_counts(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def empty_rows(self) -> list[int]:
        return [i + 1 for i in np.flatnonzero(self.probs.sum(axis=1) == 0)]

    def percent(self) -> np.ndarray:
        return 100.0 * self.probs


def _normalize_rows(m: np.ndarray) -> np.ndarray:
    totals = m.sum(axis=1, keepdims=True)
    out = np.zeros_like(m, dtype=float)
    np.divide(m, totals, out=out, where=totals > 0)
    return out


def transition_matrix(trajs: TrajectorySet) -> TransitionMatrix:
    """Pooled counts of consecutive (i -> j) pairs, normalized by row."""
    s = trajs.n_states
    counts = np.zeros((s, s), dtype=np.int64)
    for _, labels in trajs.sequences.values():
        if len(labels) > 1:
            np.add.at(counts, (labels[:-1] - 1, labels[1:] - 1), 1)
    if counts.sum() == 0:
        raise MarkovError("no transitions: every trajectory has a single observation")
    tm = TransitionMatrix(counts, _normalize_rows(counts))
    if tm.empty_rows:
        log.warning("states never observed as a source: %s", tm.empty_rows)
    return tm


def from_probabilities(matrix, percent: bool = False) -> TransitionMatrix:
    """Wrap a published matrix. ``percent=True`` renormalizes each row to 1,
    absorbing rounding drift in tables printed as percentages."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MarkovError("transition matrix must be square")
    if np.any(m < 0):
        raise MarkovError("transition probabilities must be non-negative")
    if percent:
        m = _normalize_rows(m)
    else:
        sums = m.sum(axis=1)
        bad = ~(np.isclose(sums, 1.0, atol=1e-9) | (sums == 0))
        if bad.any():
            raise MarkovError(f"rows {list(np.flatnonzero(bad) + 1)} do not sum to 1")
    return TransitionMatrix(np.zeros(m.shape, dtype=np.int64), m)


def _reachability(positive: np.ndarray) -> np.ndarray:
    reach = positive | np.eye(len(positive), dtype=bool)
    while True:
        nxt = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def communicating_classes(pi: TransitionMatrix, states=None) -> list[list[int]]:
    """Strongly connected components of the positive-entry digraph."""
    p = pi.probs
    idx = np.arange(pi.n_states) if states is None else np.asarray(states) - 1
    reach = _reachability(p[np.ix_(idx, idx)] > 0)
    mutual = reach & reach.T
    seen, classes = set(), []
    for a in range(len(idx)):
        if a in seen:
            continue
        members = np.flatnonzero(mutual[a])
        seen.update(members.tolist())
        classes.append([int(idx[m]) + 1 for m in members])
    return classes


def is_irreducible(pi: TransitionMatrix) -> bool:
    active = [s for s in range(1, pi.n_states + 1) if s not in pi.empty_rows]
    return len(communicating_classes(pi, active)) == 1


def _as_transition(pi) -> TransitionMatrix:
    return pi if isinstance(pi, TransitionMatrix) else from_probabilities(pi)


def stationary(
    pi,
    tol: float = 1e-12,
    max_iters: int = 64,
    damping: float | None = None,
    initial=None,
) -> np.ndarray:
    """Limit distribution of an irreducible chain by repeated squaring.

    ``P`` is squared until every column of the power has a row spread below
    ``tol``; the result is ``initial @ P^(2^n)`` normalized (uniform
    ``initial`` by default). States with empty rows are dropped from the
    analysis and get probability 0, which is only allowed when no mass flows
    into them. ``damping=lam`` replaces ``P`` by ``lam P + (1 - lam) I``,
    which keeps the stationary vector and removes periodicity.
    """
    tm = _as_transition(pi)
    s = tm.n_states
    empty = tm.empty_rows
    active = np.array([i for i in range(s) if i + 1 not in empty], dtype=np.int64)
    if active.size == 0:
        raise MarkovError("no state has observed outgoing transitions")
    p = tm.probs[np.ix_(active, active)]
    leak = tm.probs[active].sum(axis=1) - p.sum(axis=1)
    if np.any(leak > 1e-12):
        raise MarkovError(f"probability flows into states without outgoing data: {empty}")
    classes = communicating_classes(tm, active + 1)
    if len(classes) > 1:
        raise ReducibleChainError(classes)
    if damping is not None:
        if not 0 < damping < 1:
            raise ValueError("damping must lie in (0, 1)")
        p = damping * p + (1 - damping) * np.eye(len(p))
    q = p
    for _ in range(max_iters):
        if np.max(q.max(axis=0) - q.min(axis=0)) < tol:
            break
        q = q @ q
    else:
        raise ConvergenceError(
            f"powers did not converge in {max_iters} squarings (periodic chain?); "
            "retry with damping, e.g. damping=0.5"
        )
    start = np.full(len(p), 1.0 / len(p)) if initial is None else np.asarray(initial, float)[active]
    v = start @ q
    v = v / v.sum()
    out = np.zeros(s)
    out[active] = v
    return out


def empirical_distribution(trajs: TrajectorySet) -> np.ndarray:
    """Share of all (individual, time) observations in each state."""
    counts = np.zeros(trajs.n_states, dtype=np.int64)
    for _, labels in trajs.sequences.values():
        counts += np.bincount(labels - 1, minlength=trajs.n_states)
    total = counts.sum()
    if total == 0:
        raise MarkovError("empirical distribution of an empty trajectory set")
    return counts / total


def filter_trajectories(
    trajs: TrajectorySet, table: SampleTable, attribute: str, value
) -> TrajectorySet:
    """Keep individuals whose every row carries ``attribute == value``.

    Individuals with mixed values are dropped and logged.
    """
    if attribute not in table.attributes:
        raise KeyError(f"unknown attribute {attribute!r}")
    column = table.attributes[attribute]
    values_by_id: dict = {}
    for ident, v in zip(table.ids, column):
        values_by_id.setdefault(ident, set()).add(str(v))
    keep, mixed = {}, []
    for ident, seq in trajs.sequences.items():
        vals = values_by_id.get(ident, set())
        if len(vals) > 1:
            mixed.append(ident)
        elif vals == {str(value)}:
            keep[ident] = seq
    if mixed:
        log.warning("%d individuals with mixed %s values excluded", len(mixed), attribute)
    return TrajectorySet(keep, trajs.n_states, trajs.period)


def simulate_chain(pi, n_steps: int, seed: int, start: int = 1) -> np.ndarray:
    """One sampled path of ``n_steps`` states (1-indexed) starting at ``start``."""
    p = _as_transition(pi).probs
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(p, axis=1)
    u = rng.random(n_steps - 1)
    path = np.empty(n_steps, dtype=np.int64)
    path[0] = start - 1
    for t in range(1, n_steps):
        row = cdf[path[t - 1]]
        path[t] = min(int(np.searchsorted(row, u[t - 1] * row[-1], side="right")), len(row) - 1)
    return path + 1


def write_matrix(matrix, path, kind: str) -> None:
    """``S=<n> kind=<counts|probs>`` header then S comma-separated rows."""
    if kind not in ("counts", "probs"):
        raise ValueError("kind must be counts or probs")
    m = np.asarray(matrix)
    fmt = (lambda v: str(int(v))) if kind == "counts" else (lambda v: f"{v:.6g}")
    body = "".join(",".join(fmt(v) for v in row) + "\n" for row in m)
    atomic_write(path, f"S={len(m)} kind={kind}\n{body}")


def read_matrix(path) -> tuple[np.ndarray, str]:
    """Read a matrix file; a missing header is allowed for hand-typed tables."""
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    kind, size = "probs", None
    if lines and lines[0].startswith("S="):
        meta = dict(tok.split("=", 1) for tok in lines.pop(0).split())
        size, kind = int(meta["S"]), meta.get("kind", "probs")
    rows = [[float(v) for v in ln.replace(",", " ").split()] for ln in lines]
    m = np.array(rows, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or (size is not None and size != len(m)):
        raise MarkovError(f"{path}: expected a square {size or ''} matrix, got shape {m.shape}")
    return m, kind
