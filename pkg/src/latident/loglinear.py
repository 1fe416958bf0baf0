"""Hierarchical log-linear structure over a graph with one binary hidden node.

Builds the parameter index (one coordinate per complete subset and non-baseline
level combination, corner-point coding), the 0/1 design matrix mapping
parameters to log expected cell counts, and the marginalization matrix that
sums out the hidden variable.

Cell stacking convention: the hidden variable A0 changes slowest, then A1, down
to An changing fastest (row-major order over (2, l1, ..., ln)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from .errors import ValidationError
from .graph import Graph, NodeSet, complete_subsets

LATENT = 0


@dataclass(frozen=True)
class LatentModel:
    """Graph over nodes {0..n} with node 0 hidden and binary; levels[v] >= 2."""

    graph: Graph
    levels: tuple[int, ...]

    def __post_init__(self):
        if len(self.levels) != self.graph.node_count:
            raise ValidationError(
                f"levels has {len(self.levels)} entries for "
                f"{self.graph.node_count} nodes"
            )
        if self.graph.node_count < 2:
            raise ValidationError("model needs the hidden node and at least one observed node")
        if self.levels[LATENT] != 2:
            raise ValidationError("the hidden node must be binary")
        for v, l in enumerate(self.levels):
            if l < 2:
                raise ValidationError(f"node {v} has {l} levels; at least 2 required")

    @staticmethod
    def binary(graph: Graph) -> "LatentModel":
        """Model with every variable binary."""
        return LatentModel(graph, (2,) * graph.node_count)

    @property
    def n_observed(self) -> int:
        return self.graph.node_count - 1

    @property
    def observed_set(self) -> NodeSet:
        return frozenset(range(1, self.graph.node_count))

    @property
    def table_size(self) -> int:
        """Number of cells l of the observed marginal table."""
        return math.prod(self.levels[1:])


@dataclass(frozen=True)
class ParamEntry:
    """One parameter coordinate: a complete subset plus a non-zero level per member.

    `nodes` is sorted ascending; `levels[i]` is the level (1..l_v-1) attached to
    `nodes[i]`.  The empty subset is the general mean.
    """

    nodes: tuple[int, ...]
    levels: tuple[int, ...]

    @property
    def name(self) -> str:
        """Coordinate name, e.g. "mu", "b{0,2,5}"; level 1 is implied, others shown as v:l."""
        if not self.nodes:
            return "mu"
        parts = [
            str(v) if l == 1 else f"{v}:{l}" for v, l in zip(self.nodes, self.levels)
        ]
        return "b{" + ",".join(parts) + "}"

    def sort_key(self) -> tuple:
        return (len(self.nodes), self.nodes, self.levels)


@dataclass(frozen=True)
class ParamIndex:
    """Ordered parameter coordinates with a coordinate -> column lookup."""

    entries: tuple[ParamEntry, ...]

    @cached_property
    def lookup(self) -> dict[ParamEntry, int]:
        return {e: j for j, e in enumerate(self.entries)}

    @property
    def p(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]


def build_param_index(m: LatentModel) -> ParamIndex:
    """Index over exactly the complete subsets of the model graph.

    Deterministic order: by subset size, then lexicographically on the subset,
    then lexicographically on the level combination.  The total column count is
    sum over complete subsets I of prod_{v in I} (levels[v] - 1).
    """
    subsets: list[tuple[int, ...]] = [()]
    subsets += [tuple(sorted(s)) for s in complete_subsets(m.graph, 1)]
    subsets.sort(key=lambda s: (len(s), s))
    entries: list[ParamEntry] = []
    for nodes in subsets:
        for combo in product(*(range(1, m.levels[v]) for v in nodes)):
            entries.append(ParamEntry(nodes, combo))
    return ParamIndex(tuple(entries))


@lru_cache(maxsize=64)
def cell_levels(m: LatentModel) -> np.ndarray:
    """(2l, n+1) array of level values per cell, hidden variable slowest."""
    dims = (2,) + tuple(m.levels[1:])
    grids = np.indices(dims)
    cells = grids.reshape(len(dims), -1).T
    cells.setflags(write=False)
    return cells


def design_matrix(m: LatentModel, idx: ParamIndex) -> np.ndarray:
    """Corner-point 0/1 design matrix, shape (2l, p).

    Entry (cell, (I, combo)) is 1 iff the cell's level of every v in I equals
    the combo's level for v; the empty-set column is all ones.
    """
    cells = cell_levels(m)
    z = np.empty((cells.shape[0], idx.p), dtype=float)
    for j, e in enumerate(idx.entries):
        if not e.nodes:
            z[:, j] = 1.0
        else:
            z[:, j] = np.all(cells[:, list(e.nodes)] == e.levels, axis=1)
    z.setflags(write=False)
    return z


def marginalization_matrix(m: LatentModel) -> np.ndarray:
    """(l, 2l) matrix summing out the hidden variable: two side-by-side identities."""
    l = m.table_size
    out = np.hstack([np.eye(l), np.eye(l)])
    out.setflags(write=False)
    return out
