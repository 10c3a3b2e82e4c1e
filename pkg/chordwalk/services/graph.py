"""
Graph Service
─────────────
The cycle-plus-chord graph G(N, m): N nodes on a ring, plus one extra link
joining node 1 and node m. Node labels are 1-based everywhere in the public
API; the 0-based offset lives only inside `laplacian`.

Usage:
    from chordwalk.services.graph import build_graph, laplacian
    g = build_graph(100, 21)
    h = laplacian(g)
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from chordwalk.core.errors import DomainError

logger = logging.getLogger(__name__)

MIN_NODES = 5
MIN_CHORD = 3


# ── GRAPH SPEC ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class GraphSpec:
    n: int
    m: Optional[int] = None     # None is the bare cycle

    @property
    def is_cycle(self) -> bool:
        return self.m is None

    @property
    def parity(self) -> int:
        """λ: 1 for even N, 0 for odd N."""
        return 1 if self.n % 2 == 0 else 0

    @property
    def chord_length(self) -> int:
        """Cycle distance d(1, m) spanned by the chord."""
        if self.m is None:
            return 0
        return cycle_distance(self.n, 1, self.m)

    @property
    def degrees(self) -> np.ndarray:
        deg = np.full(self.n, 2, dtype=int)
        if self.m is not None:
            deg[0] += 1
            deg[self.m - 1] += 1
        return deg

    def check_node(self, j: int) -> int:
        if not 1 <= j <= self.n:
            raise DomainError(f"node {j} outside [1, {self.n}]")
        return j

    def label(self) -> str:
        return f"G({self.n},{self.m if self.m is not None else 'none'})"


def build_graph(n: int, m: int) -> GraphSpec:
    if n < MIN_NODES:
        raise DomainError(f"n={n} below minimum {MIN_NODES}")
    if not MIN_CHORD <= m <= n - 1:
        raise DomainError(f"m={m} outside [{MIN_CHORD}, {n - 1}] for n={n}")
    return GraphSpec(n=n, m=m)


def build_cycle(n: int) -> GraphSpec:
    if n < 3:
        raise DomainError(f"cycle needs at least 3 nodes, got {n}")
    return GraphSpec(n=n, m=None)


# ── DISTANCES ─────────────────────────────────────────────────────────────────

def cycle_distance(n: int, a: int, b: int) -> int:
    """Hop count between a and b on the ring, ignoring the chord."""
    d = abs(a - b) % n
    return min(d, n - d)


def shortest_chord_distance(g: GraphSpec, j: int) -> int:
    """d_j = min{d(j, 1), d(j, m)} measured on the bare ring."""
    g.check_node(j)
    if g.m is None:
        return cycle_distance(g.n, j, 1)
    return min(cycle_distance(g.n, j, 1), cycle_distance(g.n, j, g.m))


# ── SYMMETRY ──────────────────────────────────────────────────────────────────

def mirror_node(g: GraphSpec, k: int) -> int:
    """
    Reflection through the axis that swaps nodes 1 and m.
    Short arc [1, m] maps k -> m+1-k; long arc [m+1, N] maps k -> N+m+1-k.
    """
    g.check_node(k)
    if g.m is None:
        raise DomainError("mirror_node needs a chord")
    if k <= g.m:
        return g.m + 1 - k
    return g.n + g.m + 1 - k


def symmetry_axis_nodes(g: GraphSpec) -> list[int]:
    """Nodes that the reflection maps onto themselves."""
    if g.m is None:
        return []
    return [k for k in range(1, g.n + 1) if mirror_node(g, k) == k]


# ── LAPLACIAN ─────────────────────────────────────────────────────────────────

def laplacian(g: GraphSpec) -> np.ndarray:
    n = g.n
    h = np.zeros((n, n), dtype=float)
    idx = np.arange(n)
    h[idx, (idx + 1) % n] = -1.0
    h[(idx + 1) % n, idx] = -1.0
    if g.m is not None:
        h[0, g.m - 1] = -1.0
        h[g.m - 1, 0] = -1.0
    h[idx, idx] = -h.sum(axis=1)
    logger.debug(f"[Graph] Laplacian built for {g.label()}")
    return h
