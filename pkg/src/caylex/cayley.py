"""Indexed word-metric balls of a Cayley graph, built by BFS.

Vertex 0 is the identity; vertices are indexed in BFS discovery order with
the generator index as tie-break, so two builds of the same ball are
identical.  The neighbor table stores, for vertex i and generator index j,
the index of x_i * g_j^-1, or EXTERIOR when that element lies outside the
ball.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Set

import numpy as np

from .groups import Element, GroupModel

EXTERIOR = -1

DEFAULT_MAX_VERTICES = 5_000_000
MAX_VERTICES_ENV = "CAYLEX_MAX_VERTICES"


class BallSizeError(RuntimeError):
    """The requested ball exceeds the vertex cap."""


def _vertex_cap(explicit=None) -> int:
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(MAX_VERTICES_ENV)
    if env:
        return int(env)
    return DEFAULT_MAX_VERTICES


class CayleyBall:
    """The ball B_R of (G, S), with neighbor table, word lengths, the
    interior {|x| < R}, and per-radius sphere sizes."""

    def __init__(self, group: GroupModel, radius: int, elements, index,
                 nbr: np.ndarray, word_length: np.ndarray):
        self.group = group
        self.radius = radius
        self.elements = elements          # list: index -> Element
        self.index = index                # dict: Element -> index
        self.nbr = nbr                    # (n, |S|) int array, EXTERIOR marks
        self.word_length = word_length    # (n,) int array
        self.interior = word_length < radius if radius > 0 else word_length < 0
        counts = np.bincount(word_length, minlength=radius + 1)
        self.sphere_sizes = [int(c) for c in counts]

    @property
    def n_vertices(self) -> int:
        return len(self.elements)

    def neighbor(self, i: int, j: int) -> int:
        """Index of x_i * g_j^-1, or EXTERIOR."""
        return int(self.nbr[i, j])

    def interior_indices(self) -> np.ndarray:
        return np.where(self.interior)[0]

    def sphere_indices(self, r: int) -> np.ndarray:
        return np.where(self.word_length == r)[0]

    def __repr__(self):
        return (f"<CayleyBall {self.group.name} R={self.radius} "
                f"n={self.n_vertices}>")


def build_ball(group: GroupModel, radius: int, max_vertices=None) -> CayleyBall:
    """BFS enumeration of B_R from the identity."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cap = _vertex_cap(max_vertices)
    gens = group.generators
    inv_gens = [group.inverse(g) for g in gens]
    nS = len(gens)
    e = group.identity()
    elements = [e]
    index = {e: 0}
    wl = [0]
    nbr_rows = []
    mul = group.multiply
    queue = deque([0])
    while queue:
        i = queue.popleft()
        x = elements[i]
        n = wl[i]
        row = np.full(nS, EXTERIOR, dtype=np.int64)
        for j in range(nS):
            y = mul(x, inv_gens[j])
            k = index.get(y)
            if k is None:
                if n < radius:
                    k = len(elements)
                    if k >= cap:
                        raise BallSizeError(
                            f"ball {group.name} R={radius} exceeds vertex cap "
                            f"{cap}; lower R or raise {MAX_VERTICES_ENV}")
                    index[y] = k
                    elements.append(y)
                    wl.append(n + 1)
                    queue.append(k)
                    row[j] = k
                # else: y is at distance R+1, leave EXTERIOR
            else:
                row[j] = k
        nbr_rows.append(row)
    nbr = np.vstack(nbr_rows) if nbr_rows else np.zeros((0, nS), dtype=np.int64)
    return CayleyBall(group, radius, elements, index, nbr,
                      np.array(wl, dtype=np.int64))


@dataclass(frozen=True)
class SubsetView:
    """A finite subset of a ball's vertices, as a boolean mask."""

    ball: CayleyBall
    mask: np.ndarray

    @classmethod
    def from_indices(cls, ball: CayleyBall, indices: Iterable[int]) -> "SubsetView":
        mask = np.zeros(ball.n_vertices, dtype=bool)
        for i in indices:
            mask[i] = True
        return cls(ball, mask)

    @classmethod
    def from_elements(cls, ball: CayleyBall, elems: Iterable[Element]) -> "SubsetView":
        return cls.from_indices(ball, (ball.index[x] for x in elems))

    def indices(self) -> np.ndarray:
        return np.where(self.mask)[0]

    def element_set(self) -> FrozenSet[Element]:
        return frozenset(self.ball.elements[i] for i in self.indices())

    def __len__(self) -> int:
        return int(self.mask.sum())


def vertex_boundary(ball: CayleyBall, subset: SubsetView) -> SubsetView:
    """The vertex boundary {x in A : some xg with g in S lies outside A}.

    Neighbors outside the stored ball are outside A a fortiori (A is a set
    of ball vertices), so EXTERIOR markers count as exits.  Since S is
    symmetric, the x*g_j^-1 table covers all S-neighbors.
    """
    mask = subset.mask
    if not mask.any():
        return SubsetView(ball, np.zeros_like(mask))
    nbr = ball.nbr
    exterior = nbr == EXTERIOR
    # in-A status of each neighbor; exterior slots count as not-in-A
    nbr_in = np.where(exterior, False, mask[np.clip(nbr, 0, None)])
    exits = (~nbr_in).any(axis=1)
    return SubsetView(ball, mask & exits)


def vertex_boundary_elements(group: GroupModel, A: Set[Element]) -> Set[Element]:
    """Vertex boundary of an explicit element set, by group arithmetic."""
    out = set()
    for x in A:
        for g in group.generators:
            if group.multiply(x, g) not in A:
                out.add(x)
                break
    return out
