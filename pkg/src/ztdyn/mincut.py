"""Local MINCUT on weighted complete graphs.

A partition is the set ``A`` of vertices on one side. ``A`` is a local MINCUT
when no single vertex move (into or out of ``A``) lowers the cut weight. The
greedy search picks a uniform vertex per iteration and puts it on whichever
side gives the smaller cut, breaking ties with a coin.

Under ``A = {i : sigma_i = +1}`` the search is the zero-temperature spin chain
with a fair coin; it reads the same :class:`~ztdyn.streams.UpdateStream` so a
search and a spin run built from one seed can be compared move for move.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import streams
from .couplings import CouplingMatrix
from .dynamics import default_max_steps


@dataclass
class Partition:
    membership: np.ndarray  # bool, True = vertex in A

    def __post_init__(self):
        self.membership = np.asarray(self.membership, dtype=bool)

    @property
    def n(self) -> int:
        return len(self.membership)

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.membership))

    @property
    def is_trivial(self) -> bool:
        return self.size in (0, self.n)

    def complement(self) -> "Partition":
        return Partition(~self.membership)

    @classmethod
    def from_set(cls, n: int, members) -> "Partition":
        m = np.zeros(n, dtype=bool)
        m[list(members)] = True
        return cls(m)


def partition_of_spins(sigma) -> Partition:
    return Partition(np.asarray(sigma) > 0)


def spins_of_partition(part: Partition) -> np.ndarray:
    return np.where(part.membership, 1, -1).astype(np.int8)


def uniform_partition(n: int, rng: np.random.Generator) -> Partition:
    """Uniform over all ``2**n`` subsets."""
    return Partition(rng.integers(0, 2, size=n).astype(bool))


def half_partition(n: int, rng: np.random.Generator) -> Partition:
    """Uniform over subsets of size ``n // 2``."""
    m = np.zeros(n, dtype=bool)
    m[: n // 2] = True
    rng.shuffle(m)
    return Partition(m)


def _check(J: CouplingMatrix, part: Partition) -> None:
    if part.n != J.n:
        raise ValueError(f"partition has {part.n} vertices, couplings have {J.n}")


def cut_value(J: CouplingMatrix, part: Partition):
    """Total weight of edges with exactly one endpoint in ``A``."""
    _check(J, part)
    a = part.membership
    w = J.entries[np.ix_(a, ~a)].sum()
    return int(w) if J.is_integral else float(w)


def move_deltas(J: CouplingMatrix, part: Partition) -> np.ndarray:
    """Change in cut value from moving each vertex to the other side."""
    _check(J, part)
    a = part.membership
    to_a = J.entries[:, a].sum(axis=1)
    to_b = J.entries[:, ~a].sum(axis=1)
    # a vertex in A moving out turns its A-edges into cut edges and its B-edges into internal ones
    return np.where(a, to_a - to_b, to_b - to_a)


class LocalMincut(NamedTuple):
    is_local: bool
    witness: int | None  # a vertex whose move strictly lowers the cut
    strict: bool  # every move strictly raises the cut


def is_local_mincut(J: CouplingMatrix, part: Partition) -> LocalMincut:
    d = move_deltas(J, part)
    improving = np.flatnonzero(d < 0)
    if len(improving):
        return LocalMincut(False, int(improving[0]), False)
    return LocalMincut(True, None, bool(np.all(d > 0)))


class SearchStatus(str, enum.Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL_LOCAL_MINCUT = "nontrivial_local_mincut"
    PLATEAU = "plateau"
    BUDGET_EXHAUSTED = "budget_exhausted"

    def __str__(self):
        return self.value


@dataclass
class SearchOutcome:
    final: Partition
    status: SearchStatus
    iterations: int
    final_cut: float
    moves: int = 0
    move_log: np.ndarray | None = None  # rows of (iteration, vertex)


def greedy_search(
    J: CouplingMatrix,
    start: Partition,
    seed: int = 0,
    max_iters: int | None = None,
    *,
    record_moves: bool = False,
) -> SearchOutcome:
    """Greedy local-MINCUT search from ``start``.

    Stops when no vertex can strictly lower the cut and either the partition
    is trivial or no tie moves remain; a run of ``n*n`` iterations without an
    improving vertex and with tie moves available is reported as a plateau.
    """
    _check(J, start)
    n = J.n
    if max_iters is None:
        max_iters = default_max_steps(n)
    if max_iters <= 0:
        raise ValueError(f"max_iters must be positive, got {max_iters}")

    w = J.entries
    in_a = start.membership.copy()
    row_total = w.sum(axis=1)
    to_a = w[:, in_a].sum(axis=1)

    def tally():
        to_b = row_total - to_a
        d = np.where(in_a, to_a - to_b, to_b - to_a)
        return int(np.count_nonzero(d < 0)), int(np.count_nonzero(d == 0))

    improving, ties = tally()
    size = int(np.count_nonzero(in_a))
    it = quiet = moves = 0
    log = [] if record_moves else None
    status = None
    stream = streams.UpdateStream(seed, n)
    while status is None:
        sites, coins = stream.next_block()
        for v, coin in zip(sites.tolist(), coins.tolist()):
            if improving == 0:
                if size in (0, n):
                    status = SearchStatus.TRIVIAL
                elif ties == 0:
                    status = SearchStatus.NONTRIVIAL_LOCAL_MINCUT
                elif quiet >= n * n:
                    status = SearchStatus.PLATEAU
            if status is None and it >= max_iters:
                status = SearchStatus.BUDGET_EXHAUSTED
            if status is not None:
                break

            cut_if_in = row_total[v] - to_a[v]  # v's contribution with v in A
            cut_if_out = to_a[v]
            if cut_if_in < cut_if_out:
                want, better = True, True
            elif cut_if_in > cut_if_out:
                want, better = False, True
            else:
                want, better = coin > 0, False
            it += 1
            improved = False
            if want != in_a[v]:
                improved = better
                in_a[v] = want
                if want:
                    to_a += w[v]
                    size += 1
                else:
                    to_a -= w[v]
                    size -= 1
                improving, ties = tally()
                moves += 1
                if record_moves:
                    log.append((it, v))
            if improved:
                quiet = 0
            elif improving == 0:
                quiet += 1
            else:
                quiet = 0

    final = Partition(in_a)
    move_log = np.array(log, dtype=np.int64).reshape(-1, 2) if record_moves else None
    return SearchOutcome(final, status, it, cut_value(J, final), moves, move_log)
