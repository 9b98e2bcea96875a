"""Bully bonds and certified non-trivial local minima.

A coupling ``J_ij`` is a bully bond when it outweighs everything else attached
to either endpoint:

    J_ij > sum_{k not in {i,j}} J_ik   and   J_ij > sum_{k not in {i,j}} J_jk.

Whatever the other spins do, an endpoint's field then has the sign of its
partner, so a pair with equal spins never flips again. Two vertex-disjoint
bully bonds held at opposite signs rule out both uniform states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .couplings import CouplingMatrix
from .dynamics import Absorption, is_absorbing, run


@dataclass(frozen=True)
class BullyBond:
    i: int
    j: int
    strength: float
    row_sum_i: float  # weight at i excluding the bond itself
    row_sum_j: float

    @property
    def vertices(self) -> tuple[int, int]:
        return (self.i, self.j)


def _check_pair(J: CouplingMatrix, i: int, j: int) -> None:
    if i == j:
        raise ValueError("a bond needs two distinct vertices")
    for v in (i, j):
        if not 0 <= v < J.n:
            raise IndexError(f"vertex {v} out of range for n = {J.n}")


def is_bully_bond(J: CouplingMatrix, i: int, j: int) -> bool:
    _check_pair(J, i, j)
    a = J.entries
    w = a[i, j]
    rest_i = a[i].sum() - a[i, i] - w
    rest_j = a[j].sum() - a[j, j] - w
    return bool(w > rest_i and w > rest_j)


def bully_census(J: CouplingMatrix) -> list[BullyBond]:
    """All bully bonds, ordered by ``(i, j)``. O(n^2)."""
    a = J.entries
    rows = a.sum(axis=1) - np.diagonal(a)
    rest_i = rows[:, None] - a
    rest_j = rows[None, :] - a
    mask = np.triu((a > rest_i) & (a > rest_j), 1)
    out = []
    for i, j in np.argwhere(mask):
        i, j = int(i), int(j)
        out.append(BullyBond(i, j, a[i, j].item(), rest_i[i, j].item(), rest_j[i, j].item()))
    return out


def has_disjoint_pair(census: list[BullyBond]) -> bool:
    # census bonds are pairwise disjoint, so any two will do
    return len(census) >= 2


def witness_local_minimum(J: CouplingMatrix, b1: BullyBond, b2: BullyBond, background: int = 1) -> np.ndarray:
    """``b1`` endpoints at +1, ``b2`` endpoints at -1, everything else ``background``.

    The four endpoints are strictly satisfied; the remaining spins are not
    guaranteed to be, see :func:`certify_witness`.
    """
    if background not in (-1, 1):
        raise ValueError("background must be -1 or +1")
    if set(b1.vertices) & set(b2.vertices):
        raise ValueError(f"bonds {b1.vertices} and {b2.vertices} share a vertex")
    for b in (b1, b2):
        if not is_bully_bond(J, b.i, b.j):
            raise ValueError(f"({b.i}, {b.j}) is not a bully bond of this matrix")
    s = np.full(J.n, background, dtype=np.int8)
    s[list(b1.vertices)] = 1
    s[list(b2.vertices)] = -1
    return s


@dataclass
class Witness:
    spins: np.ndarray
    classification: Absorption
    descended: bool  # True if the raw witness was not itself absorbing

    @property
    def certified(self) -> bool:
        return self.classification is Absorption.STRICT_LOCAL_MIN


def certify_witness(J: CouplingMatrix, b1: BullyBond, b2: BullyBond, background: int = 1,
                    seed: int = 0) -> Witness:
    """Build the two-bond witness and certify it, descending if necessary.

    If the raw witness has unsatisfied background spins, the chain is run from
    it; the four endpoints cannot move, so it can only stop in a non-uniform
    state, which is then classified from scratch.
    """
    s = witness_local_minimum(J, b1, b2, background)
    cls = is_absorbing(J, s)
    if cls is not Absorption.NONE:
        return Witness(s, cls, False)
    out = run(J, s, "fair_coin", seed=seed)
    return Witness(out.final_spins.copy(), is_absorbing(J, out.final_spins), True)
