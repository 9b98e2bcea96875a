"""Quenched coupling matrices for the disordered Curie-Weiss model.

Three families are supported:

* ``bernoulli(p)``: the dense Erdos-Renyi graph G(n, p), entries 0/1.
* ``pareto(alpha, scale)``: heavy tails, ``P(J >= x) = (x/scale)**-alpha``.
* ``constant(value)``: the classical (homogeneous) Curie-Weiss model.

Hand-built matrices (test fixtures, loaded files) use the ``custom`` tag.

Entry ``J[i, j]`` for ``i < j`` is a function of ``(seed, i, j)`` only; see
:func:`ztdyn.streams.pair_uniforms`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import streams

FAMILIES = ("bernoulli", "pareto", "constant", "custom")


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Symmetric, non-negative coupling matrix with zero diagonal.

    ``entries`` is read-only. Integer families store ``int64`` entries so that
    effective fields can be accumulated exactly; Pareto entries are ``float64``.
    """

    n: int
    entries: np.ndarray
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown coupling family {self.family!r}")
        if self.entries.shape != (self.n, self.n):
            raise ValueError(f"entries shape {self.entries.shape} does not match n={self.n}")
        self.entries.setflags(write=False)

    @property
    def is_integral(self) -> bool:
        return self.entries.dtype.kind in "iu"

    @property
    def family_tag(self) -> str:
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    def total_weight(self):
        """Sum over unordered pairs."""
        return self.entries.sum() / 2 if not self.is_integral else int(self.entries.sum()) // 2

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def with_entries(self, entries) -> "CouplingMatrix":
        """Same family tag, new entries (used for hand-built fixtures)."""
        return from_array(entries, family=self.family, params=self.params, seed=self.seed)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _symmetric_from_pairs(values: np.ndarray, n: int, dtype) -> np.ndarray:
    out = np.zeros((n, n), dtype=dtype)
    # np.tril_indices enumerates (j, i), i < j, in exactly the pair-stream order
    rows, cols = np.tril_indices(n, -1)
    out[rows, cols] = values
    out[cols, rows] = values
    return out


def sample_bernoulli(n: int, p: float, seed: int = 0) -> CouplingMatrix:
    """Adjacency matrix of G(n, p)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    u = streams.pair_uniforms(seed, n)
    entries = _symmetric_from_pairs((u < p).astype(np.int64), n, np.int64)
    return CouplingMatrix(n, entries, "bernoulli", {"p": float(p)}, streams.check_seed(seed))


def pareto_inverse_cdf(u, alpha: float, scale: float = 1.0):
    """Inverse transform for the Pareto tail: ``scale * u**(-1/alpha)``, ``u`` in (0, 1]."""
    return scale * np.power(u, -1.0 / alpha)


def sample_pareto(n: int, alpha: float, scale: float = 1.0, seed: int = 0) -> CouplingMatrix:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    # 1 - u lies in (0, 1], so every draw is finite and >= scale
    u = 1.0 - streams.pair_uniforms(seed, n)
    values = pareto_inverse_cdf(u, alpha, scale)
    entries = _symmetric_from_pairs(values, n, np.float64)
    params = {"alpha": float(alpha), "scale": float(scale)}
    return CouplingMatrix(n, entries, "pareto", params, streams.check_seed(seed))


def sample_constant(n: int, value: float = 1.0) -> CouplingMatrix:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not value > 0:
        raise ValueError(f"value must be positive, got {value}")
    if float(value).is_integer():
        entries = np.full((n, n), int(value), dtype=np.int64)
    else:
        entries = np.full((n, n), float(value), dtype=np.float64)
    np.fill_diagonal(entries, 0)
    return CouplingMatrix(n, entries, "constant", {"value": value}, 0)


def sample(family: str, n: int, seed: int = 0, **params) -> CouplingMatrix:
    """Dispatch on family name; ``params`` are the family's keyword parameters."""
    if family == "bernoulli":
        return sample_bernoulli(n, params["p"], seed)
    if family == "pareto":
        return sample_pareto(n, params["alpha"], params.get("scale", 1.0), seed)
    if family == "constant":
        return sample_constant(n, params.get("value", 1.0))
    raise ValueError(f"unknown coupling family {family!r}")


def from_array(entries, family: str = "custom", params: dict | None = None, seed: int = 0) -> CouplingMatrix:
    """Wrap an explicit matrix. Integral input stays integral.

    No invariant is enforced here; call :func:`validate` on the result.
    """
    a = np.array(entries)
    if a.dtype.kind == "b":
        a = a.astype(np.int64)
    elif a.dtype.kind in "iu":
        a = a.astype(np.int64)
    else:
        a = a.astype(np.float64)
        if np.all(np.isfinite(a)) and np.all(a == np.round(a)):
            a = a.astype(np.int64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"coupling matrix must be square, got shape {a.shape}")
    return CouplingMatrix(a.shape[0], a, family, dict(params or {}), seed)


# ----------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    passed: bool
    index: tuple | None = None  # first offending (i, j) when failed


@dataclass
class ValidationReport:
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _first(mask: np.ndarray):
    idx = np.argwhere(mask)
    if len(idx) == 0:
        return None
    return tuple(int(k) for k in idx[0])


def validate(matrix: CouplingMatrix) -> ValidationReport:
    """Check every invariant; failures carry the first offending index."""
    a = matrix.entries
    checks = []
    # symmetry: report the upper-triangle element of the first bad pair
    bad = np.triu(a != a.T, 1)
    checks.append(Check("symmetry", (where := _first(bad)) is None, where))
    diag = np.zeros_like(a, dtype=bool)
    np.fill_diagonal(diag, np.diagonal(a) != 0)
    checks.append(Check("zero_diagonal", (where := _first(diag)) is None, where))
    checks.append(Check("non_negative", (where := _first(a < 0)) is None, where))

    offdiag = ~np.eye(matrix.n, dtype=bool)
    if matrix.family == "bernoulli":
        where = _first(offdiag & (a != 0) & (a != 1))
        checks.append(Check("bernoulli_01", where is None, where))
    elif matrix.family == "pareto":
        scale = matrix.params.get("scale", 1.0)
        where = _first(offdiag & (a < scale))
        checks.append(Check("pareto_support", where is None, where))
    elif matrix.family == "constant":
        value = matrix.params.get("value")
        where = None if value is None else _first(offdiag & (a != value))
        checks.append(Check("constant_value", where is None, where))
    return ValidationReport(checks)


# ----------------------------------------------------------------------------
# text dump / load
#
#   <n> <family> <k=v,k=v> <seed>
#   one row per line, space separated; integers for integral matrices,
#   shortest round-trip decimals otherwise


def dump(matrix: CouplingMatrix, path) -> None:
    params = ",".join(f"{k}={_fmt(v)}" for k, v in matrix.params.items()) or "-"
    lines = [f"{matrix.n} {matrix.family} {params} {matrix.seed}"]
    if matrix.is_integral:
        for row in matrix.entries:
            lines.append(" ".join(str(int(x)) for x in row))
    else:
        for row in matrix.entries:
            lines.append(" ".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_param(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def load(path) -> CouplingMatrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError(f"{path}: malformed header {' '.join(header)!r}")
        n, family, params_text, seed = int(header[0]), header[1], header[2], int(header[3])
        params = {}
        if params_text != "-":
            for item in params_text.split(","):
                k, v = item.split("=", 1)
                params[k] = _parse_param(v)
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected {n} rows of {n} entries")
    integral = all("." not in x and "e" not in x.lower() and "n" not in x.lower() for r in rows for x in r)
    dtype = np.int64 if integral else np.float64
    entries = np.array([[dtype(x) if integral else float(x) for x in r] for r in rows], dtype=dtype)
    return CouplingMatrix(n, entries, family, params, seed)

