"""Zero-temperature single-spin-flip dynamics.

At each step a uniformly chosen site ``i`` looks at its effective field
``m_i = sum_j J_ij s_j``:

* ``s_i * m_i < 0``: flipping lowers the energy, the spin flips;
* ``m_i == 0``: the move costs nothing and the spin is *set* to the coin value
  (a fair +-1 coin, or a fixed -1 / +1 under the monotone policies);
* otherwise the spin stays.

Fields are cached and updated in O(n) per accepted flip. Integer couplings
use exact ``int64`` accumulators; real couplings use ``float64`` with a full
resync every ``n*n`` steps.

Two execution paths share one stream of sites and coins:

* a numba kernel (default), and
* a reference loop over :func:`step` (``verify=True``) that also checks the
  energy and field caches at every step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from . import streams
from .couplings import CouplingMatrix

LANDSCAPE_MAX_N = 22


class ZeroFieldPolicy(enum.Enum):
    FAIR_COIN = "fair_coin"
    ALWAYS_MINUS = "always_minus"
    ALWAYS_PLUS = "always_plus"

    @classmethod
    def parse(cls, value) -> "ZeroFieldPolicy":
        if isinstance(value, cls):
            return value
        aliases = {"fair": cls.FAIR_COIN, "minus": cls.ALWAYS_MINUS, "plus": cls.ALWAYS_PLUS}
        if value in aliases:
            return aliases[value]
        return cls(value)

    def mirror(self) -> "ZeroFieldPolicy":
        if self is ZeroFieldPolicy.ALWAYS_MINUS:
            return ZeroFieldPolicy.ALWAYS_PLUS
        if self is ZeroFieldPolicy.ALWAYS_PLUS:
            return ZeroFieldPolicy.ALWAYS_MINUS
        return self

    @property
    def code(self) -> int:
        return _POLICY_CODE[self]


_POLICY_CODE = {ZeroFieldPolicy.FAIR_COIN: 0, ZeroFieldPolicy.ALWAYS_MINUS: -1, ZeroFieldPolicy.ALWAYS_PLUS: 1}


class Status(str, enum.Enum):
    GROUND_PLUS = "ground_plus"
    GROUND_MINUS = "ground_minus"
    STRICT_LOCAL_MIN = "strict_local_min"
    PLATEAU = "plateau"
    BUDGET_EXHAUSTED = "budget_exhausted"

    def __str__(self):
        return self.value


class Absorption(str, enum.Enum):
    GROUND_PLUS = "ground_plus"
    GROUND_MINUS = "ground_minus"
    STRICT_LOCAL_MIN = "strict_local_min"
    PLATEAU_MEMBER = "plateau_member"
    NONE = "none"

    def __str__(self):
        return self.value


# kernel status codes
_CONTINUE, _GROUND_PLUS, _GROUND_MINUS, _STRICT, _PLATEAU, _BUDGET = range(6)
_STATUS_OF_CODE = {
    _GROUND_PLUS: Status.GROUND_PLUS,
    _GROUND_MINUS: Status.GROUND_MINUS,
    _STRICT: Status.STRICT_LOCAL_MIN,
    _PLATEAU: Status.PLATEAU,
    _BUDGET: Status.BUDGET_EXHAUSTED,
}


# ----------------------------------------------------------------------------
# configurations


def as_spins(sigma, n: int | None = None) -> np.ndarray:
    """Validate and return ``sigma`` as an ``int8`` vector of +-1."""
    s = np.asarray(sigma)
    if s.ndim != 1:
        raise ValueError("spin configuration must be one-dimensional")
    if n is not None and len(s) != n:
        raise ValueError(f"spin configuration has length {len(s)}, expected {n}")
    if not np.all((s == 1) | (s == -1)):
        raise ValueError("spins must be exactly -1 or +1")
    return s.astype(np.int8)


def uniform_spins(n: int, rng: np.random.Generator) -> np.ndarray:
    """Product measure: i.i.d. fair +-1 spins."""
    return (2 * rng.integers(0, 2, size=n, dtype=np.int8) - 1).astype(np.int8)


def spins_with_magnetization(n: int, m0: int, rng: np.random.Generator) -> np.ndarray:
    """``(n + m0)/2`` plus spins at uniformly random positions."""
    if abs(m0) > n:
        raise ValueError(f"|m0| = {abs(m0)} exceeds n = {n}")
    if (n + m0) % 2:
        raise ValueError(f"m0 = {m0} has the wrong parity for n = {n}")
    s = -np.ones(n, dtype=np.int8)
    s[: (n + m0) // 2] = 1
    rng.shuffle(s)
    return s


def spins_from_code(code: int, n: int) -> np.ndarray:
    """Bit ``i`` of ``code`` set means spin ``i`` is +1."""
    bits = (int(code) >> np.arange(n)) & 1
    return (2 * bits - 1).astype(np.int8)


def code_from_spins(sigma) -> int:
    s = np.asarray(sigma)
    return int(sum(1 << i for i in np.flatnonzero(s > 0)))


# ----------------------------------------------------------------------------
# energies and fields (authoritative full recomputation)


def _check_dims(J: CouplingMatrix, sigma) -> np.ndarray:
    return as_spins(sigma, J.n)


def compute_fields(J: CouplingMatrix, sigma) -> np.ndarray:
    """``m_i = sum_{j != i} J_ij sigma_j`` for every site."""
    s = _check_dims(J, sigma)
    dtype = np.int64 if J.is_integral else np.float64
    return J.entries @ s.astype(dtype)


def scaled_energy(J: CouplingMatrix, sigma):
    """``n * H(sigma) = -sum_{i<j} J_ij sigma_i sigma_j``, exact for integer couplings."""
    s = _check_dims(J, sigma)
    m = compute_fields(J, s)
    total = -(s.astype(m.dtype) @ m)
    if J.is_integral:
        return int(total) // 2
    return float(total) / 2


def energy(J: CouplingMatrix, sigma) -> float:
    """``H(sigma) = -(1/n) sum_{i<j} J_ij sigma_i sigma_j``."""
    return scaled_energy(J, sigma) / J.n


# ----------------------------------------------------------------------------
# chain state


@dataclass
class DynamicsState:
    spins: np.ndarray
    fields: np.ndarray
    magnetization: int
    step: int = 0
    unsat_count: int = 0
    zero_count: int = 0
    zero_plus_count: int = 0  # zero-field sites currently at +1

    @classmethod
    def from_spins(cls, J: CouplingMatrix, sigma) -> "DynamicsState":
        s = _check_dims(J, sigma).copy()
        state = cls(s, compute_fields(J, s), int(s.sum(dtype=np.int64)))
        state.recount()
        return state

    @property
    def n(self) -> int:
        return len(self.spins)

    def recount(self) -> None:
        prod = self.spins * self.fields
        zero = self.fields == 0
        self.unsat_count = int(np.count_nonzero(prod < 0))
        self.zero_count = int(np.count_nonzero(zero))
        self.zero_plus_count = int(np.count_nonzero(zero & (self.spins > 0)))

    def resync(self, J: CouplingMatrix) -> None:
        """Recompute fields from scratch (bounds float drift)."""
        self.fields = compute_fields(J, self.spins)
        self.recount()

    def copy(self) -> "DynamicsState":
        return DynamicsState(
            self.spins.copy(), self.fields.copy(), self.magnetization, self.step,
            self.unsat_count, self.zero_count, self.zero_plus_count,
        )

    def verify(self, J: CouplingMatrix, rtol: float = 1e-9) -> None:
        """Raise ``AssertionError`` if any cached quantity disagrees with a recomputation."""
        exact = compute_fields(J, self.spins)
        if J.is_integral:
            if not np.array_equal(exact, self.fields):
                bad = int(np.flatnonzero(exact != self.fields)[0])
                raise AssertionError(f"field cache mismatch at site {bad}: {self.fields[bad]} != {exact[bad]}")
        else:
            scale = max(1.0, float(np.abs(J.entries).sum(axis=1).max()))
            tol = rtol * self.n * scale
            err = np.abs(exact - self.fields)
            if err.max(initial=0.0) > tol:
                bad = int(np.argmax(err))
                raise AssertionError(f"field cache drift {err[bad]:.3e} at site {bad} exceeds {tol:.3e}")
        if self.magnetization != int(self.spins.sum(dtype=np.int64)):
            raise AssertionError("cached magnetization is stale")
        ref = DynamicsState(self.spins, self.fields, self.magnetization)
        ref.recount()
        if (ref.unsat_count, ref.zero_count, ref.zero_plus_count) != (
            self.unsat_count, self.zero_count, self.zero_plus_count,
        ):
            raise AssertionError("cached unsatisfied/zero-field counts are stale")


def satisfaction(state: DynamicsState, i: int) -> int:
    """``S_i = sign(m_i) * sigma_i`` with ``sign(0) = 0``."""
    if not 0 <= i < state.n:
        raise IndexError(f"site {i} out of range for n = {state.n}")
    return int(np.sign(state.fields[i])) * int(state.spins[i])


def _site_class(s, m) -> tuple[int, int, int]:
    """(unsat, zero, zero_plus) contribution of one site."""
    if m == 0:
        return 0, 1, int(s > 0)
    return int(s * m < 0), 0, 0


def step(state: DynamicsState, J: CouplingMatrix, site: int, coin: int) -> DynamicsState:
    """Update ``site`` once. Mutates and returns ``state``.

    ``coin`` is the value the spin takes if its field is exactly zero.
    """
    if not 0 <= site < state.n:
        raise IndexError(f"site {site} out of range for n = {state.n}")
    if coin not in (-1, 1):
        raise ValueError(f"coin must be -1 or +1, got {coin}")
    s = int(state.spins[site])
    m = state.fields[site]
    state.step += 1
    if s * m < 0 or (m == 0 and coin != s):
        new = -s
        # the flipped site keeps its field; only its own class changes
        u0, z0, zp0 = _site_class(s, m)
        u1, z1, zp1 = _site_class(new, m)
        state.unsat_count += u1 - u0
        state.zero_count += z1 - z0
        state.zero_plus_count += zp1 - zp0

        row = J.entries[site]
        nz = np.flatnonzero(row)
        old_f = state.fields[nz]
        sp = state.spins[nz]
        new_f = old_f + 2 * new * row[nz]
        state.unsat_count += int(np.count_nonzero(sp * new_f < 0)) - int(np.count_nonzero(sp * old_f < 0))
        state.zero_count += int(np.count_nonzero(new_f == 0)) - int(np.count_nonzero(old_f == 0))
        state.zero_plus_count += int(np.count_nonzero((new_f == 0) & (sp > 0))) - int(
            np.count_nonzero((old_f == 0) & (sp > 0))
        )
        state.fields[nz] = new_f
        state.spins[site] = new
        state.magnetization += 2 * new
    return state


def _terminal(state: DynamicsState, policy_code: int, quiet: int, quiet_limit: int) -> int:
    if state.unsat_count != 0:
        return _CONTINUE
    n = state.n
    if state.magnetization == n:
        return _GROUND_PLUS
    if state.magnetization == -n:
        return _GROUND_MINUS
    if state.zero_count == 0:
        return _STRICT
    if policy_code == -1 and state.zero_plus_count == 0:
        return _PLATEAU
    if policy_code == 1 and state.zero_count == state.zero_plus_count:
        return _PLATEAU
    if quiet >= quiet_limit:
        return _PLATEAU
    return _CONTINUE


# ----------------------------------------------------------------------------
# numba kernel

# counters layout
_C_STEP, _C_FLIPS, _C_STRICT, _C_UNSAT, _C_ZERO, _C_ZPLUS, _C_MAG, _C_QUIET, _C_NTRACE, _C_NLOG = range(10)


@numba.njit(cache=True, nogil=True)
def _kernel_terminal(n, counters, policy_code, quiet_limit):
    if counters[_C_UNSAT] != 0:
        return _CONTINUE
    mag = counters[_C_MAG]
    if mag == n:
        return _GROUND_PLUS
    if mag == -n:
        return _GROUND_MINUS
    if counters[_C_ZERO] == 0:
        return _STRICT
    if policy_code == -1 and counters[_C_ZPLUS] == 0:
        return _PLATEAU
    if policy_code == 1 and counters[_C_ZERO] == counters[_C_ZPLUS]:
        return _PLATEAU
    if counters[_C_QUIET] >= quiet_limit:
        return _PLATEAU
    return _CONTINUE


@numba.njit(cache=True, nogil=True)
def _kernel_resync(J, spins, fields, counters):
    n = spins.shape[0]
    unsat = 0
    zero = 0
    zplus = 0
    for i in range(n):
        acc = J[i, 0] * 0
        for j in range(n):
            acc += J[i, j] * spins[j]
        fields[i] = acc
        if acc == 0:
            zero += 1
            if spins[i] > 0:
                zplus += 1
        elif spins[i] * acc < 0:
            unsat += 1
    counters[_C_UNSAT] = unsat
    counters[_C_ZERO] = zero
    counters[_C_ZPLUS] = zplus


@numba.njit(cache=True, nogil=True)
def _kernel_advance(J, spins, fields, sites, coins, policy_code, max_steps, quiet_limit,
                    resync_every, counters, trace_stride, trace, flip_log):
    """Consume one block of (site, coin) pairs; returns a status code."""
    n = spins.shape[0]
    for k in range(sites.shape[0]):
        status = _kernel_terminal(n, counters, policy_code, quiet_limit)
        if status != _CONTINUE:
            return status
        if counters[_C_STEP] >= max_steps:
            return _BUDGET
        i = sites[k]
        s = spins[i]
        m = fields[i]
        if policy_code == 0:
            c = coins[k]
        else:
            c = policy_code
        strict = s * m < 0
        flip = strict or (m == 0 and c != s)
        counters[_C_STEP] += 1
        if flip:
            new = -s
            if m == 0:
                # zero-field site changes sign: only zero_plus moves
                counters[_C_ZPLUS] += 1 if new > 0 else -1
            else:
                # was unsatisfied, now satisfied
                counters[_C_UNSAT] -= 1
            spins[i] = new
            for j in range(n):
                w = J[i, j]
                if w == 0:
                    continue
                sj = spins[j]
                f_old = fields[j]
                f_new = f_old + 2 * new * w
                fields[j] = f_new
                if f_old == 0:
                    counters[_C_ZERO] -= 1
                    if sj > 0:
                        counters[_C_ZPLUS] -= 1
                elif sj * f_old < 0:
                    counters[_C_UNSAT] -= 1
                if f_new == 0:
                    counters[_C_ZERO] += 1
                    if sj > 0:
                        counters[_C_ZPLUS] += 1
                elif sj * f_new < 0:
                    counters[_C_UNSAT] += 1
            counters[_C_MAG] += 2 * new
            counters[_C_FLIPS] += 1
            if strict:
                counters[_C_STRICT] += 1
            if flip_log.shape[0] > 0:
                idx = counters[_C_NLOG]
                flip_log[idx, 0] = counters[_C_STEP]
                flip_log[idx, 1] = i
                counters[_C_NLOG] = idx + 1
        if strict:
            counters[_C_QUIET] = 0
        elif counters[_C_UNSAT] == 0:
            counters[_C_QUIET] += 1
        else:
            counters[_C_QUIET] = 0
        if resync_every > 0 and counters[_C_STEP] % resync_every == 0:
            _kernel_resync(J, spins, fields, counters)
        if trace_stride > 0 and counters[_C_STEP] % trace_stride == 0:
            idx = counters[_C_NTRACE]
            trace[idx, 0] = counters[_C_STEP]
            trace[idx, 1] = counters[_C_MAG]
            counters[_C_NTRACE] = idx + 1
    return _CONTINUE


# ----------------------------------------------------------------------------
# runs


@dataclass
class RunOutcome:
    status: Status
    final_state: DynamicsState
    steps_taken: int
    flips: int
    strict_flips: int = 0
    magnetization_trace: np.ndarray | None = None  # rows of (t, M_t)
    flip_log: np.ndarray | None = None  # rows of (t, site), t is the step count after the flip
    energy_checks: int = field(default=0, repr=False)

    @property
    def final_spins(self) -> np.ndarray:
        return self.final_state.spins

    @property
    def final_magnetization(self) -> int:
        return self.final_state.magnetization

    @property
    def absorbed(self) -> bool:
        return self.status in (Status.GROUND_PLUS, Status.GROUND_MINUS, Status.STRICT_LOCAL_MIN)


def default_max_steps(n: int) -> int:
    return int(math.ceil(50 * n * math.log(max(n, 2))))


def default_trace_stride(n: int) -> int:
    return max(1, n // 10)


def run(
    J: CouplingMatrix,
    sigma0,
    policy="fair_coin",
    max_steps: int | None = None,
    seed: int = 0,
    trace_stride: int | None = None,
    *,
    verify: bool = False,
    record_flips: bool = False,
) -> RunOutcome:
    """Run the chain from ``sigma0`` until absorption, plateau, or budget.

    ``trace_stride=0`` selects the default stride (``n // 10``); ``None``
    disables tracing. ``verify=True`` runs the reference loop with per-step
    energy and cache checks; it is much slower and produces the same
    trajectory.
    """
    policy = ZeroFieldPolicy.parse(policy)
    sigma0 = _check_dims(J, sigma0)
    n = J.n
    if max_steps is None:
        max_steps = default_max_steps(n)
    if max_steps <= 0:
        raise ValueError(f"max_steps must be positive, got {max_steps}")
    if trace_stride == 0:
        trace_stride = default_trace_stride(n)
    if trace_stride is not None and trace_stride < 0:
        raise ValueError("trace_stride must be positive")
    stream = streams.UpdateStream(seed, n)
    if verify:
        return _run_reference(J, sigma0, policy, max_steps, stream, trace_stride, record_flips)
    return _run_kernel(J, sigma0, policy, max_steps, stream, trace_stride, record_flips)


def _run_kernel(J, sigma0, policy, max_steps, stream, trace_stride, record_flips) -> RunOutcome:
    n = J.n
    state = DynamicsState.from_spins(J, sigma0)
    counters = np.zeros(10, dtype=np.int64)
    counters[_C_UNSAT] = state.unsat_count
    counters[_C_ZERO] = state.zero_count
    counters[_C_ZPLUS] = state.zero_plus_count
    counters[_C_MAG] = state.magnetization
    stride = trace_stride or 0
    trace_buf = np.zeros((streams.BLOCK // stride + 1 if stride else 0, 2), dtype=np.int64)
    log_buf = np.zeros((streams.BLOCK if record_flips else 0, 2), dtype=np.int64)
    traces = [np.array([[0, state.magnetization]], dtype=np.int64)] if stride else []
    logs = []
    resync_every = 0 if J.is_integral else n * n
    entries = np.ascontiguousarray(J.entries)
    code = _CONTINUE
    while code == _CONTINUE:
        sites, coins = stream.next_block()
        counters[_C_NTRACE] = 0
        counters[_C_NLOG] = 0
        code = _kernel_advance(entries, state.spins, state.fields, sites, coins, policy.code,
                               max_steps, n * n, resync_every, counters, stride, trace_buf, log_buf)
        if stride:
            traces.append(trace_buf[: counters[_C_NTRACE]].copy())
        if record_flips:
            logs.append(log_buf[: counters[_C_NLOG]].copy())
    state.step = int(counters[_C_STEP])
    state.magnetization = int(counters[_C_MAG])
    state.unsat_count = int(counters[_C_UNSAT])
    state.zero_count = int(counters[_C_ZERO])
    state.zero_plus_count = int(counters[_C_ZPLUS])
    trace = _finish_trace(traces, state) if stride else None
    flip_log = np.concatenate(logs) if record_flips else None
    return RunOutcome(_STATUS_OF_CODE[code], state, state.step, int(counters[_C_FLIPS]),
                      int(counters[_C_STRICT]), trace, flip_log)


def _finish_trace(parts, state) -> np.ndarray:
    trace = np.concatenate(parts)
    if trace[-1, 0] != state.step:
        trace = np.vstack([trace, [[state.step, state.magnetization]]])
    return trace


def _run_reference(J, sigma0, policy, max_steps, stream, trace_stride, record_flips) -> RunOutcome:
    n = J.n
    state = DynamicsState.from_spins(J, sigma0)
    quiet = 0
    flips = strict_flips = checks = 0
    trace = [(0, state.magnetization)] if trace_stride else None
    flip_log = [] if record_flips else None
    resync_every = 0 if J.is_integral else n * n
    h = scaled_energy(J, state.spins)
    code = _CONTINUE
    for sites, coins in stream:
        for site, coin in zip(sites.tolist(), coins.tolist()):
            code = _terminal(state, policy.code, quiet, n * n)
            if code == _CONTINUE and state.step >= max_steps:
                code = _BUDGET
            if code != _CONTINUE:
                break
            if policy.code != 0:
                coin = policy.code
            before = int(state.spins[site])
            strict = before * state.fields[site] < 0
            step(state, J, site, coin)
            flipped = int(state.spins[site]) != before
            if flipped:
                flips += 1
                strict_flips += int(strict)
                if record_flips:
                    flip_log.append((state.step, site))
            quiet = 0 if strict else (quiet + 1 if state.unsat_count == 0 else 0)
            if resync_every and state.step % resync_every == 0:
                state.resync(J)
            if trace_stride and state.step % trace_stride == 0:
                trace.append((state.step, state.magnetization))
            # per-step audit against full recomputation
            state.verify(J)
            h_new = scaled_energy(J, state.spins)
            _check_energy_change(J, h, h_new, strict, flipped)
            h = h_new
            checks += 1
        if code != _CONTINUE:
            break
    trace_arr = None
    if trace_stride:
        trace_arr = _finish_trace([np.array(trace, dtype=np.int64).reshape(-1, 2)], state)
    log_arr = np.array(flip_log, dtype=np.int64).reshape(-1, 2) if record_flips else None
    return RunOutcome(_STATUS_OF_CODE[code], state, state.step, flips, strict_flips,
                      trace_arr, log_arr, checks)


def _check_energy_change(J, h_old, h_new, strict, flipped):
    if J.is_integral:
        ok = (h_new < h_old) if strict else (h_new == h_old)
    else:
        tol = 1e-9 * max(1.0, abs(h_old))
        ok = (h_new < h_old + tol) if strict else abs(h_new - h_old) <= tol
    if not ok:
        kind = "strict flip" if strict else ("zero-field flip" if flipped else "rejected move")
        raise AssertionError(f"energy went from {h_old} to {h_new} on a {kind}")


# ----------------------------------------------------------------------------
# absorbing-state classification


def classify_spins(sigma: np.ndarray, fields: np.ndarray) -> Absorption:
    n = len(sigma)
    sat = np.sign(fields) * sigma
    total = int(sigma.sum(dtype=np.int64))
    if abs(total) == n and np.all(sat >= 0):
        return Absorption.GROUND_PLUS if total > 0 else Absorption.GROUND_MINUS
    if np.any(sat < 0):
        return Absorption.NONE
    if np.all(sat > 0):
        return Absorption.STRICT_LOCAL_MIN
    return Absorption.PLATEAU_MEMBER


def is_absorbing(J: CouplingMatrix, sigma) -> Absorption:
    """Classify ``sigma`` as a ground state, strict local minimum, plateau member, or none."""
    s = _check_dims(J, sigma)
    return classify_spins(s, compute_fields(J, s))


_ABS_CODES = list(Absorption)


@dataclass
class LandscapeCensus:
    """Exhaustive classification of ``{-1,+1}^n``; state ``k`` has spin ``i`` = +1 iff bit ``i`` of ``k``."""

    n: int
    energies: np.ndarray  # H per state
    classes: np.ndarray  # index into list(Absorption)
    min_energy: float

    def count(self, kind: Absorption) -> int:
        return int(np.count_nonzero(self.classes == _ABS_CODES.index(kind)))

    def codes(self, kind: Absorption) -> np.ndarray:
        return np.flatnonzero(self.classes == _ABS_CODES.index(kind))

    def classification(self, code: int) -> Absorption:
        return _ABS_CODES[int(self.classes[code])]

    @property
    def ground_states(self) -> int:
        return self.count(Absorption.GROUND_PLUS) + self.count(Absorption.GROUND_MINUS)

    @property
    def strict_local_minima(self) -> int:
        return self.count(Absorption.STRICT_LOCAL_MIN)

    @property
    def plateau_members(self) -> int:
        return self.count(Absorption.PLATEAU_MEMBER)

    def absorbing_codes(self) -> np.ndarray:
        return np.flatnonzero(self.classes != _ABS_CODES.index(Absorption.NONE))

    def summary(self) -> dict:
        return {
            "n": self.n,
            "ground_states": self.ground_states,
            "strict_local_minima": self.strict_local_minima,
            "plateau_members": self.plateau_members,
            "min_energy": self.min_energy,
        }


def enumerate_landscape(J: CouplingMatrix, chunk: int = 1 << 15) -> LandscapeCensus:
    """Brute-force census of all ``2**n`` configurations (``n <= 22``)."""
    n = J.n
    if n > LANDSCAPE_MAX_N:
        raise ValueError(f"enumerate_landscape is capped at n = {LANDSCAPE_MAX_N}, got {n}")
    total = 1 << n
    dtype = np.int64 if J.is_integral else np.float64
    mat = J.entries.astype(dtype)
    energies = np.empty(total, dtype=np.float64)
    classes = np.empty(total, dtype=np.int8)
    shifts = np.arange(n, dtype=np.int64)
    none_c = _ABS_CODES.index(Absorption.NONE)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        spins = (2 * ((codes[:, None] >> shifts) & 1) - 1).astype(dtype)
        fields = spins @ mat
        energies[codes] = -(spins * fields).sum(axis=1) / (2 * n)
        sat = np.sign(fields) * spins
        any_unsat = (sat < 0).any(axis=1)
        all_strict = (sat > 0).all(axis=1)
        mag = spins.sum(axis=1)
        cls = np.full(len(codes), _ABS_CODES.index(Absorption.PLATEAU_MEMBER), dtype=np.int8)
        cls[all_strict] = _ABS_CODES.index(Absorption.STRICT_LOCAL_MIN)
        cls[any_unsat] = none_c
        cls[(mag == n) & ~any_unsat] = _ABS_CODES.index(Absorption.GROUND_PLUS)
        cls[(mag == -n) & ~any_unsat] = _ABS_CODES.index(Absorption.GROUND_MINUS)
        classes[codes] = cls
    return LandscapeCensus(n, energies, classes, float(energies.min()))
