"""Seeded Monte Carlo experiments and result emission.

Every trial derives its own streams from ``(master seed, trial, purpose[,
replica])``, so results do not depend on the number of worker threads or on
scheduling order. Trials are mapped in order and merged by trial index.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__, bully, couplings, dynamics, mincut, streams
from .dynamics import Status, ZeroFieldPolicy

STATUSES = [s.value for s in Status]


@dataclass
class ExperimentConfig:
    family: str = "bernoulli"
    n: int = 100
    p: float | None = 0.5
    alpha: float | None = None
    scale: float = 1.0
    value: float = 1.0
    trials: int = 1
    replicas: int = 2
    seed: int = 0
    policy: str = "fair_coin"
    m0: int | str | None = None  # None: uniform product measure; int; or "auto:EPS"
    max_steps: int | None = None
    epsilon: float | None = None
    window: int | None = None
    estimator: str = "site"  # q_D estimator: "site" (spin 0) or "full" overlap
    shared_replica_stream: bool = False  # every replica reuses replica 0's stream
    start: str = "uniform"  # mincut start partition: "uniform" or "half"
    trace_stride: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.family not in ("bernoulli", "pareto", "constant"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "bernoulli" and self.p is None:
            raise ValueError("bernoulli couplings need p")
        if self.family == "pareto" and self.alpha is None:
            raise ValueError("pareto couplings need alpha")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        self.policy = ZeroFieldPolicy.parse(self.policy).value
        streams.check_seed(self.seed)

    def echo(self) -> dict:
        """Config as emitted with results. Thread count is excluded so outputs are thread-invariant."""
        d = asdict(self)
        d.pop("threads")
        return d

    @property
    def param(self):
        return {"bernoulli": self.p, "pareto": self.alpha, "constant": self.value}[self.family]

    def couplings_for(self, trial: int) -> couplings.CouplingMatrix:
        seed = streams.derive_seed(self.seed, trial, streams.COUPLINGS)
        return couplings.sample(self.family, self.n, seed, p=self.p, alpha=self.alpha,
                                scale=self.scale, value=self.value)

    def initial_spins(self, trial: int) -> np.ndarray:
        rng = streams.generator(self.seed, trial, streams.INITIAL)
        m0 = resolve_m0(self.n, self.m0)
        if m0 is None:
            return dynamics.uniform_spins(self.n, rng)
        return dynamics.spins_with_magnetization(self.n, m0, rng)

    def dynamics_seed(self, trial: int, replica: int = 0) -> int:
        if self.shared_replica_stream:
            replica = 0
        return streams.derive_seed(self.seed, trial, streams.DYNAMICS, replica)


def resolve_m0(n: int, value) -> int | None:
    """``None``/``"uniform"`` -> None; ``"auto:EPS"`` -> ``ceil(n**(0.5-EPS))`` raised to n's parity."""
    if value is None or value == "uniform":
        return None
    if isinstance(value, str):
        if value.startswith("auto:"):
            eps = float(value[5:])
            if not 0 <= eps < 0.5:
                raise ValueError(f"auto m0 needs 0 <= EPS < 0.5, got {eps}")
            m0 = math.ceil(n ** (0.5 - eps))
            return min(m0 + (n + m0) % 2, n)
        value = int(value)
    m0 = int(value)
    if abs(m0) > n:
        raise ValueError(f"m0 = {m0} exceeds n = {n}")
    if (n + m0) % 2:
        raise ValueError(f"m0 = {m0} has the wrong parity for n = {n} (n + m0 must be even)")
    return m0


def map_trials(fn, trials: int, threads: int = 1) -> list:
    """``[fn(0), ..., fn(trials-1)]``, in trial order regardless of ``threads``."""
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    ci = stats.binomtest(k, n).proportion_ci(confidence_level=level, method="exact")
    return (float(ci.low), float(ci.high))


@dataclass
class ExperimentResult:
    experiment: str
    config: dict
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


# ----------------------------------------------------------------------------
# simulate / absorption


SIMULATE_COLUMNS = ["trial", "seed", "n", "param", "m0", "steps", "flips", "status", "final_magnetization"]


def _simulate_trial(config: ExperimentConfig, J_fixed=None):
    def trial(t):
        J = J_fixed if J_fixed is not None else config.couplings_for(t)
        s0 = config.initial_spins(t)
        seed = config.dynamics_seed(t)
        out = dynamics.run(J, s0, config.policy, config.max_steps, seed, config.trace_stride)
        row = {
            "trial": t, "seed": seed, "n": config.n, "param": config.param,
            "m0": int(s0.sum(dtype=np.int64)), "steps": out.steps_taken, "flips": out.flips,
            "status": out.status.value, "final_magnetization": out.final_magnetization,
        }
        if out.magnetization_trace is not None:
            row["trace"] = out.magnetization_trace.tolist()
        return row
    return trial


def status_histogram(statuses) -> dict:
    hist = {s: 0 for s in STATUSES}
    for s in statuses:
        hist[str(s)] += 1
    return hist


def simulate(config: ExperimentConfig, J: couplings.CouplingMatrix | None = None) -> ExperimentResult:
    """One dynamics run per trial; fresh couplings per trial unless ``J`` is pinned."""
    if J is not None and J.n != config.n:
        raise ValueError(f"pinned couplings have n = {J.n}, config has n = {config.n}")
    rows = map_trials(_simulate_trial(config, J), config.trials, config.threads)
    hist = status_histogram(r["status"] for r in rows)
    k = hist[Status.GROUND_PLUS.value]
    summary = {
        "trials": config.trials,
        "m0": resolve_m0(config.n, config.m0),
        "status_counts": hist,
        "ground_plus_fraction": k / config.trials,
        "ground_plus_ci95": list(clopper_pearson(k, config.trials)),
    }
    return ExperimentResult("simulate", config.echo(), SIMULATE_COLUMNS, rows, summary)


@dataclass
class AbsorptionResult:
    fraction: float
    ci95: tuple
    counts: dict
    trials: int
    m0: int
    result: ExperimentResult

    def fraction_of(self, status) -> float:
        return self.counts[str(status)] / self.trials


def absorption_experiment(config: ExperimentConfig) -> AbsorptionResult:
    """Fraction of trials absorbed in all-plus from an exact initial magnetization."""
    m0 = resolve_m0(config.n, config.m0)
    if m0 is None:
        raise ValueError("absorption_experiment needs an explicit m0")
    res = simulate(config)
    s = res.summary
    return AbsorptionResult(s["ground_plus_fraction"], tuple(s["ground_plus_ci95"]),
                            s["status_counts"], config.trials, m0, res)


# ----------------------------------------------------------------------------
# dynamical order parameter


@dataclass
class QdEstimate:
    estimate: float
    stderr: float
    ci95: tuple
    trials: int
    replicas: int
    family: str
    estimator: str
    per_trial: np.ndarray = field(repr=False)
    status_counts: dict = field(default_factory=dict)

    @property
    def plateau_runs(self) -> int:
        return self.status_counts.get(Status.PLATEAU.value, 0)


QD_COLUMNS = ["trial", "coupling_seed", "m0", "value", "statuses"]


def replica_pair_mean(finals: np.ndarray, estimator: str = "site") -> float:
    """Mean over unordered replica pairs ``a < b`` of the spin-0 product or the full overlap.

    ``finals`` has one row per replica. Unbiased for ``(E_omega sigma_0)^2``
    (``site``) and for the expected two-replica overlap (``full``).
    """
    f = finals.astype(np.int64)
    r = len(f)
    if r < 2:
        raise ValueError("need at least two replicas")
    if estimator == "site":
        s = f[:, 0]
        total = s.sum()
        # sum_{a<b} s_a s_b = (S^2 - sum s_a^2) / 2
        pair_sum = (total * total - r) / 2
    elif estimator == "full":
        col = f.sum(axis=0)
        pair_sum = ((col * col).sum() - r * f.shape[1]) / 2 / f.shape[1]
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    return float(pair_sum / (r * (r - 1) / 2))


def estimate_qd(config: ExperimentConfig) -> QdEstimate:
    if config.replicas < 2:
        raise ValueError("estimate_qd needs at least two replicas")

    def trial(t):
        J = config.couplings_for(t)
        s0 = config.initial_spins(t)
        finals, statuses = [], []
        for r in range(config.replicas):
            out = dynamics.run(J, s0, config.policy, config.max_steps, config.dynamics_seed(t, r))
            finals.append(out.final_spins)
            statuses.append(out.status.value)
        return {
            "trial": t,
            "coupling_seed": J.seed,
            "m0": int(s0.sum(dtype=np.int64)),
            "value": replica_pair_mean(np.array(finals), config.estimator),
            "statuses": statuses,
        }

    rows = map_trials(trial, config.trials, config.threads)
    values = np.array([r["value"] for r in rows])
    est = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else float("nan")
    hist = status_histogram(s for r in rows for s in r["statuses"])
    return QdEstimate(est, se, (est - 1.96 * se, est + 1.96 * se), config.trials, config.replicas,
                      config.family, config.estimator, values, hist)


def qd_result(config: ExperimentConfig) -> ExperimentResult:
    q = estimate_qd(config)
    rows = []
    for t, v in enumerate(q.per_trial):
        rows.append({"trial": t, "value": float(v)})
    summary = {
        "qd": q.estimate, "stderr": q.stderr, "ci95": list(q.ci95),
        "trials": q.trials, "replicas": q.replicas, "estimator": q.estimator,
        "status_counts": q.status_counts,
    }
    return ExperimentResult("qd", config.echo(), ["trial", "value"], rows, summary)


# ----------------------------------------------------------------------------
# initial magnetization


@dataclass
class MagnetizationStat:
    fraction: float
    count: int
    trials: int
    threshold: float
    ci95: tuple
    exact: float  # P(|M_0| >= threshold) under the product measure


def exact_magnetization_tail(n: int, threshold: float) -> float:
    """``P(|2K - n| >= threshold)`` for ``K ~ Bin(n, 1/2)``."""
    k = np.arange(n + 1)
    mask = np.abs(2 * k - n) >= threshold
    return float(stats.binom.pmf(k[mask], n, 0.5).sum())


def initial_magnetization_stat(n: int, epsilon: float, trials: int, seed: int = 0,
                               threads: int = 1) -> MagnetizationStat:
    """Fraction of uniform initial configurations with ``|M_0| >= n**(0.5 - epsilon)``."""
    if not 0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    threshold = n ** (0.5 - epsilon)

    def trial(t):
        s = dynamics.uniform_spins(n, streams.generator(seed, t, streams.INITIAL))
        return abs(int(s.sum(dtype=np.int64))) >= threshold

    hits = sum(map_trials(trial, trials, threads))
    return MagnetizationStat(hits / trials, hits, trials, threshold, clopper_pearson(hits, trials),
                             exact_magnetization_tail(n, threshold))


def mag0_result(n, epsilon, trials, seed, threads=1) -> ExperimentResult:
    st = initial_magnetization_stat(n, epsilon, trials, seed, threads)
    config = {"n": n, "epsilon": epsilon, "trials": trials, "seed": seed}
    summary = {"fraction": st.fraction, "count": st.count, "trials": trials,
               "threshold": st.threshold, "ci95": list(st.ci95), "exact": st.exact}
    row = {"n": n, "epsilon": epsilon, "trials": trials, "count": st.count,
           "fraction": st.fraction, "exact": st.exact}
    return ExperimentResult("mag0", config, list(row), [row], summary)


# ----------------------------------------------------------------------------
# early-time drift


@dataclass
class DriftClass:
    """First-visit tallies, kept per trial so the interval can respect trial clustering."""

    positive_by_trial: np.ndarray
    total_by_trial: np.ndarray

    @property
    def positive(self) -> int:
        return int(self.positive_by_trial.sum())

    @property
    def total(self) -> int:
        return int(self.total_by_trial.sum())

    @property
    def fraction(self) -> float:
        return self.positive / self.total if self.total else float("nan")

    @property
    def stderr(self) -> float:
        """Cluster-robust standard error of the pooled ratio, trials as clusters.

        Draws inside one trial share a coupling matrix and a trajectory, so
        they are far from independent; a per-draw binomial interval would be
        much too narrow.
        """
        k = len(self.total_by_trial)
        if k < 2 or self.total == 0:
            return float("nan")
        resid = self.positive_by_trial - self.fraction * self.total_by_trial
        return math.sqrt(k / (k - 1) * float((resid * resid).sum())) / self.total

    @property
    def ci95(self) -> tuple:
        f, se = self.fraction, self.stderr
        return (f - 1.96 * se, f + 1.96 * se)

    @property
    def ci95_pooled(self) -> tuple:
        """Exact binomial interval treating every first visit as independent."""
        return clopper_pearson(self.positive, self.total)


@dataclass
class DriftResult:
    window: int
    m0: int
    by_initial_spin: dict  # +1 / -1 -> DriftClass

    @property
    def overall(self) -> DriftClass:
        plus, minus = self.by_initial_spin[1], self.by_initial_spin[-1]
        return DriftClass(plus.positive_by_trial + minus.positive_by_trial,
                          plus.total_by_trial + minus.total_by_trial)


def default_window(n: int, epsilon: float) -> int:
    return int(n ** (0.5 + 3 * epsilon))


def drift_probe(config: ExperimentConfig) -> DriftResult:
    """Positive-field frequency at first-visit updates during an early window.

    Each trial starts from magnetization ``m0`` and runs ``window`` steps; at
    every update of a site not yet updated in the window, the field just
    before the update is recorded along with the site's initial spin.
    """
    m0 = resolve_m0(config.n, config.m0)
    if m0 is None:
        raise ValueError("drift_probe needs an explicit m0")
    eps = config.epsilon if config.epsilon is not None else 0.1
    window = config.window if config.window is not None else default_window(config.n, eps)
    if config.epsilon is not None and window > config.n ** (0.5 + 3 * config.epsilon) + 1e-9:
        raise ValueError(f"window {window} exceeds n^(1/2+3eps)")
    policy = ZeroFieldPolicy.parse(config.policy)

    def trial(t):
        J = config.couplings_for(t)
        s0 = config.initial_spins(t)
        state = dynamics.DynamicsState.from_spins(J, s0)
        seen = np.zeros(config.n, dtype=bool)
        counts = np.zeros((2, 2), dtype=np.int64)  # [initial spin is +1][field > 0]
        stream = streams.UpdateStream(config.dynamics_seed(t), config.n)
        steps = 0
        while steps < window:
            sites, coins = stream.next_block()
            for site, coin in zip(sites[: window - steps].tolist(), coins[: window - steps].tolist()):
                if not seen[site]:
                    seen[site] = True
                    counts[int(s0[site] > 0), int(state.fields[site] > 0)] += 1
                dynamics.step(state, J, site, coin if policy.code == 0 else policy.code)
                steps += 1
        return counts

    per_trial = np.array(map_trials(trial, config.trials, config.threads))
    return DriftResult(window, m0, {
        1: DriftClass(per_trial[:, 1, 1], per_trial[:, 1].sum(axis=1)),
        -1: DriftClass(per_trial[:, 0, 1], per_trial[:, 0].sum(axis=1)),
    })


def drift_result(config: ExperimentConfig) -> ExperimentResult:
    d = drift_probe(config)
    rows, summary = [], {"window": d.window, "m0": d.m0}
    for label, cls in (("plus", d.by_initial_spin[1]), ("minus", d.by_initial_spin[-1]), ("all", d.overall)):
        rows.append({"initial_spin": label, "positive": cls.positive, "total": cls.total,
                     "fraction": cls.fraction})
        summary[label] = {"fraction": cls.fraction, "stderr": cls.stderr, "ci95": list(cls.ci95),
                          "ci95_pooled": list(cls.ci95_pooled), "total": cls.total}
    return ExperimentResult("drift", config.echo(), ["initial_spin", "positive", "total", "fraction"],
                            rows, summary)


# ----------------------------------------------------------------------------
# local MINCUT search


MINCUT_COLUMNS = ["trial", "seed", "status", "iterations", "final_cut", "final_size_A"]


def mincut_experiment(config: ExperimentConfig, J: couplings.CouplingMatrix | None = None,
                      start: mincut.Partition | None = None) -> ExperimentResult:
    """Greedy search per trial on a fresh graph (or a pinned ``J`` / ``start``)."""

    def trial(t):
        G = J if J is not None else config.couplings_for(t)
        if start is not None:
            part = start
        else:
            rng = streams.generator(config.seed, t, streams.INITIAL)
            if config.start == "uniform":
                part = mincut.uniform_partition(config.n, rng)
            elif config.start == "half":
                part = mincut.half_partition(config.n, rng)
            else:
                raise ValueError(f"unknown start {config.start!r}")
        seed = config.dynamics_seed(t)
        out = mincut.greedy_search(G, part, seed, config.max_steps)
        return {"trial": t, "seed": seed, "status": out.status.value, "iterations": out.iterations,
                "final_cut": out.final_cut, "final_size_A": out.final.size}

    rows = map_trials(trial, config.trials, config.threads)
    counts = {s.value: 0 for s in mincut.SearchStatus}
    for r in rows:
        counts[r["status"]] += 1
    k = counts[mincut.SearchStatus.TRIVIAL.value]
    summary = {"status_counts": counts, "trivial_fraction": k / config.trials,
               "trivial_ci95": list(clopper_pearson(k, config.trials))}
    return ExperimentResult("mincut", config.echo(), MINCUT_COLUMNS, rows, summary)


# ----------------------------------------------------------------------------
# bully bonds


BULLY_COLUMNS = ["trial", "seed", "census_size", "has_disjoint_pair", "witness_certified", "witness_energy"]


def bully_experiment(config: ExperimentConfig) -> ExperimentResult:
    def trial(t):
        J = config.couplings_for(t)
        census = bully.bully_census(J)
        row = {"trial": t, "seed": J.seed, "census_size": len(census),
               "has_disjoint_pair": bully.has_disjoint_pair(census),
               "witness_certified": False, "witness_energy": None}
        if row["has_disjoint_pair"]:
            w = bully.certify_witness(J, census[0], census[1], 1, config.dynamics_seed(t))
            row["witness_certified"] = w.certified
            row["witness_energy"] = dynamics.energy(J, w.spins)
        return row

    rows = map_trials(trial, config.trials, config.threads)
    sizes = np.array([r["census_size"] for r in rows])
    pairs = sum(r["has_disjoint_pair"] for r in rows)
    summary = {
        "mean_census_size": float(sizes.mean()),
        "nonempty_fraction": float(np.mean(sizes > 0)),
        "disjoint_pair_trials": int(pairs),
        "certified_witnesses": int(sum(r["witness_certified"] for r in rows)),
    }
    return ExperimentResult("bully", config.echo(), BULLY_COLUMNS, rows, summary)


# ----------------------------------------------------------------------------
# output

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["experiment", "version", "seed", "config", "summary", "rows"],
    "properties": {
        "experiment": {"type": "string"},
        "version": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "config": {"type": "object"},
        "summary": {"type": "object"},
        "rows": {"type": "array", "items": {"type": "object"}},
    },
    "additionalProperties": False,
}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def to_json_document(result: ExperimentResult) -> dict:
    return _jsonable({
        "experiment": result.experiment,
        "version": f"ztdyn {__version__}",
        "seed": result.config.get("seed"),
        "config": result.config,
        "summary": result.summary,
        "rows": result.rows,
    })


def write_csv(result: ExperimentResult, fh, header: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_cell(row.get(c)) for c in result.columns])


def json_text(result: ExperimentResult) -> str:
    return json.dumps(to_json_document(result), indent=2, sort_keys=True) + "\n"


def emit(result: ExperimentResult, path, format: str = "csv", append: bool = False) -> None:
    """Write ``result`` as CSV rows (fixed header) or a JSON summary document.

    With ``append=True`` an existing non-empty CSV keeps its header and
    receives only new rows. I/O failures raise ``OSError`` naming the path.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"unknown format {format!r}")
    path = Path(path)
    try:
        if format == "csv":
            exists = append and path.exists() and path.stat().st_size > 0
            with open(path, "a" if exists else "w", newline="") as fh:
                write_csv(result, fh, header=not exists)
        else:
            path.write_text(json_text(result))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write results to {os.fspath(path)}: {exc.strerror}") from exc


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
