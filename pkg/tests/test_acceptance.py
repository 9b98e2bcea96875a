"""Acceptance criteria, one test each, every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are also
collected into an "acceptance criteria" section of the terminal summary.
"""

import math
import time

import numpy as np

from ztdyn import bully, cli, couplings as C, dynamics as D, experiments as E, mincut as M
from ztdyn.dynamics import Absorption, Status

# exact P(|M_0| >= 10000**0.25) for M_0 = 2*Bin(10000, 1/2) - 10000, from
# oracles.binomial_upper_tail_two_sided (integer arithmetic)
MAG0_EXACT = 0.928287806081902


def test_criterion_01_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240101)
    matrices = [C.sample_bernoulli(int(rng.integers(6, 13)), 0.5, seed=k) for k in range(50)]
    matrices += [C.sample_pareto(int(rng.integers(6, 11)), 0.5, 1.0, seed=1000 + k) for k in range(20)]
    bad_terminal = bad_cut = runs = 0
    for k, J in enumerate(matrices):
        census = D.enumerate_landscape(J)
        absorbing = set(census.absorbing_codes().tolist())
        starts = np.random.default_rng(k)
        for seed in range(100):
            out = D.run(J, D.uniform_spins(J.n, starts), "fair_coin", seed=seed)
            runs += 1
            if D.code_from_spins(out.final_spins) not in absorbing:
                bad_terminal += 1
        for code in range(1 << J.n):
            part = M.partition_of_spins(D.spins_from_code(code, J.n))
            spin_side = census.classification(code) is not Absorption.NONE
            bad_cut += M.is_local_mincut(J, part).is_local != spin_side
    elapsed = time.perf_counter() - t0
    ok = bad_terminal == 0 and bad_cut == 0 and elapsed < 120
    detail = f"{runs} runs, {bad_terminal} non-absorbing terminals, {bad_cut} cut/spin disagreements, {elapsed:.1f}s"
    assert criterion(1, "oracle equivalence", ok, detail)


def _energy_scaled(a, s):
    # n*H from the quadratic form, independent of the cached fields
    return -float(s @ a @ s) / 2


def test_criterion_02_energy_monotone_and_cache(criterion):
    rng = np.random.default_rng(7)
    total = violations = exact_mismatch = 0
    target = 1_000_000
    k = 0
    while total < target:
        family = ("bernoulli", "pareto", "constant")[k % 3]
        n = int(rng.integers(4, 33))
        J = C.sample(family, n, seed=k, p=0.5, alpha=0.6, value=1)
        k += 1
        a = J.entries.astype(np.int64 if J.is_integral else np.float64)
        state = D.DynamicsState.from_spins(J, D.uniform_spins(n, rng))
        h = _energy_scaled(a, state.spins.astype(a.dtype))
        steps = min(5000, target - total)
        sites = rng.integers(0, n, steps)
        coins = rng.choice([-1, 1], steps)
        for site, coin in zip(sites.tolist(), coins.tolist()):
            before = int(state.spins[site])
            m = state.fields[site]
            strict = before * m < 0
            D.step(state, J, site, coin)
            if not J.is_integral and state.step % (n * n) == 0:
                state.resync(J)
            h_new = _energy_scaled(a, state.spins.astype(a.dtype))
            if J.is_integral:
                good = h_new < h if strict else h_new == h
            else:
                tol = 1e-9 * max(1.0, abs(h))
                good = h_new < h + tol if strict else abs(h_new - h) <= tol
            violations += not good
            exact = a @ state.spins.astype(a.dtype)
            if J.is_integral:
                exact_mismatch += not np.array_equal(exact, state.fields)
            else:
                tol = 1e-9 * n * max(1.0, a.sum(axis=1).max())
                violations += bool(np.abs(exact - state.fields).max() > tol)
            h = h_new
        total += steps
    ok = violations == 0 and exact_mismatch == 0
    detail = f"{total} steps over {k} matrices, {violations} violations, {exact_mismatch} integer cache mismatches"
    assert criterion(2, "energy monotonicity and field cache", ok, detail)


def test_criterion_03_absorption_from_positive_magnetization(criterion):
    config = E.ExperimentConfig(family="bernoulli", n=2000, p=0.5, m0=32, trials=200, seed=3)
    res = E.absorption_experiment(config)
    ok = res.fraction >= 0.95
    lo, hi = res.ci95
    detail = f"ground_plus {res.fraction:.3f}, 95% CI [{lo:.3f}, {hi:.3f}], statuses {res.counts}"
    assert criterion(3, "absorption in all-plus, n=2000, m0=32", ok, detail)


def test_criterion_04_qd_bernoulli(criterion):
    config = E.ExperimentConfig(family="bernoulli", n=1000, p=0.5, replicas=2, trials=200, seed=4)
    q = E.estimate_qd(config)
    lo = q.ci95[0]
    ok = q.estimate >= 0.9 and lo >= 0.85
    detail = f"q_D {q.estimate:.3f} +- {q.stderr:.3f}, CI lower {lo:.3f}, plateau runs {q.plateau_runs}"
    assert criterion(4, "q_D near 1, bernoulli n=1000", ok, detail)


def _two_cliques(k):
    a = np.zeros((2 * k, 2 * k), dtype=np.int64)
    a[:k, :k] = 1
    a[k:, k:] = 1
    np.fill_diagonal(a, 0)
    return C.from_array(a)


def test_criterion_05_mincut_trivial_termination(criterion):
    res = E.mincut_experiment(E.ExperimentConfig(family="bernoulli", n=500, p=0.5, trials=100, seed=5))
    trivial = res.summary["status_counts"]["trivial"]
    G = _two_cliques(50)
    start = M.Partition.from_set(100, range(50))
    control = [M.greedy_search(G, start, seed=s) for s in range(100)]
    control_ok = sum(o.status is M.SearchStatus.NONTRIVIAL_LOCAL_MINCUT and o.final_cut == 0 for o in control)
    ok = trivial >= 95 and control_ok == 100
    detail = f"G(500,0.5): {trivial}/100 trivial; two 50-cliques: {control_ok}/100 nontrivial with cut 0"
    assert criterion(5, "greedy local MINCUT", ok, detail)


def test_criterion_06_heavy_tails(criterion):
    n = 200
    base = dict(family="pareto", p=None, alpha=0.5, scale=1.0, n=n)
    nonempty = witnesses_needed = witnesses_ok = 0
    for seed in range(200):
        J = C.sample_pareto(n, 0.5, 1.0, seed=seed)
        census = bully.bully_census(J)
        nonempty += bool(census)
        if bully.has_disjoint_pair(census):
            witnesses_needed += 1
            w = bully.certify_witness(J, census[0], census[1], seed=seed)
            witnesses_ok += w.certified and abs(int(w.spins.sum())) < n
    part_a = nonempty >= 180 and witnesses_ok == witnesses_needed

    q = E.estimate_qd(E.ExperimentConfig(replicas=4, trials=200, seed=6, **base))
    part_b = 0.05 <= q.estimate <= 0.95 and q.ci95[0] > 0 and q.ci95[1] < 1

    sims = E.simulate(E.ExperimentConfig(trials=200, seed=66, **base))
    nonuniform = sims.summary["status_counts"]["strict_local_min"]
    part_c = nonuniform >= 20
    ok = part_a and part_b and part_c
    detail = (f"(a) census non-empty {nonempty}/200, witnesses {witnesses_ok}/{witnesses_needed}; "
              f"(b) q_D {q.estimate:.3f} CI [{q.ci95[0]:.3f}, {q.ci95[1]:.3f}]; "
              f"(c) non-uniform absorption {nonuniform}/200")
    assert criterion(6, "heavy-tailed couplings", ok, detail)


def test_criterion_07_initial_magnetization(criterion):
    st = E.initial_magnetization_stat(10000, 0.25, 10000, seed=7)
    se = math.sqrt(MAG0_EXACT * (1 - MAG0_EXACT) / st.trials)
    ok = abs(st.fraction - MAG0_EXACT) <= 3 * se and abs(st.exact - MAG0_EXACT) < 1e-12
    detail = f"fraction {st.fraction:.4f}, exact {MAG0_EXACT:.4f}, {abs(st.fraction - MAG0_EXACT) / se:.2f} SE"
    assert criterion(7, "initial magnetization tail", ok, detail)


def test_criterion_08_drift(criterion):
    config = E.ExperimentConfig(family="bernoulli", n=4000, p=0.5, m0="auto:0.1", epsilon=0.1,
                                trials=100, seed=8)
    d = E.drift_probe(config)
    plus, minus = d.by_initial_spin[1], d.by_initial_spin[-1]
    ok = all(c.fraction > 0.5 and c.ci95[0] > 0.5 for c in (plus, minus))
    detail = (f"m0={d.m0}, window={d.window}; initial +1: {plus.fraction:.3f} CI [{plus.ci95[0]:.3f}, "
              f"{plus.ci95[1]:.3f}]; initial -1: {minus.fraction:.3f} CI [{minus.ci95[0]:.3f}, {minus.ci95[1]:.3f}]")
    assert criterion(8, "early positive drift", ok, detail)


def test_criterion_09_cut_energy_and_lockstep(criterion):
    rng = np.random.default_rng(9)
    identity_bad = 0
    for k in range(10_000):
        n = int(rng.integers(2, 41))
        J = C.sample_bernoulli(n, float(rng.uniform(0.05, 1.0)), seed=k)
        s = D.uniform_spins(n, rng)
        identity_bad += D.scaled_energy(J, s) != 2 * M.cut_value(J, M.partition_of_spins(s)) - J.total_weight()
    lock_bad = 0
    status_map = {"ground_plus": "trivial", "ground_minus": "trivial",
                  "strict_local_min": "nontrivial_local_mincut", "plateau": "plateau",
                  "budget_exhausted": "budget_exhausted"}
    for k in range(100):
        J = C.sample_bernoulli(200, 0.5, seed=50_000 + k)
        start = M.uniform_partition(200, np.random.default_rng(k))
        search = M.greedy_search(J, start, seed=k, record_moves=True)
        out = D.run(J, M.spins_of_partition(start), "fair_coin", seed=k, record_flips=True)
        same = (status_map[out.status.value] == search.status.value
                and search.iterations == out.steps_taken
                and np.array_equal(search.move_log, out.flip_log)
                and np.array_equal(M.spins_of_partition(search.final), out.final_spins))
        lock_bad += not same
    ok = identity_bad == 0 and lock_bad == 0
    detail = f"identity failures {identity_bad}/10000, lockstep mismatches {lock_bad}/100"
    assert criterion(9, "cut-energy identity and lockstep", ok, detail)


def test_criterion_10_reproducibility(criterion, tmp_path, capsys):
    commands = {
        "simulate": ["simulate", "--model", "pareto", "--n", "120", "--trials", "24", "--m0", "auto:0.1"],
        "qd": ["qd", "--n", "120", "--trials", "24", "--replicas", "3", "--format", "json"],
        "mincut": ["mincut", "--n", "120", "--trials", "24"],
        "bully": ["bully", "--n", "120", "--trials", "24"],
        "drift": ["drift", "--n", "400", "--trials", "12", "--format", "json"],
    }
    differing = []
    for name, argv in commands.items():
        blobs = []
        for threads in (1, 4, 16):
            path = tmp_path / f"{name}-{threads}.out"
            code = cli.main(["--seed", "10", "--threads", str(threads), "--out", str(path)] + argv)
            assert code == 0
            blobs.append(path.read_bytes())
        if not blobs[0] == blobs[1] == blobs[2]:
            differing.append(name)
    capsys.readouterr()
    ok = not differing
    detail = f"{len(commands)} experiments at threads 1/4/16, differing: {differing or 'none'}"
    assert criterion(10, "byte-identical outputs across thread counts", ok, detail)
