"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines live.
"""

import numpy as np
import pytest

from qrlab import (
    Constraints,
    ExperimentConfig,
    PairSet,
    SearchStrategy,
    adversarial_bound,
    assign_costs,
    best_structured_choices,
    build_star_tables,
    classify_probe,
    count_satisfied,
    derive_constraints,
    envelope_scan,
    exhaustive_max_satisfied,
    gen_adversarial,
    gen_grid,
    gen_three_path,
    gen_transmit_scheme,
    merge_probe,
    monotonicity_check,
    montecarlo_best_p,
    normalize,
    optimize_p,
    paper_cost_model,
    run_experiment,
    sampled_max_satisfied,
    spf,
    theorem2_route,
    theorem3_route,
    write_results_csv,
)
from qrlab.classify import Ledger, NONSATISFIED, UNCERTAIN
from qrlab.costmodels import CostModel, Uniform
from qrlab.distsim import star_constraints
from conftest import feasible_path_exists, random_multigraph
from test_distsim import tightest_feasible_pairs


def report(num: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[criterion {num:02d}] {name}: {status}{suffix}")
    assert ok, f"criterion {num} failed: {name} {suffix}"


def test_c01_three_path_impossibility():
    g = gen_three_path()
    norm = normalize(g, Constraints((1.0, 1.0)))
    pairs = PairSet.from_pairs(2, [(0, 1)])
    ledger = Ledger(pairs)
    middle_never_shortest = True
    for p in np.linspace(0.0, 1.0, 1001):
        middle = 0.9  # p*0.9 + (1-p)*0.9
        others = min(0.1 * p + 1.1 * (1 - p), 1.1 * p + 0.1 * (1 - p))
        if middle <= others:
            middle_never_shortest = False
        tree = spf(norm, 0, (p, 1.0 - p))
        if tree.parent_edge(1) == 0:
            middle_never_shortest = False
        verdicts, _ = classify_probe(norm, pairs, float(p))
        merge_probe(ledger, verdicts)
    stays_uncertain = int(ledger.verdicts[0, 1]) == UNCERTAIN
    report(1, "three-path impossibility", middle_never_shortest and stays_uncertain,
           f"ledger={ledger.counts()}")


def test_c02_theorem1_exhaustive():
    best, bound = exhaustive_max_satisfied(2, 2)
    ok = best == bound == 21
    for n in range(3, 9):
        got, b = sampled_max_satisfied(2, n, samples=40, seed=100 + n)
        ok = ok and got <= b
    report(2, "theorem 1 exhaustive bound on the two-cost star", ok,
           f"n=2 max={best} bound=21")


def test_c03_theorem4_structured_tables():
    ok = True
    for k in (2, 3, 4):
        for n in range(1, 6):
            g = gen_adversarial(k, n)
            tables = build_star_tables(k, n, best_structured_choices(k, n))
            got = count_satisfied(g, tables, star_constraints(k))
            ok = ok and got == adversarial_bound(k, n)
        frac = adversarial_bound(k, 20) / (20 * k + 1) ** 2
        ok = ok and abs(frac - 1.0 / k) < 0.05
    report(3, "theorem 4 bound achieved, fraction tends to 1/k", ok)


def test_c04_theorem2_guarantee():
    rng = np.random.default_rng(2024)
    checked = 0
    for trial in range(100):
        g = random_multigraph(rng, max_nodes=12)
        pairs = tightest_feasible_pairs(g)
        if not pairs:
            continue
        theorem2_route(g, pairs)  # raises on any delivery above (2a, 2a)
        checked += len(pairs)
    report(4, "theorem 2 twice-the-slack guarantee", checked > 1000,
           f"{checked} certified pairs, zero violations")


def test_c05_theorem3_expected_half():
    g = gen_adversarial(2, 10)
    pairs = tightest_feasible_pairs(g)
    mean, per_trial = theorem3_route(g, pairs, trials=1000, seed=7, return_per_trial=True)
    stderr = float(np.std(per_trial, ddof=1) / np.sqrt(len(per_trial)))
    ok = mean >= 0.5 - 3 * stderr
    report(5, "theorem 3 randomized rule delivers half in expectation", ok,
           f"mean={mean:.4f} stderr={stderr:.4f}")


def test_c06_pruning_soundness():
    rng = np.random.default_rng(99)
    confirmed = 0
    sound = True
    for trial in range(1000):
        g = random_multigraph(rng, max_nodes=10, low=0.05, high=1.0)
        bounds = tuple(rng.uniform(0.7, 1.8, 2))
        norm = normalize(g, Constraints(bounds))
        ps = PairSet.all_ordered(g.n, include_self=False)
        trace = optimize_p(norm, ps, SearchStrategy("dichotomy-endpoints", max_probes=10))
        verdicts = trace.ledger.verdicts
        for i, u in enumerate(ps.sources):
            for v in np.flatnonzero((verdicts[i] == NONSATISFIED) & ps.mask[i]):
                if feasible_path_exists(norm, int(u), int(v), (1.0, 1.0)):
                    sound = False
                confirmed += 1
    report(6, "pruning soundness over 1000 random graphs", sound and confirmed > 1000,
           f"{confirmed} non-satisfied verdicts confirmed")


def test_c07_concavity():
    rng = np.random.default_rng(71)
    worst = 0.0
    ok = True
    for trial in range(100):
        g = random_multigraph(rng, max_nodes=12)
        for _ in range(10):
            dest = int(rng.integers(1, g.n))
            sample = envelope_scan(g, 0, dest, 101)
            worst = max(worst, sample.max_violation)
            ok = ok and sample.concave_ok
    report(7, "concavity of the composite envelope", ok, f"max midpoint violation {worst:.2e}")


def test_c08_monotonicity():
    rng = np.random.default_rng(81)
    done = 0
    ok = True
    while done < 1000:
        g = random_multigraph(rng, max_nodes=10)
        dest = int(rng.integers(1, g.n))
        p1, p2 = sorted(rng.uniform(0.0, 1.0, 2))
        if p2 - p1 < 1e-9:
            continue
        ok = ok and monotonicity_check(g, 0, dest, float(p1), float(p2))
        done += 1
    report(8, "coordinate monotonicity in p over 1000 samples", ok)


def test_c09_best_p_formula_vs_montecarlo():
    scheme = gen_transmit_scheme(10)
    model = CostModel([Uniform(0.0, 1.0), Uniform(0.0, 1.0)])
    grid = np.linspace(0.0, 1.0, 101)
    sym, _ = montecarlo_best_p(scheme, model, Constraints((0.3, 0.3)), grid, 100_000, seed=41)
    asym, _ = montecarlo_best_p(scheme, model, Constraints((0.2, 0.3)), grid, 100_000, seed=41)
    ok = abs(sym - 0.5) <= 0.05 and abs(asym - 0.6) <= 0.05
    report(9, "closed-form optimal p matches the Monte Carlo argmax", ok,
           f"sym={sym:.3f} asym={asym:.3f}")


def _grid15_config(mode):
    return ExperimentConfig.from_dict({
        "topology": {"kind": "grid", "rows": 15, "cols": 15, "pair_policy": "a2a"},
        "cost_model": {"dims": [
            {"dist": "normal", "mean": 7.5, "variance": 1.25},
            {"dist": "discrete-uniform", "values": [0.01, 0.02, 0.03, 0.04, 0.05]},
        ]},
        "alphas": [round(0.5 + 0.05 * i, 2) for i in range(11)],
        "seeds": list(range(10)),
        "strategy": {"kind": "dichotomy-endpoints", "max_probes": 10},
        "mode": mode,
    })


def test_c10_grid15_reproduction():
    multi = run_experiment(_grid15_config("multiple-p"))
    single = run_experiment(_grid15_config("single-p"))
    nu_max = max(100.0 * r.n_u / r.n_tot for r in multi + single)
    r_min = min(r.rate for r in multi + single)
    dominated = all(m.n_y >= s.n_y for m, s in zip(multi, single))
    ok = nu_max <= 6.0 and r_min >= 0.90 and dominated
    report(10, "grid 15x15 desk-scale table reproduction", ok,
           f"Nu_max={nu_max:.2f}% R_min={100 * r_min:.2f}%")


def test_c11_optimizer_budget():
    topo = gen_grid(15, 15)
    pairs = PairSet.all_ordered(225, include_self=True)
    ok = True
    gaps = []
    for seed in range(10):
        g = assign_costs(topo, paper_cost_model(2), seed=seed)
        norm = normalize(g, derive_constraints(g, pairs, 0.7))
        oracle = optimize_p(norm, pairs, SearchStrategy("grid", max_probes=101))
        fast = optimize_p(norm, pairs, SearchStrategy("dichotomy-endpoints", max_probes=10))
        gap = oracle.best_record().n_y - fast.best_record().n_y
        gaps.append(gap)
        ok = ok and len(fast.probes) <= 10 and gap <= 0.01 * pairs.n_pairs
    report(11, "dichotomy reaches the grid-search optimum within 1%", ok,
           f"worst gap {max(gaps)} pairs of {pairs.n_pairs}")


def test_c12_determinism(tmp_path):
    cfg_dict = {
        "topology": {"kind": "grid", "rows": 8, "cols": 8, "pair_policy": "b2b"},
        "cost_model": {"dims": [
            {"dist": "normal", "mean": 7.5, "variance": 1.25},
            {"dist": "discrete-uniform", "values": [0.01, 0.02, 0.03, 0.04, 0.05]},
        ]},
        "alphas": [0.6, 0.9],
        "seeds": [0, 1, 2],
        "strategy": {"kind": "golden-section", "max_probes": 8},
        "mode": "multiple-p",
    }
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    write_results_csv(run_experiment(ExperimentConfig.from_dict(cfg_dict)), first)
    write_results_csv(run_experiment(ExperimentConfig.from_dict(cfg_dict)), second)
    ok = first.read_bytes() == second.read_bytes()
    report(12, "byte-identical reruns", ok)
