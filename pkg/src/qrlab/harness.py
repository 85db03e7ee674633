"""End-to-end experiment orchestration: topology x cost model x alpha x seed.

Each (alpha, seed) cell generates the topology, assigns seeded costs,
derives alpha-scaled constraints, normalizes, and runs the configured probe
strategy. Rows come out ordered by (alpha, seed) position regardless of the
worker pool, and all floats are printed with 9 significant digits so a rerun
of the same config is byte identical. Wall-clock timing is opt-in because it
would break that guarantee.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classify import Ledger, PairSet, discovery_rate
from .costmodels import CostModel, assign_costs, max_single_metric_costs
from .graph import Constraints, GraphError, MultiCostGraph, normalize
from .optimize import SearchStrategy, SearchTrace, optimize_p
from .topologies import (
    Topology,
    gen_adversarial,
    gen_dual_home,
    gen_grid,
    gen_mouth_like,
    gen_three_path,
    gen_transmit_scheme,
)

RESULT_HEADER = "topology,pair_policy,k,alpha,seed,mode,p_opt,N_tot,N_y,N_n,N_u,R,probes,wall_ms"

MODES = {"single-p", "multiple-p", "one-to-all"}
PAIR_POLICIES = {"a2a", "a2a-noself", "b2b", "st"}


class ConfigError(GraphError):
    """Experiment configuration problem; the message names the field."""


@dataclass(frozen=True)
class TopologySpec:
    kind: str
    params: dict = field(default_factory=dict)
    pair_policy: str = "a2a"

    def __post_init__(self):
        if self.pair_policy not in PAIR_POLICIES:
            raise ConfigError(f"topology.pair_policy: unknown policy {self.pair_policy!r}")

    @classmethod
    def from_dict(cls, spec: dict) -> "TopologySpec":
        if "kind" not in spec:
            raise ConfigError("topology.kind: missing")
        params = {k: v for k, v in spec.items() if k not in ("kind", "pair_policy")}
        return cls(spec["kind"], params, spec.get("pair_policy", "a2a"))

    def build(self) -> Topology | MultiCostGraph:
        p = self.params
        try:
            if self.kind == "grid":
                return gen_grid(int(p["rows"]), int(p["cols"]))
            if self.kind == "dual-home":
                return gen_dual_home(int(p["total_nodes"]), int(p["core_pairs"]))
            if self.kind == "mouth-like":
                return gen_mouth_like(
                    int(p["total_nodes"]), int(p["core_pairs"]), bool(p.get("both_hubs", False))
                )
            if self.kind == "three-path":
                return gen_three_path()
            if self.kind == "transmit":
                return gen_transmit_scheme(int(p["n_paths"]))
            if self.kind == "adversarial":
                return gen_adversarial(
                    int(p["k"]), int(p["n"]), bool(p.get("duplicate_vertices", False))
                )
        except KeyError as exc:
            raise ConfigError(f"topology.{exc.args[0]}: missing for kind {self.kind!r}") from exc
        raise ConfigError(f"topology.kind: unknown kind {self.kind!r}")

    def label(self, built) -> str:
        return built.name if isinstance(built, Topology) else self.kind


def pair_set_for(built: Topology | MultiCostGraph, policy: str) -> PairSet:
    n = built.node_count if isinstance(built, Topology) else built.n
    if policy == "a2a":
        return PairSet.all_ordered(n, include_self=True)
    if policy == "a2a-noself":
        return PairSet.all_ordered(n, include_self=False)
    if policy == "b2b":
        border = built.border if isinstance(built, Topology) else None
        if border is None:
            raise ConfigError("topology.pair_policy: b2b needs a topology with a border")
        return PairSet.between(n, border, include_self=True)
    if policy == "st":
        return PairSet.from_pairs(n, [(0, 1)])
    raise ConfigError(f"topology.pair_policy: unknown policy {policy!r}")


@dataclass
class ExperimentConfig:
    topology: TopologySpec
    alphas: list[float]
    seeds: list[int]
    strategy: SearchStrategy
    mode: str
    cost_model: CostModel | None = None
    timing: bool = False

    def __post_init__(self):
        if not self.alphas:
            raise ConfigError("alphas: must be non-empty")
        if any(not (0.0 < a <= 2.0) for a in self.alphas):
            raise ConfigError("alphas: every value must lie in (0, 2]")
        if not self.seeds:
            raise ConfigError("seeds: must be non-empty")
        if self.mode not in MODES:
            raise ConfigError(f"mode: unknown mode {self.mode!r}, expected one of {sorted(MODES)}")

    @classmethod
    def from_dict(cls, spec: dict) -> "ExperimentConfig":
        for name in ("topology", "alphas", "seeds"):
            if name not in spec:
                raise ConfigError(f"{name}: missing")
        model = CostModel.from_dict(spec["cost_model"]) if "cost_model" in spec else None
        return cls(
            topology=TopologySpec.from_dict(spec["topology"]),
            alphas=[float(a) for a in spec["alphas"]],
            seeds=[int(s) for s in spec["seeds"]],
            strategy=SearchStrategy.from_dict(spec.get("strategy", {})),
            mode=spec.get("mode", "multiple-p"),
            cost_model=model,
            timing=bool(spec.get("timing", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


@dataclass
class ResultRow:
    topology: str
    pair_policy: str
    k: int
    alpha: float
    seed: int
    mode: str
    p_opt: str
    n_tot: int
    n_y: int
    n_n: int
    n_u: int
    rate: float
    probes: int
    wall_ms: int

    def to_csv(self) -> str:
        return (
            f"{self.topology},{self.pair_policy},{self.k},{self.alpha:.9g},{self.seed},"
            f"{self.mode},{self.p_opt},{self.n_tot},{self.n_y},{self.n_n},{self.n_u},"
            f"{self.rate:.9g},{self.probes},{self.wall_ms}"
        )


def _format_mix(mix: tuple[float, ...]) -> str:
    if len(mix) == 2:
        return f"{mix[0]:.9g}"
    return "|".join(f"{x:.9g}" for x in mix)


def _ledger_rate(n_y: int, n_u: int) -> float:
    if n_y + n_u == 0:
        return 1.0
    return n_y / (n_y + n_u)


def worker_count() -> int:
    env = os.environ.get("QRL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """Produce one ResultRow per (alpha, seed) cell, ordered by position.

    multiple-p reports the cumulative ledger; single-p reports the best
    probe's satisfied count against the cumulative non-satisfied count;
    one-to-all optimizes over pairs from the lowest node id only and reports
    that cumulative ledger.
    """
    built = config.topology.build()
    fixed_graph = isinstance(built, MultiCostGraph)
    if not fixed_graph and config.cost_model is None:
        raise ConfigError(f"cost_model: required for topology kind {config.topology.kind!r}")
    label = config.topology.label(built)
    pair_set = pair_set_for(built, config.topology.pair_policy)

    def seed_rows(seed: int) -> list[ResultRow]:
        graph = built if fixed_graph else assign_costs(built, config.cost_model, seed)
        if config.mode == "one-to-all":
            opt_pairs = PairSet.one_to_all(graph.n, 0, include_self=False)
        else:
            opt_pairs = pair_set
        metric_max = max_single_metric_costs(graph, pair_set)
        if np.any(metric_max <= 0.0):
            raise ConfigError("topology: degenerate single-metric diameter of zero")
        rows = []
        for alpha in config.alphas:
            constraints = Constraints(tuple(float(alpha * m) for m in metric_max), strict=True)
            norm = normalize(graph, constraints)
            start = time.perf_counter()
            trace = optimize_p(norm, opt_pairs, config.strategy)
            wall_ms = int((time.perf_counter() - start) * 1000) if config.timing else 0
            rows.append(_row_from_trace(config, label, graph.k, alpha, seed, trace, wall_ms))
        return rows

    seeds = list(config.seeds)
    workers = min(worker_count(), len(seeds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_seed = list(pool.map(seed_rows, seeds))
    else:
        per_seed = [seed_rows(s) for s in seeds]

    rows: list[ResultRow] = []
    for alpha_idx in range(len(config.alphas)):
        for seed_idx in range(len(seeds)):
            rows.append(per_seed[seed_idx][alpha_idx])
    return rows


def _row_from_trace(config, label, k, alpha, seed, trace: SearchTrace, wall_ms: int) -> ResultRow:
    if config.mode == "single-p":
        # Routing with one network-wide p only finds the best probe's
        # feasible paths, but infeasibility proofs hold for every p, so the
        # accumulated non-satisfied count stays valid knowledge.
        rec = trace.best_record()
        n_tot = trace.ledger.n_tot
        n_y, n_n = rec.n_y, trace.ledger.n_n
        n_u = n_tot - n_y - n_n
    else:
        ledger: Ledger = trace.ledger
        n_y, n_n, n_u, n_tot = ledger.counts()
    return ResultRow(
        topology=label,
        pair_policy=config.topology.pair_policy,
        k=k,
        alpha=alpha,
        seed=seed,
        mode=config.mode,
        p_opt=_format_mix(trace.best_mix),
        n_tot=n_tot,
        n_y=n_y,
        n_n=n_n,
        n_u=n_u,
        rate=_ledger_rate(n_y, n_u),
        probes=len(trace.probes),
        wall_ms=wall_ms,
    )


def write_results_csv(rows: Sequence[ResultRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(RESULT_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")


SUMMARY_HEADER = "topology,pair_policy,k,mode,cells,Nu_max_pct,R_min_pct,R_mean_pct"


def summarize_rows(rows: Sequence[dict]) -> list[str]:
    """Table-style aggregation of raw result rows (dicts keyed by header)."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["topology"], row["pair_policy"], row["k"], row["mode"])
        groups.setdefault(key, []).append(row)
    lines = []
    for key in sorted(groups, key=lambda t: tuple(str(x) for x in t)):
        cells = groups[key]
        nu_pct = [100.0 * float(r["N_u"]) / float(r["N_tot"]) for r in cells]
        rates = [100.0 * float(r["R"]) for r in cells]
        lines.append(
            f"{key[0]},{key[1]},{key[2]},{key[3]},{len(cells)},"
            f"{max(nu_pct):.9g},{min(rates):.9g},{float(np.mean(rates)):.9g}"
        )
    return lines


def read_results_csv(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != RESULT_HEADER:
        raise ConfigError(f"results file {path!r} does not carry the expected header")
    cols = RESULT_HEADER.split(",")
    return [dict(zip(cols, ln.split(","))) for ln in lines[1:]]
