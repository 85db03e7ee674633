"""Command-line front end: one subcommand per lab operation.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .classify import PairSet, classify_probe, merge_probe, Ledger, probe_counts, VERDICT_NAMES
from .costmodels import CostModel, assign_costs, derive_constraints, max_single_metric_costs
from .distsim import (
    FeasiblePair,
    adversarial_bound,
    best_structured_choices,
    build_star_tables,
    exhaustive_max_satisfied,
    montecarlo_PA,
    montecarlo_best_p,
    sampled_max_satisfied,
    star_constraints,
    theorem2_route,
    theorem3_route,
)
from .graph import Constraints, GraphError, MultiCostGraph, normalize
from .harness import (
    ExperimentConfig,
    SUMMARY_HEADER,
    TopologySpec,
    pair_set_for,
    read_results_csv,
    run_experiment,
    summarize_rows,
    write_results_csv,
)
from .optimize import SearchStrategy, envelope_scan, optimize_p
from .topologies import Topology, gen_adversarial, gen_transmit_scheme


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_graph(path: str) -> MultiCostGraph:
    with open(path, encoding="utf-8") as fh:
        return MultiCostGraph.from_json(fh.read())


def _load_pairs(path: str, node_count: int) -> PairSet:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("src"):
                continue
            u, v = line.split(",")
            pairs.append((int(u), int(v)))
    return PairSet.from_pairs(node_count, pairs)


def _write_pairs(pair_set: PairSet, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("src,dst\n")
        for u, v in pair_set.pairs():
            fh.write(f"{u},{v}\n")


def _load_model(path: str) -> CostModel:
    with open(path, encoding="utf-8") as fh:
        return CostModel.from_dict(json.load(fh))


def _parse_bounds(text: str) -> Constraints:
    return Constraints(tuple(float(x) for x in text.split(",")), strict=True)


def _normalized_graph(args, graph: MultiCostGraph, pair_set: PairSet) -> MultiCostGraph:
    if args.constraints:
        constraints = _parse_bounds(args.constraints)
    elif args.alpha is not None:
        constraints = derive_constraints(graph, pair_set, args.alpha)
    else:
        raise GraphError("give either --constraints or --alpha")
    return normalize(graph, constraints)


def _cmd_gen(args) -> int:
    params = {}
    for name in ("rows", "cols", "total_nodes", "core_pairs", "n_paths", "k", "n"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    if args.both_hubs:
        params["both_hubs"] = True
    if args.duplicate_vertices:
        params["duplicate_vertices"] = True
    spec = TopologySpec(args.kind, params, args.pair_policy)
    built = spec.build()
    graph = built.with_zero_costs(args.dims) if isinstance(built, Topology) else built
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(graph.to_json())
    if args.pairs_out:
        _write_pairs(pair_set_for(built, args.pair_policy), args.pairs_out)
    print(json.dumps({"nodes": graph.n, "edges": graph.m, "k": graph.k}))
    return 0


def _cmd_assign(args) -> int:
    graph = _load_graph(args.graph)
    model = _load_model(args.model)
    if args.undirected:
        if graph.m % 2 != 0:
            raise GraphError("--undirected expects twin arcs with consecutive ids")
        groups = [[2 * i, 2 * i + 1] for i in range(graph.m // 2)]
        arcs = [(int(graph.edge_src[i]), int(graph.edge_dst[i])) for i in range(graph.m)]
        for fwd, rev in groups:
            if arcs[fwd] != (arcs[rev][1], arcs[rev][0]):
                raise GraphError(f"arcs {fwd},{rev} are not mutual reverses; drop --undirected")
        topo = Topology("from-json", graph.n, arcs, groups)
        out = assign_costs(topo, model, args.seed)
    else:
        out = assign_costs(graph, model, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(out.to_json())
    return 0


def _cmd_classify(args) -> int:
    graph = _load_graph(args.graph)
    pair_set = _load_pairs(args.pairs, graph.n)
    norm = _normalized_graph(args, graph, pair_set)
    verdicts, pruned = classify_probe(norm, pair_set, args.p)
    ledger = merge_probe(Ledger(pair_set), verdicts)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("src,dst,verdict\n")
            for i, u in enumerate(pair_set.sources):
                for v in np.flatnonzero(pair_set.mask[i]):
                    fh.write(f"{u},{v},{VERDICT_NAMES[int(verdicts[i, v])]}\n")
    n_y, n_n, n_u = probe_counts(pair_set, verdicts)
    print(json.dumps({
        "p": args.p, "N_tot": ledger.n_tot, "N_y": n_y, "N_n": n_n, "N_u": n_u,
        "pruned": list(pruned),
    }))
    return 0


def _cmd_optimize(args) -> int:
    graph = _load_graph(args.graph)
    pair_set = _load_pairs(args.pairs, graph.n)
    norm = _normalized_graph(args, graph, pair_set)
    strategy = SearchStrategy(
        kind=args.strategy, max_probes=args.max_probes,
        tolerance=args.tolerance, objective=args.objective,
        lattice_resolution=args.lattice_resolution,
    )
    trace = optimize_p(norm, pair_set, strategy)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(trace.csv_header(graph.k) + "\n")
            for row in trace.csv_rows():
                fh.write(row + "\n")
    n_y, n_n, n_u, n_tot = trace.ledger.counts()
    print(json.dumps({
        "best_p": list(trace.best_mix), "probes": len(trace.probes),
        "cumulative": {"N_tot": n_tot, "N_y": n_y, "N_n": n_n, "N_u": n_u},
    }))
    return 0


def _cmd_envelope(args) -> int:
    graph = _load_graph(args.graph)
    sample = envelope_scan(graph, args.source, args.dest, args.probes)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("p,g\n")
            for p, g in sample.samples:
                fh.write(f"{p:.9g},{g:.9g}\n")
    print(json.dumps({
        "concave_ok": sample.concave_ok, "max_violation": sample.max_violation,
        "probes": len(sample.samples),
    }))
    return 0


def _star_feasible_pairs(k: int, n: int) -> list[FeasiblePair]:
    """All ordered non-self pairs of the star graph with balanced witnesses."""
    pairs = []
    for u in range(k * n + 1):
        for v in range(k * n + 1):
            if u == v:
                continue
            if u == 0:
                j = (k - 1) // 2
                witness = ((v - 1) * (k + 1) + j,)
                slack = float(max(j, k - 1 - j))
            elif v == 0:
                witness = ((u - 1) * (k + 1) + k,)
                slack = float(k - 1)
            else:
                g = (u - 1) // n
                j = k - 1 - g
                witness = ((u - 1) * (k + 1) + k, (v - 1) * (k + 1) + j)
                slack = float(k - 1)
            pairs.append(FeasiblePair(u, v, slack, witness))
    return pairs


def _cmd_adversarial(args) -> int:
    graph = gen_adversarial(args.k, args.n)
    report: dict = {"k": args.k, "n": args.n, "mode": args.mode}
    if args.mode == "bound-check":
        if args.k ** (args.k * args.n) <= args.exhaustive_limit:
            achieved, bound = exhaustive_max_satisfied(args.k, args.n)
            report["exhaustive"] = True
        else:
            achieved, bound = sampled_max_satisfied(args.k, args.n, args.samples, args.seed)
            report["exhaustive"] = False
        report.update({"bound": bound, "achieved": achieved})
    elif args.mode == "theorem2":
        pairs = _star_feasible_pairs(args.k, args.n)
        _, delivered = theorem2_route(graph, pairs)
        report.update({"pairs": len(pairs), "violations": 0,
                       "bound": adversarial_bound(args.k, args.n)})
        del delivered
    elif args.mode == "theorem3":
        if args.k != 2:
            raise GraphError("theorem3 mode requires --k 2")
        pairs = _star_feasible_pairs(args.k, args.n)
        fraction, per_trial = theorem3_route(graph, pairs, args.trials, args.seed, return_per_trial=True)
        stderr = float(np.std(per_trial, ddof=1) / np.sqrt(len(per_trial))) if len(per_trial) > 1 else 0.0
        report.update({"pairs": len(pairs), "trials": args.trials,
                       "fraction": fraction, "stderr": stderr})
    print(json.dumps(report))
    return 0


def _cmd_montecarlo(args) -> int:
    scheme = gen_transmit_scheme(args.n_paths)
    model = _load_model(args.model)
    constraints = _parse_bounds(args.constraints)
    if args.p_grid:
        grid = np.linspace(0.0, 1.0, args.p_grid)
        best_p, estimates = montecarlo_best_p(scheme, model, constraints, grid, args.samples, args.seed)
        best = max(e.probability for e in estimates)
        print(json.dumps({"best_p": best_p, "probability": best, "grid": args.p_grid,
                          "samples": args.samples}))
    else:
        est = montecarlo_PA(scheme, model, constraints, args.p, args.samples, args.seed)
        print(json.dumps({"p": args.p, "probability": est.probability,
                          "stderr": est.stderr, "samples": est.samples}))
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = ExperimentConfig.from_json(fh.read())
    if args.timing:
        config.timing = True
    rows = run_experiment(config)
    write_results_csv(rows, args.out)
    print(json.dumps({"rows": len(rows), "out": args.out}))
    return 0


def _cmd_summarize(args) -> int:
    rows = read_results_csv(args.results)
    lines = summarize_rows(rows)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for line in lines:
            fh.write(line + "\n")
    print(json.dumps({"groups": len(lines), "out": args.out}))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="qrlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[], help="generate a topology", add_help=True)
    p.add_argument("--kind", required=True,
                   choices=["grid", "dual-home", "mouth-like", "three-path", "transmit", "adversarial"])
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--total-nodes", dest="total_nodes", type=int)
    p.add_argument("--core-pairs", dest="core_pairs", type=int)
    p.add_argument("--n-paths", dest="n_paths", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--both-hubs", action="store_true")
    p.add_argument("--duplicate-vertices", action="store_true")
    p.add_argument("--dims", type=int, default=2, help="cost dimensions for zero-cost output")
    p.add_argument("--pair-policy", default="a2a", choices=["a2a", "a2a-noself", "b2b", "st"])
    p.add_argument("--out", required=True)
    p.add_argument("--pairs-out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("assign", help="sample edge costs onto a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--undirected", action="store_true",
                   help="treat consecutive arc pairs (2i, 2i+1) as one link")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_assign)

    for name, fn in (("classify", _cmd_classify), ("optimize", _cmd_optimize)):
        p = sub.add_parser(name)
        p.add_argument("--graph", required=True)
        p.add_argument("--pairs", required=True)
        p.add_argument("--constraints", help="comma-separated bounds, e.g. 1.0,1.0")
        p.add_argument("--alpha", type=float, help="derive constraints from the pair set")
        p.add_argument("--out")
        if name == "classify":
            p.add_argument("--p", type=float, required=True)
        else:
            p.add_argument("--strategy", default="dichotomy-endpoints",
                           choices=["grid", "golden-section", "dichotomy",
                                    "dichotomy-endpoints", "monotone-equalizer"])
            p.add_argument("--max-probes", dest="max_probes", type=int, default=10)
            p.add_argument("--tolerance", type=float, default=1.0 / 64.0)
            p.add_argument("--objective", default="satisfied", choices=["satisfied", "uncertain"])
            p.add_argument("--lattice-resolution", dest="lattice_resolution", type=int, default=10)
        p.set_defaults(func=fn)

    p = sub.add_parser("envelope", help="sample the composite distance over p")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--dest", type=int, required=True)
    p.add_argument("--probes", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_envelope)

    p = sub.add_parser("adversarial", help="star-construction bound checks")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", required=True, choices=["bound-check", "theorem2", "theorem3"])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive-limit", dest="exhaustive_limit", type=int, default=100_000)
    p.set_defaults(func=_cmd_adversarial)

    p = sub.add_parser("montecarlo", help="estimate the feasible-shortest probability")
    p.add_argument("--n-paths", dest="n_paths", type=int, required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--constraints", required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--p-grid", dest="p_grid", type=int)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_montecarlo)

    p = sub.add_parser("experiment", help="run a configured sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--timing", action="store_true",
                   help="record wall times (breaks byte-identical reruns)")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("summarize", help="aggregate a results CSV")
    p.add_argument("--in", dest="results", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_summarize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"qrlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
