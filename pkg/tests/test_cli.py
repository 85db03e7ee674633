import json

import pytest

from qrlab.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out.strip()
    return code, json.loads(out.splitlines()[-1]) if out else None


def write_model(tmp_path, k=2):
    dims = [
        {"dist": "normal", "mean": 7.5, "variance": 1.25},
        {"dist": "discrete-uniform", "values": [0.01, 0.02, 0.03, 0.04, 0.05]},
    ]
    if k == 3:
        dims.append({"dist": "positive-normal", "mean": 2.0, "variance": 2.0})
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"dims": dims, "seed": 1}))
    return path


def test_gen_assign_classify_optimize_pipeline(tmp_path, capsys):
    graph = tmp_path / "g.json"
    pairs = tmp_path / "pairs.csv"
    code, info = run_cli([
        "gen", "--kind", "grid", "--rows", "4", "--cols", "4",
        "--out", str(graph), "--pairs-out", str(pairs), "--pair-policy", "a2a",
    ], capsys)
    assert code == 0
    assert info == {"nodes": 16, "edges": 48, "k": 2}
    assert pairs.read_text().startswith("src,dst\n")

    model = write_model(tmp_path)
    costed = tmp_path / "costed.json"
    code, _ = run_cli([
        "assign", "--graph", str(graph), "--model", str(model),
        "--seed", "4", "--undirected", "--out", str(costed),
    ], capsys)
    assert code == 0

    verdicts = tmp_path / "verdicts.csv"
    code, counts = run_cli([
        "classify", "--graph", str(costed), "--pairs", str(pairs),
        "--alpha", "0.8", "--p", "0.5", "--out", str(verdicts),
    ], capsys)
    assert code == 0
    assert counts["N_y"] + counts["N_n"] + counts["N_u"] == counts["N_tot"] == 256
    header, first = verdicts.read_text().splitlines()[:2]
    assert header == "src,dst,verdict"
    assert first.split(",")[2] in ("satisfied", "non-satisfied", "uncertain")

    trace = tmp_path / "trace.csv"
    code, summary = run_cli([
        "optimize", "--graph", str(costed), "--pairs", str(pairs),
        "--alpha", "0.8", "--strategy", "dichotomy-endpoints",
        "--max-probes", "8", "--out", str(trace),
    ], capsys)
    assert code == 0
    assert len(summary["best_p"]) == 2
    lines = trace.read_text().splitlines()
    assert lines[0] == "probe_idx,p,N_y,N_n,N_u,pruned_1,pruned_2,cum_N_y,cum_N_n,cum_N_u"
    assert 2 <= len(lines) - 1 <= 8


def test_envelope_command(tmp_path, capsys):
    graph = tmp_path / "g.json"
    run_cli(["gen", "--kind", "three-path", "--out", str(graph)], capsys)
    samples = tmp_path / "env.csv"
    code, info = run_cli([
        "envelope", "--graph", str(graph), "--source", "0", "--dest", "1",
        "--probes", "101", "--out", str(samples),
    ], capsys)
    assert code == 0
    assert info["concave_ok"] is True
    assert samples.read_text().splitlines()[0] == "p,g"


def test_adversarial_bound_check(capsys):
    code, report = run_cli(["adversarial", "--k", "2", "--n", "2", "--mode", "bound-check"], capsys)
    assert code == 0
    assert report["bound"] == 21 and report["achieved"] == 21
    assert report["exhaustive"] is True


def test_adversarial_theorems(capsys):
    code, report = run_cli(["adversarial", "--k", "2", "--n", "2", "--mode", "theorem2"], capsys)
    assert code == 0 and report["violations"] == 0
    code, report = run_cli([
        "adversarial", "--k", "2", "--n", "3", "--mode", "theorem3",
        "--trials", "100", "--seed", "1",
    ], capsys)
    assert code == 0
    assert report["fraction"] >= 0.5 - 3 * report["stderr"]


def test_montecarlo_command(tmp_path, capsys):
    model = tmp_path / "uniform.json"
    model.write_text(json.dumps({
        "dims": [{"dist": "uniform", "lo": 0.0, "hi": 1.0}, {"dist": "uniform", "lo": 0.0, "hi": 1.0}]
    }))
    code, report = run_cli([
        "montecarlo", "--n-paths", "10", "--model", str(model),
        "--constraints", "0.3,0.3", "--p", "0.5", "--samples", "2000", "--seed", "3",
    ], capsys)
    assert code == 0
    assert 0.0 <= report["probability"] <= 1.0
    code, report = run_cli([
        "montecarlo", "--n-paths", "10", "--model", str(model),
        "--constraints", "0.3,0.3", "--p-grid", "21", "--samples", "2000", "--seed", "3",
    ], capsys)
    assert code == 0
    assert 0.0 <= report["best_p"] <= 1.0


def test_experiment_and_summarize(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({
        "topology": {"kind": "grid", "rows": 4, "cols": 4, "pair_policy": "b2b"},
        "cost_model": {"dims": [
            {"dist": "normal", "mean": 7.5, "variance": 1.25},
            {"dist": "discrete-uniform", "values": [0.01, 0.02, 0.03, 0.04, 0.05]},
        ]},
        "alphas": [0.7, 0.9],
        "seeds": [0, 1],
        "strategy": {"kind": "dichotomy-endpoints", "max_probes": 6},
        "mode": "multiple-p",
    }))
    results = tmp_path / "results.csv"
    code, info = run_cli(["experiment", "--config", str(config), "--out", str(results)], capsys)
    assert code == 0 and info["rows"] == 4
    again = tmp_path / "again.csv"
    run_cli(["experiment", "--config", str(config), "--out", str(again)], capsys)
    assert results.read_bytes() == again.read_bytes()

    summary = tmp_path / "summary.csv"
    code, info = run_cli(["summarize", "--in", str(results), "--out", str(summary)], capsys)
    assert code == 0 and info["groups"] == 1
    assert summary.read_text().splitlines()[0].startswith("topology,pair_policy")


def test_exit_codes(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--kind", "grid", "--rows", "3"])  # missing --cols value is fine; missing --out
    assert exc.value.code == 1
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    capsys.readouterr()
    # runtime error: nonexistent input file
    assert main(["classify", "--graph", str(tmp_path / "nope.json"),
                 "--pairs", str(tmp_path / "nope.csv"), "--p", "0.5"]) == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    capsys.readouterr()


def test_gen_rejects_bad_params(capsys):
    assert main(["gen", "--kind", "grid", "--rows", "1", "--cols", "3", "--out", "/tmp/x.json"]) == 2
    capsys.readouterr()
