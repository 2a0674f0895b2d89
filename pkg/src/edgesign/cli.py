"""Command-line frontend.

Subcommands: ingest, stats, split, train, predict, eval, sweep, synth,
online. Every randomized command requires an explicit --seed. Exit codes:
0 success, 2 argument error, 3 data error, 4 convergence error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import batch, harness, online
from .errors import ConvergenceError, DataError, EdgeListParseError, EdgeSignError
from .features import regularity_report
from .genmodel import (BetaPrior, GenParams, TwoPointPrior, UniformPrior,
                       make_synthetic)
from .graph import EdgeSplit, SignedDigraph, load_edge_list, sample_split
from .metrics import accuracy, confusion, mcc

DATA_DIR_ENV = "EDGESIGN_DATA_DIR"

EXIT_ARGUMENT = 2
EXIT_DATA = 3
EXIT_CONVERGENCE = 4


def _resolve(path):
    """Expand a bare filename against $EDGESIGN_DATA_DIR when it is not local."""
    if os.path.exists(path):
        return path
    base = os.environ.get(DATA_DIR_ENV)
    if base:
        candidate = os.path.join(base, path)
        if os.path.exists(candidate):
            return candidate
    return path


def _write_json(payload, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _load_graph(path):
    path = _resolve(path)
    try:
        return SignedDigraph.load(path)
    except (json.JSONDecodeError, UnicodeDecodeError, DataError):
        return load_edge_list(path)


def cmd_ingest(args):
    g = load_edge_list(_resolve(args.input), delimiter=args.delimiter)
    g.save(args.output)
    rep = g.load_report
    print(f"nodes\t{g.node_count}")
    print(f"edges\t{g.edge_count}")
    print(f"positive_fraction\t{g.positive_fraction:.4f}")
    print(f"self_loops_dropped\t{rep.self_loops_dropped}")
    print(f"duplicates_merged\t{rep.duplicates_merged}")
    print(f"conflicts_dropped\t{rep.conflicts_dropped}")
    return 0


def cmd_stats(args):
    g = _load_graph(args.graph)
    report = regularity_report(g, tol=args.tol, max_iter=args.max_iter,
                               include_psi2=not args.no_psi2)
    payload = report.to_json_dict()
    payload.update({"node_count": g.node_count, "edge_count": g.edge_count,
                    "positive_fraction": g.positive_fraction})
    if args.output:
        _write_json(payload, args.output)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_split(args):
    g = _load_graph(args.graph)
    split = sample_split(g, args.fraction, args.seed)
    split.save(args.output)
    print(f"training_edges\t{split.n_training}")
    print(f"test_edges\t{g.edge_count - split.n_training}")
    return 0


def _get_split(g, args):
    if args.split:
        split = EdgeSplit.load(args.split)
        if split.training_mask.size != g.edge_count:
            raise DataError("split does not match the graph's edge count")
        return split
    if args.fraction is None or args.seed is None:
        raise DataError("either --split or both --fraction and --seed are required")
    return sample_split(g, args.fraction, args.seed)


def cmd_train(args):
    g = _load_graph(args.graph)
    split = _get_split(g, args)
    if args.method == "blc":
        model = batch.blc_fit(g, split)
    elif args.method == "logreg":
        model = batch.logreg_fit(g, split)
    elif args.method == "lprop":
        state = batch.lp_run(g, split, batch.LpOptions(tol=args.tol,
                                                       max_sweeps=args.max_iter))
        pred = batch.lp_predict(state, g, split)
        model = batch.LpModel(p=state.p, q=state.q, threshold=pred.threshold)
    elif args.method == "unreg":
        result = batch.unreg_solve(g, split, batch.UnregOptions(tol=args.tol,
                                                                max_iter=args.max_iter))
        pred = batch.unreg_predict(result, g, split)
        payload = {"format": "edgesign-unreg", "version": 1,
                   "p": result.p.tolist(), "q": result.q.tolist(),
                   "y_soft": result.y_soft.tolist(),
                   "threshold": pred.threshold}
        _write_json(payload, args.output)
        if args.split_out:
            split.save(args.split_out)
        print(f"objective\t{result.objective!r}")
        return 0
    else:
        raise DataError(f"unknown method {args.method!r}")
    batch.save_model(model, args.output)
    if args.split_out:
        split.save(args.split_out)
    print(f"model\t{args.output}")
    return 0


def cmd_predict(args):
    g = _load_graph(args.graph)
    split = _get_split(g, args)
    with open(args.model, "r", encoding="utf-8") as f:
        payload = json.load(f)
    if payload.get("format") == "edgesign-unreg":
        scores = np.asarray(payload["y_soft"])
        pred = batch._prediction_for(g, split, scores, payload["threshold"], "unreg")
    else:
        model = batch.load_model(args.model)
        if isinstance(model, batch.BlcModel):
            pred = batch.blc_predict_split(model, g, split)
        elif isinstance(model, batch.LogRegModel):
            pred = batch.logreg_predict_split(model, g, split)
        else:
            pred = model.predict_split(g, split)
    pred.to_csv(args.output, node_ids=g.node_ids)
    print(f"predictions\t{args.output}")
    return 0


def cmd_eval(args):
    g = _load_graph(args.graph)
    split = _get_split(g, args)
    test = split.test_indices()
    by_pair = {}
    with open(args.predictions, "r", encoding="utf-8") as f:
        header = f.readline()
        if not header.startswith("src,dst,score,label"):
            raise DataError("prediction file lacks the src,dst,score,label header")
        for line in f:
            u, v, _score, label = line.rstrip("\n").split(",")
            by_pair[(u, v)] = int(label)
    try:
        pred_labels = [by_pair[(g.node_ids[g.src[e]], g.node_ids[g.dst[e]])]
                       for e in test]
    except KeyError as exc:
        raise DataError(f"prediction file does not cover test edge {exc}") from exc
    if len(by_pair) != test.size:
        raise DataError("prediction file covers a different edge set than the split")
    c = confusion(np.asarray(pred_labels), g.labels[test])
    payload = {"tp": c.tp, "tn": c.tn, "fp": c.fp, "fn": c.fn,
               "mcc": mcc(c), "accuracy": accuracy(c)}
    if args.output:
        _write_json(payload, args.output)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _prior_from_args(args):
    if args.prior == "uniform":
        return UniformPrior()
    if args.prior == "beta":
        return BetaPrior(*args.prior_params)
    if args.prior == "two-point":
        if len(args.prior_params) not in (3, 6):
            raise DataError("two-point prior takes lo hi weight [q_lo q_hi q_weight]")
        return TwoPointPrior(*args.prior_params)
    raise DataError(f"unknown prior {args.prior!r}")


def cmd_synth(args):
    prior = _prior_from_args(args)
    g, params = make_synthetic(args.nodes, prior, args.degree, args.seed,
                               kind=args.topology)
    g.save(args.output)
    if args.params_out:
        params.save(args.params_out)
    print(f"nodes\t{g.node_count}")
    print(f"edges\t{g.edge_count}")
    print(f"positive_fraction\t{g.positive_fraction:.4f}")
    return 0


def cmd_sweep(args):
    with open(args.spec, "r", encoding="utf-8") as f:
        d = json.load(f)
    if "synthetic" in d:
        s = d["synthetic"]
        from .genmodel import prior_from_json_dict
        source = harness.SyntheticSpec(
            node_count=s["node_count"], prior=prior_from_json_dict(s["prior"]),
            mean_out_degree=s.get("mean_out_degree", 10),
            topology=s.get("topology", "fixed"), seed=s.get("seed", 0))
    else:
        source = _resolve(d["dataset"])
    spec = harness.ExperimentSpec(
        source=source, methods=tuple(d.get("methods", ["blc", "logreg", "lprop"])),
        fractions=tuple(d.get("fractions", harness.DEFAULT_FRACTIONS)),
        repetitions=d.get("repetitions", 12), base_seed=d.get("base_seed", 0),
        include_psi2=d.get("include_psi2", True))
    report = harness.run_experiment(spec, threads=args.threads)
    _write_json(report.to_json_dict(), args.output)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write(report.to_csv())
    if args.markdown:
        with open(args.markdown, "w", encoding="utf-8") as f:
            f.write(report.to_markdown())
    print(report.to_markdown())
    return 0


def cmd_online(args):
    g = _load_graph(args.graph)
    reports = []
    for trial in range(args.trials):
        seed = args.seed + trial
        if args.adversary_k is not None:
            seq = online.adversary_generate(g, args.adversary_k, seed,
                                            include_tail=args.full_pass)
            reports.append(online.run_online(g, order=seq, seed=seed))
        else:
            reports.append(online.run_online(g, labeling=g.labels,
                                             order="random", seed=seed))
    payload = {
        "format": "edgesign-online-report", "version": 1,
        "trials": [r.to_json_dict() for r in reports],
        "mean_expected_mistakes": float(np.mean([r.expected_mistakes for r in reports])),
        "mean_realized_mistakes": float(np.mean([r.realized_mistakes for r in reports])),
    }
    _write_json(payload, args.output)
    print(f"mean_expected_mistakes\t{payload['mean_expected_mistakes']!r}")
    print(f"mean_realized_mistakes\t{payload['mean_realized_mistakes']!r}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="edgesign",
        description="Edge sign prediction in signed directed networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, clean and persist an edge list")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--delimiter", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="label-regularity report")
    p.add_argument("graph")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--no-psi2", action="store_true")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10000)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="draw and persist a training/test split")
    p.add_argument("graph")
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_split)

    for name, helptext in (("train", "fit a model on the training edges"),
                           ("predict", "score test edges with a fitted model"),
                           ("eval", "score a prediction file against the truth")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("graph")
        if name == "train":
            p.add_argument("--method", required=True,
                           choices=["blc", "logreg", "lprop", "unreg"])
            p.add_argument("-o", "--output", required=True)
            p.add_argument("--split-out", default=None)
            p.add_argument("--tol", type=float, default=1e-8)
            p.add_argument("--max-iter", type=int, default=20000)
        elif name == "predict":
            p.add_argument("model")
            p.add_argument("-o", "--output", required=True)
        else:
            p.add_argument("predictions")
            p.add_argument("-o", "--output", default=None)
        p.add_argument("--split", default=None)
        p.add_argument("--fraction", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.set_defaults(func={"train": cmd_train, "predict": cmd_predict,
                             "eval": cmd_eval}[name])

    p = sub.add_parser("sweep", help="run a fraction sweep from a spec file")
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--csv", default=None)
    p.add_argument("--markdown", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic labeled graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--topology", choices=["fixed", "er", "ring"], default="fixed")
    p.add_argument("--prior", choices=["uniform", "beta", "two-point"],
                   required=True)
    p.add_argument("--prior-params", type=float, nargs="*", default=[])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--params-out", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("online", help="sequential prediction trials")
    p.add_argument("graph")
    p.add_argument("--adversary-k", type=int, default=None)
    p.add_argument("--full-pass", action="store_true")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_online)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EdgeListParseError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT


if __name__ == "__main__":
    sys.exit(main())
