"""Experiment orchestration: fraction sweeps, repetitions, timing, reports.

A sweep fixes one labeled graph (loaded or synthesized), then for every
(training fraction, repetition) pair draws a fresh split with seed
``base_seed XOR repetition``, fits each requested method, predicts the test
edges, and scores MCC and accuracy. Cells aggregate over repetitions; a
failing method run is recorded in its cell without disturbing the rest.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.stats

from . import batch
from .errors import DataError
from .features import regularity_report
from .genmodel import bayes_scores, make_synthetic, sign_with_tie
from .graph import SignedDigraph, sample_split
from .metrics import accuracy, confusion, mcc

DEFAULT_FRACTIONS = (0.05, 0.10, 0.15, 0.20, 0.25)
METHODS = ("blc", "logreg", "lprop", "unreg", "bayes-oracle")


@dataclass
class SyntheticSpec:
    """Recipe for a reproducible synthetic benchmark graph."""

    node_count: int
    prior: object
    mean_out_degree: int = 10
    topology: str = "fixed"
    seed: int = 0


@dataclass
class ExperimentSpec:
    """What to run: dataset or synthetic recipe, methods, fractions, seeds."""

    source: object  # path to a graph container / edge list, or SyntheticSpec
    methods: tuple = ("blc", "logreg", "lprop")
    fractions: tuple = DEFAULT_FRACTIONS
    repetitions: int = 12
    base_seed: int = 0
    include_psi2: bool = True

    def validate(self):
        for f in self.fractions:
            if not 0.0 < f < 1.0:
                raise ValueError(f"fractions must lie strictly in (0,1), got {f}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


@dataclass
class Cell:
    """Aggregated results for one (method, fraction) pair."""

    method: str
    fraction: float
    mcc_values: list = field(default_factory=list)
    acc_values: list = field(default_factory=list)
    seconds: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def mcc_mean(self):
        return float(np.mean(self.mcc_values)) if self.mcc_values else float("nan")

    @property
    def mcc_std(self):
        if len(self.mcc_values) < 2:
            return 0.0
        return float(np.std(self.mcc_values, ddof=1))

    @property
    def acc_mean(self):
        return float(np.mean(self.acc_values)) if self.acc_values else float("nan")

    @property
    def seconds_mean(self):
        return float(np.mean(self.seconds)) if self.seconds else float("nan")


@dataclass
class ExperimentReport:
    """Per-cell aggregates plus the dataset's regularity measures."""

    cells: list
    regularity: object
    repetitions: int
    base_seed: int
    node_count: int
    edge_count: int

    def cell(self, method, fraction):
        for c in self.cells:
            if c.method == method and abs(c.fraction - fraction) < 1e-12:
                return c
        raise KeyError((method, fraction))

    def to_json_dict(self, include_timing=True):
        cells = []
        for c in sorted(self.cells, key=lambda c: (c.fraction, c.method)):
            d = {
                "method": c.method,
                "fraction": c.fraction,
                "mcc_mean": c.mcc_mean,
                "mcc_std": c.mcc_std,
                "acc_mean": c.acc_mean,
                "mcc_values": list(c.mcc_values),
                "failures": list(c.failures),
            }
            if include_timing:
                d["seconds_mean"] = c.seconds_mean
            cells.append(d)
        return {
            "format": "edgesign-report", "version": 1,
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "regularity": self.regularity.to_json_dict() if self.regularity else None,
            "cells": cells,
        }

    def to_json(self, include_timing=True):
        return json.dumps(self.to_json_dict(include_timing), indent=2, sort_keys=True)

    def to_csv(self):
        lines = ["method,fraction,mcc_mean,mcc_std,acc_mean,seconds_mean,failures"]
        for c in sorted(self.cells, key=lambda c: (c.fraction, c.method)):
            lines.append(f"{c.method},{c.fraction!r},{c.mcc_mean!r},{c.mcc_std!r},"
                         f"{c.acc_mean!r},{c.seconds_mean!r},{len(c.failures)}")
        return "\n".join(lines) + "\n"

    def to_markdown(self):
        methods = sorted({c.method for c in self.cells})
        fractions = sorted({c.fraction for c in self.cells})
        header = "| fraction | " + " | ".join(methods) + " |"
        sep = "|---" * (len(methods) + 1) + "|"
        rows = [header, sep]
        for f in fractions:
            entries = []
            for m in methods:
                c = self.cell(m, f)
                entries.append(f"{100 * c.mcc_mean:.2f} ± {100 * c.mcc_std:.2f}")
            rows.append(f"| {f:g} | " + " | ".join(entries) + " |")
        return "\n".join(rows) + "\n"


def _fit_predict(method, g, split, params):
    if method == "blc":
        model = batch.blc_fit(g, split)
        return batch.blc_predict_split(model, g, split)
    if method == "logreg":
        model = batch.logreg_fit(g, split)
        return batch.logreg_predict_split(model, g, split)
    if method == "lprop":
        state = batch.lp_run(g, split)
        return batch.lp_predict(state, g, split)
    if method == "unreg":
        result = batch.unreg_solve(g, split, batch.UnregOptions(tol=1e-6))
        return batch.unreg_predict(result, g, split)
    if method == "bayes-oracle":
        if params is None:
            raise DataError("bayes-oracle needs generative parameters (synthetic runs only)")
        test = split.test_indices()
        scores = bayes_scores(params, g.src[test], g.dst[test])
        return batch.Prediction(
            edge_indices=test, src=g.src[test], dst=g.dst[test],
            scores=scores, labels=sign_with_tie(scores).astype(np.int8),
            threshold=0.0, method="bayes-oracle")
    raise ValueError(f"unknown method {method!r}")


def load_source(source):
    """Resolve an experiment source into (graph, params-or-None)."""
    if isinstance(source, SyntheticSpec):
        source.prior.validate()
        g, params = make_synthetic(source.node_count, source.prior,
                                   source.mean_out_degree, source.seed,
                                   kind=source.topology)
        return g, params
    if isinstance(source, SignedDigraph):
        return source, None
    return SignedDigraph.load(source), None


def run_experiment(spec, threads=1):
    """Execute the sweep described by ``spec``.

    Repetition r uses split seed ``base_seed XOR r``. With ``threads > 1``
    repetitions run in a thread pool; aggregation is order-independent, so
    reports are identical either way.
    """
    spec.validate()
    g, params = load_source(spec.source)
    cells = {(m, f): Cell(method=m, fraction=f)
             for f in spec.fractions for m in spec.methods}

    def one_rep(rep):
        seed = spec.base_seed ^ rep
        out = []
        for fraction in spec.fractions:
            split = sample_split(g, fraction, seed)
            truth = g.labels[split.test_indices()]
            for method in spec.methods:
                t0 = time.perf_counter()
                try:
                    pred = _fit_predict(method, g, split, params)
                except Exception as exc:  # recorded per-cell, sweep continues
                    out.append((method, fraction, None, None, None,
                                f"rep {rep}: {type(exc).__name__}: {exc}"))
                    continue
                dt = time.perf_counter() - t0
                c = confusion(pred.labels, truth)
                out.append((method, fraction, mcc(c), accuracy(c), dt, None))
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_rep, range(spec.repetitions)))
    else:
        results = [one_rep(r) for r in range(spec.repetitions)]
    for rep_out in results:
        for method, fraction, m_val, a_val, dt, failure in rep_out:
            cell = cells[(method, fraction)]
            if failure is not None:
                cell.failures.append(failure)
            else:
                cell.mcc_values.append(m_val)
                cell.acc_values.append(a_val)
                cell.seconds.append(dt)

    regularity = regularity_report(g, include_psi2=spec.include_psi2)
    return ExperimentReport(cells=list(cells.values()), regularity=regularity,
                            repetitions=spec.repetitions, base_seed=spec.base_seed,
                            node_count=g.node_count, edge_count=g.edge_count)


@dataclass
class TTestResult:
    p_value: float
    t_statistic: float
    degenerate: bool


def paired_t_test(a, b):
    """Two-sided paired Student t-test.

    Zero-variance differences are degenerate: p = 1 when the paired values
    agree on average, p = 0 otherwise, flagged in the result.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.size < 2:
        raise ValueError("need two equal-length vectors with at least 2 entries")
    d = a - b
    mean = d.mean()
    sd = d.std(ddof=1)
    if sd == 0.0:
        return TTestResult(p_value=1.0 if mean == 0.0 else 0.0,
                           t_statistic=float("nan") if mean else 0.0,
                           degenerate=True)
    t = mean / (sd / math.sqrt(d.size))
    p = 2.0 * scipy.stats.t.sf(abs(t), df=d.size - 1)
    return TTestResult(p_value=float(p), t_statistic=float(t), degenerate=False)
