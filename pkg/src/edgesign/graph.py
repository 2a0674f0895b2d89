"""Signed directed graphs: ingestion, CSR adjacency, degree statistics, splits.

The central type is :class:`SignedDigraph`, an immutable directed graph whose
edges carry a ±1 label. Node ids are compacted to ``0..n-1`` at ingestion;
the original identifiers are kept in ``node_ids`` so graphs can be persisted
and cross-referenced with their source files.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError, EdgeListParseError

GRAPH_FORMAT = "edgesign-graph"
SPLIT_FORMAT = "edgesign-split"

_SIGN_TOKENS = {"1": 1, "+1": 1, "-1": -1}


def _csr_from_endpoints(endpoints, n, m):
    """Contiguous per-node ranges over an edge-permutation array."""
    order = np.argsort(endpoints, kind="stable").astype(np.int64)
    counts = np.bincount(endpoints, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    assert indptr[-1] == m
    return indptr, order


class SignedDigraph:
    """Immutable directed graph with ±1 edge labels and in/out CSR indexes.

    Attributes
    ----------
    node_count : int
    src, dst : int64 arrays of length |E|
    labels : int8 array of ±1, one per edge
    out_indptr, out_edges : CSR over edge ids grouped by source node
    in_indptr, in_edges : CSR over edge ids grouped by destination node
    node_ids : list of original node identifiers (index = compact id)
    """

    def __init__(self, node_count, src, dst, labels, node_ids=None, validate=True):
        src = np.ascontiguousarray(src, dtype=np.int64)
        dst = np.ascontiguousarray(dst, dtype=np.int64)
        labels = np.ascontiguousarray(labels, dtype=np.int8)
        if src.shape != dst.shape or src.shape != labels.shape:
            raise DataError("src, dst and labels must have identical length")
        m = src.size
        if validate:
            if m and (src.min() < 0 or dst.min() < 0):
                raise DataError("negative node id")
            if m and max(src.max(), dst.max()) >= node_count:
                raise DataError("node id out of range")
            if m and np.any(src == dst):
                raise DataError("self-loop present; clean the edge list first")
            if not np.all(np.abs(labels) == 1):
                raise DataError("labels must be +1 or -1")
            if m:
                keys = src * np.int64(node_count) + dst
                if np.unique(keys).size != m:
                    raise DataError("duplicate (src, dst) pair")
        self.node_count = int(node_count)
        self.src = src
        self.dst = dst
        self.labels = labels
        self.out_indptr, self.out_edges = _csr_from_endpoints(src, node_count, m)
        self.in_indptr, self.in_edges = _csr_from_endpoints(dst, node_count, m)
        self.node_ids = list(node_ids) if node_ids is not None else [str(i) for i in range(node_count)]
        if len(self.node_ids) != node_count:
            raise DataError("node_ids length must equal node_count")
        for arr in (self.src, self.dst, self.labels, self.out_indptr,
                    self.out_edges, self.in_indptr, self.in_edges):
            arr.setflags(write=False)

    @property
    def edge_count(self):
        return self.src.size

    @property
    def positive_fraction(self):
        if self.edge_count == 0:
            return float("nan")
        return float(np.count_nonzero(self.labels == 1) / self.edge_count)

    def out_edge_ids(self, i):
        return self.out_edges[self.out_indptr[i]:self.out_indptr[i + 1]]

    def in_edge_ids(self, i):
        return self.in_edges[self.in_indptr[i]:self.in_indptr[i + 1]]

    def out_neighbors(self, i):
        return self.dst[self.out_edge_ids(i)]

    def in_neighbors(self, i):
        return self.src[self.in_edge_ids(i)]

    def with_labels(self, labels):
        """Same topology, different labeling."""
        return SignedDigraph(self.node_count, self.src, self.dst, labels,
                             node_ids=self.node_ids, validate=False)

    def __eq__(self, other):
        if not isinstance(other, SignedDigraph):
            return NotImplemented
        return (self.node_count == other.node_count
                and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.labels, other.labels)
                and self.node_ids == other.node_ids)

    def __repr__(self):
        return f"SignedDigraph(|V|={self.node_count}, |E|={self.edge_count})"

    def to_json_dict(self):
        return {
            "format": GRAPH_FORMAT,
            "version": 1,
            "node_count": self.node_count,
            "src": self.src.tolist(),
            "dst": self.dst.tolist(),
            "labels": self.labels.tolist(),
            "node_ids": self.node_ids,
        }

    @classmethod
    def from_json_dict(cls, d):
        if d.get("format") != GRAPH_FORMAT:
            raise DataError(f"not a {GRAPH_FORMAT} container")
        if d.get("version") != 1:
            raise DataError(f"unsupported graph container version {d.get('version')!r}")
        return cls(d["node_count"], np.asarray(d["src"], dtype=np.int64),
                   np.asarray(d["dst"], dtype=np.int64),
                   np.asarray(d["labels"], dtype=np.int8),
                   node_ids=d["node_ids"], validate=False)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, separators=(",", ":"))

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_json_dict(json.load(f))


@dataclass
class LoadReport:
    """Ingestion diagnostics for :func:`load_edge_list`."""

    self_loops_dropped: int = 0
    duplicates_merged: int = 0
    conflicts_dropped: int = 0


def load_edge_list(source, delimiter=None):
    """Parse a signed edge list into a cleaned :class:`SignedDigraph`.

    One edge per line, ``src dst sign`` with sign token ``1``, ``+1`` or
    ``-1``; fields separated by tabs or spaces (``delimiter=None`` accepts any
    whitespace run). Lines starting with ``#`` and blank lines are skipped.

    Cleaning rules: self-loops are dropped; duplicate (src, dst) records of
    the same sign are merged into one edge; (src, dst) pairs recorded with
    *both* signs are dropped entirely and counted as conflicts. Node ids are
    compacted to ``0..n-1`` in first-seen order; endpoints of dropped records
    still register as nodes.

    Parameters
    ----------
    source : path, file-like, or str/bytes content
    delimiter : explicit field separator, or None for any whitespace

    Returns
    -------
    SignedDigraph with a ``load_report`` attribute (:class:`LoadReport`).
    """
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        lines = text.splitlines()
    elif isinstance(source, bytes):
        lines = source.decode("utf-8").splitlines()
    elif isinstance(source, str) and "\n" in source:
        lines = source.splitlines()
    else:
        with open(source, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()

    ids = {}
    report = LoadReport()
    # (u, v) -> sign, or None once a conflicting sign was seen
    pair_sign = {}
    order = []

    def intern(token):
        idx = ids.get(token)
        if idx is None:
            idx = len(ids)
            ids[token] = idx
        return idx

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(delimiter)
        if len(parts) != 3:
            raise EdgeListParseError(lineno, f"expected 3 fields, got {len(parts)}")
        sign = _SIGN_TOKENS.get(parts[2])
        if sign is None:
            raise EdgeListParseError(lineno, f"bad sign token {parts[2]!r}")
        u = intern(parts[0])
        v = intern(parts[1])
        if u == v:
            report.self_loops_dropped += 1
            continue
        key = (u, v)
        prev = pair_sign.get(key, 0)
        if prev == 0:
            pair_sign[key] = sign
            order.append(key)
        elif prev is None:
            pass  # already conflicting, stays dropped
        elif prev == sign:
            report.duplicates_merged += 1
        else:
            pair_sign[key] = None
            report.conflicts_dropped += 1

    kept = [(u, v, pair_sign[(u, v)]) for (u, v) in order if pair_sign[(u, v)] is not None]
    n = len(ids)
    if kept:
        src, dst, labels = (np.asarray(col) for col in zip(*kept))
    else:
        src = dst = np.zeros(0, dtype=np.int64)
        labels = np.zeros(0, dtype=np.int8)
    node_ids = [None] * n
    for token, idx in ids.items():
        node_ids[idx] = token
    g = SignedDigraph(n, src, dst, labels, node_ids=node_ids, validate=False)
    g.load_report = report
    return g


def write_edge_list(g, path_or_file):
    """Serialize back to the tab-separated edge-list text format."""
    own = not hasattr(path_or_file, "write")
    f = open(path_or_file, "w", encoding="utf-8") if own else path_or_file
    try:
        for k in range(g.edge_count):
            u = g.node_ids[g.src[k]]
            v = g.node_ids[g.dst[k]]
            f.write(f"{u}\t{v}\t{int(g.labels[k])}\n")
    finally:
        if own:
            f.close()


@dataclass
class EdgeSplit:
    """Training/test partition of edge indices, sampled without replacement."""

    training_mask: np.ndarray
    fraction: float
    seed: int

    @property
    def n_training(self):
        return int(np.count_nonzero(self.training_mask))

    def training_indices(self):
        return np.flatnonzero(self.training_mask)

    def test_indices(self):
        return np.flatnonzero(~self.training_mask)

    def to_json_dict(self):
        return {
            "format": SPLIT_FORMAT,
            "version": 1,
            "edge_count": int(self.training_mask.size),
            "fraction": self.fraction,
            "seed": self.seed,
            "training_edges": self.training_indices().tolist(),
        }

    @classmethod
    def from_json_dict(cls, d):
        if d.get("format") != SPLIT_FORMAT or d.get("version") != 1:
            raise DataError("not a recognized split container")
        mask = np.zeros(d["edge_count"], dtype=bool)
        mask[np.asarray(d["training_edges"], dtype=np.int64)] = True
        return cls(mask, float(d["fraction"]), int(d["seed"]))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, separators=(",", ":"))

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_json_dict(json.load(f))


def sample_split(g, fraction, seed):
    """Draw a training set of round(fraction·|E|) edges uniformly without replacement.

    Implemented as a seeded full permutation (Fisher-Yates) truncated to the
    first k entries, so every k-subset is equally likely and the draw is
    reproducible given the seed.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie strictly in (0, 1), got {fraction}")
    m = g.edge_count
    if m < 1:
        raise ValueError("graph has no edges to split")
    k = int(round(fraction * m))
    rng = np.random.default_rng(seed)
    mask = np.zeros(m, dtype=bool)
    mask[rng.permutation(m)[:k]] = True
    return EdgeSplit(mask, float(fraction), int(seed))


@dataclass
class NodeStats:
    """Per-node signed degree counts restricted to an edge mask."""

    d_in: np.ndarray
    d_out: np.ndarray
    d_in_plus: np.ndarray
    d_in_minus: np.ndarray
    d_out_plus: np.ndarray
    d_out_minus: np.ndarray


def degree_stats(g, mask=None):
    """Signed in/out degree counts over the masked edge set (None = all edges)."""
    n, m = g.node_count, g.edge_count
    if mask is None:
        src, dst, labels = g.src, g.dst, g.labels
    else:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (m,):
            raise DataError(f"mask length {mask.size} != edge count {m}")
        src, dst, labels = g.src[mask], g.dst[mask], g.labels[mask]
    pos = labels == 1
    d_out = np.bincount(src, minlength=n)
    d_in = np.bincount(dst, minlength=n)
    d_out_plus = np.bincount(src[pos], minlength=n)
    d_in_plus = np.bincount(dst[pos], minlength=n)
    return NodeStats(
        d_in=d_in, d_out=d_out,
        d_in_plus=d_in_plus, d_in_minus=d_in - d_in_plus,
        d_out_plus=d_out_plus, d_out_minus=d_out - d_out_plus,
    )
