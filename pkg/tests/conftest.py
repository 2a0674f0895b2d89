import os

import numpy as np
import pytest

from edgesign.graph import EdgeSplit, SignedDigraph


HAND_EDGES = "a\tb\t+1\na\tc\t-1\nb\tc\t+1\nc\tb\t-1\n"


@pytest.fixture
def hand_graph():
    """4-edge, 3-node graph {(a,b,+),(a,c,-),(b,c,+),(c,b,-)}."""
    from edgesign.graph import load_edge_list
    return load_edge_list(HAND_EDGES)


def make_split(mask, fraction=0.5, seed=0):
    return EdgeSplit(np.asarray(mask, dtype=bool), fraction, seed)


def random_graph(n, m, seed, neg_rate=0.3):
    """Random simple digraph with ~m edges and independent sign flips."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=3 * m)
    dst = rng.integers(0, n - 1, size=3 * m)
    dst += dst >= src
    keys = np.unique(src * np.int64(n) + dst)
    rng.shuffle(keys)
    keys = keys[:m]
    src, dst = keys // n, keys % n
    labels = np.where(rng.random(src.size) < neg_rate, -1, 1).astype(np.int8)
    return SignedDigraph(n, src, dst, labels, validate=False)


def dataset_path(name):
    """Resolve a user-supplied benchmark dataset, or None if not present."""
    base = os.environ.get("EDGESIGN_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "data"))
    for candidate in (f"{name}.tsv", f"{name}.txt", f"{name}.edges"):
        path = os.path.join(base, candidate)
        if os.path.exists(path):
            return path
    return None


def requires_dataset(name):
    path = dataset_path(name)
    return pytest.mark.skipif(
        path is None,
        reason=f"benchmark dataset {name!r} not supplied (set EDGESIGN_DATA_DIR)")
