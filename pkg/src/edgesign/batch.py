"""Batch predictors for edge signs given a training subset of labeled edges.

Four methods share the same (graph, split) interface:

* ``blc_*`` — thresholded trollness/trustworthiness rule
  sgn((1−tr̂(i)) + (1−ûn(j)) − 1/2 − τ̂) with τ̂ the training positive rate.
* ``logreg_*`` — two-feature logistic model on (1−tr̂(i), 1−ûn(j)).
* ``lp_*`` — label propagation on the weighted edge-to-node transform,
  run directly on the original adjacency via its closed-form updates.
* ``unreg_*`` — projected-gradient minimization of the unregularized
  quadratic over p, q ∈ [0,1] and soft test labels y ∈ [−1,1].

All binarizing thresholds are tuned by empirical risk minimization over the
training scores (:func:`tune_threshold`). The global tie rule is sgn(0) = +1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError, DataError, DegenerateFitError
from .features import troll_trust
from .genmodel import sign_with_tie


# ---------------------------------------------------------------------------
# Threshold tuning and prediction container


def tune_threshold(scores, labels):
    """Empirical-risk-minimizing binarization threshold.

    Candidates are the midpoints of consecutive distinct scores plus −inf
    (predict everything +1) and +inf (predict everything −1); predictions are
    sgn(score − threshold) with sgn(0) = +1. Ties in mistake count break
    toward the smallest threshold.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.size == 0 or scores.shape != labels.shape:
        raise ValueError("need nonempty score/label vectors of equal length")
    values, inverse = np.unique(scores, return_inverse=True)
    k = values.size
    pos = np.bincount(inverse[labels == 1], minlength=k)
    neg = np.bincount(inverse[labels == -1], minlength=k)
    # mistakes when everything with score <= values[j-1] is predicted -1:
    # positives below the cut plus negatives above it
    cum_pos = np.concatenate([[0], np.cumsum(pos)])
    cum_neg = np.concatenate([[0], np.cumsum(neg)])
    mistakes = cum_pos + (cum_neg[-1] - cum_neg)
    j = int(np.argmin(mistakes))  # argmin takes the first (= smallest threshold)
    if j == 0:
        return float("-inf")
    if j == k:
        return float("inf")
    return float(0.5 * (values[j - 1] + values[j]))


@dataclass
class Prediction:
    """Scored ±1 predictions for a set of edges."""

    edge_indices: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    scores: np.ndarray
    labels: np.ndarray
    threshold: float
    method: str

    def to_csv(self, path_or_file, node_ids=None):
        """Write `src,dst,score,label` rows (full-precision scores)."""
        own = not hasattr(path_or_file, "write")
        f = open(path_or_file, "w", encoding="utf-8") if own else path_or_file
        try:
            f.write("src,dst,score,label\n")
            for u, v, s, y in zip(self.src, self.dst, self.scores, self.labels):
                su = node_ids[u] if node_ids is not None else int(u)
                sv = node_ids[v] if node_ids is not None else int(v)
                f.write(f"{su},{sv},{float(s)!r},{int(y)}\n")
        finally:
            if own:
                f.close()


def _threshold_labels(scores, threshold):
    return sign_with_tie(np.asarray(scores) - threshold).astype(np.int8)


def _prediction_for(g, split, scores, threshold, method):
    test = split.test_indices()
    return Prediction(edge_indices=test, src=g.src[test], dst=g.dst[test],
                      scores=np.asarray(scores, dtype=np.float64),
                      labels=_threshold_labels(scores, threshold),
                      threshold=float(threshold), method=method)


# ---------------------------------------------------------------------------
# Thresholded trollness/trustworthiness classifier


@dataclass
class BlcModel:
    """Training-set trollness/trustworthiness plus the positive-rate offset."""

    tr: np.ndarray
    un: np.ndarray
    tr_defined: np.ndarray
    un_defined: np.ndarray
    tau: float

    def score(self, src, dst):
        return (1.0 - self.tr[src]) + (1.0 - self.un[dst]) - 0.5 - self.tau

    def to_json_dict(self):
        return {
            "format": "edgesign-blc", "version": 1,
            "tr": self.tr.tolist(), "un": self.un.tolist(),
            "tr_defined": self.tr_defined.astype(int).tolist(),
            "un_defined": self.un_defined.astype(int).tolist(),
            "tau": self.tau,
        }

    @classmethod
    def from_json_dict(cls, d):
        if d.get("format") != "edgesign-blc" or d.get("version") != 1:
            raise DataError("not a recognized blc model container")
        return cls(np.asarray(d["tr"]), np.asarray(d["un"]),
                   np.asarray(d["tr_defined"], dtype=bool),
                   np.asarray(d["un_defined"], dtype=bool), float(d["tau"]))


def blc_fit(g, split):
    """Estimate tr̂, ûn on the training edges (default 1/2 where unseen) and
    τ̂ as the fraction of positive training edges."""
    train = split.training_indices()
    if train.size == 0:
        raise DegenerateFitError("cannot fit on an empty training set")
    tt = troll_trust(g, split.training_mask, default=0.5)
    tau = float(np.count_nonzero(g.labels[train] == 1) / train.size)
    return BlcModel(tr=tt.tr, un=tt.un, tr_defined=tt.tr_defined,
                    un_defined=tt.un_defined, tau=tau)


def blc_predict(model, edge):
    """(sign, score) for a single edge (i, j); sgn(0) = +1."""
    i, j = edge
    score = float(model.score(i, j))
    return int(sign_with_tie(score)), score


def blc_predict_split(model, g, split):
    """Predictions for every test edge of the split."""
    test = split.test_indices()
    scores = model.score(g.src[test], g.dst[test])
    return _prediction_for(g, split, scores, 0.0, "blc")


# ---------------------------------------------------------------------------
# Two-feature logistic model


@dataclass
class LogRegModel:
    """Bias + weights on (1−tr̂(i), 1−ûn(j)), with a tuned binarization threshold."""

    w0: float
    w1: float
    w2: float
    threshold: float
    tr: np.ndarray = field(repr=False, default=None)
    un: np.ndarray = field(repr=False, default=None)

    @property
    def w2_prime(self):
        return self.w2 / self.w1

    @property
    def tau_prime(self):
        return -(0.5 + self.w0 / self.w1)

    def score(self, src, dst):
        return self.w0 + self.w1 * (1.0 - self.tr[src]) + self.w2 * (1.0 - self.un[dst])

    def to_json_dict(self):
        return {
            "format": "edgesign-logreg", "version": 1,
            "w0": self.w0, "w1": self.w1, "w2": self.w2,
            "threshold": self.threshold,
            "tr": self.tr.tolist(), "un": self.un.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d):
        if d.get("format") != "edgesign-logreg" or d.get("version") != 1:
            raise DataError("not a recognized logreg model container")
        return cls(float(d["w0"]), float(d["w1"]), float(d["w2"]),
                   float(d["threshold"]), np.asarray(d["tr"]), np.asarray(d["un"]))


def _nll(z, y01):
    # mean of log(1+e^z) - y*z, stable for large |z|
    return float(np.mean(np.logaddexp(0.0, z) - y01 * z))


def logreg_fit(g, split, tol=1e-8, max_iter=200):
    """Maximum-likelihood logistic fit of training labels on the two features.

    Damped Newton with backtracking on the mean negative log-likelihood,
    stopping at gradient infinity-norm ≤ tol. Single-class training labels
    raise DegenerateFitError; budget exhaustion raises ConvergenceError with
    diagnostics.
    """
    train = split.training_indices()
    if train.size == 0:
        raise DegenerateFitError("cannot fit on an empty training set")
    y = g.labels[train]
    if np.all(y == 1) or np.all(y == -1):
        raise DegenerateFitError("training labels are single-class")
    tt = troll_trust(g, split.training_mask, default=0.5)
    X = np.column_stack([
        np.ones(train.size),
        1.0 - tt.tr[g.src[train]],
        1.0 - tt.un[g.dst[train]],
    ])
    y01 = (y == 1).astype(np.float64)
    m = train.size
    w = np.zeros(3)
    z = X @ w
    loss = _nll(z, y01)
    it = 0
    for it in range(1, max_iter + 1):
        s = 1.0 / (1.0 + np.exp(-z))
        grad = X.T @ (s - y01) / m
        gnorm = np.abs(grad).max()
        if gnorm <= tol:
            break
        weights = s * (1.0 - s)
        hess = (X * weights[:, None]).T @ X / m
        try:
            step = np.linalg.solve(hess, grad)
            if not np.all(np.isfinite(step)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            step = grad
        t = 1.0
        decrease = float(grad @ step)
        while t > 1e-14:
            w_new = w - t * step
            z_new = X @ w_new
            loss_new = _nll(z_new, y01)
            if loss_new <= loss - 1e-4 * t * decrease:
                break
            t *= 0.5
        else:
            raise ConvergenceError(
                f"logistic line search stalled at iteration {it} (|grad|={gnorm:.3g})")
        w, z, loss = w_new, z_new, loss_new
    else:
        s = 1.0 / (1.0 + np.exp(-z))
        gnorm = np.abs(X.T @ (s - y01) / m).max()
        if gnorm > tol:
            raise ConvergenceError(
                f"logistic fit not converged after {max_iter} iterations "
                f"(|grad|={gnorm:.3g}, tol={tol:.3g})")
    threshold = tune_threshold(z, y)
    return LogRegModel(w0=float(w[0]), w1=float(w[1]), w2=float(w[2]),
                       threshold=threshold, tr=tt.tr, un=tt.un)


def logreg_predict_split(model, g, split):
    test = split.test_indices()
    scores = model.score(g.src[test], g.dst[test])
    return _prediction_for(g, split, scores, model.threshold, "logreg")


# ---------------------------------------------------------------------------
# Exact likelihood gradient and its linearization


def ml_gradient(p, q, g, split):
    """Gradient of the training log-likelihood w.r.t. (p, q).

    For each node ℓ: Σ over positive training out-edges of 1/(p_ℓ+q_j) minus
    Σ over negative ones of 1/(2−p_ℓ−q_j); symmetrically for q. Requires
    p_i+q_j strictly inside (0, 2) on every training edge.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    train = split.training_indices()
    src, dst, y = g.src[train], g.dst[train], g.labels[train]
    s = p[src] + q[dst]
    bad = np.flatnonzero((s <= 0.0) | (s >= 2.0))
    if bad.size:
        k = bad[0]
        raise ValueError(
            f"p+q = {s[k]} on training edge ({src[k]}, {dst[k]}) lies outside (0, 2)")
    n = g.node_count
    pos = y == 1
    terms = np.where(pos, 1.0 / s, -1.0 / (2.0 - s))
    gp = np.bincount(src, weights=terms, minlength=n)
    gq = np.bincount(dst, weights=terms, minlength=n)
    return gp, gq


def solve_linearized_ml(g, split):
    """Solve the per-node linear equations approximating the likelihood optimum.

    For every node with training out-degree d̂_out(ℓ) > 0:
    d̂_out(ℓ)·p_ℓ + Σ q_j = 2·d̂_out⁺(ℓ) over training out-edges, and
    symmetrically for q. The system is the stationarity condition of the
    quadratic training loss, hence always consistent; the minimum-norm
    least-squares solution is returned, with 1/2 for nodes the training set
    never touches.
    """
    train = split.training_indices()
    src, dst, y = g.src[train], g.dst[train], g.labels[train]
    n = g.node_count
    d_out = np.bincount(src, minlength=n)
    d_in = np.bincount(dst, minlength=n)
    p_nodes = np.flatnonzero(d_out)
    q_nodes = np.flatnonzero(d_in)
    pcol = np.full(n, -1)
    qcol = np.full(n, -1)
    pcol[p_nodes] = np.arange(p_nodes.size)
    qcol[q_nodes] = p_nodes.size + np.arange(q_nodes.size)
    nv = p_nodes.size + q_nodes.size
    A = np.zeros((nv, nv))
    b = np.zeros(nv)
    pos = (y == 1).astype(np.float64)
    # p-equations occupy the first block of rows, q-equations the rest
    A[pcol[p_nodes], pcol[p_nodes]] = d_out[p_nodes]
    np.add.at(A, (pcol[src], qcol[dst]), 1.0)
    np.add.at(b, pcol[src], 2.0 * pos)
    A[qcol[q_nodes], qcol[q_nodes]] = d_in[q_nodes]
    np.add.at(A, (qcol[dst], pcol[src]), 1.0)
    np.add.at(b, qcol[dst], 2.0 * pos)
    x = np.linalg.lstsq(A, b, rcond=None)[0]
    p = np.full(n, 0.5)
    q = np.full(n, 0.5)
    p[p_nodes] = x[pcol[p_nodes]]
    q[q_nodes] = x[qcol[q_nodes]]
    return p, q


def quadratic_training_loss(p, q, g, split):
    """Σ over training edges of ((1+y)/2 − (p_i+q_j)/2)²."""
    train = split.training_indices()
    t = (1.0 + g.labels[train]) / 2.0
    r = t - 0.5 * (np.asarray(p)[g.src[train]] + np.asarray(q)[g.dst[train]])
    return float(r @ r)


def quadratic_training_grad(p, q, g, split):
    """Gradient of :func:`quadratic_training_loss` w.r.t. (p, q)."""
    train = split.training_indices()
    src, dst = g.src[train], g.dst[train]
    t = (1.0 + g.labels[train]) / 2.0
    half = 0.5 * (np.asarray(p)[src] + np.asarray(q)[dst]) - t
    n = g.node_count
    return (np.bincount(src, weights=half, minlength=n),
            np.bincount(dst, weights=half, minlength=n))


# ---------------------------------------------------------------------------
# Label propagation on the weighted transform


@dataclass
class LpOptions:
    tol: float = 1e-8
    max_sweeps: int = 1000
    track_objective: bool = False


@dataclass
class LpState:
    """Label-propagation variables at (or nearest to) the fixed point.

    ``y_soft`` holds the soft test-edge values in the same units as the
    training scores (p_i+q_j)/2, ordered like ``split.test_indices()``.
    With ``track_objective`` the per-sweep objective values (a nonincreasing
    sequence) are kept in ``objective_trace``.
    """

    p: np.ndarray
    q: np.ndarray
    y_soft: np.ndarray
    residual: float
    iterations: int
    objective: float
    objective_trace: list = field(default_factory=list)


def _lp_targets(g, split, y_soft=None):
    t = np.full(g.edge_count, 0.5)
    train = split.training_indices()
    t[train] = (1.0 + g.labels[train]) / 2.0
    if y_soft is not None:
        t[split.test_indices()] = y_soft
    return t


def lp_objective(g, split, p, q, y_soft):
    """Quadratic objective the propagation sweeps minimize.

    Edge fit Σ_E (t − (p_i+q_j)/2)² with t pinned to (1+y)/2 on training
    edges and free on test edges, plus the degree-weighted pull
    (1/2)Σ_i [d_out(i)p_i² + d_in(i)q_i²] toward zero.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    t = _lp_targets(g, split, y_soft)
    r = t - 0.5 * (p[g.src] + q[g.dst])
    n = g.node_count
    d_out = np.bincount(g.src, minlength=n)
    d_in = np.bincount(g.dst, minlength=n)
    return float(r @ r + 0.5 * (d_out @ (p * p) + d_in @ (q * q)))


def lp_gradient(g, split, p, q, y_soft):
    """(∂p, ∂q, ∂y_soft) of :func:`lp_objective`."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    t = _lp_targets(g, split, y_soft)
    n = g.node_count
    src, dst = g.src, g.dst
    d_out = np.bincount(src, minlength=n)
    d_in = np.bincount(dst, minlength=n)
    half = 0.5 * (p[src] + q[dst]) - t
    gp = np.bincount(src, weights=half, minlength=n) + d_out * p
    gq = np.bincount(dst, weights=half, minlength=n) + d_in * q
    test = split.test_indices()
    gt = 2.0 * t[test] - (p[src[test]] + q[dst[test]])
    return gp, gq, gt


def _untrained_component_masks(g, split):
    """Boolean masks (per node p-side, per node q-side, per edge) of the
    transform components that contain no training edge.

    Components are taken over the 2|V| circle copies; each original edge
    links its source's out-copy to its destination's in-copy. On a component
    with no pinned square the Jacobi iteration has an eigenvalue of exactly
    −1 (it oscillates), while the objective's unique minimizer there is
    identically zero, so callers pin those variables at zero up front.
    """
    n = g.node_count
    adj = sp.coo_matrix(
        (np.ones(g.edge_count), (g.src, n + g.dst)), shape=(2 * n, 2 * n))
    _, comp = connected_components(adj, directed=False)
    trained = np.zeros(comp.max() + 1, dtype=bool)
    train = split.training_indices()
    trained[comp[g.src[train]]] = True
    edge_untrained = ~trained[comp[g.src]]
    return ~trained[comp[:n]], ~trained[comp[n:]], edge_untrained


def lp_run(g, split, opt=None):
    """Iterate the propagation updates to their joint fixed point.

    Synchronized (Jacobi) sweeps of
    p_i ← (Σ_out 2t − Σ_out q_j) / (3 d_out(i)),
    q_j ← (Σ_in 2t − Σ_in p_i) / (3 d_in(j)),
    t_e ← (p_i + q_j)/2 on test edges,
    with t pinned to (1+y)/2 on training edges, until the largest coordinate
    change in a sweep drops to ``opt.tol``. Nodes with zero out-degree (resp.
    in-degree) keep their initial p (resp. q) of 1/2; components never
    touched by a training edge start at their exact minimizer (zero). The
    per-sweep objective value is nonincreasing.

    Raises ConvergenceError carrying the last state if ``opt.max_sweeps``
    is exhausted.
    """
    opt = opt or LpOptions()
    n, m = g.node_count, g.edge_count
    p = np.full(n, 0.5)
    q = np.full(n, 0.5)
    if m == 0:
        return LpState(p=p, q=q, y_soft=np.zeros(0), residual=0.0,
                       iterations=0, objective=0.0)
    src, dst = g.src, g.dst
    test = split.test_indices()
    d_out = np.bincount(src, minlength=n).astype(np.float64)
    d_in = np.bincount(dst, minlength=n).astype(np.float64)
    has_out = d_out > 0
    has_in = d_in > 0
    t = _lp_targets(g, split)
    p_untrained, q_untrained, edge_untrained = _untrained_component_masks(g, split)
    p[p_untrained & has_out] = 0.0
    q[q_untrained & has_in] = 0.0
    t[test[edge_untrained[test]]] = 0.0
    denom_p = 3.0 * np.where(has_out, d_out, 1.0)
    denom_q = 3.0 * np.where(has_in, d_in, 1.0)
    residual = np.inf
    sweeps = 0
    for sweeps in range(1, opt.max_sweeps + 1):
        p_new = np.where(
            has_out,
            (2.0 * np.bincount(src, weights=t, minlength=n)
             - np.bincount(src, weights=q[dst], minlength=n)) / denom_p,
            p)
        q_new = np.where(
            has_in,
            (2.0 * np.bincount(dst, weights=t, minlength=n)
             - np.bincount(dst, weights=p[src], minlength=n)) / denom_q,
            q)
        t_new = t.copy()
        t_new[test] = 0.5 * (p[src[test]] + q[dst[test]])
        residual = max(
            np.abs(p_new - p).max(initial=0.0),
            np.abs(q_new - q).max(initial=0.0),
            np.abs(t_new - t).max(initial=0.0),
        )
        p, q, t = p_new, q_new, t_new
        if residual <= opt.tol:
            break
    # close the final half-step so test scores equal (p+q)/2 exactly
    t[test] = 0.5 * (p[src[test]] + q[dst[test]])
    state = LpState(p=p, q=q, y_soft=t[test], residual=float(residual),
                    iterations=sweeps,
                    objective=lp_objective(g, split, p, q, t[test]))
    if residual > opt.tol:
        raise ConvergenceError(
            f"label propagation residual {residual:.3g} > tol {opt.tol:.3g} "
            f"after {opt.max_sweeps} sweeps", state=state)
    return state


def lp_predict(state, g, split):
    """Threshold the converged soft values against the tuned training cut."""
    train = split.training_indices()
    train_scores = 0.5 * (state.p[g.src[train]] + state.q[g.dst[train]])
    threshold = tune_threshold(train_scores, g.labels[train])
    return _prediction_for(g, split, state.y_soft, threshold, "lprop")


@dataclass
class LpModel:
    """Persistable (p, q, threshold) triple; scores test edges as (p_i+q_j)/2."""

    p: np.ndarray
    q: np.ndarray
    threshold: float

    def to_json_dict(self):
        return {"format": "edgesign-lprop", "version": 1,
                "p": self.p.tolist(), "q": self.q.tolist(),
                "threshold": self.threshold}

    @classmethod
    def from_json_dict(cls, d):
        if d.get("format") != "edgesign-lprop" or d.get("version") != 1:
            raise DataError("not a recognized lprop model container")
        return cls(np.asarray(d["p"]), np.asarray(d["q"]), float(d["threshold"]))

    def predict_split(self, g, split):
        test = split.test_indices()
        scores = 0.5 * (self.p[g.src[test]] + self.q[g.dst[test]])
        return _prediction_for(g, split, scores, self.threshold, "lprop")


# ---------------------------------------------------------------------------
# Unregularized joint quadratic


@dataclass
class UnregOptions:
    tol: float = 1e-8
    max_iter: int = 20000
    armijo: float = 1e-4


@dataclass
class UnregResult:
    p: np.ndarray
    q: np.ndarray
    y_soft: np.ndarray
    objective: float
    iterations: int
    pg_norm: float


def _unreg_value_grad(g, split, p, q, y, want_grad=True):
    train = split.training_indices()
    test = split.test_indices()
    n = g.node_count
    targets = np.empty(g.edge_count)
    targets[train] = (1.0 + g.labels[train]) / 2.0
    targets[test] = (1.0 + y) / 2.0
    half = 0.5 * (p[g.src] + q[g.dst]) - targets
    value = float(half @ half)
    if not want_grad:
        return value, None, None, None
    gp = np.bincount(g.src, weights=half, minlength=n)
    gq = np.bincount(g.dst, weights=half, minlength=n)
    gy = -half[test]
    return value, gp, gq, gy


def unreg_objective(g, split, p, q, y_soft):
    """Joint quadratic: training fit plus test fit with free y ∈ [−1,1]."""
    return _unreg_value_grad(g, split, np.asarray(p, dtype=np.float64),
                             np.asarray(q, dtype=np.float64),
                             np.asarray(y_soft, dtype=np.float64),
                             want_grad=False)[0]


def unreg_solve(g, split, opt=None):
    """Projected gradient descent on the unregularized joint quadratic.

    Box constraints p, q ∈ [0,1] and test y ∈ [−1,1]; backtracking line
    search halves the step from 1.0 under an Armijo sufficient-decrease test.
    Stops when the projected-gradient infinity norm reaches ``opt.tol``;
    raises ConvergenceError with the best iterate otherwise.
    """
    opt = opt or UnregOptions()
    n = g.node_count
    test = split.test_indices()
    p = np.full(n, 0.5)
    q = np.full(n, 0.5)
    y = np.zeros(test.size)
    value, gp, gq, gy = _unreg_value_grad(g, split, p, q, y)
    it = 0
    for it in range(1, opt.max_iter + 1):
        pg = max(
            np.abs(p - np.clip(p - gp, 0.0, 1.0)).max(initial=0.0),
            np.abs(q - np.clip(q - gq, 0.0, 1.0)).max(initial=0.0),
            np.abs(y - np.clip(y - gy, -1.0, 1.0)).max(initial=0.0),
        )
        if pg <= opt.tol:
            return UnregResult(p=p, q=q, y_soft=y, objective=value,
                               iterations=it - 1, pg_norm=float(pg))
        step = 1.0
        while True:
            p_new = np.clip(p - step * gp, 0.0, 1.0)
            q_new = np.clip(q - step * gq, 0.0, 1.0)
            y_new = np.clip(y - step * gy, -1.0, 1.0)
            value_new, gp_new, gq_new, gy_new = _unreg_value_grad(
                g, split, p_new, q_new, y_new)
            inner = (gp @ (p_new - p) + gq @ (q_new - q) + gy @ (y_new - y))
            if value_new <= value + opt.armijo * inner or step < 1e-14:
                break
            step *= 0.5
        p, q, y = p_new, q_new, y_new
        value, gp, gq, gy = value_new, gp_new, gq_new, gy_new
    pg = max(
        np.abs(p - np.clip(p - gp, 0.0, 1.0)).max(initial=0.0),
        np.abs(q - np.clip(q - gq, 0.0, 1.0)).max(initial=0.0),
        np.abs(y - np.clip(y - gy, -1.0, 1.0)).max(initial=0.0),
    )
    if pg <= opt.tol:
        return UnregResult(p=p, q=q, y_soft=y, objective=value,
                           iterations=it, pg_norm=float(pg))
    raise ConvergenceError(
        f"projected gradient stalled at pg={pg:.3g} after {opt.max_iter} iterations",
        state=UnregResult(p=p, q=q, y_soft=y, objective=value,
                          iterations=it, pg_norm=float(pg)))


def unreg_predict(result, g, split):
    """Threshold solved test y against the cut tuned on training p_i+q_j−1."""
    train = split.training_indices()
    train_scores = result.p[g.src[train]] + result.q[g.dst[train]] - 1.0
    threshold = tune_threshold(train_scores, g.labels[train])
    return _prediction_for(g, split, result.y_soft, threshold, "unreg")


# ---------------------------------------------------------------------------
# Model persistence helpers shared by the CLI


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model.to_json_dict(), f, separators=(",", ":"))


def load_model(path):
    with open(path, "r", encoding="utf-8") as f:
        d = json.load(f)
    fmt = d.get("format")
    for cls in (BlcModel, LogRegModel, LpModel):
        try:
            return cls.from_json_dict(d)
        except DataError:
            continue
    raise DataError(f"unrecognized model container format {fmt!r}")
