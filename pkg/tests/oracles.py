"""Independent oracles used by the tests.

Everything here deliberately avoids the solver code paths under test:
brute-force enumeration, dense grids, finite differences, plain projected
gradient descent, and exact-rational dynamic programming.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from edgesign.batch import lp_gradient, lp_objective


def brute_force_threshold_mistakes(scores, labels):
    """Minimum training mistakes over all midpoint/sentinel thresholds."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    values = np.unique(scores)
    candidates = [-np.inf, np.inf]
    candidates += [0.5 * (a + b) for a, b in zip(values[:-1], values[1:])]
    best = None
    for theta in candidates:
        pred = np.where(scores - theta >= 0, 1, -1)
        mistakes = int(np.count_nonzero(pred != labels))
        best = mistakes if best is None else min(best, mistakes)
    return best


def finite_difference(fun, x, h=1e-5):
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        grad[k] = (fun(x + e) - fun(x - e)) / (2.0 * h)
    return grad


def lp_reference_minimize(g, split, iters=400000, check_every=200, tol=1e-11):
    """Projected gradient descent on the propagation objective.

    Fixed step 1/L with the Gershgorin bound L = max(3·max degree, 4); the
    box [-1, 1] on every variable is wide enough to be inactive at the
    minimizer, so this is a plain projected-gradient scheme independent of
    the Jacobi sweeps under test.
    """
    n = g.node_count
    d_out = np.bincount(g.src, minlength=n)
    d_in = np.bincount(g.dst, minlength=n)
    L = max(4.0, 3.0 * max(d_out.max(initial=0), d_in.max(initial=0)))
    step = 1.0 / L
    p = np.full(n, 0.5)
    q = np.full(n, 0.5)
    t = np.full(split.test_indices().size, 0.5)
    for k in range(iters):
        gp, gq, gt = lp_gradient(g, split, p, q, t)
        p = np.clip(p - step * gp, -1.0, 1.0)
        q = np.clip(q - step * gq, -1.0, 1.0)
        t = np.clip(t - step * gt, -1.0, 1.0)
        if k % check_every == 0:
            norm = max(np.abs(gp).max(initial=0.0), np.abs(gq).max(initial=0.0),
                       np.abs(gt).max(initial=0.0))
            if norm <= tol:
                break
    return p, q, t


def grid_minimum(fun, bounds, step):
    """Exhaustive grid search; returns (best value, best point)."""
    axes = [np.arange(lo, hi + 0.5 * step, step) for lo, hi in bounds]
    best = (np.inf, None)
    for point in itertools.product(*axes):
        v = fun(np.asarray(point))
        if v < best[0]:
            best = (v, np.asarray(point))
    return best


def refine_minimum(fun, point, radius, step):
    """Local grid refinement around a coarse-grid optimum."""
    bounds = [(x - radius, x + radius) for x in point]
    return grid_minimum(fun, bounds, step)


def mrc_recurrence_table(r_max, c_max):
    """m(r, c) via the defining recurrence, in exact rationals.

    m(r, 1) = 2^-r; m(c, c) = 2^-c; m(r, c) = (m(r-1, c) + m(r-1, c-1)) / 2.
    """
    table = {}
    for r in range(1, r_max + 1):
        table[(r, 1)] = Fraction(1, 2 ** r)
    for c in range(2, c_max + 1):
        for r in range(c, r_max + 1):
            if r == c:
                table[(r, c)] = Fraction(1, 2 ** r)
            else:
                prev_same = table.get((r - 1, c), Fraction(0))
                prev_less = table.get((r - 1, c - 1), Fraction(0))
                table[(r, c)] = (prev_same + prev_less) / 2
    return table


def student_t_two_sided_p(t, df):
    """Two-sided p-value by numerical quadrature of the t density."""
    from scipy.integrate import quad

    c = math.gamma((df + 1) / 2.0) / (math.sqrt(df * math.pi) * math.gamma(df / 2.0))

    def density(x):
        return c * (1.0 + x * x / df) ** (-(df + 1) / 2.0)

    tail, _ = quad(density, abs(t), np.inf)
    return 2.0 * tail


def rwm_two_expert_mistakes(labels):
    """Hand simulation of one two-expert instance's expected mistakes.

    Experts predict constant +1 / -1; weights exp(-eta * loss) with
    eta = min(1/2, sqrt(ln2 / (1 + best loss))). Returns the sum over rounds
    of the probability mass on the wrong expert before each reveal.
    """
    loss_plus = 0
    loss_minus = 0
    total = 0.0
    for y in labels:
        eta = min(0.5, math.sqrt(math.log(2.0) / (1.0 + min(loss_plus, loss_minus))))
        w_plus = math.exp(-eta * loss_plus)
        w_minus = math.exp(-eta * loss_minus)
        p_plus = w_plus / (w_plus + w_minus)
        total += (1.0 - p_plus) if y == 1 else p_plus
        if y == 1:
            loss_minus += 1
        else:
            loss_plus += 1
    return total
