"""Compiled inner loops for the automaton.

Two estimators of the hypothesis-count vector live here:

* ``estimate_draws`` draws ``N`` beta samples per action and credits the
  per-replication winner. It consumes the generator exactly like
  ``Generator.beta(alpha, beta, size=(N, r))`` so compiled and NumPy code see
  the same numbers.
* ``run_multinomial`` computes the winning probabilities
  ``p_i = int f_i(x) prod_{j != i} F_j(x) dx`` by Gauss-Legendre quadrature
  on panels graded to each posterior's spread, and draws the counts from
  ``Multinomial(N, p)``. The winners of ``N`` independent replications are
  i.i.d. categorical(p), so the counts have the same law as the draw-based
  estimator at a fraction of the cost.

Selection and environment feedback use their own generators, so both
estimators see identical tie-breaking and feedback streams.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np
from numpy.polynomial import legendre

NODES_PER_PANEL = 8
# Panels are no wider than a posterior's sd inside a window of +-BUILD_WINDOW
# sd around its mean; the grid is reused while every arm stays within
# +-CHECK_WINDOW sd of its build window and its sd has not shrunk below
# SHRINK times the build value.
BUILD_WINDOW = 50.0
CHECK_WINDOW = 40.0
SHRINK = 0.75
COARSE_WIDTH = 1.0 / 16.0


def _gauss_legendre_tables(q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1] plus the matrix mapping node values to
    integrals from 0 up to each node of the interpolating polynomial."""
    xi, om = legendre.leggauss(q)
    xi = 0.5 * (xi + 1.0)
    om = 0.5 * om
    vander_inv = np.linalg.inv(np.vander(xi, q, increasing=True))
    powers = np.arange(1, q + 1, dtype=np.float64)
    antideriv = xi[:, None] ** powers[None, :] / powers[None, :]
    return xi, om, antideriv @ vander_inv


GL_NODES, GL_WEIGHTS, GL_CUMULATIVE = _gauss_legendre_tables(NODES_PER_PANEL)


@nb.njit(cache=True)
def _moments(a, b):
    n = a + b
    return a / n, math.sqrt(a * b / (n * n * (n + 1.0)))


@nb.njit(cache=True)
def build_edges(alpha, beta, lo, hi, width):
    """Panel breakpoints on [0, 1], graded to every posterior's spread.

    Inside arm ``i``'s window ``lo[i]..hi[i]`` panels are at most ``width[i]``
    (its sd) wide; where no window reaches, ``COARSE_WIDTH`` is used.
    """
    r = alpha.shape[0]
    events = np.empty(2 * r + 2)
    events[0] = 0.0
    events[1] = 1.0
    for i in range(r):
        mu, sd = _moments(alpha[i], beta[i])
        lo[i] = max(0.0, mu - BUILD_WINDOW * sd)
        hi[i] = min(1.0, mu + BUILD_WINDOW * sd)
        width[i] = sd
        events[2 + 2 * i] = lo[i]
        events[3 + 2 * i] = hi[i]
    events.sort()
    nseg = events.shape[0] - 1
    counts = np.zeros(nseg, np.int64)
    total = 0
    for s in range(nseg):
        a0 = events[s]
        a1 = events[s + 1]
        if a1 <= a0:
            continue
        mid = 0.5 * (a0 + a1)
        h = COARSE_WIDTH
        for i in range(r):
            if lo[i] <= mid <= hi[i] and width[i] < h:
                h = width[i]
        counts[s] = int(math.ceil((a1 - a0) / h))
        total += counts[s]
    edges = np.empty(total + 1)
    k = 0
    for s in range(nseg):
        if counts[s] == 0:
            continue
        a0 = events[s]
        step = (events[s + 1] - a0) / counts[s]
        for j in range(counts[s]):
            edges[k] = a0 + j * step
            k += 1
    edges[total] = 1.0
    return edges


@nb.njit(cache=True)
def grid_valid(a, b, lo, hi, width):
    """Whether a grid built for an earlier state still resolves Beta(a, b)."""
    mu, sd = _moments(a, b)
    if sd < SHRINK * width:
        return False
    return max(0.0, mu - CHECK_WINDOW * sd) >= lo and min(1.0, mu + CHECK_WINDOW * sd) <= hi


@nb.njit(cache=True)
def build_grid(edges, xi, om):
    q = xi.shape[0]
    m = edges.shape[0] - 1
    g = m * q
    x = np.empty(g)
    w = np.empty(g)
    for p in range(m):
        h = edges[p + 1] - edges[p]
        for k in range(q):
            x[p * q + k] = edges[p] + xi[k] * h
            w[p * q + k] = om[k] * h
    return x, w, np.log(x), np.log1p(-x)


@nb.njit(cache=True)
def arm_tables(a, b, edges, logx, log1mx, om, cum, dens, cdf):
    """Fill normalized density and CDF of Beta(a, b) at the grid nodes."""
    q = om.shape[0]
    m = edges.shape[0] - 1
    g = m * q
    top = -np.inf
    for k in range(g):
        v = (a - 1.0) * logx[k] + (b - 1.0) * log1mx[k]
        dens[k] = v
        if v > top:
            top = v
    for k in range(g):
        dens[k] = math.exp(dens[k] - top)
    total = 0.0
    for p in range(m):
        h = edges[p + 1] - edges[p]
        base = p * q
        for i in range(q):
            s = 0.0
            for k in range(q):
                s += cum[i, k] * dens[base + k]
            cdf[base + i] = total + h * s
        s = 0.0
        for k in range(q):
            s += om[k] * dens[base + k]
        total += h * s
    inv = 1.0 / total
    for k in range(g):
        dens[k] *= inv
        cdf[k] *= inv


@nb.njit(cache=True)
def winning_probs(dens, cdf, w, g, out):
    """p_i = sum_k w_k f_i(x_k) prod_{j != i} F_j(x_k), renormalized to sum 1."""
    r = out.shape[0]
    for i in range(r):
        out[i] = 0.0
    prefix = np.empty(r + 1)
    for k in range(g):
        prefix[0] = 1.0
        for j in range(r):
            prefix[j + 1] = prefix[j] * cdf[j, k]
        suffix = 1.0
        for j in range(r - 1, -1, -1):
            out[j] += w[k] * dens[j, k] * prefix[j] * suffix
            suffix *= cdf[j, k]
    s = 0.0
    for i in range(r):
        if out[i] < 0.0:
            out[i] = 0.0
        s += out[i]
    for i in range(r):
        out[i] /= s


@nb.njit(cache=True)
def multinomial_counts(n, p, gen, counts):
    """Sequential conditional-binomial multinomial draw (NumPy's algorithm)."""
    d = p.shape[0]
    for i in range(d):
        counts[i] = 0
    remaining = n
    rest = 1.0
    for j in range(d - 1):
        ratio = p[j] / rest if rest > 0.0 else 1.0
        if ratio > 1.0:
            ratio = 1.0
        elif ratio < 0.0:
            ratio = 0.0
        counts[j] = gen.binomial(remaining, ratio)
        remaining -= counts[j]
        if remaining <= 0:
            break
        rest -= p[j]
    if remaining > 0:
        counts[d - 1] = remaining


@nb.njit(cache=True)
def estimate_draws(alpha, beta, n, gen, counts):
    r = alpha.shape[0]
    for i in range(r):
        counts[i] = 0
    for _ in range(n):
        best = -1.0
        winner = 0
        for i in range(r):
            x = gen.beta(alpha[i], beta[i])
            if x > best:
                best = x
                winner = i
        counts[winner] += 1


@nb.njit(cache=True)
def _all_tables(alpha, beta, xi, om, cum, lo, hi, width):
    edges = build_edges(alpha, beta, lo, hi, width)
    x, w, logx, log1mx = build_grid(edges, xi, om)
    r = alpha.shape[0]
    g = x.shape[0]
    dens = np.empty((r, g))
    cdf = np.empty((r, g))
    for i in range(r):
        arm_tables(alpha[i], beta[i], edges, logx, log1mx, om, cum, dens[i], cdf[i])
    return edges, w, logx, log1mx, dens, cdf


@nb.njit(cache=True)
def hypothesis_probs(alpha, beta, xi, om, cum):
    """Winning probabilities of every action under independent beta posteriors."""
    r = alpha.shape[0]
    lo = np.empty(r)
    hi = np.empty(r)
    width = np.empty(r)
    edges, w, logx, log1mx, dens, cdf = _all_tables(alpha, beta, xi, om, cum, lo, hi, width)
    out = np.empty(r)
    winning_probs(dens, cdf, w, w.shape[0], out)
    return out


@nb.njit(cache=True)
def select_action(counts, selections, gen):
    """Top-two / least-sampled rule.

    Actions are ranked by count with ties broken by one uniform key per action;
    of the top two, the one selected fewer times is returned, and a further
    uniform decides when both were selected equally often.
    """
    r = counts.shape[0]
    keys = np.empty(r)
    for i in range(r):
        keys[i] = gen.random()
    first = -1
    second = -1
    for i in range(r):
        if first < 0 or counts[i] > counts[first] or (counts[i] == counts[first] and keys[i] < keys[first]):
            second = first
            first = i
        elif second < 0 or counts[i] > counts[second] or (counts[i] == counts[second] and keys[i] < keys[second]):
            second = i
    if selections[first] < selections[second]:
        return first
    if selections[second] < selections[first]:
        return second
    if gen.random() < 0.5:
        return first
    return second


@nb.njit(cache=True)
def _argmax(counts):
    best = 0
    for i in range(1, counts.shape[0]):
        if counts[i] > counts[best]:
            best = i
    return best


@nb.njit(cache=True)
def run_draws(c, eta, n, max_iter, g_mc, g_tie, g_env):
    """One automaton run with the draw-based estimator.

    Returns ``(action, iterations, converged, terminal_max_prob)``.
    """
    r = c.shape[0]
    alpha = np.full(r, 2.0)
    beta = np.full(r, 1.0)
    selections = np.zeros(r, np.int64)
    counts = np.zeros(r, np.int64)
    t = 0
    while True:
        estimate_draws(alpha, beta, n, g_mc, counts)
        if counts.sum() != n:
            raise AssertionError("hypothesis counts do not partition N")
        best = _argmax(counts)
        top = counts[best] / n
        if top > eta:
            return best, t, True, top
        if t >= max_iter:
            return best, t, False, top
        a = select_action(counts, selections, g_tie)
        if g_env.random() < c[a]:
            alpha[a] += 1.0
        else:
            beta[a] += 1.0
        selections[a] += 1
        t += 1


@nb.njit(cache=True)
def run_multinomial(c, eta, n, max_iter, g_mc, g_tie, g_env, xi, om, cum):
    """One automaton run with the quadrature + multinomial estimator.

    Only the pulled action's tables are rebuilt per step unless the grid no
    longer resolves its posterior.
    """
    r = c.shape[0]
    alpha = np.full(r, 2.0)
    beta = np.full(r, 1.0)
    selections = np.zeros(r, np.int64)
    counts = np.zeros(r, np.int64)
    probs = np.empty(r)
    lo = np.empty(r)
    hi = np.empty(r)
    width = np.empty(r)
    edges, w, logx, log1mx, dens, cdf = _all_tables(alpha, beta, xi, om, cum, lo, hi, width)

    t = 0
    while True:
        winning_probs(dens, cdf, w, w.shape[0], probs)
        multinomial_counts(n, probs, g_mc, counts)
        if counts.sum() != n:
            raise AssertionError("hypothesis counts do not partition N")
        best = _argmax(counts)
        top = counts[best] / n
        if top > eta:
            return best, t, True, top
        if t >= max_iter:
            return best, t, False, top
        a = select_action(counts, selections, g_tie)
        if g_env.random() < c[a]:
            alpha[a] += 1.0
        else:
            beta[a] += 1.0
        selections[a] += 1
        t += 1

        if grid_valid(alpha[a], beta[a], lo[a], hi[a], width[a]):
            arm_tables(alpha[a], beta[a], edges, logx, log1mx, om, cum, dens[a], cdf[a])
        else:
            edges, w, logx, log1mx, dens, cdf = _all_tables(alpha, beta, xi, om, cum, lo, hi, width)
