"""Transfer matrices, Perron eigendata, pressure, and Markov equilibrium
measures.

For an edge-locally-constant potential <u, class> - s * roof the pressure
of the vertex shift is the log of the Perron eigenvalue of the weighted
adjacency matrix M(u, s), and the pressure of the suspension flow at u is
the unique root s* of log lambda(M(u, s)) = 0 (the roof is strictly
positive, so s -> log lambda is strictly decreasing).  The equilibrium
measure is the Markov chain built from the Perron eigendata at s*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingEdgeValue,
    NonConvergence,
    NotPrimitive,
)
from .graphs import DirectedGraph, Edge, require_valid
from .weights import WeightSystem

# Perron solves inside derivative chains run tighter than the public
# default so finite differences of the gradient stay meaningful.
_INNER_TOL = 1e-14


@dataclass(frozen=True)
class PerronData:
    """Dominant eigen-triple of a primitive nonnegative matrix.

    right is scaled to max-entry 1 and left so that left . right = 1.
    """

    eigenvalue: float
    right: np.ndarray
    left: np.ndarray


@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary Markov chain supported on the edges.

    stationary[i-1] is the vertex weight of vertex i, transition[i-1, j-1]
    the step probability of edge i -> j, and edge_measure their product.
    """

    stationary: np.ndarray
    transition: np.ndarray
    edge_measure: dict[Edge, float]

    def mean_roof(self, w: WeightSystem) -> float:
        return sum(m * w.roof[e] for e, m in self.edge_measure.items())


def transfer_matrix(g: DirectedGraph, w: WeightSystem, u, s: float) -> np.ndarray:
    """M[i-1, j-1] = exp(<u, class(i->j)> - s * roof(i->j)) on edges, 0 off."""
    require_valid(g)
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape != (w.dimension,):
        raise DimensionMismatch(
            f"u has length {u.shape[0]}, class dimension is {w.dimension}"
        )
    k = g.vertex_count
    m = np.zeros((k, k))
    for (i, j) in g.edge_set:
        m[i - 1, j - 1] = math.exp(
            float(np.dot(u, w.classes[(i, j)])) - s * w.roof[(i, j)]
        )
    return m


def _is_primitive_pattern(pattern: np.ndarray) -> bool:
    k = pattern.shape[0]
    power = pattern.copy()
    bound = (k - 1) * (k - 1) + 1
    for _ in range(bound):
        if power.all():
            return True
        power = (power.astype(np.int64) @ pattern.astype(np.int64)) > 0
    return False


def _power_iterate(m: np.ndarray, tol: float, max_iter: int):
    """Collatz-Wielandt iteration; returns (eigenvalue, positive vector).

    The iterate stays strictly positive for primitive patterns; losing
    positivity or finiteness means the matrix scale degenerated, which is
    reported as non-convergence.  Slow spectral gaps fall back to squaring
    the matrix (doubling the step count per round); the final enclosure is
    always measured against the original matrix, and a rounding-floor
    enclosure is accepted only while it still implies the documented
    1e-10 relative residual.
    """
    scale = float(m.max())
    m = m / scale
    n = m.shape[0]
    x = np.ones(n)
    plain_budget = min(max_iter, 3000)
    for _ in range(plain_budget):
        y = m @ x
        if not np.isfinite(y).all() or (y <= 0.0).any():
            raise NonConvergence("power iterate lost positivity (over/underflow)")
        ratios = y / x
        lo = ratios.min()
        hi = ratios.max()
        x = y / y.max()
        if hi - lo <= tol * hi:
            return scale * 0.5 * (lo + hi), x

    # slow spectral gap: accelerate by repeated squaring (the 2^j-step
    # power iterate), still certified by the enclosure on m itself
    b = m.copy()
    acceptable = max(tol, 1e-10)
    result = None
    for _ in range(80):
        b = b @ b
        top = b.max()
        if not np.isfinite(top) or top <= 0.0:
            break
        b = b / top
        x = b @ np.ones(n)
        if not np.isfinite(x).all() or (x <= 0.0).any():
            break
        x = x / x.max()
        y = m @ x
        if (y <= 0.0).any():
            break
        ratios = y / x
        lo = ratios.min()
        hi = ratios.max()
        gap = hi - lo
        if result is None or gap < result[0]:
            result = (gap, 0.5 * (lo + hi), y / y.max())
        if gap <= tol * hi:
            return scale * 0.5 * (lo + hi), y / y.max()
    if result is not None and result[0] <= acceptable * result[1]:
        return scale * result[1], result[2]
    raise NonConvergence(
        f"power iteration did not reach tolerance {tol} in {plain_budget} steps "
        "and squaring acceleration stalled"
    )


def perron(m, *, tol: float = 1e-12, max_iter: int = 10**6) -> PerronData:
    """Dominant eigen-triple via power iteration on M and its transpose.

    Requires a nonnegative matrix whose support pattern is primitive
    (strongly connected and aperiodic); otherwise the iteration has no
    limit and NotPrimitive is raised.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if (m < 0).any():
        raise ValueError("matrix must be nonnegative")
    if not _is_primitive_pattern(m > 0):
        raise NotPrimitive("support pattern is periodic or not strongly connected")
    lam, right = _power_iterate(m, tol, max_iter)
    _, left = _power_iterate(m.T, tol, max_iter)
    right = right / right.max()
    left = left / float(left @ right)
    return PerronData(float(lam), right, left)


def shift_pressure(g: DirectedGraph, w: WeightSystem, u, s: float) -> float:
    """log of the Perron eigenvalue of M(u, s)."""
    return math.log(perron(transfer_matrix(g, w, u, s)).eigenvalue)


def _edge_measure_from(g, m: np.ndarray, pd: PerronData) -> dict[Edge, float]:
    lam = pd.eigenvalue
    l, r = pd.left, pd.right
    return {
        (i, j): float(l[i - 1] * m[i - 1, j - 1] * r[j - 1] / lam)
        for (i, j) in g.edge_set
    }


def _flow_root(g: DirectedGraph, w: WeightSystem, u, *, tol: float = 1e-10):
    """Root s* of log lambda(M(u, s)) = 0 with its final eigendata.

    Safeguarded Newton inside a sign-change bracket.  The derivative of
    log lambda in s is minus the expected roof per step under the
    eigen-chain, which also prices the Newton step.
    """
    require_valid(g)
    u = np.asarray(u, dtype=float).reshape(-1)

    def eval_at(s):
        m = transfer_matrix(g, w, u, s)
        pd = perron(m, tol=_INNER_TOL)
        em = _edge_measure_from(g, m, pd)
        slope = -sum(em[e] * w.roof[e] for e in em)
        return math.log(pd.eigenvalue), slope, m, pd

    # Row-sum bounds give a bracket in closed form: below lo every row sum
    # is >= 1 (some term >= 1), above hi every row sum is <= 1.
    k = g.vertex_count
    per_row = {i: [] for i in range(1, k + 1)}
    for (i, j) in g.edge_set:
        per_row[i].append(float(np.dot(u, w.classes[(i, j)])) / w.roof[(i, j)])
    lo = min(max(vals) for vals in per_row.values())
    hi = max(
        (float(np.dot(u, w.classes[e])) + math.log(k)) / w.roof[e]
        for e in g.edge_set
    )
    step = 1.0
    while eval_at(lo)[0] < 0.0:
        hi = min(hi, lo)
        lo -= step
        step *= 2.0
    step = 1.0
    while eval_at(hi)[0] > 0.0:
        lo = max(lo, hi)
        hi += step
        step *= 2.0

    s = 0.5 * (lo + hi)
    for _ in range(200):
        f, slope, m, pd = eval_at(s)
        if f > 0.0:
            lo = s
        else:
            hi = s
        if abs(f) <= 1e-14 * max(1.0, abs(slope)):
            return s, m, pd
        s_new = s - f / slope
        if not (lo < s_new < hi):
            s_new = 0.5 * (lo + hi)
        if abs(s_new - s) <= 1e-14 * max(1.0, abs(s)):
            return s_new, *eval_at(s_new)[2:]
        s = s_new
    raise NonConvergence("pressure root iteration did not converge")


def flow_pressure(g: DirectedGraph, w: WeightSystem, u, *, tol: float = 1e-10) -> float:
    """Suspension pressure at u: the s with shift_pressure(u, s) = 0."""
    return _flow_root(g, w, u, tol=tol)[0]


def equilibrium_measure(g: DirectedGraph, w: WeightSystem, u) -> MarkovMeasure:
    """Markov measure realizing the equilibrium state at u.

    Built at s* = flow_pressure(u) from the eigendata: P[i,j] =
    M[i,j] r[j] / (lambda r[i]), pi[i] = l[i] r[i] / (l . r).
    """
    _, m, pd = _flow_root(g, w, u)
    lam, r, l = pd.eigenvalue, pd.right, pd.left
    k = g.vertex_count
    p = m * r[None, :] / (lam * r[:, None])
    pi = l * r  # l . r = 1 by normalization
    edge_measure = {
        (i, j): float(pi[i - 1] * p[i - 1, j - 1]) for (i, j) in g.edge_set
    }
    return MarkovMeasure(pi, p, edge_measure)


def pressure_gradient(g: DirectedGraph, w: WeightSystem, u) -> np.ndarray:
    """Mean class per unit length under the equilibrium measure at u."""
    _, m, pd = _flow_root(g, w, u)
    em = _edge_measure_from(g, m, pd)
    d = w.dimension
    num = np.zeros(d)
    den = 0.0
    for e, weight in em.items():
        num += weight * np.asarray(w.classes[e], dtype=float)
        den += weight * w.roof[e]
    return num / den


def pressure_hessian(g: DirectedGraph, w: WeightSystem, u, *, step: float | None = None) -> np.ndarray:
    """Central finite differences of the pressure gradient, symmetrized."""
    u = np.asarray(u, dtype=float).reshape(-1)
    d = w.dimension
    h = np.empty(d)
    for i in range(d):
        h[i] = step if step is not None else max(1e-5, 1e-5 * abs(u[i]))
    cols = np.empty((d, d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = h[i]
        cols[:, i] = (pressure_gradient(g, w, u + e) - pressure_gradient(g, w, u - e)) / (2 * h[i])
    return 0.5 * (cols + cols.T)


def integrate_observable(mm: MarkovMeasure, w: WeightSystem, phi: dict) -> float:
    """Time average of a per-edge observable under the suspension of the
    Markov measure: (sum m(e) phi(e)) / (sum m(e) roof(e))."""
    num = 0.0
    den = 0.0
    for e, weight in mm.edge_measure.items():
        if e not in phi:
            raise MissingEdgeValue(f"observable undefined on edge {e}")
        num += weight * float(phi[e])
        den += weight * w.roof[e]
    return num / den
