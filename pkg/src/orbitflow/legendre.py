"""Legendre duality between pressure and the entropy of directions.

The attainable direction set is the closure of the cycle ratios
class / length; its interior is exactly the image of the pressure
gradient.  For a direction rho in that interior, the dual parameter
u(rho) minimizes e(u) = flow_pressure(u) - <u, rho>, the entropy of the
direction is the minimum value, and the entropy Hessian is minus the
inverse pressure Hessian at u(rho).  Divergence of the Newton iteration
is the signal that rho left the interior.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .errors import (
    DegenerateModel,
    NonConvergence,
    NotPrimitive,
    OutsideCone,
    SingularHessian,
)
from .graphs import DirectedGraph, enumerate_prime_cycles
from .weights import WeightSystem, birkhoff
from .thermo import flow_pressure, pressure_gradient, pressure_hessian


class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class DirectionHull:
    """Cycle ratio points with their convex hull."""

    points: tuple[tuple[float, ...], ...]
    vertices: tuple[tuple[float, ...], ...]
    dim: int  # affine dimension of the point set

    def contains(self, rho, tol: float = 1e-9) -> bool:
        return hull_contains(self.points, rho, tol)


@dataclass(frozen=True)
class DirectionData:
    """A direction with its dual parameter and entropy data."""

    rho: tuple[float, ...]
    u: tuple[float, ...]
    entropy: float
    pressure_at_u: float
    hessian_h: np.ndarray  # d x d, negative definite


_COLLINEARITY_TOL = 1e-12


def direction_hull(g: DirectedGraph, w: WeightSystem, n: int) -> DirectionHull:
    """Hull of class/length ratios over prime cycles of period <= n."""
    pts = []
    seen = set()
    for c in enumerate_prime_cycles(g, n):
        data = birkhoff(c, w)
        ratio = tuple(x / data.length for x in data.class_vector)
        if ratio not in seen:
            seen.add(ratio)
            pts.append(ratio)
    arr = np.asarray(pts, dtype=float)
    center = arr.mean(axis=0)
    centered = arr - center
    sv = np.linalg.svd(centered, compute_uv=False) if len(pts) > 1 else np.array([])
    cutoff = _COLLINEARITY_TOL * max(1.0, float(sv[0])) if sv.size else 0.0
    dim = int((sv > cutoff).sum())
    if dim == 0:
        vertices = (pts[0],)
    elif dim == 1:
        direction = np.linalg.svd(centered, full_matrices=False)[2][0]
        along = centered @ direction
        vertices = (pts[int(np.argmin(along))], pts[int(np.argmax(along))])
    else:
        basis = np.linalg.svd(centered, full_matrices=False)[2][:dim]
        projected = centered @ basis.T
        hull = ConvexHull(projected)
        vertices = tuple(pts[i] for i in sorted(hull.vertices))
    return DirectionHull(tuple(pts), vertices, dim)


def hull_contains(points, rho, tol: float = 1e-9) -> bool:
    """Is rho in the convex hull of the points (within tol)?

    Solved as a small LP: minimize the sup-norm slack of a convex
    combination hitting rho.
    """
    pts = np.asarray(points, dtype=float)
    rho = np.asarray(rho, dtype=float).reshape(-1)
    n, d = pts.shape
    # variables: weights w (n) and slack t (1); minimize t
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    a_ub = np.zeros((2 * d, n + 1))
    b_ub = np.zeros(2 * d)
    for i in range(d):
        a_ub[i, :n] = pts[:, i]
        a_ub[i, -1] = -1.0
        b_ub[i] = rho[i]
        a_ub[d + i, :n] = -pts[:, i]
        a_ub[d + i, -1] = -1.0
        b_ub[d + i] = -rho[i]
    a_eq = np.zeros((1, n + 1))
    a_eq[0, :n] = 1.0
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(0, None)],
        method="highs",
    )
    return bool(res.success) and float(res.fun) <= tol


def solve_u(
    g: DirectedGraph,
    w: WeightSystem,
    rho,
    *,
    tol: float = 1e-8,
    max_iter: int = 200,
    diverge_norm: float = 1e3,
) -> DirectionData:
    """Dual parameter u(rho) by Newton descent on e(u) = pressure - <u, rho>.

    Starts from u = 0 with Armijo backtracking.  Raises OutsideCone when
    the iteration leaves the diverge_norm ball or the line search stalls
    with a gradient bounded away from zero, and DegenerateModel when the
    pressure Hessian is singular at the origin (empty interior).
    """
    rho = np.asarray(rho, dtype=float).reshape(-1)
    d = w.dimension
    if rho.shape != (d,):
        raise ValueError(f"rho has length {rho.shape[0]}, expected {d}")

    h0 = pressure_hessian(g, w, np.zeros(d))
    eigs = np.linalg.eigvalsh(h0)
    if eigs.min() <= 1e-10 * max(1.0, eigs.max()):
        raise DegenerateModel(
            "pressure Hessian singular at 0; direction set has empty interior"
        )

    u = np.zeros(d)
    e_val = flow_pressure(g, w, u)  # <u, rho> = 0 at the start
    grad = pressure_gradient(g, w, u) - rho
    for _ in range(max_iter):
        try:
            hess = pressure_hessian(g, w, u)
        except (OverflowError, NotPrimitive, NonConvergence) as exc:
            raise OutsideCone(
                f"pressure Hessian degenerated at |u| = {np.linalg.norm(u):.3g}"
            ) from exc
        if float(np.abs(grad).max()) <= tol:
            # a genuine interior minimum has a nondegenerate Hessian; a
            # vanishing one means the iterate ran off toward the boundary
            # and the gradient decayed along the way
            if float(np.linalg.eigvalsh(hess).min()) <= 10.0 * tol:
                raise OutsideCone(
                    "dual Hessian degenerate at the solution; direction "
                    "numerically indistinguishable from the boundary"
                )
            return _direction_data(g, w, rho, u)
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.solve(hess + 1e-10 * np.eye(d), -grad)
        slope = float(grad @ step)
        if slope >= 0.0:  # not a descent direction; regularize
            step = np.linalg.solve(hess + 1e-10 * np.eye(d), -grad)
            slope = float(grad @ step)
        t = 1.0
        while t >= 1e-12:
            u_new = u + t * step
            try:
                e_new = flow_pressure(g, w, u_new) - float(u_new @ rho)
            except (OverflowError, NotPrimitive, NonConvergence):
                # transfer matrix under/overflowed: step far too long
                t *= 0.5
                continue
            if e_new <= e_val + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            raise OutsideCone(
                f"line search stalled with gradient norm {np.abs(grad).max():.3g}"
            )
        u = u_new
        e_val = e_new
        if float(np.linalg.norm(u)) > diverge_norm:
            raise OutsideCone(
                f"dual parameter diverged (|u| > {diverge_norm:g}); "
                "direction outside the attainable set"
            )
        try:
            grad = pressure_gradient(g, w, u) - rho
        except (OverflowError, NotPrimitive, NonConvergence) as exc:
            raise OutsideCone(
                f"pressure evaluation degenerated at |u| = {np.linalg.norm(u):.3g}"
            ) from exc
    raise OutsideCone(f"no convergence in {max_iter} Newton steps")


def _direction_data(g, w, rho, u) -> DirectionData:
    p = flow_pressure(g, w, u)
    hess_p = pressure_hessian(g, w, u)
    try:
        hess_h = -np.linalg.inv(hess_p)
    except np.linalg.LinAlgError as exc:
        raise SingularHessian(str(exc)) from exc
    return DirectionData(
        rho=tuple(float(x) for x in rho),
        u=tuple(float(x) for x in u),
        entropy=float(p - np.dot(u, rho)),
        pressure_at_u=float(p),
        hessian_h=hess_h,
    )


def entropy_hessian(dd: DirectionData) -> np.ndarray:
    """Hessian of the entropy function at dd.rho: minus the inverse
    pressure Hessian at the dual parameter."""
    h = dd.hessian_h
    if not np.isfinite(h).all():
        raise SingularHessian("entropy Hessian is not finite")
    eigs = np.linalg.eigvalsh(h)
    if eigs.max() >= 0.0:
        raise SingularHessian(
            f"entropy Hessian not negative definite (max eigenvalue {eigs.max():.3g})"
        )
    return h


def membership(
    g: DirectedGraph,
    w: WeightSystem,
    rho,
    *,
    n_probe: int = 8,
) -> Membership:
    """Classify rho against the interior of the direction set.

    Inside when the dual solve converges; Outside when it diverges and
    rho also falls outside the probed cycle-ratio hull; Indeterminate in
    the near-boundary remainder (including degenerate models where the
    interior is empty)."""
    try:
        solve_u(g, w, rho)
        return Membership.INSIDE
    except (OutsideCone, DegenerateModel):
        hull = direction_hull(g, w, n_probe)
        if not hull.contains(rho):
            return Membership.OUTSIDE
        return Membership.INDETERMINATE
