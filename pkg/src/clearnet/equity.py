"""Equity fixed points ``V = G(x, V)`` and ``V = G_+(x, V)`` and the big-M bounds.

All functions accept any object exposing ``cash``, ``relative``, ``holdings`` and
``totals`` arrays, so they serve both :class:`~clearnet.network.FinancialNetwork`
and the shrinking systems of the Gaussian reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .network import DEFAULT_TOL


@dataclass(frozen=True)
class EquityProblem:
    """``V = affine + coupling' V`` (or its positive part), restricted by ``mask``."""

    mask: np.ndarray
    affine: np.ndarray
    coupling: np.ndarray  # B = Theta diag(mask)


@dataclass(frozen=True)
class Bounds:
    K: np.ndarray
    kappa: float
    kappa1: float


def equity_problem(net, x, kind: str = "G+", tol: float = DEFAULT_TOL) -> EquityProblem:
    x = np.asarray(x, dtype=float)
    l = net.totals
    mask = np.abs(x - l) <= tol
    inflow = net.cash + net.relative.T @ x
    if kind == "G":
        affine = np.where(mask, inflow - x, 0.0)
    elif kind == "G+":
        affine = np.where(mask, inflow - l, 0.0)
    else:
        raise ValueError(f"unknown equity map {kind!r}")
    return EquityProblem(mask, affine, net.holdings * mask[None, :])


def compute_bounds(net) -> Bounds:
    """``K = (I - Theta')^{-1} (e + Pi' l - l)^+``, ``kappa = |K|_inf`` and ``kappa1``."""
    n = net.cash.size
    l = net.totals
    z = net.cash + net.relative.T @ l - l
    try:
        K = np.linalg.solve(np.eye(n) - net.holdings.T, np.maximum(z, 0.0))
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("I - Theta' is singular") from exc
    K = np.maximum(K, 0.0)
    kappa = float(K.max()) if n else 0.0
    kappa1 = float(np.max(np.abs(net.cash + net.relative.T @ l + kappa * net.holdings.T @ np.ones(n))))
    return Bounds(K, kappa, kappa1)


def solve_G(net, x, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unique solution of the unclipped linear equation ``V = a(x) + B' V``.

    Components may be negative.
    """
    prob = equity_problem(net, x, "G", tol)
    n = prob.mask.size
    try:
        return np.linalg.solve(np.eye(n) - prob.coupling.T, prob.affine)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("I - B' is singular; Theta has eigenvalue 1") from exc


def positive_fixpoint(c: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Exact solution of ``v = (c + M v)^+`` for ``M >= 0`` with spectral radius < 1.

    Active-set ascent: start with every component clipped, activate the components
    whose argument turns positive, and solve the linear system on the active set.
    The active set only grows, so at most ``len(c) + 1`` solves are needed.
    """
    n = c.size
    active = np.zeros(n, dtype=bool)
    v = np.zeros(n)
    for _ in range(n + 2):
        grown = active | (c + M @ v > 0)
        if np.array_equal(grown, active):
            return v
        active = grown
        idx = np.flatnonzero(active)
        v = np.zeros(n)
        try:
            v[idx] = np.linalg.solve(np.eye(idx.size) - M[np.ix_(idx, idx)], c[idx])
        except np.linalg.LinAlgError as exc:
            raise PreconditionError("singular equity system on the active set") from exc
    raise ConvergenceError("active-set ascent did not terminate")


def _pattern_solve(c, M, v, tol):
    """Fix the sign pattern of ``c + M v`` and solve exactly; None if inconsistent."""
    n = c.size
    active = c + M @ v > 0
    idx = np.flatnonzero(active)
    out = np.zeros(n)
    if idx.size:
        try:
            out[idx] = np.linalg.solve(np.eye(idx.size) - M[np.ix_(idx, idx)], c[idx])
        except np.linalg.LinAlgError:
            return None
    r = c + M @ out
    if np.any(out[active] < -tol) or np.any(r[~active] > tol):
        return None
    return np.maximum(out, 0.0)


def solve_Gplus(net, x, tol: float = DEFAULT_TOL, start: str = "K",
                bounds: Bounds | None = None) -> np.ndarray:
    """``H(x)``: the unique ``V >= 0`` with ``V = (c(x) + B' V)^+``.

    Picard sweeps from ``K`` (decreasing) or from zero (increasing) until the sup-norm
    step drops below ``tol / 10``, followed by an exact solve on the detected sign
    pattern. If the pattern is inconsistent the exact active-set ascent takes over.
    """
    prob = equity_problem(net, x, "G+", tol)
    c = prob.affine
    M = prob.coupling.T
    n = c.size
    if not prob.mask.any():
        return np.zeros(n)
    if start == "K":
        v = (bounds or compute_bounds(net)).K.copy()
    elif start == "zero":
        v = np.zeros(n)
    else:
        raise ValueError(f"unknown start {start!r}")

    cap = 10 * n + 100
    for _ in range(cap):
        nxt = np.maximum(c + M @ v, 0.0)
        step = np.max(np.abs(nxt - v))
        v = nxt
        if step <= tol / 10:
            break

    polished = _pattern_solve(c, M, v, tol)
    if polished is not None:
        return polished
    return positive_fixpoint(c, M)
