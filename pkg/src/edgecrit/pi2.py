"""Pole-free special solution of the fourth-order Painleve-I-hierarchy equation.

Solves, on a truncated interval [-L, L],

    y'''' = 240(t*y - s) - 40 y^3 - 10 (y')^2 - 20 y y''

(the strong form of  s = t*y - (y^3/6 + ((y')^2 + 2 y y'')/24 + y''''/240))
by damped Newton on a 4th-order finite-difference discretization, with both
the value and the slope of the decaying-branch asymptotic series imposed at
each endpoint.  Continuation in t (steps of 0.05, seeded from t = 0) keeps
Newton inside the pole-free branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NoConvergence, OutOfRange, PoleSuspected

SIX_CUBE = 6.0 ** (1.0 / 3.0)
SIX_23 = 6.0 ** (2.0 / 3.0)


def asymptotic_y(s: float, t: float) -> float:
    """Two-term decaying-branch series: -/+ (6|s|)^{1/3} -/+ (6^{2/3}/3) t |s|^{-1/3}."""
    if s == 0:
        raise OutOfRange("asymptotic series needs |s| > 0")
    mag = (6.0 * abs(s)) ** (1.0 / 3.0) + (SIX_23 / 3.0) * t * abs(s) ** (-1.0 / 3.0)
    return -mag if s > 0 else mag


def asymptotic_y_prime(s: float, t: float) -> float:
    """s-derivative of the two-term series (same value on both branches)."""
    if s == 0:
        raise OutOfRange("asymptotic series needs |s| > 0")
    return (-(SIX_CUBE / 3.0) * abs(s) ** (-2.0 / 3.0)
            + (SIX_23 / 9.0) * t * abs(s) ** (-4.0 / 3.0))


# ---------------------------------------------------------------------------
# finite-difference weights (Fornberg's algorithm)
# ---------------------------------------------------------------------------

def fd_weights(x0: float, xs: np.ndarray, m: int) -> np.ndarray:
    """Weights for the m-th derivative at x0 from samples at nodes xs."""
    n = len(xs)
    c = np.zeros((n, m + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = xs[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def _derivative_matrix(n_pts: int, dx: float, m: int, width: int) -> sp.csr_matrix:
    """Banded m-th-derivative matrix, 4th-order accurate, one-sided at edges.

    width = total stencil size; the interior uses the centered stencil (one
    shared weight vector), the `width//2` rows at each end use offset stencils
    of the same width and order.
    """
    half = width // 2
    rel = np.arange(width, dtype=float)
    w_int = fd_weights(float(half), rel, m) / dx ** m
    D = sp.lil_matrix((n_pts, n_pts))
    for i in range(half, n_pts - half):
        D.rows[i] = list(range(i - half, i + half + 1))
        D.data[i] = list(w_int)
    for i in range(half):
        w = fd_weights(float(i), rel, m) / dx ** m
        D.rows[i] = list(range(width))
        D.data[i] = list(w)
        j = n_pts - 1 - i
        w = fd_weights(float(width - 1 - i), rel, m) / dx ** m
        D.rows[j] = list(range(n_pts - width, n_pts))
        D.data[j] = list(w)
    return D.tocsr()


# ---------------------------------------------------------------------------
# solution container with septic-Hermite interpolation
# ---------------------------------------------------------------------------

_HERMITE_RHS = None  # cache for the 4x4 solve of the upper septic coefficients


def _septic_coeffs(dx: float, f0, f1):
    """Coefficients (per interval, scaled variable u in [0,1]) of the degree-7
    interpolant matching value and first three derivatives at both ends."""
    d0 = [f0[0], f0[1] * dx, f0[2] * dx ** 2 / 2.0, f0[3] * dx ** 3 / 6.0]
    d1 = [f1[0], f1[1] * dx, f1[2] * dx ** 2 / 2.0, f1[3] * dx ** 3 / 6.0]
    # p(u) = d0[0] + d0[1] u + d0[2] u^2 + d0[3] u^3 + sum_{k=4..7} a_k u^k
    # constraints at u=1: p(1), p'(1), p''(1)/2, p'''(1)/6 in scaled units
    b = np.array([
        d1[0] - (d0[0] + d0[1] + d0[2] + d0[3]),
        d1[1] - (d0[1] + 2 * d0[2] + 3 * d0[3]),
        d1[2] - (d0[2] + 3 * d0[3]),
        d1[3] - d0[3],
    ])
    # rows: [u^4..u^7] values of (p, p', p''/2, p'''/6) at u=1
    A = np.array([[1.0, 1, 1, 1],
                  [4.0, 5, 6, 7],
                  [6.0, 10, 15, 21],
                  [4.0, 10, 20, 35]])
    a47 = np.linalg.solve(A, b)
    return np.array(d0 + list(a47))


@dataclass
class PI2Solution:
    """Grid solution of the fourth-order equation with derivative arrays.

    h is the antiderivative with dh/ds = -y and h(-L) = 0; the physical
    additive constant is fixed downstream by the Lax-side calibration.
    """
    t: float
    grid: np.ndarray
    y: np.ndarray
    ys: np.ndarray
    yss: np.ndarray
    ysss: np.ndarray
    h: np.ndarray
    residual_norm: float
    L: float
    mesh: float

    def _interval(self, s: float) -> int:
        if s < self.grid[0] - 1e-12 or s > self.grid[-1] + 1e-12:
            raise OutOfRange(f"s = {s} outside [{self.grid[0]}, {self.grid[-1]}]")
        i = int(np.searchsorted(self.grid, s) - 1)
        return min(max(i, 0), len(self.grid) - 2)

    def eval(self, s: float) -> tuple[float, float, float, float]:
        """(y, y', y'', y''') at s by septic Hermite interpolation; exact at nodes."""
        i = self._interval(s)
        if s == self.grid[i]:
            return (self.y[i], self.ys[i], self.yss[i], self.ysss[i])
        if s == self.grid[i + 1]:
            return (self.y[i + 1], self.ys[i + 1], self.yss[i + 1], self.ysss[i + 1])
        dx = self.grid[i + 1] - self.grid[i]
        u = (s - self.grid[i]) / dx
        a = _septic_coeffs(dx,
                           (self.y[i], self.ys[i], self.yss[i], self.ysss[i]),
                           (self.y[i + 1], self.ys[i + 1], self.yss[i + 1], self.ysss[i + 1]))
        pows = u ** np.arange(8)
        val = float(np.dot(a, pows))
        k1 = np.arange(1, 8)
        d1 = float(np.dot(a[1:] * k1, u ** (k1 - 1))) / dx
        k2 = np.arange(2, 8)
        d2 = float(np.dot(a[2:] * k2 * (k2 - 1), u ** (k2 - 2))) / dx ** 2
        k3 = np.arange(3, 8)
        d3 = float(np.dot(a[3:] * k3 * (k3 - 1) * (k3 - 2), u ** (k3 - 3))) / dx ** 3
        return (val, d1, d2, d3)

    def eval_h(self, s: float) -> float:
        """Antiderivative h (with h(-L) = 0) at s: nodal value minus the septic
        integral correction within the bracketing interval."""
        i = self._interval(s)
        dx = self.grid[i + 1] - self.grid[i]
        u = (s - self.grid[i]) / dx
        if u == 0.0:
            return float(self.h[i])
        a = _septic_coeffs(dx,
                           (self.y[i], self.ys[i], self.yss[i], self.ysss[i]),
                           (self.y[i + 1], self.ys[i + 1], self.yss[i + 1], self.ysss[i + 1]))
        k = np.arange(8)
        integral = float(np.dot(a / (k + 1), u ** (k + 1))) * dx
        return float(self.h[i] - integral)

    def residual(self, s_values: np.ndarray) -> np.ndarray:
        """|s - t y + (y^3/6 + ((y')^2 + 2 y y'')/24 + y''''/240)| off-grid,
        with y'''' from the derivative of the septic interpolant."""
        out = np.empty(len(s_values))
        for j, s in enumerate(s_values):
            i = self._interval(s)
            dx = self.grid[i + 1] - self.grid[i]
            u = (s - self.grid[i]) / dx
            a = _septic_coeffs(dx,
                               (self.y[i], self.ys[i], self.yss[i], self.ysss[i]),
                               (self.y[i + 1], self.ys[i + 1], self.yss[i + 1], self.ysss[i + 1]))
            pows = u ** np.arange(8)
            y = float(np.dot(a, pows))
            k1 = np.arange(1, 8)
            ysv = float(np.dot(a[1:] * k1, u ** (k1 - 1))) / dx
            k2 = np.arange(2, 8)
            yssv = float(np.dot(a[2:] * k2 * (k2 - 1), u ** (k2 - 2))) / dx ** 2
            k4 = np.arange(4, 8)
            y4 = float(np.dot(a[4:] * k4 * (k4 - 1) * (k4 - 2) * (k4 - 3),
                              u ** (k4 - 4))) / dx ** 4
            out[j] = abs(s - self.t * y + (y ** 3 / 6.0 + (ysv ** 2 + 2 * y * yssv) / 24.0
                                           + y4 / 240.0))
        return out


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

def _initial_guess(grid: np.ndarray) -> np.ndarray:
    return -SIX_CUBE * grid * (grid ** 2 + 1.0) ** (-1.0 / 3.0)


def _newton(grid, y0, t, tol, max_iter=60):
    """Damped Newton on the scaled-form residual; returns (y, ops, iterations).

    Residual rows are |s - t y + (y^3/6 + ((y')^2 + 2 y y'')/24 + y''''/240)|
    in the interior, boundary-data mismatches at the four edge rows.  Accepts
    a stall above tol only when the norm sits at the double-precision floor
    of the fourth-derivative stencil.
    """
    n = len(grid)
    dx = grid[1] - grid[0]
    D1 = _derivative_matrix(n, dx, 1, 5)
    D2 = _derivative_matrix(n, dx, 2, 5)
    D4 = _derivative_matrix(n, dx, 4, 9)
    L = grid[-1]
    bc_val = np.array([asymptotic_y(grid[0], t), asymptotic_y(grid[-1], t)])
    bc_der = np.array([asymptotic_y_prime(grid[0], t), asymptotic_y_prime(grid[-1], t)])
    d1_first = D1.getrow(0)
    d1_last = D1.getrow(n - 1)
    interior = np.arange(2, n - 2)
    cap = 12.0 * (6.0 * L) ** (1.0 / 3.0) + 20.0
    ymax = (6.0 * L) ** (1.0 / 3.0) + 2.0
    floor = 30.0 * np.finfo(float).eps * ymax / dx ** 4 / 240.0

    def residual(y):
        g = np.empty(n)
        d1y = D1 @ y
        d2y = D2 @ y
        d4y = D4 @ y
        gi = (d4y + 40.0 * y ** 3 + 10.0 * d1y ** 2 + 20.0 * y * d2y
              - 240.0 * (t * y - grid)) / 240.0
        g[interior] = gi[interior]
        g[0] = y[0] - bc_val[0]
        g[1] = d1y[0] - bc_der[0]
        g[n - 2] = d1y[n - 1] - bc_der[1]
        g[n - 1] = y[n - 1] - bc_val[1]
        return g, d1y, d2y

    mask = np.ones(n)
    mask[[0, 1, n - 2, n - 1]] = 0.0
    select = sp.diags(mask)
    bc_rows = sp.lil_matrix((n, n))
    bc_rows[0, 0] = 1.0
    bc_rows[1, :] = d1_first
    bc_rows[n - 2, :] = d1_last
    bc_rows[n - 1, n - 1] = 1.0
    bc_rows = bc_rows.tocsr()

    y = y0.copy()
    g, d1y, d2y = residual(y)
    norm = np.linalg.norm(g, np.inf)
    for it in range(max_iter):
        if norm < tol:
            return y, (D1, D2, D4), it
        if np.max(np.abs(y)) > cap or not np.isfinite(norm):
            raise PoleSuspected("iterates exceeded the pole-free amplitude cap")
        diag = sp.diags((120.0 * y ** 2 + 20.0 * d2y - 240.0 * t) / 240.0)
        J_int = D4 / 240.0 + diag + sp.diags(20.0 * d1y / 240.0) @ D1 \
            + sp.diags(20.0 * y / 240.0) @ D2
        J = select @ J_int + bc_rows
        dy = spla.spsolve(J.tocsr(), -g)
        lam = 1.0
        improved = False
        while lam >= 1.0 / 16.0:
            y_try = y + lam * dy
            g_try, d1_try, d2_try = residual(y_try)
            n_try = np.linalg.norm(g_try, np.inf)
            if n_try < (1.0 - 0.25 * lam) * norm or n_try < tol:
                improved = True
                break
            lam *= 0.5
        if not improved and n_try >= norm:
            if norm < max(tol, 5.0 * floor):
                return y, (D1, D2, D4), it + 1
            raise NoConvergence(
                f"Newton stalled at residual {norm:.3e} "
                f"(tol {tol:.1e}, fd floor {floor:.1e})")
        y, g, d1y, d2y, norm = y_try, g_try, d1_try, d2_try, n_try
    if norm < max(tol, 5.0 * floor):
        return y, (D1, D2, D4), max_iter
    raise NoConvergence(f"Newton hit the iteration cap at residual {norm:.3e}")


def solve_y(t: float = 0.0, L: float = 40.0, n_points: int | None = None,
            tol: float = 1e-10, continuation_step: float = 0.05) -> PI2Solution:
    """Solve the truncated boundary-value problem for the pole-free branch.

    n_points counts grid intervals + 1; default keeps the mesh at 0.02.
    Newton tolerance tol applies to the max-norm of the discrete strong-form
    residual (scaled by 240).  For |t| > 0 the solve continues in t from 0.
    """
    if L < 20:
        raise OutOfRange("L >= 20 required for the asymptotic boundary data")
    if n_points is None:
        n_points = int(round(2 * L / 0.02)) + 1
    if (n_points - 1) <= 0 or 2 * L / (n_points - 1) > 0.05 + 1e-12:
        raise OutOfRange("mesh must be <= 0.05")
    grid = np.linspace(-L, L, n_points)

    y = _initial_guess(grid)
    ts = [0.0]
    if t != 0.0:
        k = int(math.ceil(abs(t) / continuation_step))
        ts.extend(np.sign(t) * abs(t) * (np.arange(1, k + 1) / k))
    for tk in ts:
        y, (D1, D2, D4), _ = _newton(grid, y, tk, tol)

    ys = D1 @ y
    yss = D2 @ y
    ysss = _derivative_matrix(n_points, grid[1] - grid[0], 3, 7) @ y
    resid = np.abs(grid - t * y + (y ** 3 / 6.0 + (ys ** 2 + 2 * y * yss) / 24.0
                                   + (D4 @ y) / 240.0))
    residual_norm = float(resid[2:-2].max())

    # antiderivative with dh/ds = -y, h(-L) = 0: septic-Hermite panel integrals
    dx = grid[1] - grid[0]
    incr = (dx / 2.0 * (y[:-1] + y[1:])
            + 3.0 * dx ** 2 / 28.0 * (ys[:-1] - ys[1:])
            + dx ** 3 / 84.0 * (yss[:-1] + yss[1:])
            + dx ** 4 / 1680.0 * (ysss[:-1] - ysss[1:]))
    h = np.concatenate([[0.0], -np.cumsum(incr)])

    return PI2Solution(t=float(t), grid=grid, y=y, ys=ys, yss=yss, ysss=ysss,
                       h=h, residual_norm=residual_norm, L=float(L),
                       mesh=float(dx))


def eval_y(sol: PI2Solution, s: float) -> tuple[float, float, float, float]:
    """(y, y', y'', y''') at s; OutOfRange outside the stored grid."""
    return sol.eval(s)
