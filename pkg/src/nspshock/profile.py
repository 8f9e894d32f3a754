"""Boundary-value solver for the standing shock profile.

The wave is computed from a 3-dimensional first-order system in
y = (v, phi, psi) with psi = phi': the integrated momentum balance
gives v' through the scalar function G (zero at both far-field
states), and the field equation closes psi'.  The velocity component
is algebraically slaved, ubar = u_minus - s (vbar - v_minus), which
makes s vbar' + ubar' = 0 exact at the nodes.

Discretization: a mono-implicit Runge-Kutta scheme of order 4 on a
fixed mesh (Simpson rule with cubic-Hermite midpoint values), solved
by damped Newton iteration with an analytic sparse Jacobian.  Boundary
conditions clamp v at both ends; the phase condition pins
v(0) = (v_minus + v_plus)/2 at the central node, so the node count
must be odd.

Derivative tables of order 1..4 come from Taylor jets of the right
hand side, never from differencing the computed solution, and feed a
piecewise-quintic Hermite interpolant (value, first and second
derivative matched at the nodes).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.interpolate import PPoly
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from .jets import Jet
from .modes import fast_roots
from .params import PlasmaParams, ShockEndstates


def _exp(z):
    return z.exp() if isinstance(z, Jet) else np.exp(z)


def profile_nonlinearity(v, phi, psi, params: PlasmaParams, end: ShockEndstates):
    """Integrated momentum balance G; vanishes at both far-field states."""
    T, eps2 = params.T, params.eps**2
    s, vm = end.s, params.v_minus
    iv = v**-1
    return (s * s * (v - vm) + (T + 1.0) * (iv - 1.0 / vm)
            + _exp(phi) - iv - 0.5 * eps2 * (psi * iv) ** 2)


def profile_rhs(v, phi, psi, params: PlasmaParams, end: ShockEndstates):
    """Right-hand side of the first-order profile system, any jet order."""
    eps2 = params.eps**2
    snu = end.s * params.nu
    G = profile_nonlinearity(v, phi, psi, params, end)
    f1 = (-1.0 / snu) * v * G
    f2 = psi
    f3 = psi * f1 * v**-1 + (v * v * _exp(phi) - v) * (1.0 / eps2)
    return f1, f2, f3


def rhs_array(y: np.ndarray, params: PlasmaParams, end: ShockEndstates) -> np.ndarray:
    v, phi, psi = y[..., 0], y[..., 1], y[..., 2]
    f1, f2, f3 = profile_rhs(v, phi, psi, params, end)
    return np.stack([f1, f2, f3], axis=-1)


def rhs_jacobian(y: np.ndarray, params: PlasmaParams, end: ShockEndstates) -> np.ndarray:
    """Analytic Jacobian of the profile right-hand side, shape (..., 3, 3)."""
    T, eps2 = params.T, params.eps**2
    s, nu, vm = end.s, params.nu, params.v_minus
    snu = s * nu
    v, phi, psi = y[..., 0], y[..., 1], y[..., 2]
    ephi = np.exp(phi)
    G = profile_nonlinearity(v, phi, psi, params, end)
    dG_dv = s * s - (T + 1.0) / v**2 + 1.0 / v**2 + eps2 * psi**2 / v**3
    dG_dphi = ephi
    dG_dpsi = -eps2 * psi / v**2

    f1 = -(v / snu) * G
    df1_dv = -(G + v * dG_dv) / snu
    df1_dphi = -v * dG_dphi / snu
    df1_dpsi = -v * dG_dpsi / snu

    J = np.zeros(y.shape[:-1] + (3, 3))
    J[..., 0, 0] = df1_dv
    J[..., 0, 1] = df1_dphi
    J[..., 0, 2] = df1_dpsi
    J[..., 1, 2] = 1.0
    J[..., 2, 0] = psi * (df1_dv * v - f1) / v**2 + (2.0 * v * ephi - 1.0) / eps2
    J[..., 2, 1] = psi * df1_dphi / v + v * v * ephi / eps2
    J[..., 2, 2] = f1 / v + psi * df1_dpsi / v
    return J


def default_half_length(params: PlasmaParams, end: ShockEndstates,
                        efolds: float = 18.0) -> float:
    """Domain half-length giving `efolds` decay lengths of the slow rate."""
    gm = fast_roots(params, end, "minus").gamma1
    gp = fast_roots(params, end, "plus").gamma1
    rate = min(abs(gm), abs(gp))
    if rate < 1e-8:
        raise ValueError("amplitude too small to size the domain; pass X explicitly")
    return efolds / rate


def initial_guess(x: np.ndarray, params: PlasmaParams, end: ShockEndstates) -> np.ndarray:
    delta = params.delta_s
    mid = 0.5 * (params.v_minus + params.v_plus)
    if delta == 0.0:
        v = np.full_like(x, params.v_minus)
        return np.stack([v, -np.log(v), np.zeros_like(x)], axis=-1)
    gm = fast_roots(params, end, "minus").gamma1
    gp = fast_roots(params, end, "plus").gamma1
    kappa = 0.5 * min(abs(gm), abs(gp))
    v = mid + 0.5 * delta * np.tanh(kappa * x)
    dv = 0.5 * delta * kappa / np.cosh(kappa * x) ** 2
    return np.stack([v, -np.log(v), -dv / v], axis=-1)


def _collocation_residual(y, h, params, end):
    f = rhs_array(y, params, end)
    ym = 0.5 * (y[:-1] + y[1:]) - (h / 8.0) * (f[1:] - f[:-1])
    fm = rhs_array(ym, params, end)
    res = y[1:] - y[:-1] - (h / 6.0) * (f[:-1] + 4.0 * fm + f[1:])
    return res, ym


def _residual_vector(y, h, mid_idx, params, end):
    res, _ = _collocation_residual(y, h, params, end)
    vm, vp = params.v_minus, params.v_plus
    bc = np.array([y[0, 0] - vm,
                   y[-1, 0] - vp,
                   y[mid_idx, 0] - 0.5 * (vm + vp)])
    return np.concatenate([res.ravel(), bc])


def _jacobian(y, h, mid_idx, params, end):
    n = y.shape[0]
    f = rhs_array(y, params, end)
    J = rhs_jacobian(y, params, end)
    ym = 0.5 * (y[:-1] + y[1:]) - (h / 8.0) * (f[1:] - f[:-1])
    Jm = rhs_jacobian(ym, params, end)
    eye = np.eye(3)
    dym_dl = 0.5 * eye + (h / 8.0) * J[:-1]
    dym_dr = 0.5 * eye - (h / 8.0) * J[1:]
    L = -eye - (h / 6.0) * (J[:-1] + 4.0 * np.einsum("nij,njk->nik", Jm, dym_dl))
    R = eye - (h / 6.0) * (J[1:] + 4.0 * np.einsum("nij,njk->nik", Jm, dym_dr))

    cells = n - 1
    block_rows = (3 * np.arange(cells)[:, None, None]
                  + np.arange(3)[None, :, None] + np.zeros((1, 1, 3), dtype=int))
    l_cols = 3 * np.arange(cells)[:, None, None] + np.arange(3)[None, None, :] \
        + np.zeros((1, 3, 1), dtype=int)
    r_cols = l_cols + 3

    rows = np.concatenate([block_rows.ravel(), block_rows.ravel(),
                           [3 * cells, 3 * cells + 1, 3 * cells + 2]])
    cols = np.concatenate([l_cols.ravel(), r_cols.ravel(),
                           [0, 3 * (n - 1), 3 * mid_idx]])
    data = np.concatenate([L.ravel(), R.ravel(), [1.0, 1.0, 1.0]])
    return csc_matrix((data, (rows, cols)), shape=(3 * n, 3 * n))


@dataclass(frozen=True)
class ProfileGrid:
    """Converged profile with optional derivative tables.

    dv, du, dphi hold derivatives of order 1..4 in rows 0..3; they are
    None until profile_derivatives has been applied.  The interpolant
    is piecewise quintic (C^2), component order (v, u, phi, psi); psi
    gets its own component so that residual checks of the first-order
    system never differentiate an interpolant twice.
    """

    params: PlasmaParams
    end: ShockEndstates
    X: float
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    dv: Optional[np.ndarray] = None
    du: Optional[np.ndarray] = None
    dphi: Optional[np.ndarray] = None
    interpolant: Optional[PPoly] = None

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])

    def state_jets(self, order: int = 5):
        """Taylor jets of (v, phi, psi) at every node, extended through the ODE."""
        vj = Jet(self.v[None, :].copy())
        pj = Jet(self.phi[None, :].copy())
        sj = Jet(self.psi[None, :].copy())
        for m in range(order):
            f1, f2, f3 = profile_rhs(vj, pj, sj, self.params, self.end)
            vj = Jet(np.vstack([vj.coef, f1.coef[m] / (m + 1)]))
            pj = Jet(np.vstack([pj.coef, f2.coef[m] / (m + 1)]))
            sj = Jet(np.vstack([sj.coef, f3.coef[m] / (m + 1)]))
        return vj, pj, sj

    def evaluate(self, x_eval, deriv: int = 0) -> np.ndarray:
        """Interpolated (v, u, phi, psi) or a derivative, shape (m, 4)."""
        if self.interpolant is None:
            raise ValueError("derivative tables not filled; run profile_derivatives")
        p = self.interpolant.derivative(deriv) if deriv else self.interpolant
        return p(np.asarray(x_eval))


def solve_profile(params: PlasmaParams, end: ShockEndstates,
                  X: Optional[float] = None, n: Optional[int] = None,
                  tol: float = 1e-12, max_iter: int = 30) -> ProfileGrid:
    """Solve the truncated profile boundary-value problem.

    Raises RuntimeError with the final defect when Newton stalls, and
    RuntimeError when the converged solution is not monotone (bad
    truncation or amplitude outside the perturbative regime).
    """
    if X is None:
        X = default_half_length(params, end)
    if n is None:
        n = 2 * int(round(X / 0.2)) + 1
    if n % 2 == 0:
        raise ValueError("node count n must be odd so that x=0 is a node")
    x = np.linspace(-X, X, n)
    h = x[1] - x[0]
    mid_idx = (n - 1) // 2

    y = initial_guess(x, params, end)
    norm = np.max(np.abs(_residual_vector(y, h, mid_idx, params, end)))
    for _ in range(max_iter):
        if norm <= tol:
            break
        J = _jacobian(y, h, mid_idx, params, end)
        F = _residual_vector(y, h, mid_idx, params, end)
        step = splu(J).solve(-F).reshape(n, 3)
        t = 1.0
        while t > 1e-6:
            trial = y + t * step
            trial_norm = np.max(np.abs(_residual_vector(trial, h, mid_idx,
                                                        params, end)))
            if trial_norm < norm * (1.0 - 0.25 * t) or trial_norm < tol:
                break
            t *= 0.5
        y = y + t * step
        norm = np.max(np.abs(_residual_vector(y, h, mid_idx, params, end)))
    if norm > tol:
        raise RuntimeError(f"profile solver did not converge; final defect {norm:.3e}")

    v, phi, psi = y[:, 0], y[:, 1], y[:, 2]
    # gross-failure guard only; machine-level flat spots in the far tail
    # are fine and the report carries the sharp monotonicity margin
    if params.delta_s > 0 and np.any(np.diff(v) < -1e-10 * params.delta_s):
        raise RuntimeError("converged profile is not monotone; increase X "
                           "or reduce the amplitude")
    u = params.u_minus - end.s * (v - params.v_minus)
    return ProfileGrid(params=params, end=end, X=float(X), x=x,
                       v=v, u=u, phi=phi, psi=psi)


def profile_derivatives(grid: ProfileGrid, order: int = 5) -> ProfileGrid:
    """Fill derivative tables (orders 1..4) and the quintic interpolant."""
    vj, pj, sj = grid.state_jets(order)
    s = grid.end.s
    dv = np.stack([vj.derivative(k) for k in range(1, 5)])
    dphi = np.stack([pj.derivative(k) for k in range(1, 5)])
    du = -s * dv
    values = np.stack([grid.v, grid.u, grid.phi, grid.psi], axis=-1)
    d1 = np.stack([dv[0], du[0], dphi[0], dphi[1]], axis=-1)
    d2 = np.stack([dv[1], du[1], dphi[1], dphi[2]], axis=-1)
    poly = _quintic_hermite(grid.x, values, d1, d2)
    return replace(grid, dv=dv, du=du, dphi=dphi, interpolant=poly)


def _quintic_hermite(x, y, d1, d2) -> PPoly:
    """Piecewise quintic matching value and two derivatives at the nodes."""
    h = np.diff(x)[:, None]
    y0, y1 = y[:-1], y[1:]
    m0, m1 = d1[:-1], d1[1:]
    s0, s1 = d2[:-1], d2[1:]
    R0 = y1 - y0 - m0 * h - 0.5 * s0 * h**2
    R1 = (m1 - m0 - s0 * h) * h
    R2 = (s1 - s0) * h**2
    gamma = 6.0 * R0 - 3.0 * R1 + 0.5 * R2
    beta = -15.0 * R0 + 7.0 * R1 - R2
    alpha = 10.0 * R0 - 4.0 * R1 + 0.5 * R2
    coef = np.stack([gamma / h**5, beta / h**4, alpha / h**3,
                     0.5 * s0, m0, y0])
    return PPoly(coef, x, extrapolate=False)


def profile_residual(grid: ProfileGrid, refine: int = 4) -> np.ndarray:
    """Max |y' - F(y)| of the interpolant per equation on a refined grid."""
    n = grid.n
    xs = np.linspace(grid.x[0], grid.x[-1], refine * (n - 1) + 1)
    # clip the exact endpoints to stay inside the interpolation range
    xs[0] += 1e-12 * grid.h
    xs[-1] -= 1e-12 * grid.h
    vals = grid.evaluate(xs)
    derivs = grid.evaluate(xs, deriv=1)
    v, phi, psi = vals[:, 0], vals[:, 2], vals[:, 3]
    dv, du, dpsi = derivs[:, 0], derivs[:, 1], derivs[:, 3]
    s = grid.end.s

    f1, f2, f3 = profile_rhs(v, phi, psi, grid.params, grid.end)
    res_v = dv - f1              # integrated momentum balance
    res_u = du + s * dv          # mass balance; exact by elimination
    res_psi = dpsi - f3          # field equation
    return np.array([np.max(np.abs(res_v)),
                     np.max(np.abs(res_u)),
                     np.max(np.abs(res_psi))])


@dataclass(frozen=True)
class ProfileResidualReport:
    max_residual: np.ndarray      # per equation
    monotonicity_margin: float    # min of s*vbar' over the nodes
    ratio_low: float              # fitted C in C*ubar' <= phibar'
    ratio_high: float             # fitted C-bar
    decay_exponent: float         # fitted slope of log|vbar - v_plus|
    boundary_mismatch: float
    residual_tol: float
    boundary_tol: float
    passed: bool


def verify_profile(grid: ProfileGrid, residual_tol: float = 1e-8,
                   boundary_tol: float = 1e-6) -> ProfileResidualReport:
    if grid.dv is None:
        raise ValueError("derivative tables not filled; run profile_derivatives")
    res = profile_residual(grid)
    s = grid.end.s
    sdv = s * grid.dv[0]
    margin = float(np.min(sdv))

    dub, dpb = grid.du[0], grid.dphi[0]
    mask = np.abs(dub) > 1e-3 * np.max(np.abs(dub))
    if np.any(mask):
        ratios = dpb[mask] / dub[mask]
        ratio_low, ratio_high = float(np.min(ratios)), float(np.max(ratios))
    else:
        ratio_low = ratio_high = np.nan

    sel = (grid.x >= grid.X / 2) & (grid.x <= 0.75 * grid.X)
    tail = np.abs(grid.v[sel] - grid.params.v_plus)
    slope = np.nan
    if np.all(tail > 0):
        slope = float(np.polyfit(grid.x[sel], np.log(tail), 1)[0])

    end = grid.end
    mism = max(abs(grid.phi[0] - end.phi_minus), abs(grid.phi[-1] - end.phi_plus),
               abs(grid.psi[0]), abs(grid.psi[-1]),
               abs(grid.u[0] - grid.params.u_minus), abs(grid.u[-1] - end.u_plus))

    passed = bool(np.max(res) <= residual_tol and margin > 0.0
                  and mism <= boundary_tol)
    return ProfileResidualReport(max_residual=res, monotonicity_margin=margin,
                                 ratio_low=ratio_low, ratio_high=ratio_high,
                                 decay_exponent=slope, boundary_mismatch=mism,
                                 residual_tol=residual_tol,
                                 boundary_tol=boundary_tol, passed=passed)


def write_profile_csv(grid: ProfileGrid, path) -> None:
    if grid.dv is None:
        raise ValueError("derivative tables not filled; run profile_derivatives")
    data = np.column_stack([grid.x, grid.v, grid.u, grid.phi,
                            grid.dv[0], grid.du[0], grid.dphi[0], grid.dphi[1]])
    np.savetxt(path, data, delimiter=",",
               header="x,v,u,phi,dv,du,dphi,d2phi", comments="")
