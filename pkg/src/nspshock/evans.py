"""Evans-function certification by compound-matrix integration.

Point spectrum inside the validated disk is examined through winding
numbers of the Evans determinant D.  The two decaying solutions at
+inf are carried as a 2-wedge integrated backward, the three decaying
solutions at -inf as a 3-wedge integrated forward, both shifted by the
sum of their limiting rates so the bundle of interest is neutral and
every contaminating bundle contracts.  D is the duality pairing of the
two wedges at the matching point x = 0, which equals the 5x5
determinant of any column representatives; per-segment positive
renormalization factors are returned to log scale and multiplied back,
so the computed value stays the analytic determinant.

Initial data at the cut ends come from the analytically continued
eigenvectors of the limit matrices, so D inherits analyticity in lam
and the winding counts are meaningful.  D(0) vanishes because the wave
derivative belongs to both bundles; D'(0) is recovered two ways (a
Cauchy integral on a small circle and central differences) and tested
against the product of the connection coefficient Gamma with the
planar shock determinant Delta.

Both Gamma and D'(0) depend on the chosen normalization of the basis
at the cut ends (rescaling one basis column rescales both sides of the
factorization together); only their consistency and nonvanishing are
meaningful, not their absolute scale.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .eigensystem import (
    background_wave,
    interior_coefficients,
    interior_matrix_coeffs,
    limit_matrix_coeffs,
)
from .modes import analytic_eigenpairs, default_disk_radius, slow_expansion
from .params import PlasmaParams, ShockEndstates, liu_majda_delta
from .profile import default_half_length, solve_profile
from .wedge import (
    lift2,
    lift3,
    pairing,
    solve_wedge_factor,
    wedge2,
    wedge3,
    wedge_vector_3,
)

# branch columns of ModePath used for the decaying bundles
PLUS_PAIR = (0, 1)        # gamma1+, gamma2+ decay as x -> +inf
MINUS_TRIPLE = (0, 2, 4)  # gamma1-, gamma3-, slow branch decay as x -> -inf
MINUS_FAST = (0, 2)       # the two fast columns of the minus bundle


@dataclass(frozen=True)
class Contour:
    """Ordered sample points in the lam plane."""

    points: np.ndarray
    closed: bool
    tag: str


def circle_contour(radius: float, n: int = 32, center: complex = 0.0,
                   tag: str = "circle") -> Contour:
    th = 2.0 * np.pi * np.arange(n) / n
    return Contour(center + radius * np.exp(1j * th), True, tag)


def d_contour(rho: float, radius: float, n_arc: int = 24, n_inner: int = 16,
              n_seg: int = 10) -> Contour:
    """Boundary of {rho < |lam| < radius, Re lam > 0}, counterclockwise.

    The small arc detours into the open right half plane, so the origin
    stays outside the enclosed region.
    """
    if not 0.0 < rho < radius:
        raise ValueError("need 0 < rho < radius")
    outer = radius * np.exp(1j * np.linspace(-0.5 * np.pi, 0.5 * np.pi,
                                             n_arc + 1))
    down = 1j * np.linspace(radius, rho, n_seg + 2)[1:-1]
    inner = rho * np.exp(1j * np.linspace(0.5 * np.pi, -0.5 * np.pi,
                                          n_inner + 1))
    back = 1j * np.linspace(-rho, -radius, n_seg + 2)[1:-1]
    pts = np.concatenate([outer, down, inner, back])
    return Contour(pts, True, "d-contour")


@dataclass
class EvansSystem:
    """Profile, coefficient splines and mode data bundled for evaluation."""

    params: PlasmaParams
    end: ShockEndstates
    X: float
    n: int
    spline: CubicSpline          # x -> 75 stacked entries of A0, A1, A2
    W0_mid: np.ndarray           # wave-derivative state at x = 0
    b1_mid: float
    b2_mid: float
    disk_radius: float
    boundary_gap: float
    rtol: float = 1e-12
    atol: float = 1e-14
    nseg: int = 14
    path_points: int = 12

    def coefficient_matrix(self, x: float, lam: complex) -> np.ndarray:
        c = self.spline(x)
        A = c[:25] + lam * c[25:50] + lam * lam * c[50:75]
        return A.reshape(5, 5)


def build_evans_system(params: PlasmaParams, end: ShockEndstates,
                       X: Optional[float] = None, n: Optional[int] = None,
                       rtol: float = 1e-12, atol: float = 1e-14,
                       gap_tol: float = 1e-8) -> EvansSystem:
    """Solve the profile and tabulate the closure coefficients.

    The default half-length gives 35 decay lengths of the slow rate;
    anything much shorter leaves a boundary gap that pollutes D(0), and
    the gap check below rejects it.
    """
    if X is None:
        X = default_half_length(params, end, efolds=35.0)
    if n is None:
        n = 2 * int(round(X / 0.025)) + 1  # grid step about 0.025
    grid = solve_profile(params, end, X=X, n=n)
    vj, pj, sj = grid.state_jets(order=5)
    tab = interior_coefficients(grid.x, vj, pj, sj, params, end)
    A0, A1, A2 = interior_matrix_coeffs(tab)

    gap = 0.0
    for idx, side in ((0, "minus"), (-1, "plus")):
        L0, L1 = limit_matrix_coeffs(params, end, side)
        gap = max(gap,
                  np.max(np.abs(A0[idx] - L0)),
                  np.max(np.abs(A1[idx] - L1)),
                  np.max(np.abs(A2[idx])))
    if gap > gap_tol:
        raise RuntimeError(
            f"coefficients at the cut ends miss their limits by {gap:.3e}; "
            "the domain is too short for Evans work")

    stacked = np.concatenate(
        [A0.reshape(n, 25), A1.reshape(n, 25), A2.reshape(n, 25)], axis=1)
    spline = CubicSpline(grid.x, stacked, axis=0)

    W0, _ = background_wave(vj, pj, sj, params, end)
    mid = grid.n // 2
    return EvansSystem(
        params=params, end=end, X=X, n=n, spline=spline,
        W0_mid=W0[mid].copy(), b1_mid=float(tab.b1[mid]),
        b2_mid=float(tab.b2[mid]),
        disk_radius=default_disk_radius(params, end),
        boundary_gap=float(gap), rtol=rtol, atol=atol,
        nseg=max(8, int(round(X / 20.0))))


def _side_modes(sys: EvansSystem, side: str, lam: complex):
    if lam == 0:
        path = np.array([0.0], dtype=complex)
    else:
        path = np.linspace(0.0, lam, sys.path_points)
    mp = analytic_eigenpairs(sys.params, sys.end, side, path)
    return mp.mu[-1], mp.V[-1]


def integrate_wedge(sys: EvansSystem, lam: complex, which: str,
                    y0: np.ndarray, shift: complex, x_from: float,
                    x_to: float):
    """Propagate a shifted wedge; returns (unit vector, log scale).

    which selects the Lambda^2 or Lambda^3 lift.  The renormalization
    factors are real and positive, so multiplying them back preserves
    analyticity of anything built from the result.
    """
    lifter = lift2 if which == "w2" else lift3
    lam = complex(lam)

    def rhs(x, y):
        L = lifter(sys.coefficient_matrix(x, lam))
        return L @ y - shift * y

    xs = np.linspace(x_from, x_to, sys.nseg + 1)
    y = np.asarray(y0, dtype=complex)
    log_scale = 0.0
    for a, b in zip(xs[:-1], xs[1:]):
        sol = solve_ivp(rhs, (a, b), y, method="DOP853",
                        rtol=sys.rtol, atol=sys.atol)
        if not sol.success:
            raise RuntimeError(f"wedge integration failed on [{a}, {b}]: "
                               + sol.message)
        y = sol.y[:, -1]
        norm = float(np.linalg.norm(y))
        if not np.isfinite(norm) or norm == 0.0:
            raise RuntimeError("wedge renormalization broke down "
                               f"(norm {norm}) near x = {b}")
        y = y / norm
        log_scale += np.log(norm)
    return y, log_scale


def decaying_bases(sys: EvansSystem, lam: complex):
    """Both decaying bundles transported to x = 0.

    Returns (w2, log2, w3, log3): the unit 2-wedge of solutions decaying
    at +inf, the unit 3-wedge decaying at -inf, and their log scales.
    """
    mu_p, V_p = _side_modes(sys, "plus", lam)
    i, j = PLUS_PAIR
    w2_init = wedge2(V_p[:, i], V_p[:, j])
    w2, log2 = integrate_wedge(sys, lam, "w2", w2_init,
                               mu_p[i] + mu_p[j], sys.X, 0.0)

    mu_m, V_m = _side_modes(sys, "minus", lam)
    i, j, k = MINUS_TRIPLE
    w3_init = wedge3(V_m[:, i], V_m[:, j], V_m[:, k])
    w3, log3 = integrate_wedge(sys, lam, "w3", w3_init,
                               mu_m[i] + mu_m[j] + mu_m[k], -sys.X, 0.0)
    return w2, log2, w3, log3


@dataclass(frozen=True)
class EvansSample:
    lam: complex
    D: complex
    log_scale: float


def evans_value(sys: EvansSystem, lam: complex) -> EvansSample:
    w2, log2, w3, log3 = decaying_bases(sys, lam)
    D = pairing(w2, w3) * np.exp(log2 + log3)
    return EvansSample(complex(lam), complex(D), float(log2 + log3))


def make_evaluator(sys: EvansSystem):
    """Caching D evaluator; returns (function, sample store)."""
    store: dict[complex, EvansSample] = {}

    def evaluate(lam) -> complex:
        key = complex(lam)
        if key not in store:
            store[key] = evans_value(sys, key)
        return store[key].D

    return evaluate, store


def winding_number(evaluate: Callable[[complex], complex], contour: Contour,
                   phase_tol: float = 0.25 * np.pi, max_rounds: int = 14):
    """Winding of D over a closed contour, with adaptive refinement.

    Midpoints are inserted on any edge whose phase step reaches
    phase_tol until all steps resolve; the count is only then rounded.
    Returns (winding, points, values).
    """
    if not contour.closed:
        raise ValueError("winding needs a closed contour")
    pts = list(np.asarray(contour.points, dtype=complex))
    vals = [evaluate(z) for z in pts]

    for _ in range(max_rounds):
        if any(v == 0.0 for v in vals):
            raise RuntimeError("contour passes through a zero of D")
        steps = [np.angle(vals[(k + 1) % len(vals)] / vals[k])
                 for k in range(len(vals))]
        bad = [k for k, a in enumerate(steps) if abs(a) >= phase_tol]
        if not bad:
            total = sum(steps) / (2.0 * np.pi)
            w = int(round(total))
            if abs(total - w) > 0.01:
                raise RuntimeError(
                    f"phase increments do not close up (sum {total:.3e}); "
                    "contour may pass near a zero")
            return w, np.array(pts), np.array(vals)
        for off, k in enumerate(bad):
            mid = 0.5 * (pts[k + off] + pts[(k + off + 1) % len(pts)])
            pts.insert(k + off + 1, mid)
            vals.insert(k + off + 1, evaluate(mid))
    raise RuntimeError("phase steps stayed above the resolution bound "
                       "after maximal refinement; shrink the contour")


def evans_derivative_origin(evaluate: Callable[[complex], complex],
                            rho: float, n_quad: int = 32):
    """D'(0) by Cauchy quadrature on |lam| = rho and by differences.

    For analytic D with D(0) = 0 the trapezoid sum (1/n) sum D(l_k)/l_k
    over the n-th roots of unity scaled by rho converges spectrally;
    the five-point central difference at rho/10 is the independent
    cross-check.
    """
    lams = rho * np.exp(2j * np.pi * np.arange(n_quad) / n_quad)
    cauchy = sum(evaluate(l) / l for l in lams) / n_quad

    h = rho / 10.0
    fd = (-evaluate(2 * h) + 8 * evaluate(h)
          - 8 * evaluate(-h) + evaluate(-2 * h)) / (12.0 * h)
    return cauchy, fd


@dataclass(frozen=True)
class GammaResult:
    Gamma: float
    det_R0: float
    a2_minus: float
    phi2_plus: np.ndarray
    phi4_minus: np.ndarray
    factor_residual_plus: float
    factor_residual_fast: float
    containment_minus: float


def gamma_transversality(sys: EvansSystem, factor_tol: float = 1e-6) -> GammaResult:
    """Connection coefficient Gamma from the lam = 0 bundles.

    The wave derivative W0 lies in both bundles; the least-squares
    factors phi2+ (completing W0 in the 2-plane decaying at +inf) and
    phi4- (completing W0 in the fast 2-plane at -inf) are extracted
    from the transported wedges, mapped by the flux rows, and combined
    into the 3x3 determinant weighted by a2- / det R(0).  Everything is
    computed with the same basis normalization used for D, so the
    factorization of D'(0) can be checked without free constants.
    """
    if sys.params.delta_s == 0.0:
        raise ValueError("zero-amplitude wave has no connection coefficient")

    mu_m, V_m = _side_modes(sys, "minus", 0.0)
    w2, log2, w3, log3 = decaying_bases(sys, 0.0)
    i, j = MINUS_FAST
    wf_init = wedge2(V_m[:, i], V_m[:, j])
    wf, logf = integrate_wedge(sys, 0.0, "w2", wf_init,
                               mu_m[i] + mu_m[j], -sys.X, 0.0)

    W0 = sys.W0_mid
    phi2, res2 = solve_wedge_factor(W0, w2 * np.exp(log2))
    phi4, res4 = solve_wedge_factor(W0, wf * np.exp(logf))
    if max(res2, res4) > factor_tol:
        raise RuntimeError(
            "wave derivative is not contained in the transported planes "
            f"(residuals {res2:.3e}, {res4:.3e}); the fast bundle may be "
            "rank deficient or the domain too short")
    contain = float(np.linalg.norm(wedge_vector_3(W0, w3))
                    / (np.linalg.norm(W0) * np.linalg.norm(w3)))

    det_R0 = sys.b1_mid - sys.end.s * sys.b2_mid
    if det_R0 >= 0.0:
        raise RuntimeError(f"flux-row determinant {det_R0:.3e} is not "
                           "negative; coefficient tables are inconsistent")

    def flux_rows(w):
        return np.array([sys.b1_mid * w[0] + sys.b2_mid * w[1], w[3], w[4]])

    cols = np.stack([flux_rows(phi2), flux_rows(W0.astype(complex)),
                     flux_rows(phi4)], axis=1)
    det3 = np.linalg.det(cols)
    a2 = slow_expansion(sys.params, sys.end, "minus").a2
    gamma = a2 / det_R0 * det3
    if abs(gamma.imag) > 1e-8 * max(1.0, abs(gamma.real)):
        raise RuntimeError("connection coefficient has a spurious "
                           f"imaginary part {gamma.imag:.3e}")
    return GammaResult(
        Gamma=float(gamma.real), det_R0=float(det_R0), a2_minus=float(a2),
        phi2_plus=phi2, phi4_minus=phi4,
        factor_residual_plus=float(res2), factor_residual_fast=float(res4),
        containment_minus=contain)


@dataclass(frozen=True)
class EvansReport:
    radius: float
    rho: float
    D0: complex
    circle_max: float
    winding_circle: int
    winding_d_contour: int
    Dprime_cauchy: complex
    Dprime_fd: complex
    derivative_agreement: float
    Gamma: float
    Delta: float
    factorization_residual: float
    sign_match: bool
    gamma: GammaResult
    samples: tuple[EvansSample, ...]

    def as_dict(self) -> dict:
        return {
            "radius": self.radius,
            "rho": self.rho,
            "D0": [self.D0.real, self.D0.imag],
            "circle_max": self.circle_max,
            "winding_circle": self.winding_circle,
            "winding_d_contour": self.winding_d_contour,
            "Dprime0_cauchy": [self.Dprime_cauchy.real, self.Dprime_cauchy.imag],
            "Dprime0_fd": [self.Dprime_fd.real, self.Dprime_fd.imag],
            "derivative_agreement": self.derivative_agreement,
            "Gamma": self.Gamma,
            "Delta": self.Delta,
            "factorization_residual": self.factorization_residual,
            "sign_match": self.sign_match,
        }


def evans_report(sys: EvansSystem, rho: Optional[float] = None,
                 n_circle: int = 32) -> EvansReport:
    """Windings, derivative at the origin and the factorization check."""
    r = sys.disk_radius
    if rho is None:
        rho = 0.5 * r
    evaluate, store = make_evaluator(sys)

    D0 = evaluate(0.0)
    circle = circle_contour(rho, n_circle)
    w_circle, _, circle_vals = winding_number(evaluate, circle)
    w_d, _, _ = winding_number(evaluate, d_contour(rho, r))
    dc, dfd = evans_derivative_origin(evaluate, rho, n_quad=n_circle)
    agree = abs(dc - dfd) / max(abs(dc), abs(dfd))

    gam = gamma_transversality(sys)
    delta = liu_majda_delta(sys.params, sys.end)
    prod = gam.Gamma * delta
    fac_res = abs(dc - prod) / abs(prod)
    sign_match = bool(dc.real * prod > 0.0)

    samples = tuple(store[k] for k in sorted(store, key=lambda z: (z.real,
                                                                   z.imag)))
    return EvansReport(
        radius=r, rho=rho, D0=D0,
        circle_max=float(np.max(np.abs(circle_vals))),
        winding_circle=w_circle, winding_d_contour=w_d,
        Dprime_cauchy=dc, Dprime_fd=dfd, derivative_agreement=float(agree),
        Gamma=gam.Gamma, Delta=delta,
        factorization_residual=float(fac_res), sign_match=sign_match,
        gamma=gam, samples=samples)


def write_evans_csv(samples, path) -> None:
    with open(path, "w") as f:
        f.write("re_lambda,im_lambda,re_D,im_D,log_scale\n")
        for s in samples:
            f.write(f"{s.lam.real:.16e},{s.lam.imag:.16e},"
                    f"{s.D.real:.16e},{s.D.imag:.16e},{s.log_scale:.16e}\n")
