"""Far-field mode structure of the linearized system.

Three "fast" spatial rates of the frozen matrix at lam=0 are the roots
of a cubic; two "slow" rates vanish linearly in lam with scalar
convection-diffusion expansions mu = lam/a - lam^2 b/a^3 + O(lam^3).
This module labels the fast roots, packages the slow data, and
continues all five eigenpairs analytically in lam by path-marching
with assignment matching (the matrix is nonnormal, so branches are
tracked rather than sorted).

Eigenvector normalization: the component of largest modulus of each
base eigenvector at lam=0 is pinned to its base value along the whole
path.  That fixes the analytic section uniquely, and it is the same
normalization the Evans-function initializations rely on, so wedge
initializations built here and at lam=0 are mutually consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .eigensystem import limit_matrix_coeffs
from .params import PlasmaParams, ShockEndstates


def _side_v(params: PlasmaParams, side: str) -> float:
    if side == "plus":
        return params.v_plus
    if side == "minus":
        return params.v_minus
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def cubic_coefficients(params: PlasmaParams, end: ShockEndstates, side: str):
    """Monic cubic for the fast rates: g^3 + b g^2 + c g + d = 0."""
    v = _side_v(params, side)
    T, nu, eps2, s = params.T, params.nu, params.eps**2, end.s
    b = (s * s * v * v - T) / (s * nu * v)
    c = -v / eps2
    d = (T + 1.0 - s * s * v * v) / (s * nu * eps2)
    return b, c, d


@dataclass(frozen=True)
class FastRoots:
    """Labeled fast rates and their eigenvectors.

    gamma1 is the near-zero root (the profile's decay rate at this
    side); gamma2 < 0 < gamma3 are the genuinely fast pair.  Sj spans
    the kernel of A(0) - gammaj, largest component scaled to 1.
    """

    gamma1: float
    gamma2: float
    gamma3: float
    S1: np.ndarray
    S2: np.ndarray
    S3: np.ndarray

    @property
    def gammas(self) -> np.ndarray:
        return np.array([self.gamma1, self.gamma2, self.gamma3])

    @property
    def vectors(self) -> np.ndarray:
        return np.column_stack([self.S1, self.S2, self.S3])


def _null_vector(M: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(M)
    vec = vh[-1]
    pivot = np.argmax(np.abs(vec))
    return vec / vec[pivot]


def fast_roots(params: PlasmaParams, end: ShockEndstates, side: str,
               gap_tol: float = 1e-8) -> FastRoots:
    b, c, d = cubic_coefficients(params, end, side)
    roots = np.roots([1.0, b, c, d])
    if np.max(np.abs(roots.imag)) > 1e-10 * max(1.0, np.max(np.abs(roots))):
        raise ValueError("fast rates are not real; outside the admissible regime")
    roots = roots.real

    gaps = [abs(roots[i] - roots[j]) for i in range(3) for j in range(i)]
    if min(gaps) < gap_tol * max(1.0, np.max(np.abs(roots))):
        raise ValueError("near-coincident fast rates; amplitude too large "
                         "for the small-amplitude regime")

    order = np.argsort(np.abs(roots))
    g1 = roots[order[0]]
    pair = roots[order[1:]]
    if not (pair.min() < 0.0 < pair.max()):
        raise ValueError("fast pair does not straddle zero; outside regime")
    g2, g3 = pair.min(), pair.max()

    A0, A1 = limit_matrix_coeffs(params, end, side)
    vecs = [_null_vector(A0 - g * np.eye(5)) for g in (g1, g2, g3)]
    return FastRoots(g1, g2, g3, *vecs)


@dataclass(frozen=True)
class SlowData:
    """Hyperbolic characteristic data entering the slow-mode expansions."""

    a1: float
    a2: float
    beta1: float
    beta2: float
    l: np.ndarray       # rows l1, l2 (left 2-vectors)
    r: np.ndarray       # rows r1, r2 (right 2-vectors)
    rtilde: np.ndarray  # rows rtilde1, rtilde2 (embedded 5-vectors)


def slow_expansion(params: PlasmaParams, end: ShockEndstates, side: str) -> SlowData:
    v = _side_v(params, side)
    s = end.s
    c = params.sound_speed(v)
    isq = 1.0 / np.sqrt(2.0)
    a1, a2 = s - c, s + c
    beta = params.nu / (2.0 * v)
    r = np.array([[isq, -isq * c], [isq, isq * c]])
    l = np.array([[isq, -isq / c], [isq, isq / c]])
    rt = np.zeros((2, 5))
    rt[:, :2] = r
    rt[:, 3] = -isq / v
    return SlowData(a1, a2, beta, beta, l, r, rt)


def slow_mu_quadratic(slow: SlowData, j: int, lam):
    """Two-term expansion lam/a - lam^2 beta/a^3 for slow branch j in {1,2}."""
    a = slow.a1 if j == 1 else slow.a2
    beta = slow.beta1 if j == 1 else slow.beta2
    return lam / a - lam * lam * beta / a**3


@dataclass
class ModePath:
    """Eigenpairs continued along a lam path.

    mu[k, j] and V[k, :, j] follow branch j: columns 0..2 are the fast
    branches (gamma1..3 at lam=0), columns 3..4 the slow branches
    paired with a1, a2.
    """

    lam: np.ndarray
    mu: np.ndarray
    V: np.ndarray


def _base_state(params, end, side):
    fr = fast_roots(params, end, side)
    slow = slow_expansion(params, end, side)
    mu0 = np.array([fr.gamma1, fr.gamma2, fr.gamma3, 0.0, 0.0], dtype=complex)
    V0 = np.zeros((5, 5), dtype=complex)
    V0[:, :3] = fr.vectors
    V0[:, 3] = slow.rtilde[0]
    V0[:, 4] = slow.rtilde[1]
    pins = np.argmax(np.abs(V0), axis=0)
    targets = V0[pins, np.arange(5)]
    return fr, slow, mu0, V0, pins, targets


def _eig_step(A0c, A1c, lam, pred, pins, targets):
    """Eigen-decompose at one lam and match branches to predictions.

    Returns (mu, V, ok): ok is False when the assignment margin is too
    thin to trust the labeling at this step size.
    """
    w, vec = np.linalg.eig(A0c + lam * A1c)
    cost = np.abs(w[:, None] - pred[None, :])
    rows, cols = linear_sum_assignment(cost)
    mu = np.empty(5, dtype=complex)
    V = np.empty((5, 5), dtype=complex)
    ok = True
    for p, q in zip(rows, cols):
        mu[q] = w[p]
        col = vec[:, p]
        piv = col[pins[q]]
        if abs(piv) < 1e-12:
            return mu, V, False
        V[:, q] = col * (targets[q] / piv)
        # the labeling is trustworthy when each eigenvalue is much
        # closer to its own prediction than to any competing one
        others = np.delete(cost[p], q)
        rivals = np.delete(cost[:, q], p)
        if cost[p, q] > 0.4 * min(others.min(), rivals.min()):
            ok = False
    return mu, V, ok


def _march(A0c, A1c, lam0, mu0, mu_prev_slope, lam1, pins, targets, depth):
    """March one interval, bisecting when branch labels become ambiguous.

    mu_prev_slope holds d(mu)/d(lam) estimates used for prediction.
    Returns list of (lam, mu, V) at interval endpoints visited (lam1 last).
    """
    pred = mu0 + mu_prev_slope * (lam1 - lam0)
    mu1, V1, ok = _eig_step(A0c, A1c, lam1, pred, pins, targets)
    if ok:
        return [(lam1, mu1, V1)]
    if depth <= 0:
        raise RuntimeError("eigenvalue branches could not be separated; "
                           "reduce the path radius")
    lam_mid = 0.5 * (lam0 + lam1)
    first = _march(A0c, A1c, lam0, mu0, mu_prev_slope, lam_mid, pins, targets,
                   depth - 1)
    lam_m, mu_m, _ = first[-1]
    slope = (mu_m - mu0) / (lam_m - lam0)
    second = _march(A0c, A1c, lam_m, mu_m, slope, lam1, pins, targets,
                    depth - 1)
    return first + second


def analytic_eigenpairs(params: PlasmaParams, end: ShockEndstates, side: str,
                        lam_path, max_depth: int = 24) -> ModePath:
    """Continue the five eigenpairs from lam=0 along lam_path.

    lam_path must start at 0 (the base point, where the slow branches
    are seeded by their expansions lam/a_j and the limiting vectors).
    """
    lam_path = np.asarray(lam_path, dtype=complex)
    if lam_path.shape[0] == 0 or lam_path[0] != 0:
        raise ValueError("path must start at lam = 0")

    A0c, A1c = limit_matrix_coeffs(params, end, side)
    fr, slow, mu0, V0, pins, targets = _base_state(params, end, side)

    # slope at the base point: fast branches move at O(lam) rates we do
    # not know yet (use 0), slow branches at 1/a_j
    slope = np.zeros(5, dtype=complex)
    slope[3] = 1.0 / slow.a1
    slope[4] = 1.0 / slow.a2

    out_mu = [mu0]
    out_V = [V0]
    lam_cur, mu_cur, V_cur = lam_path[0], mu0, V0
    slope_cur = slope
    for lam_next in lam_path[1:]:
        if lam_next == lam_cur:
            out_mu.append(mu_cur)
            out_V.append(V_cur)
            continue
        visited = _march(A0c, A1c, lam_cur, mu_cur, slope_cur, lam_next,
                         pins, targets, max_depth)
        lam_new, mu_new, V_new = visited[-1]
        if len(visited) >= 2:
            lam_prev, mu_prev, _ = visited[-2]
        else:
            lam_prev, mu_prev = lam_cur, mu_cur
        slope_cur = (mu_new - mu_prev) / (lam_new - lam_prev)
        lam_cur, mu_cur, V_cur = lam_new, mu_new, V_new
        out_mu.append(mu_cur)
        out_V.append(V_cur)
    return ModePath(lam=lam_path, mu=np.array(out_mu), V=np.array(out_V))


def splitting_counts(params: PlasmaParams, end: ShockEndstates, side: str,
                     lam) -> tuple[int, int, float]:
    """(stable count, unstable count, min |Re|) of the frozen matrix at lam."""
    A0c, A1c = limit_matrix_coeffs(params, end, side)
    w = np.linalg.eigvals(A0c + lam * A1c)
    re = w.real
    return int(np.sum(re < 0)), int(np.sum(re > 0)), float(np.min(np.abs(re)))


def default_disk_radius(params: PlasmaParams, end: ShockEndstates,
                        samples: int = 48, max_shrink: int = 30) -> float:
    """Radius of the lam-disk on which all five branches stay separated.

    Candidate: half the smallest branch-point scale a_j^2/(4 beta_j) of
    the slow expansions over both sides; validated by sampling the
    eigenvalue gaps on the circle and shrinking until the slow pair
    stays resolved.
    """
    folds = []
    spread = []
    for side in ("plus", "minus"):
        sl = slow_expansion(params, end, side)
        folds.append(sl.a1**2 / (4.0 * sl.beta1))
        folds.append(sl.a2**2 / (4.0 * sl.beta2))
        spread.append(abs(1.0 / sl.a1 - 1.0 / sl.a2))
    r = 0.5 * min(abs(f) for f in folds)
    gap_scale = min(spread)

    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    for _ in range(max_shrink):
        ok = True
        for side in ("plus", "minus"):
            A0c, A1c = limit_matrix_coeffs(params, end, side)
            for t in theta:
                w = np.linalg.eigvals(A0c + r * np.exp(1j * t) * A1c)
                d = np.abs(w[:, None] - w[None, :]) + np.diag(np.full(5, np.inf))
                if d.min() < 0.1 * r * gap_scale:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return r
        r *= 0.7
    raise RuntimeError("could not validate a separation radius")
