"""Shock parameters and Rankine-Hugoniot data.

The system is the 1-D isothermal Navier-Stokes-Poisson system in Lagrangian
coordinates (specific volume v, velocity u, electric potential phi) with
Boltzmann electrons.  A 2-shock connects the endstates (v-, u-) and (v+, u+)
with v+ > v- (Lax condition); the electron relation fixes phi+- = -ln v+-.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

# Default guard for the small-amplitude regime the profile and Evans machinery
# target.  Larger amplitudes are not rejected outright, only warned about.
AMPLITUDE_THRESHOLD = 0.2


@dataclass(frozen=True)
class PlasmaParams:
    """Physical parameters and endstate data of one shock.

    T    : ion temperature (> 0)
    nu   : viscosity (> 0)
    eps  : scaled Debye length (> 0)
    v_minus, u_minus : left endstate
    v_plus           : right specific volume; v_plus > v_minus selects a 2-shock
    """

    T: float
    nu: float
    eps: float
    v_minus: float
    u_minus: float
    v_plus: float

    def __post_init__(self):
        for name in ("T", "nu", "eps", "v_minus", "v_plus"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def delta_s(self) -> float:
        """Shock amplitude v+ - v-."""
        return self.v_plus - self.v_minus

    def sound_speed(self, v: float) -> float:
        """Characteristic speed sqrt(T+1)/v of the quasi-neutral Euler system."""
        return math.sqrt(self.T + 1.0) / v


@dataclass(frozen=True)
class ShockEndstates:
    """Derived jump data: shock speed and the remaining endstate components."""

    s: float
    u_plus: float
    phi_minus: float
    phi_plus: float


def params_from_dict(d: dict) -> PlasmaParams:
    """Build PlasmaParams from a config mapping with keys
    T, nu, eps, v_minus, u_minus, v_plus."""
    keys = ("T", "nu", "eps", "v_minus", "u_minus", "v_plus")
    missing = [k for k in keys if k not in d]
    if missing:
        raise ValueError(f"missing parameter keys: {missing}")
    return PlasmaParams(**{k: float(d[k]) for k in keys})


def solve_rankine_hugoniot(
    params: PlasmaParams, amplitude_threshold: float = AMPLITUDE_THRESHOLD
) -> ShockEndstates:
    """Solve the jump conditions for the 2-shock.

    s = sqrt((T+1)/(v+ v-)) > 0,  u+ = u- - s (v+ - v-),  phi+- = -ln v+-.

    Raises ValueError when the Lax condition v+ > v- fails; warns when the
    amplitude exceeds ``amplitude_threshold`` (the expansion machinery is
    built for small amplitudes).
    """
    if params.v_plus <= params.v_minus:
        raise ValueError(
            "Lax condition violated: a 2-shock needs v_plus > v_minus "
            f"(got v_minus={params.v_minus}, v_plus={params.v_plus})"
        )
    if params.delta_s > amplitude_threshold:
        warnings.warn(
            f"shock amplitude {params.delta_s:.4g} exceeds the small-amplitude "
            f"threshold {amplitude_threshold:.4g}; results are extrapolations",
            stacklevel=2,
        )
    s = math.sqrt((params.T + 1.0) / (params.v_plus * params.v_minus))
    u_plus = params.u_minus - s * (params.v_plus - params.v_minus)
    return ShockEndstates(
        s=s,
        u_plus=u_plus,
        phi_minus=-math.log(params.v_minus),
        phi_plus=-math.log(params.v_plus),
    )


def rh_residuals(params: PlasmaParams, end: ShockEndstates) -> tuple[float, float]:
    """Mass and momentum jump residuals of the quasi-neutral Euler shock.

    mass:      u+ - u- + s (v+ - v-)
    momentum:  -s (u+ - u-) + (T+1) (1/v+ - 1/v-)

    Both vanish exactly at the Rankine-Hugoniot solution.
    """
    dv = params.v_plus - params.v_minus
    du = end.u_plus - params.u_minus
    mass = du + end.s * dv
    momentum = -end.s * du + (params.T + 1.0) * (1.0 / params.v_plus - 1.0 / params.v_minus)
    return mass, momentum


def acoustic_speeds(params: PlasmaParams, side: str) -> tuple[float, float]:
    """Shifted characteristic speeds a_j = s + (-1)^j sqrt(T+1)/v at one endstate.

    a_1 = s - c, a_2 = s + c with c the quasi-neutral sound speed.  For a Lax
    2-shock a_1- < 0 < a_1+ and a_2+- > 0.
    """
    v = params.v_minus if side == "-" else params.v_plus
    end = solve_rankine_hugoniot(params)
    c = params.sound_speed(v)
    return end.s - c, end.s + c


def liu_majda_delta(params: PlasmaParams, end: ShockEndstates) -> float:
    """Liu-Majda determinant of the quasi-neutral Euler 2-shock (closed form).

    Delta = ((v+ - v-)/sqrt2) (sqrt(T+1)/v- + s).  Nonzero iff the inviscid
    shock is uniformly stable; positive for Lax 2-shocks.
    """
    c_minus = params.sound_speed(params.v_minus)
    return (params.v_plus - params.v_minus) / math.sqrt(2.0) * (c_minus + end.s)


def liu_majda_delta_det(params: PlasmaParams, end: ShockEndstates) -> float:
    """Liu-Majda determinant as the 2x2 determinant det(U+ - U-, r2-).

    r2- is the outgoing acoustic right eigenvector (1, c-)/sqrt2 of the
    quasi-neutral characteristic matrix [[s, 1], [c^2, s]] at the left state.
    Cross-check route for :func:`liu_majda_delta`.
    """
    c_minus = params.sound_speed(params.v_minus)
    dv = params.v_plus - params.v_minus
    du = end.u_plus - params.u_minus
    r2 = (1.0 / math.sqrt(2.0), c_minus / math.sqrt(2.0))
    return dv * r2[1] - du * r2[0]
