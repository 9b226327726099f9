"""Exact Riemann solver for the polytropic (ideal) gas.

Verification oracle: deliberately self-contained (numpy only, no
imports from the EOS/region/solver modules) so solver output can be
checked against it.  States are primitive triples (rho, u, P).

The star-region pressure solves

    f(p) = f_L(p; w_L) + f_R(p; w_R) + (u_R - u_L) = 0

with the standard two-branch pressure function (shock branch from the
Rankine-Hugoniot conditions, rarefaction branch from the isentrope),
found by a bracketed Newton iteration to relative tolerance 1e-12.
Sampling follows the classical self-similar wave pattern in xi = x/t.
"""

from __future__ import annotations

import numpy as np

from .errors import VacuumFormation

_REL_TOL = 1e-12
_MAX_ITER = 200


def _check_state(name: str, state) -> tuple[float, float, float]:
    rho, u, P = (float(c) for c in state)
    if rho <= 0.0 or P <= 0.0:
        raise ValueError(f"{name} state needs rho > 0 and P > 0, got {state}")
    return rho, u, P


def _branch(p: float, rho_k: float, P_k: float, a_k: float, g: float):
    """Pressure function of one wave family and its p-derivative."""
    if p > P_k:  # shock
        A = 2.0 / ((g + 1.0) * rho_k)
        B = (g - 1.0) / (g + 1.0) * P_k
        root = np.sqrt(A / (p + B))
        f = (p - P_k) * root
        df = root * (1.0 - 0.5 * (p - P_k) / (p + B))
    else:  # rarefaction
        f = 2.0 * a_k / (g - 1.0) * ((p / P_k) ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = (p / P_k) ** (-(g + 1.0) / (2.0 * g)) / (rho_k * a_k)
    return f, df


def solve_star_state(left, right, gamma0: float) -> tuple[float, float]:
    """Star-region pressure and velocity between the two waves.

    Raises VacuumFormation when the data generate a vacuum (the
    pressure function has no positive root).
    """
    g = float(gamma0)
    if g <= 1.0:
        raise ValueError("gamma0 must exceed 1")
    rhoL, uL, PL = _check_state("left", left)
    rhoR, uR, PR = _check_state("right", right)
    aL = np.sqrt(g * PL / rhoL)
    aR = np.sqrt(g * PR / rhoR)
    du = uR - uL
    if 2.0 / (g - 1.0) * (aL + aR) <= du:
        raise VacuumFormation(
            "initial states pull apart faster than the gas can expand"
        )

    def total(p: float):
        fL, dL = _branch(p, rhoL, PL, aL, g)
        fR, dR = _branch(p, rhoR, PR, aR, g)
        return fL + fR + du, dL + dR, fL, fR

    # f is increasing and concave with f -> negative as p -> 0+ under
    # the no-vacuum condition; expand the bracket until f(hi) > 0
    lo = 1e-300
    hi = max(PL, PR)
    for _ in range(_MAX_ITER):
        if total(hi)[0] > 0.0:
            break
        lo = hi
        hi *= 4.0
    else:
        raise VacuumFormation("pressure function has no positive root")

    p = max(0.5 * (PL + PR), 1e-14 * hi)
    if not (lo < p < hi):
        p = 0.5 * (lo + hi)
    for _ in range(_MAX_ITER):
        f, df, fL, fR = total(p)
        if f > 0.0:
            hi = p
        else:
            lo = p
        p_new = p - f / df if df > 0.0 else 0.5 * (lo + hi)
        if not (lo < p_new < hi):
            p_new = 0.5 * (lo + hi)
        if abs(p_new - p) <= _REL_TOL * p_new:
            p = p_new
            break
        p = p_new
    fL, _ = _branch(p, rhoL, PL, aL, g)
    fR, _ = _branch(p, rhoR, PR, aR, g)
    u = 0.5 * (uL + uR) + 0.5 * (fR - fL)
    return float(p), float(u)


def exact_riemann_polytropic(left, right, gamma0: float, xi=0.0):
    """Sample the exact Riemann solution at xi = x/t.

    left/right are primitive (rho, u, P) triples; xi may be a scalar
    or an array, and the return value is an (rho, u, P) triple of the
    same shape.
    """
    g = float(gamma0)
    p_star, u_star = solve_star_state(left, right, g)
    rhoL, uL, PL = _check_state("left", left)
    rhoR, uR, PR = _check_state("right", right)
    aL = np.sqrt(g * PL / rhoL)
    aR = np.sqrt(g * PR / rhoR)

    xi_arr = np.asarray(xi, dtype=float)
    scalar = xi_arr.ndim == 0
    x = np.atleast_1d(xi_arr)
    rho = np.empty_like(x)
    u = np.empty_like(x)
    P = np.empty_like(x)

    gm = (g - 1.0) / (2.0 * g)
    gp = (g + 1.0) / (2.0 * g)

    # left of the contact
    if p_star > PL:  # left shock
        SL = uL - aL * np.sqrt(gp * p_star / PL + gm)
        rho_starL = rhoL * (p_star / PL + (g - 1.0) / (g + 1.0)) / (
            (g - 1.0) / (g + 1.0) * p_star / PL + 1.0
        )
        left_outer = x <= SL
        left_inner = (x > SL) & (x <= u_star)
        rho[left_outer], u[left_outer], P[left_outer] = rhoL, uL, PL
        rho[left_inner], u[left_inner], P[left_inner] = rho_starL, u_star, p_star
    else:  # left rarefaction
        a_starL = aL * (p_star / PL) ** gm
        rho_starL = rhoL * (p_star / PL) ** (1.0 / g)
        head, tail = uL - aL, u_star - a_starL
        left_outer = x <= head
        fan = (x > head) & (x < tail)
        left_inner = (x >= tail) & (x <= u_star)
        rho[left_outer], u[left_outer], P[left_outer] = rhoL, uL, PL
        a_fan = 2.0 / (g + 1.0) * (aL + 0.5 * (g - 1.0) * (uL - x[fan]))
        u[fan] = 2.0 / (g + 1.0) * (aL + 0.5 * (g - 1.0) * uL + x[fan])
        rho[fan] = rhoL * (a_fan / aL) ** (2.0 / (g - 1.0))
        P[fan] = PL * (a_fan / aL) ** (2.0 * g / (g - 1.0))
        rho[left_inner], u[left_inner], P[left_inner] = rho_starL, u_star, p_star

    # right of the contact
    if p_star > PR:  # right shock
        SR = uR + aR * np.sqrt(gp * p_star / PR + gm)
        rho_starR = rhoR * (p_star / PR + (g - 1.0) / (g + 1.0)) / (
            (g - 1.0) / (g + 1.0) * p_star / PR + 1.0
        )
        right_inner = (x > u_star) & (x < SR)
        right_outer = x >= SR
        rho[right_inner], u[right_inner], P[right_inner] = rho_starR, u_star, p_star
        rho[right_outer], u[right_outer], P[right_outer] = rhoR, uR, PR
    else:  # right rarefaction
        a_starR = aR * (p_star / PR) ** gm
        rho_starR = rhoR * (p_star / PR) ** (1.0 / g)
        head, tail = uR + aR, u_star + a_starR
        right_inner = (x > u_star) & (x <= tail)
        fan = (x > tail) & (x < head)
        right_outer = x >= head
        rho[right_inner], u[right_inner], P[right_inner] = rho_starR, u_star, p_star
        a_fan = 2.0 / (g + 1.0) * (aR - 0.5 * (g - 1.0) * (uR - x[fan]))
        u[fan] = 2.0 / (g + 1.0) * (-aR + 0.5 * (g - 1.0) * uR + x[fan])
        rho[fan] = rhoR * (a_fan / aR) ** (2.0 / (g - 1.0))
        P[fan] = PR * (a_fan / aR) ** (2.0 * g / (g - 1.0))
        rho[right_outer], u[right_outer], P[right_outer] = rhoR, uR, PR

    if scalar:
        return float(rho[0]), float(u[0]), float(P[0])
    return rho, u, P
