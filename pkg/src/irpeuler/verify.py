"""Finite-difference verification oracle.

Independent of the closed-form machinery: this module only moves
conserved-state components around and differences a user-supplied
scalar function, so its output can be compared against analytic
Hessians without shared code.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def fd_hessian(f, w, h: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian of f at the conserved state w.

    w needs rho/m/E attributes (momentum may have several
    components); the result is a symmetric (2+d) x (2+d) matrix in the
    component order (rho, m_1..m_d, E).  The step for component i is h
    times a per-component scale: |rho| and |E| for the positive
    coordinates, and max(|m_i|, sqrt(rho R)) for momentum, which stays
    meaningful at m = 0 without borrowing the (possibly much larger)
    energy scale.

    Every stencil point must satisfy rho > 0 and R = E - |m|^2/(2 rho)
    > 0; DomainError is raised otherwise so callers learn the state
    sits too close to the physical boundary for the step chosen.
    """
    m = np.atleast_1d(np.asarray(w.m, dtype=float))
    base = np.concatenate(([float(w.rho)], m, [float(w.E)]))
    n = base.size
    rho0 = base[0]
    R0 = base[-1] - 0.5 * np.sum(m**2) / rho0 if rho0 > 0.0 else -1.0
    if rho0 <= 0.0 or R0 <= 0.0:
        raise DomainError(
            "base state violates {rho > 0, R > 0}; no stencil exists"
        )
    m_scale = np.maximum(np.abs(m), np.sqrt(rho0 * R0))
    scales = np.concatenate(([abs(rho0)], m_scale, [abs(base[-1])]))
    steps = h * scales

    def value(x: np.ndarray) -> float:
        rho = x[0]
        R = x[-1] - 0.5 * np.sum(x[1:-1] ** 2) / rho if rho > 0.0 else -1.0
        if rho <= 0.0 or R <= 0.0:
            raise DomainError(
                "finite-difference stencil left the set {rho > 0, R > 0}; "
                "use a smaller step or a state farther from the boundary"
            )
        state = type(w)(rho=x[0], m=x[1:-1].copy(), E=x[-1])
        return float(f(state))

    H = np.empty((n, n))
    f0 = value(base)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        f_p = value(base + ei)
        f_m = value(base - ei)
        H[i, i] = (f_p - 2.0 * f0 + f_m) / steps[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = steps[j]
            f_pp = value(base + ei + ej)
            f_pm = value(base + ei - ej)
            f_mp = value(base - ei + ej)
            f_mm = value(base - ei - ej)
            H[i, j] = H[j, i] = (f_pp - f_pm - f_mp + f_mm) / (
                4.0 * steps[i] * steps[j]
            )
    return 0.5 * (H + H.T)
