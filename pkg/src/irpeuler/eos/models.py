"""Concrete equation-of-state models.

Two models are shipped:

* a polytropic ideal gas, the standard benchmark closure, and
* a nonlinear Tait model suitable for liquids, built from a reference
  compression modulus and a linearized saturation curve.

Both provide exact analytic partial derivatives and closed-form entropy
inversions, so they double as oracles for the generic Newton inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InversionFailure, NoPhysicalRoot
from .core import EosSpec, ReferenceScales, ThermoState


@dataclass(frozen=True)
class PolytropicParams:
    """Parameters of the polytropic ideal gas.

    gamma0 is the adiabatic coefficient (> 1) and k > 0 normalizes the
    entropy origin.  The derived constant c = k*(gamma0 - 1) relates
    pressure and entropy through s = log(P / (c * rho**gamma0)).
    """

    gamma0: float
    k: float = 1.0

    def __post_init__(self):
        if not self.gamma0 > 1.0:
            raise ValueError("gamma0 must be > 1")
        if not self.k > 0.0:
            raise ValueError("k must be > 0")

    @property
    def c(self) -> float:
        return self.k * (self.gamma0 - 1.0)


class PolytropicEos(EosSpec):
    """Polytropic ideal gas: e = k * exp(s) * v**(1 - gamma0).

    Pressure reduces to P = (gamma0 - 1) * e / v and all four
    dimensionless quantities are constants in state space.
    """

    def __init__(self, params: PolytropicParams):
        self.params = params

    def F(self, s, v):
        g0, k = self.params.gamma0, self.params.k
        return k * np.exp(s) * np.asarray(v, float) ** (1.0 - g0)

    def F_s(self, s, v):
        return self.F(s, v)

    def F_v(self, s, v):
        return (1.0 - self.params.gamma0) * self.F(s, v) / v

    def F_ss(self, s, v):
        return self.F(s, v)

    def F_sv(self, s, v):
        return (1.0 - self.params.gamma0) * self.F(s, v) / v

    def F_vv(self, s, v):
        g0 = self.params.gamma0
        return g0 * (g0 - 1.0) * self.F(s, v) / v**2

    def F_vvv(self, s, v):
        g0 = self.params.gamma0
        return -g0 * (g0 - 1.0) * (g0 + 1.0) * self.F(s, v) / v**3

    def entropy_from_ev(self, e, v):
        return polytropic_entropy_from_ev(self.params, e, v)

    def entropy_from_pv(self, p, v):
        # s = log(P * v**gamma0 / c), the closed-form pressure inversion.
        if not (np.all(np.asarray(p) > 0.0) and np.all(np.asarray(v) > 0.0)):
            raise DomainError("polytropic entropy_from_pv needs P > 0 and v > 0")
        g0 = self.params.gamma0
        return np.log(np.asarray(p, float) * np.asarray(v, float) ** g0 / self.params.c)

    def entropy_from_ev_total(self, e, v):
        # nan-extended variant for vectorized classification
        e_arr = np.asarray(e, float)
        v_arr = np.asarray(v, float)
        with np.errstate(all="ignore"):
            out = np.log(e_arr * v_arr ** (self.params.gamma0 - 1.0) / self.params.k)
        return np.where((e_arr > 0.0) & (v_arr > 0.0), out, np.nan)

    def admissible_domain(self, s, v):
        del s  # every entropy is admissible
        return np.asarray(v) > 0.0

    def reference_scales(self) -> ReferenceScales:
        return ReferenceScales(e_ref=self.params.k, v_ref=1.0, s_ref=1.0,
                               theta_ref=self.params.k)


def polytropic_F(params: PolytropicParams, ts: ThermoState):
    """Specific internal energy of the polytropic gas at a state."""
    return PolytropicEos(params).F(ts.s, ts.v)


def polytropic_entropy_from_ev(params: PolytropicParams, e, v):
    """Closed-form entropy s = log(e * v**(gamma0 - 1) / k).

    Requires e > 0 and v > 0.
    """
    if not np.all(np.asarray(e) > 0.0):
        raise DomainError("internal energy must be positive")
    if not np.all(np.asarray(v) > 0.0):
        raise DomainError("specific volume must be positive")
    g0 = params.gamma0
    return np.log(np.asarray(e, float) * np.asarray(v, float) ** (g0 - 1.0) / params.k)


@dataclass(frozen=True)
class TaitParams:
    """Parameters of the nonlinear Tait model.

    K_r is the modulus of compression at the reference state, (v_r,
    p_r, s_r, e_r, theta_r) locate that state, nu >= 1 is the volume
    exponent, C = c_{v,r} / theta_r > 0 scales the heat capacity, and
    D is the slope of the linearized saturation curve (any real,
    including 0, which decouples thermal and mechanical response).

    The derived constants A = K_r - p_r and B = K_r * v_r**nu are
    fixed by the construction.
    """

    K_r: float
    v_r: float
    p_r: float
    s_r: float
    e_r: float
    theta_r: float
    nu: float
    C: float
    D: float

    def __post_init__(self):
        if not self.K_r > 0.0:
            raise ValueError("K_r must be > 0")
        if not self.v_r > 0.0:
            raise ValueError("v_r must be > 0")
        if not self.theta_r > 0.0:
            raise ValueError("theta_r must be > 0")
        if not self.nu >= 1.0:
            raise ValueError("nu must be >= 1")
        if not self.C > 0.0:
            raise ValueError("C must be > 0")

    @property
    def A(self) -> float:
        return self.K_r - self.p_r

    @property
    def B(self) -> float:
        return self.K_r * self.v_r**self.nu


class TaitEos(EosSpec):
    """Nonlinear Tait model.

    The energy form is

        F(s, v) = A*(v - v_r) + B*Phi(v) + x**2/(2C)
                  + theta_r*(s - s_r) + C*theta_r**2 + e_r,
        x(s, v) = (s - s_r) - D*(v - v_r),

    with the compression integral

        Phi(v) = log(v_r / v)                          for nu == 1,
        Phi(v) = (v**(1-nu) - v_r**(1-nu)) / (nu - 1)  for nu > 1.

    This is the energy form whose pressure reproduces the familiar
    thermal shape P = pbar(theta) + K_r*((v_r/v)**nu - 1) with
    pbar(theta) = p_r + D*(theta - theta_r), so the reference state
    (s_r, v_r) carries pressure p_r and temperature theta_r, and the
    isochoric heat capacity is c_v = C*theta.

    The branch of Phi is selected by comparing nu against 1 exactly;
    the nu -> 1 limit of the power branch equals the log branch
    analytically, but the two are never mixed.
    """

    def __init__(self, params: TaitParams):
        self.params = params

    # -- compression integral -------------------------------------------------

    def _phi(self, v):
        p = self.params
        if p.nu == 1.0:
            return np.log(p.v_r / v)
        return (np.asarray(v, float) ** (1.0 - p.nu) - p.v_r ** (1.0 - p.nu)) / (p.nu - 1.0)

    def _phi_p(self, v):
        return -np.asarray(v, float) ** (-self.params.nu)

    def _phi_pp(self, v):
        nu = self.params.nu
        return nu * np.asarray(v, float) ** (-nu - 1.0)

    def _phi_ppp(self, v):
        nu = self.params.nu
        return -nu * (nu + 1.0) * np.asarray(v, float) ** (-nu - 2.0)

    def _x(self, s, v):
        p = self.params
        return (np.asarray(s, float) - p.s_r) - p.D * (np.asarray(v, float) - p.v_r)

    # -- energy form and partials ---------------------------------------------

    def F(self, s, v):
        p = self.params
        x = self._x(s, v)
        return (p.A * (np.asarray(v, float) - p.v_r) + p.B * self._phi(v)
                + x**2 / (2.0 * p.C)
                + p.theta_r * (np.asarray(s, float) - p.s_r)
                + p.C * p.theta_r**2 + p.e_r)

    def F_s(self, s, v):
        p = self.params
        return self._x(s, v) / p.C + p.theta_r

    def F_v(self, s, v):
        p = self.params
        return p.A + p.B * self._phi_p(v) - (p.D / p.C) * self._x(s, v)

    def F_ss(self, s, v):
        # constant in state space; scalar broadcasts against any input
        del s, v
        return 1.0 / self.params.C

    def F_sv(self, s, v):
        del s, v
        return -self.params.D / self.params.C

    def F_vv(self, s, v):
        p = self.params
        return p.B * self._phi_pp(v) + p.D**2 / p.C

    def F_vvv(self, s, v):
        return self.params.B * self._phi_ppp(v)

    # -- inversions and domain ------------------------------------------------

    def entropy_from_ev(self, e, v):
        return tait_entropy_from_ev(self.params, e, v)

    def entropy_from_pv(self, p, v):
        """Closed-form pressure inversion through the thermal shape.

        Solves P = p_r + D*(theta - theta_r) + K_r*((v_r/v)**nu - 1)
        for theta and maps back to entropy.  With D == 0 the pressure
        carries no entropy information at fixed volume, so the
        inversion is rejected.
        """
        par = self.params
        if par.D == 0.0:
            raise DomainError(
                "Tait with D = 0: pressure does not determine entropy at fixed volume"
            )
        v_arr = np.asarray(v, float)
        if not np.all(v_arr > 0.0):
            raise DomainError("specific volume must be positive")
        theta = par.theta_r + (np.asarray(p, float) - par.p_r
                               - par.K_r * ((par.v_r / v_arr) ** par.nu - 1.0)) / par.D
        if not np.all(theta > 0.0):
            raise NoPhysicalRoot("pressure inversion gives non-positive temperature")
        return par.s_r + par.C * (theta - par.theta_r) + par.D * (v_arr - par.v_r)

    def entropy_from_ev_total(self, e, v):
        # nan-extended variant for vectorized classification
        p = self.params
        e_arr = np.asarray(e, float)
        v_arr = np.asarray(v, float)
        ok_v = v_arr > 0.0
        v_safe = np.where(ok_v, v_arr, p.v_r)
        mu = (p.A + p.D * p.theta_r) * (v_safe - p.v_r) + p.B * self._phi(v_safe)
        disc = 2.0 * p.C * (e_arr - p.e_r - mu) - (p.C * p.theta_r) ** 2
        ok = ok_v & (disc > 0.0)
        with np.errstate(all="ignore"):
            theta = np.sqrt(np.where(ok, disc, np.nan)) / p.C
        return np.where(
            ok, p.s_r + p.C * (theta - p.theta_r) + p.D * (v_safe - p.v_r), np.nan
        )

    def admissible_domain(self, s, v):
        p = self.params
        v_arr = np.asarray(v, float)
        ok_v = v_arr > 0.0
        v_safe = np.where(ok_v, v_arr, p.v_r)
        theta = self.F_s(s, v_safe)
        pres = -self.F_v(s, v_safe)
        out = ok_v & (theta > 0.0) & (pres > 0.0)
        return out if out.ndim else bool(out)

    def reference_scales(self) -> ReferenceScales:
        p = self.params
        return ReferenceScales(
            e_ref=p.C * p.theta_r**2 + abs(p.e_r) + p.K_r * p.v_r,
            v_ref=p.v_r,
            s_ref=p.C * p.theta_r + abs(p.s_r),
            theta_ref=p.theta_r,
        )

    def energy_floor(self, v):
        """Least internal energy with a real temperature at volume v.

        The energy is quadratic in temperature at fixed volume; the
        floor sits at theta = 0, the edge of the admissible domain.
        """
        p = self.params
        mu = (p.A + p.D * p.theta_r) * (np.asarray(v, float) - p.v_r) + p.B * self._phi(v)
        return mu + p.e_r + 0.5 * p.C * p.theta_r**2


def tait_F(params: TaitParams, ts: ThermoState):
    """Specific internal energy of the Tait model at a state."""
    return TaitEos(params).F(ts.s, ts.v)


def tait_entropy_from_ev(params: TaitParams, e, v):
    """Closed-form Tait entropy inversion.

    At fixed volume the energy is a quadratic in
    x = (s - s_r) - D*(v - v_r); of its two roots only one can carry a
    positive temperature theta = x/C + theta_r (the other gives
    theta < 0, and theta = 0 sits exactly on the zero-discriminant
    boundary).  That root is returned.  Raises NoPhysicalRoot when the
    discriminant is negative or the temperature would not be positive.
    """
    p = params
    eos = TaitEos(p)
    v_arr = np.asarray(v, float)
    if not np.all(v_arr > 0.0):
        raise DomainError("specific volume must be positive")
    mu = (p.A + p.D * p.theta_r) * (v_arr - p.v_r) + p.B * eos._phi(v_arr)
    disc = 2.0 * p.C * (np.asarray(e, float) - p.e_r - mu) - (p.C * p.theta_r) ** 2
    if not np.all(disc > 0.0):
        raise NoPhysicalRoot(
            "no entropy with positive temperature for the given (e, v)"
        )
    theta = np.sqrt(disc) / p.C
    return p.s_r + p.C * (theta - p.theta_r) + p.D * (v_arr - p.v_r)


def generic_entropy_from_ev(eos: EosSpec, e: float, v: float, s_guess: float = 0.0):
    """Invert e = F(s, v) for s by safeguarded Newton iteration.

    Fallback for user-supplied models without a closed-form inverse;
    valid wherever F(., v) is strictly increasing (F_s = theta > 0).
    A bracket is expanded around the initial guess and Newton steps
    falling outside it are replaced by bisection.  Converges to
    |F(s, v) - e| <= 1e-12 * max(|e|, e_ref).

    Scalar only; loop over samples for batches.
    """
    e = float(e)
    v = float(v)
    tol = 1e-12 * max(abs(e), eos.reference_scales().e_ref)

    s = float(s_guess)
    f = eos.F(s, v) - e
    if abs(f) <= tol:
        return s

    # Expand a bracket [lo, hi] with F(lo) <= e <= F(hi); F grows in s
    # on the admissible domain, so doubling steps find one quickly.
    step = 1.0
    lo = hi = s
    f_lo = f_hi = f
    for _ in range(100):
        if f_lo > 0.0:
            lo -= step
            f_lo = eos.F(lo, v) - e
        elif f_hi < 0.0:
            hi += step
            f_hi = eos.F(hi, v) - e
        else:
            break
        step *= 2.0
    else:
        raise InversionFailure(f"could not bracket entropy at e={e}, v={v}")

    s = 0.5 * (lo + hi)
    for _ in range(100):
        f = eos.F(s, v) - e
        if abs(f) <= tol:
            return s
        if f > 0.0:
            hi = s
        else:
            lo = s
        theta = eos.F_s(s, v)
        s_newton = s - f / theta if theta > 0.0 else math.nan
        if math.isfinite(s_newton) and lo < s_newton < hi:
            s = s_newton
        else:
            s = 0.5 * (lo + hi)
    raise InversionFailure(f"entropy inversion did not converge at e={e}, v={v}")
