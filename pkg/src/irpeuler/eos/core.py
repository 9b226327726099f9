"""Abstract equation-of-state contract and EOS-generic derived quantities.

An equation of state is supplied in energy form: the specific internal
energy is a fundamental equation e = F(s, v) of specific entropy s and
specific volume v.  Everything else (pressure, temperature, sound speed,
dimensionless stability quantities, and the entropy-form derivatives
needed by the invariant-region machinery) is derived from F and its
partial derivatives.

All evaluation methods are numpy ufunc style: they accept scalars or
arrays and broadcast.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import (
    DomainError,
    InversionFailure,
    NonhyperbolicState,
    NonphysicalState,
)


@dataclass(frozen=True)
class ThermoState:
    """A point (s, v) in the thermodynamic phase plane.

    Fields may be scalars or broadcastable arrays; v must be positive
    everywhere.
    """

    s: float | np.ndarray
    v: float | np.ndarray

    def __post_init__(self):
        if not np.all(np.asarray(self.v) > 0.0):
            raise DomainError("specific volume must be positive")


class ReferenceScales(NamedTuple):
    """Positive magnitudes used to make tolerances relative."""

    e_ref: float
    v_ref: float
    s_ref: float
    theta_ref: float


class DimensionlessQuantities(NamedTuple):
    """The four dimensionless response quantities of a material.

    gamma: adiabatic exponent (dimensionless squared sound speed).
    grueneisen: coupling of thermal and mechanical response.
    g: dimensionless specific heat.
    fundamental_derivative: isentrope curvature measure; positive
    means compressive shocks and genuinely nonlinear acoustic fields.
    """

    gamma: float | np.ndarray
    grueneisen: float | np.ndarray
    g: float | np.ndarray
    fundamental_derivative: float | np.ndarray


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the thermodynamic stability checks at one state.

    All physics failures are reported through the boolean flags, never
    raised, so a sweep over a state-space box can record them.
    """

    gamma: float | np.ndarray
    grueneisen: float | np.ndarray
    g: float | np.ndarray
    fundamental_derivative: float | np.ndarray
    convexity_ok: bool | np.ndarray
    hyperbolic_ok: bool | np.ndarray
    genuinely_nonlinear_ok: bool | np.ndarray
    pve_bound_ok: bool | np.ndarray
    temperature_positive: bool | np.ndarray


class EosSpec(ABC):
    """Evaluation contract for an equation of state in energy form.

    Implementations provide the fundamental equation F(s, v), its
    partial derivatives (up to third order in v, second order in s,
    and the mixed second order), the entropy inversion (e, v) -> s,
    an admissibility predicate on (s, v), and reference scales for
    relative tolerances.

    Contract requirements on the admissible domain:

    * F_s > 0 (positive temperature),
    * F is jointly convex in (s, v),
    * entropy_from_ev(F(s, v), v) == s to relative tolerance 1e-10.

    Instances are immutable after construction and safe to share
    across workers; all methods are pure.
    """

    @abstractmethod
    def F(self, s, v):
        """Specific internal energy e = F(s, v)."""

    @abstractmethod
    def F_s(self, s, v):
        """dF/ds, the temperature."""

    @abstractmethod
    def F_v(self, s, v):
        """dF/dv, the negative pressure."""

    @abstractmethod
    def F_ss(self, s, v):
        """d2F/ds2."""

    @abstractmethod
    def F_sv(self, s, v):
        """d2F/dsdv."""

    @abstractmethod
    def F_vv(self, s, v):
        """d2F/dv2."""

    @abstractmethod
    def F_vvv(self, s, v):
        """d3F/dv3 (needed only for the fundamental derivative)."""

    @abstractmethod
    def entropy_from_ev(self, e, v):
        """Invert e = F(s, v) for s at fixed v."""

    @abstractmethod
    def admissible_domain(self, s, v):
        """Predicate: is (s, v) inside the physically valid domain."""

    @abstractmethod
    def reference_scales(self) -> ReferenceScales:
        """Magnitudes (e_ref, v_ref, s_ref, theta_ref) for tolerances."""

    def entropy_from_pv(self, p, v):
        """Invert the pressure relation P(s, v) = p for s at fixed v.

        Generic safeguarded Newton fallback; concrete models override
        this with closed forms.  Needed to turn primitive initial data
        (rho, u, P) into conserved variables.
        """
        scales = self.reference_scales()
        p_scale = scales.e_ref / scales.v_ref

        def solve_one(pi, vi):
            s = 0.0
            tol = 1e-12 * max(abs(pi), p_scale)
            for _ in range(100):
                r = -self.F_v(s, vi) - pi
                if abs(r) <= tol:
                    return s
                dr = -self.F_sv(s, vi)
                if dr == 0.0:
                    break
                s = s - r / dr
            raise InversionFailure(
                f"pressure inversion did not converge at P={pi}, v={vi}"
            )

        if np.isscalar(p) and np.isscalar(v):
            return solve_one(float(p), float(v))
        p_arr, v_arr = np.broadcast_arrays(np.asarray(p, float), np.asarray(v, float))
        out = np.empty_like(p_arr)
        flat_p, flat_v, flat_o = p_arr.ravel(), v_arr.ravel(), out.ravel()
        for i in range(flat_p.size):
            flat_o[i] = solve_one(flat_p[i], flat_v[i])
        return out


def _require_admissible(eos: EosSpec, ts: ThermoState):
    if not np.all(eos.admissible_domain(ts.s, ts.v)):
        raise DomainError("thermodynamic state outside the admissible domain")


def pressure(eos: EosSpec, ts: ThermoState, require_positive: bool = True):
    """Pressure P = -dF/dv at a thermodynamic state.

    With require_positive (the default) a non-positive result raises
    NonphysicalState; pass False to obtain the raw value, for callers
    that classify rather than abort.
    """
    _require_admissible(eos, ts)
    p = -eos.F_v(ts.s, ts.v)
    if require_positive and not np.all(p > 0.0):
        raise NonphysicalState("pressure is not positive")
    return p


def temperature(eos: EosSpec, ts: ThermoState):
    """Temperature theta = dF/ds at a thermodynamic state."""
    _require_admissible(eos, ts)
    return eos.F_s(ts.s, ts.v)


def pressure_from_ev(eos: EosSpec, e, v):
    """Pressure as a function of (e, v); the closure used by the solver.

    Computed by inverting the fundamental equation for the entropy and
    evaluating P = -dF/dv there.
    """
    s = eos.entropy_from_ev(e, v)
    return pressure(eos, ThermoState(s=s, v=v))


def sound_speed(eos: EosSpec, ts: ThermoState):
    """Speed of sound a = v*sqrt(d2F/dv2).

    Raises NonhyperbolicState when the stiffness d2F/dv2 is not
    positive, since the Euler system then loses strict hyperbolicity.
    """
    _require_admissible(eos, ts)
    f_vv = eos.F_vv(ts.s, ts.v)
    if not np.all(f_vv > 0.0):
        raise NonhyperbolicState("d2F/dv2 <= 0, sound speed undefined")
    return ts.v * np.sqrt(f_vv)


def dimensionless_quantities(eos: EosSpec, ts: ThermoState) -> DimensionlessQuantities:
    """The four dimensionless response quantities at a state.

    gamma                  = (v/P) * d2F/dv2
    grueneisen             = -(v/theta) * d2F/dsdv
    g                      = (P*v/theta^2) * d2F/ds2
    fundamental_derivative = -(v/2) * (d3F/dv3) / (d2F/dv2)
    """
    _require_admissible(eos, ts)
    s, v = ts.s, ts.v
    p = -eos.F_v(s, v)
    theta = eos.F_s(s, v)
    f_vv = eos.F_vv(s, v)
    if np.any(np.asarray(p) == 0.0) or np.any(np.asarray(theta) == 0.0):
        raise ZeroDivisionError("pressure or temperature vanishes")
    if np.any(np.asarray(f_vv) == 0.0):
        raise ZeroDivisionError("d2F/dv2 vanishes")
    gamma = (v / p) * f_vv
    grueneisen = -(v / theta) * eos.F_sv(s, v)
    g = (p * v / theta**2) * eos.F_ss(s, v)
    fundamental = -0.5 * v * eos.F_vvv(s, v) / f_vv
    return DimensionlessQuantities(gamma, grueneisen, g, fundamental)


def check_thermo_stability(eos: EosSpec, ts: ThermoState) -> StabilityReport:
    """Evaluate the thermodynamic stability flags at a state.

    convexity_ok            g >= 0 and gamma >= 0 and g*gamma >= grueneisen^2
    hyperbolic_ok           gamma > 0
    genuinely_nonlinear_ok  fundamental_derivative > 0
    pve_bound_ok            P*v/e < 2*gamma
    temperature_positive    theta > 0

    Failures are recorded in the report, never raised.
    """
    _require_admissible(eos, ts)
    q = dimensionless_quantities(eos, ts)
    s, v = ts.s, ts.v
    p = -eos.F_v(s, v)
    theta = eos.F_s(s, v)
    e = eos.F(s, v)
    convexity_ok = (q.g >= 0.0) & (q.gamma >= 0.0) & (q.g * q.gamma >= q.grueneisen**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        pve = p * v / e
    pve_bound_ok = np.where(np.isfinite(pve), pve < 2.0 * q.gamma, False)
    report = StabilityReport(
        gamma=q.gamma,
        grueneisen=q.grueneisen,
        g=q.g,
        fundamental_derivative=q.fundamental_derivative,
        convexity_ok=convexity_ok if np.ndim(convexity_ok) else bool(convexity_ok),
        hyperbolic_ok=_as_flag(q.gamma > 0.0),
        genuinely_nonlinear_ok=_as_flag(q.fundamental_derivative > 0.0),
        pve_bound_ok=pve_bound_ok if np.ndim(pve_bound_ok) else bool(pve_bound_ok),
        temperature_positive=_as_flag(theta > 0.0),
    )
    return report


def _as_flag(x):
    return x if np.ndim(x) else bool(x)


def entropy_derivatives(eos: EosSpec, s, v):
    """Partial derivatives of the entropy form s = s(e, v).

    The entropy function is the inverse of the energy form at fixed v.
    Writing subscripts for partials of that inverse, the implicit
    function rule gives

        s_e  = 1/F_s
        s_v  = -F_v/F_s                      (equals P/theta)
        s_ee = -F_ss/F_s^3
        s_ev = (F_ss*F_v - F_sv*F_s)/F_s^3
        s_vv = -(F_vv*F_s^2 - 2*F_sv*F_v*F_s + F_ss*F_v^2)/F_s^3

    evaluated at the point (s, v).  Returns the tuple
    (s_e, s_v, s_ee, s_ev, s_vv).  Concavity of the entropy form is
    equivalent to convexity of F given F_s > 0, via the identity
    s_ee*s_vv - s_ev^2 = (F_ss*F_vv - F_sv^2)/F_s^4.
    """
    f_s = eos.F_s(s, v)
    f_v = eos.F_v(s, v)
    f_ss = eos.F_ss(s, v)
    f_sv = eos.F_sv(s, v)
    f_vv = eos.F_vv(s, v)
    inv3 = 1.0 / f_s**3
    s_e = 1.0 / f_s
    s_v = -f_v / f_s
    s_ee = -f_ss * inv3
    s_ev = (f_ss * f_v - f_sv * f_s) * inv3
    s_vv = -(f_vv * f_s**2 - 2.0 * f_sv * f_v * f_s + f_ss * f_v**2) * inv3
    return s_e, s_v, s_ee, s_ev, s_vv
