"""Conserved-variable algebra and the convex invariant region.

The region is the set of conserved states

    {rho > 0,  R > 0,  q < 0},

where R = E - |m|^2/(2*rho) is the internal energy density and
q = rho*(s0 - s) measures how far the specific entropy sits above the
floor s0 inferred from the initial data.  Both R (concave) and q
(convex, given a concave entropy form) are the constraint functions the
limiter relies on; this module also provides the closed-form leading
principal minors of the Hessian of q used to verify that convexity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos.core import EosSpec, entropy_derivatives
from .errors import DomainError, InversionFailure

#: first-violated-constraint labels, in evaluation order
CONSTRAINT_RHO = "rho"
CONSTRAINT_R = "R"
CONSTRAINT_Q = "q"


@dataclass(frozen=True)
class ConservedState:
    """One conserved state w = (rho, m, E).

    The momentum m may have any dimension d; it is stored as a 1-D
    array.  No admissibility is enforced at construction, because
    classification of arbitrary (possibly nonphysical) states is part
    of the membership contract.
    """

    rho: float
    m: np.ndarray
    E: float

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.m, dtype=float))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "E", float(self.E))

    @property
    def m_mag(self) -> float:
        """Magnitude of the momentum vector."""
        return float(np.sqrt(np.dot(self.m, self.m)))


@dataclass(frozen=True)
class InvariantRegion:
    """Entropy floor plus the numerical tolerances defining membership.

    A state belongs to the region when

        rho >= eps_rho * rho_ref      (rho_ref = 1 / v_ref of the EOS)
        R   >= eps_R * e_ref * rho
        q   <= -eps_q

    checked in that order; the entropy-based constraint q is evaluated
    only once the first two hold.  The default eps_q = 0 makes the
    boundary q = 0 admissible, which is exactly what the limiter
    construction guarantees.
    """

    s0: float
    eps_rho: float = 1e-13
    eps_R: float = 1e-13
    eps_q: float = 0.0


@dataclass(frozen=True)
class HessianMinors:
    """Leading principal minors of the Hessian of q in (rho, |m|, E)."""

    q_rr: float
    A: float
    B: float


@dataclass(frozen=True)
class RegionVerdict:
    """Membership verdict with the first violated constraint, if any."""

    member: bool
    violated: str | None = None

    def __bool__(self) -> bool:
        return self.member


def primitives(w: ConservedState):
    """Decompose a conserved state into (u, v, e).

    u is the velocity vector m/rho, v = 1/rho the specific volume and
    e = (E - |m|^2/(2*rho))/rho the specific internal energy.
    """
    if w.rho <= 0.0:
        raise DomainError("density must be positive")
    u = w.m / w.rho
    v = 1.0 / w.rho
    e = (w.E - 0.5 * np.dot(w.m, w.m) / w.rho) / w.rho
    return u, v, float(e)


def internal_energy_R(w: ConservedState) -> float:
    """Internal energy density R = E - |m|^2/(2*rho)."""
    if w.rho <= 0.0:
        raise DomainError("density must be positive")
    return float(w.E - 0.5 * np.dot(w.m, w.m) / w.rho)


def q_value(w: ConservedState, eos: EosSpec, region: InvariantRegion) -> float:
    """Entropy-deficit density q = rho*(s0 - s(e, v)).

    Defined only for rho > 0 and positive internal energy, since the
    specific entropy requires both.
    """
    if w.rho <= 0.0:
        raise DomainError("density must be positive")
    R = internal_energy_R(w)
    if R <= 0.0:
        raise DomainError("internal energy must be positive")
    v = 1.0 / w.rho
    e = R * v
    s = eos.entropy_from_ev(e, v)
    return w.rho * (region.s0 - float(s))


def in_invariant_region(
    w: ConservedState, eos: EosSpec, region: InvariantRegion
) -> RegionVerdict:
    """Classify a conserved state against the invariant region.

    Total function: never raises, accepts arbitrary states.  The
    constraints are tested in the order rho, R, q and the first
    violation is reported; q is evaluated only when the first two
    pass, and any state whose entropy is undefined there counts as a
    q violation.
    """
    scales = eos.reference_scales()
    rho_ref = 1.0 / scales.v_ref
    if not w.rho >= region.eps_rho * rho_ref:
        return RegionVerdict(False, CONSTRAINT_RHO)
    R = w.E - 0.5 * float(np.dot(w.m, w.m)) / w.rho
    if not R >= region.eps_R * scales.e_ref * w.rho:
        return RegionVerdict(False, CONSTRAINT_R)
    try:
        q = q_value(w, eos, region)
    except (DomainError, InversionFailure):
        return RegionVerdict(False, CONSTRAINT_Q)
    if not (np.isfinite(q) and q <= -region.eps_q):
        return RegionVerdict(False, CONSTRAINT_Q)
    return RegionVerdict(True, None)


def q_hessian_matrix(w: ConservedState, eos: EosSpec) -> np.ndarray:
    """Closed-form Hessian of q in the reduced variables (rho, |m|, E).

    All constraint functions are rotationally symmetric in m, so the
    convexity verification works on the scalar momentum magnitude.
    The entries combine the entropy-form derivatives with
    xi = E - v*|m|^2:

        q_rr = -v^3*(s_vv + s_ee*xi^2 + 2*xi*s_ev - m^2*s_e)
        q_rm = -m*v^2*s_e - s_ee*v^3*m*xi - m*v^3*s_ev
        q_rE = v^2*xi*s_ee + v^2*s_ev
        q_mm = v*s_e - v^3*m^2*s_ee
        q_mE = v^2*m*s_ee
        q_EE = -v*s_ee

    q is independent of the entropy floor up to a term linear in w, so
    the Hessian needs no region argument.
    """
    if w.rho <= 0.0:
        raise DomainError("density must be positive")
    R = internal_energy_R(w)
    if R <= 0.0:
        raise DomainError("internal energy must be positive")
    m = w.m_mag
    v = 1.0 / w.rho
    e = R * v
    xi = w.E - v * m * m
    s = eos.entropy_from_ev(e, v)
    s_e, _s_v, s_ee, s_ev, s_vv = entropy_derivatives(eos, s, v)

    q_rr = -(v**3) * (s_vv + s_ee * xi * xi + 2.0 * xi * s_ev - m * m * s_e)
    q_rm = -m * v * v * s_e - s_ee * v**3 * m * xi - m * v**3 * s_ev
    q_rE = v * v * xi * s_ee + v * v * s_ev
    q_mm = v * s_e - v**3 * m * m * s_ee
    q_mE = v * v * m * s_ee
    q_EE = -v * s_ee
    return np.array(
        [[q_rr, q_rm, q_rE], [q_rm, q_mm, q_mE], [q_rE, q_mE, q_EE]], dtype=float
    )


def q_hessian_minors(w: ConservedState, eos: EosSpec) -> HessianMinors:
    """Leading principal minors of the Hessian of q at a state.

    The first two minors come from the closed-form entries; the
    determinant uses its compact factorization

        B = v^5 * s_e * (s_vv*s_ee - s_ev^2),

    which is algebraically equal to the determinant of the entry
    matrix but free of the cancellation a cofactor expansion incurs.
    All three are strictly positive wherever the entropy form is
    strictly concave and rho > 0, R > 0.
    """
    H = q_hessian_matrix(w, eos)
    q_rr = float(H[0, 0])
    A = float(H[0, 0] * H[1, 1] - H[0, 1] ** 2)

    R = internal_energy_R(w)
    v = 1.0 / w.rho
    e = R * v
    s = eos.entropy_from_ev(e, v)
    s_e, _s_v, s_ee, s_ev, s_vv = entropy_derivatives(eos, s, v)
    B = v**5 * s_e * (s_vv * s_ee - s_ev**2)
    return HessianMinors(q_rr=q_rr, A=A, B=float(B))


# -- vectorized internals used by the solver and the verification CLI --------


def entropy_total(eos: EosSpec, e, v):
    """Entropy s(e, v) extended by nan where undefined.

    Vectorized total companion of entropy_from_ev for batch
    classification; models may provide a fast `entropy_from_ev_total`,
    otherwise this falls back to a per-element loop.
    """
    fast = getattr(eos, "entropy_from_ev_total", None)
    if fast is not None:
        return fast(e, v)
    e_arr, v_arr = np.broadcast_arrays(np.asarray(e, float), np.asarray(v, float))
    out = np.full(e_arr.shape, np.nan)
    flat_e, flat_v, flat_o = e_arr.ravel(), v_arr.ravel(), out.ravel()
    for i in range(flat_e.size):
        try:
            flat_o[i] = eos.entropy_from_ev(flat_e[i], flat_v[i])
        except (DomainError, InversionFailure):
            pass
    return out


def membership_mask(W: np.ndarray, eos: EosSpec, region: InvariantRegion) -> np.ndarray:
    """Vectorized membership test for states stored as rows of (3, n).

    W[0] is rho, W[1] the 1-D momentum, W[2] the total energy.
    Returns a boolean array; elementwise semantics match
    in_invariant_region with its short-circuit ordering.
    """
    rho, m, E = W[0], W[1], W[2]
    scales = eos.reference_scales()
    ok = rho >= region.eps_rho / scales.v_ref
    rho_safe = np.where(ok, rho, 1.0)
    R = E - 0.5 * m * m / rho_safe
    ok &= R >= region.eps_R * scales.e_ref * rho
    if not ok.any():
        return ok
    v = 1.0 / rho_safe
    e = np.where(ok, R, 1.0) * v
    with np.errstate(all="ignore"):
        s = entropy_total(eos, e, v)
        q = rho * (region.s0 - s)
    return ok & np.isfinite(q) & (q <= -region.eps_q)
