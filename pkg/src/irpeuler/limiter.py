"""Invariant-region-preserving limiter for per-cell reconstructions.

A cell reconstruction is rescaled toward its cell average,

    w_limited(x) = theta * w(x) + (1 - theta) * w_avg,

with one scaling factor per cell chosen so that every test value (the
cell interface values and the midpoint in 1D) lands inside the
invariant region.  Because each constraint function is convex and the
average lies strictly inside the region, the factor

    theta_1 = U(w_avg) / (U(w_avg) - U_max),   U_max = max over test values,

guarantees U <= 0 at all test points without any per-point root
solving; the overall factor is the minimum over the constraints.  The
construction preserves the cell average exactly and keeps the order of
accuracy, since theta -> 1 under grid refinement of smooth data.

Constraint ordering and domain issues: the entropy-deficit constraint
q is undefined where rho <= 0 or R <= 0, so the density and internal
energy constraints are applied first (against slightly strengthened
floors, see EPS_INTERIOR) and q's factor is computed on the pre-scaled
values and composed multiplicatively.  Two situations fall back to a
fully constant reconstruction (slope annihilated, theta reported 0.0,
the average kept): an average sitting numerically on the region
boundary, and a test value outside the entropy domain of the EOS even
after pre-scaling (possible for energy forms with an energy floor).
Aside from this fallback, theta lies in (0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos.core import EosSpec
from .errors import AverageOutsideRegion, DomainError, InversionFailure
from .region import (
    ConservedState,
    InvariantRegion,
    entropy_total,
    in_invariant_region,
    internal_energy_R,
    membership_mask,
    q_value,
)

#: relative strengthening of the rho/R floors so that pre-scaled values
#: are strictly inside the domain where q is defined
EPS_INTERIOR = 1e-10

#: per-constraint factors below 1 are shrunk by this relative amount so
#: rounding in the affine blend cannot re-cross a constraint boundary
THETA_GUARD = 1e-12

#: scale factor of the tolerance deciding that an average sits on the
#: entropy boundary (relative to rho_avg * (1 + |s0| + |s_avg|))
Q_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class CellPolynomial:
    """Per-cell linear reconstruction with its test values.

    average is the cell mean, slope the componentwise gradient over a
    cell of width dx, and test_values the states at the left
    interface, the midpoint and the right interface (in that order).
    Consistency of the test values with (average, slope, dx) is
    checked at construction.
    """

    average: ConservedState
    slope: np.ndarray
    test_values: tuple[ConservedState, ...]
    dx: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "slope", np.asarray(self.slope, dtype=float))
        object.__setattr__(self, "test_values", tuple(self.test_values))
        avg = _to_vec(self.average)
        if self.slope.shape != avg.shape:
            raise ValueError("slope must have one entry per conserved component")
        offsets = (-0.5 * self.dx, 0.0, 0.5 * self.dx)
        if len(self.test_values) != len(offsets):
            raise ValueError("expected test values at left face, midpoint, right face")
        scale = np.max(np.abs(avg)) + np.max(np.abs(self.slope)) * self.dx + 1e-300
        for val, off in zip(self.test_values, offsets):
            if np.max(np.abs(_to_vec(val) - (avg + off * self.slope))) > 1e-9 * scale:
                raise ValueError("test values inconsistent with average and slope")

    @classmethod
    def build(cls, average: ConservedState, slope, dx: float = 1.0) -> "CellPolynomial":
        """Construct the reconstruction and its test values from a slope."""
        avg = _to_vec(average)
        slope = np.asarray(slope, dtype=float)
        d = average.m.size
        vals = tuple(
            _from_vec(avg + off * slope, d) for off in (-0.5 * dx, 0.0, 0.5 * dx)
        )
        return cls(average=average, slope=slope, test_values=vals, dx=dx)


@dataclass(frozen=True)
class LimiterOutcome:
    """Result of limiting one cell.

    theta is the overall scaling factor, per_constraint_thetas the
    factors attributed to the density, internal energy and entropy
    constraints (so that theta = min(1, *per_constraint_thetas)),
    limited the rescaled polynomial and activated whether anything
    changed.
    """

    theta: float
    per_constraint_thetas: tuple[float, float, float]
    limited: CellPolynomial
    activated: bool


def _to_vec(w: ConservedState) -> np.ndarray:
    return np.concatenate(([w.rho], w.m, [w.E]))

def _from_vec(x: np.ndarray, d: int) -> ConservedState:
    return ConservedState(rho=x[0], m=x[1 : 1 + d], E=x[1 + d])


def constraint_functions(region: InvariantRegion, eos: EosSpec):
    """The three convex constraint functions whose non-positivity
    defines the invariant region, in evaluation order:

        U_rho(w) = -rho
        U_R(w)   = -(E - |m|^2/(2 rho))
        U_q(w)   = rho*(s0 - s)

    These are the plain constraints without numerical floors; the
    limiter itself applies strengthened variants internally.
    """

    def u_rho(w: ConservedState) -> float:
        return -w.rho

    def u_internal_energy(w: ConservedState) -> float:
        return -internal_energy_R(w)

    def u_entropy_deficit(w: ConservedState) -> float:
        return q_value(w, eos, region)

    return (u_rho, u_internal_energy, u_entropy_deficit)


def theta_for_constraint(U, avg: ConservedState, test_values) -> float:
    """Scaling factor for one convex constraint.

    Returns 1 when the constraint already holds at every test value,
    otherwise U(avg) / (U(avg) - U_max), which lies in (0, 1).  The
    average must satisfy the constraint strictly; if not, the scheme
    precondition is broken and AverageOutsideRegion is raised so the
    caller can retry with a smaller time step.
    """
    u_avg = float(U(avg))
    if u_avg >= 0.0:
        raise AverageOutsideRegion(
            f"cell average violates a region constraint (U(avg) = {u_avg})"
        )
    u_max = max(float(U(w)) for w in test_values)
    if u_max <= 0.0:
        return 1.0
    return u_avg / (u_avg - u_max)


def apply_irp_limiter(
    poly: CellPolynomial, eos: EosSpec, region: InvariantRegion
) -> LimiterOutcome:
    """Rescale one cell reconstruction into the invariant region.

    The average is preserved exactly, the limited slope is
    theta * slope, and all limited test values are members of the
    region within its tolerances.
    """
    d = poly.average.m.size
    avg = _to_vec(poly.average)
    pts = np.stack([_to_vec(w) for w in poly.test_values], axis=1)  # (c, k)
    theta, per_constraint, limited_pts = limit_points(
        avg[:, None], pts[:, :, None], d, eos, region
    )
    th = float(theta[0])
    if th == 1.0:
        return LimiterOutcome(
            theta=1.0,
            per_constraint_thetas=(1.0, 1.0, 1.0),
            limited=poly,
            activated=False,
        )
    limited_vals = tuple(_from_vec(limited_pts[:, j, 0], d) for j in range(pts.shape[1]))
    limited = CellPolynomial(
        average=poly.average,
        slope=th * poly.slope,
        test_values=limited_vals,
        dx=poly.dx,
    )
    return LimiterOutcome(
        theta=th,
        per_constraint_thetas=tuple(float(t[0]) for t in per_constraint),
        limited=limited,
        activated=True,
    )


def limiter_distortion(original: CellPolynomial, limited: CellPolynomial) -> float:
    """Largest componentwise change over the test points.

    Equals (1 - theta) times the largest deviation of the original
    reconstruction from its average; the quantity whose smallness
    under refinement expresses that the order of accuracy survives.
    """
    return max(
        float(np.max(np.abs(_to_vec(a) - _to_vec(b))))
        for a, b in zip(original.test_values, limited.test_values)
    )


# -- vectorized core ----------------------------------------------------------


def limit_points(avg, points, d, eos, region):
    """Limit batches of cells given full component arrays.

    avg has shape (c, n) and points (c, k, n) where c = 2 + d is the
    number of conserved components, k the number of test values per
    cell and n the number of cells.  Returns

        theta           (n,) overall factor per cell,
        per_constraint  tuple of three (n,) arrays,
        limited_points  (c, k, n).

    Raises AverageOutsideRegion when any cell average is not a member
    of the region.
    """
    avg = np.asarray(avg, dtype=float)
    points = np.asarray(points, dtype=float)
    c, k, n = points.shape

    red_avg = _reduce(avg, d)  # (3, n)
    red_pts = _reduce(points.reshape(c, k * n), d)  # (3, k*n)

    member_avg = membership_mask(red_avg, eos, region)
    if not member_avg.all():
        i = int(np.argmin(member_avg))
        verdict = in_invariant_region(_from_vec(avg[:, i], d), eos, region)
        raise AverageOutsideRegion(
            f"cell {i} average outside the region (constraint {verdict.violated})"
        )

    theta = np.ones(n)
    th_rho = np.ones(n)
    th_R = np.ones(n)
    th_q = np.ones(n)

    member_pts = membership_mask(red_pts, eos, region).reshape(k, n)
    active = ~member_pts.all(axis=0)
    if not active.any():
        return theta, (th_rho, th_R, th_q), points.copy()

    idx = np.flatnonzero(active)
    a_avg = red_avg[:, idx]  # (3, na)
    a_pts = red_pts.reshape(3, k, n)[:, :, idx]  # (3, k, na)
    scales = eos.reference_scales()

    # density constraint, floor strengthened to keep pre-scaled values
    # strictly positive
    rho_floor = np.maximum(region.eps_rho / scales.v_ref, EPS_INTERIOR * a_avg[0])
    u_avg = rho_floor - a_avg[0]
    u_max = (rho_floor[None, :] - a_pts[0]).max(axis=0)
    t_rho, flat_rho = _theta_one(u_avg, u_max)

    # internal energy constraint
    R_avg = a_avg[2] - 0.5 * a_avg[1] ** 2 / a_avg[0]
    R_pts = a_pts[2] - 0.5 * a_pts[1] ** 2 / np.where(a_pts[0] > 0, a_pts[0], 1.0)
    R_pts = np.where(a_pts[0] > 0, R_pts, -np.inf)
    floor_avg = np.maximum(region.eps_R * scales.e_ref * a_avg[0], EPS_INTERIOR * R_avg)
    floor_pts = np.maximum(
        region.eps_R * scales.e_ref * a_pts[0], EPS_INTERIOR * R_avg[None, :]
    )
    u_avg = floor_avg - R_avg
    u_max = (floor_pts - R_pts).max(axis=0)
    t_R, flat_R = _theta_one(u_avg, u_max)

    # pre-scale, then the entropy-deficit constraint on the result
    t_pre = np.minimum(t_rho, t_R)
    pre = a_avg[:, None, :] + t_pre[None, None, :] * (a_pts - a_avg[:, None, :])

    with np.errstate(all="ignore"):
        v_avg = 1.0 / a_avg[0]
        s_avg = entropy_total(eos, R_avg * v_avg, v_avg)
        q_avg = a_avg[0] * (region.s0 - s_avg) + region.eps_q

        rho_p = pre[0]
        R_p = pre[2] - 0.5 * pre[1] ** 2 / rho_p
        v_p = 1.0 / rho_p
        s_p = entropy_total(eos, R_p * v_p, v_p)
        q_p = rho_p * (region.s0 - s_p) + region.eps_q

    q_max = q_p.max(axis=0)  # nan propagates and is caught below
    q_tol = Q_BOUNDARY_TOL * a_avg[0] * (1.0 + np.abs(region.s0) + np.abs(s_avg))
    on_boundary = q_avg >= -q_tol
    undefined = ~np.isfinite(q_max)
    needs_q = (q_max > 0.0) | undefined

    t_q = np.ones(idx.size)
    formula = needs_q & ~on_boundary & ~undefined
    if formula.any():
        t_q[formula] = (
            q_avg[formula] / (q_avg[formula] - q_max[formula]) * (1.0 - THETA_GUARD)
        )
    flat_q = needs_q & (on_boundary | undefined)

    flatten = flat_rho | flat_R | flat_q
    t_total = np.where(flatten, 0.0, t_pre * t_q)

    theta[idx] = t_total
    th_rho[idx] = np.where(flat_rho, 0.0, t_rho)
    th_R[idx] = np.where(flat_R, 0.0, t_R)
    th_q[idx] = np.where(
        flat_q, 0.0, np.where(t_q < 1.0, t_pre * t_q, 1.0)
    )

    limited = points + (1.0 - theta)[None, None, :] * (avg[:, None, :] - points)
    if flatten.any():
        flat_cells = idx[flatten]
        limited[:, :, flat_cells] = avg[:, None, flat_cells]
    return theta, (th_rho, th_R, th_q), limited


def _reduce(W: np.ndarray, d: int) -> np.ndarray:
    """Collapse (rho, m_1..m_d, E) rows to (rho, |m|, E)."""
    if d == 1:
        return np.stack([W[0], np.abs(W[1]), W[2]])
    mmag = np.sqrt((W[1 : 1 + d] ** 2).sum(axis=0))
    return np.stack([W[0], mmag, W[1 + d]])


def _theta_one(u_avg: np.ndarray, u_max: np.ndarray):
    """Guarded single-constraint factor.

    Two kinds of cell cannot be rescued by any positive rescaling and
    are flagged for the constant-reconstruction fallback: an average
    sitting exactly on the (strengthened) floor with a violating test
    value, and an unboundedly violating test value (u_max = +inf, e.g.
    the internal energy at a non-positive test density).
    """
    violated = u_max > 0.0
    hopeless = violated & ((u_avg >= 0.0) | ~np.isfinite(u_max))
    ok = violated & ~hopeless
    t = np.ones_like(u_avg)
    if ok.any():
        t[ok] = u_avg[ok] / (u_avg[ok] - u_max[ok]) * (1.0 - THETA_GUARD)
    return t, hopeless
