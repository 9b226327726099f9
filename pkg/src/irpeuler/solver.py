"""1D finite-volume solver for the compressible Euler equations.

MUSCL reconstruction (componentwise minmod slopes) with local
Lax-Friedrichs fluxes and SSP-RK2 time stepping, hosting the
invariant-region-preserving limiter: each stage reconstructs, rescales
every cell polynomial into the region, and evaluates fluxes on the
limited interface values.  A first-order mode (no reconstruction) is
available as the baseline scheme.

The maximal stable step size for region preservation is not known a
priori, so the solver advances with a CFL-based candidate step and
rejects/halves it whenever the updated cell averages leave the region
(or a flux evaluation hits a nonphysical state), up to ten halvings.
The stage states entering the limiter must be region members; a
violation there is handled by the same rejection path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .eos.core import EosSpec, ThermoState, dimensionless_quantities
from .errors import (
    AverageOutsideRegion,
    InadmissibleInitialData,
    MaxStepsExceeded,
    NonphysicalState,
    StepFailure,
)
from .limiter import CellPolynomial, limit_points
from .region import (
    ConservedState,
    InvariantRegion,
    entropy_total,
    membership_mask,
)

logger = logging.getLogger(__name__)

#: Gauss-Legendre nodes (offsets in units of dx) and weights used for
#: exact cell averaging of the initial data; exact through cubics
_GAUSS_OFFSETS = (-0.5 * np.sqrt(3.0 / 5.0), 0.0, 0.5 * np.sqrt(3.0 / 5.0))
_GAUSS_WEIGHTS = (5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0)

#: relative margin subtracted from the initial entropy floor so the
#: minimizing state itself is a strict region member despite roundoff
_S0_MARGIN = 1e-11

_MAX_HALVINGS = 10

_BOUNDARY_KINDS = ("transmissive", "periodic", "reflective")
_SCHEME_ORDERS = ("first", "second")
_SLOPE_LIMITERS = ("minmod", "none")


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid with a boundary treatment."""

    n_cells: int
    x_min: float
    x_max: float
    boundary_kind: str = "transmissive"

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("n_cells must be a positive integer")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.boundary_kind not in _BOUNDARY_KINDS:
            raise ValueError(
                f"boundary_kind must be one of {_BOUNDARY_KINDS}, got {self.boundary_kind!r}"
            )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def cell_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True)
class SolverConfig:
    """Scheme parameters.

    cfl scales the step below the acoustic limit; for the second-order
    scheme it must not exceed 0.9 so the rejection loop keeps a safety
    margin.  scheme_order 'first' is plain local Lax-Friedrichs,
    'second' is MUSCL + SSP-RK2 with the region limiter when
    irp_enabled.  slope_limiter 'none' uses unlimited central slopes
    (useful for accuracy studies; oscillation control then rests on
    the region limiter alone).
    """

    t_final: float
    cfl: float = 0.4
    scheme_order: str = "second"
    slope_limiter: str = "minmod"
    irp_enabled: bool = True
    max_steps: int = 100000

    def __post_init__(self):
        if not self.t_final > 0.0:
            raise ValueError("t_final must be positive")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.scheme_order not in _SCHEME_ORDERS:
            raise ValueError(f"scheme_order must be one of {_SCHEME_ORDERS}")
        if self.scheme_order == "second" and self.cfl > 0.9:
            raise ValueError("cfl must not exceed 0.9 for the second-order scheme")
        if self.slope_limiter not in _SLOPE_LIMITERS:
            raise ValueError(f"slope_limiter must be one of {_SLOPE_LIMITERS}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be a positive integer")


@dataclass(frozen=True)
class FieldState:
    """Cell averages of the conserved fields at one time level.

    cell_averages has shape (3, n_cells) with rows (rho, m, E); the
    grid is carried along so stepping needs no extra geometry
    argument.
    """

    cell_averages: np.ndarray
    time: float
    step: int
    grid: Grid1D

    def __post_init__(self):
        W = np.asarray(self.cell_averages, dtype=float)
        if W.shape != (3, self.grid.n_cells):
            raise ValueError("cell_averages must have shape (3, n_cells)")
        object.__setattr__(self, "cell_averages", W)

    def cell_states(self) -> list[ConservedState]:
        """The averages as individual states (convenience accessor)."""
        W = self.cell_averages
        return [ConservedState(W[0, i], W[1, i], W[2, i]) for i in range(W.shape[1])]


@dataclass(frozen=True)
class DiagnosticsSeries:
    """Per-step scalar diagnostics of a run (row 0 is the initial state)."""

    time: np.ndarray
    dt: np.ndarray
    min_density: np.ndarray
    min_internal_energy: np.ndarray
    min_entropy: np.ndarray
    total_mass: np.ndarray
    total_momentum: np.ndarray
    total_energy: np.ndarray
    min_theta: np.ndarray
    limited_fraction: np.ndarray
    min_fundamental_derivative: np.ndarray

    COLUMNS = (
        "time",
        "dt",
        "min_density",
        "min_internal_energy",
        "min_entropy",
        "total_mass",
        "total_momentum",
        "total_energy",
        "min_theta",
        "limited_fraction",
        "min_fundamental_derivative",
    )

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.COLUMNS}


@dataclass(frozen=True)
class RunReport:
    """Everything a run produced: final state, region, diagnostics and
    any requested snapshots as (time, FieldState) pairs."""

    final_state: FieldState
    region: InvariantRegion
    diagnostics: DiagnosticsSeries
    snapshots: list = dataclass_field(default_factory=list)


def initialize(grid: Grid1D, initial_data, eos: EosSpec):
    """Project initial primitive data (x -> (rho, u, P)) onto the grid.

    Cell averages are exact for cubic data (3-point Gauss quadrature
    per cell).  The returned region carries the entropy floor s0, the
    minimum of the specific entropy over all quadrature points, pulled
    down by a relative margin of 1e-11 so roundoff cannot place the
    minimizing state outside the region.
    """
    n = grid.n_cells
    centers = grid.cell_centers()
    W = np.zeros((3, n))
    s_min = np.inf
    w_nodes = np.zeros((3, 3))
    for i in range(n):
        for j, (off, _) in enumerate(zip(_GAUSS_OFFSETS, _GAUSS_WEIGHTS)):
            x = centers[i] + off * grid.dx
            rho, u, P = initial_data(x)
            if not (np.isfinite(rho) and np.isfinite(u) and np.isfinite(P)):
                raise InadmissibleInitialData(f"x = {x}: non-finite primitive state")
            if rho <= 0.0 or P <= 0.0:
                raise InadmissibleInitialData(
                    f"x = {x}: need rho > 0 and P > 0, got rho = {rho}, P = {P}"
                )
            v = 1.0 / rho
            s = eos.entropy_from_pv(P, v)
            e = float(eos.F(s, v))
            s_min = min(s_min, float(s))
            w_nodes[:, j] = (rho, rho * u, rho * (e + 0.5 * u * u))
        # written so uniform data averages bit-exactly to itself
        mid = w_nodes[:, 1]
        W[:, i] = mid + _GAUSS_WEIGHTS[0] * (
            (w_nodes[:, 0] - mid) + (w_nodes[:, 2] - mid)
        )
    s0 = s_min - _S0_MARGIN * max(1.0, abs(s_min))
    region = InvariantRegion(s0=s0)
    state = FieldState(cell_averages=W, time=0.0, step=0, grid=grid)
    if not membership_mask(W, eos, region).all():
        raise InadmissibleInitialData("a projected cell average left the region")
    return state, region


def numerical_flux(wL: ConservedState, wR: ConservedState, eos: EosSpec) -> np.ndarray:
    """Local Lax-Friedrichs flux between two interface states.

    0.5*(F(wL) + F(wR)) - 0.5*alpha*(wR - wL) with alpha the largest
    |u| + sound speed of the two states.  Both states are assumed to
    be region members (the caller's responsibility); a nonpositive
    pressure raises NonphysicalState.
    """
    WL = np.array([wL.rho, float(wL.m[0]), wL.E])[:, None]
    WR = np.array([wR.rho, float(wR.m[0]), wR.E])[:, None]
    flux, bad = _llf_flux(WL, WR, eos)
    if bad:
        raise NonphysicalState("interface state has no positive pressure")
    return flux[:, 0]


def muscl_reconstruct(field: FieldState, grid: Grid1D) -> list[CellPolynomial]:
    """Per-cell linear reconstructions with minmod slopes.

    Ghost cells are filled per grid.boundary_kind; the reconstruction
    preserves each cell average by construction.
    """
    Wg = _with_ghosts(field.cell_averages, grid)
    D = _limited_differences(Wg, "minmod")  # (3, n + 2), cells incl. 1 ghost layer
    interior = slice(1, D.shape[1] - 1)
    avgs = Wg[:, 2:-2]
    slopes = D[:, interior] / grid.dx
    return [
        CellPolynomial.build(
            ConservedState(avgs[0, i], avgs[1, i], avgs[2, i]),
            slopes[:, i],
            dx=grid.dx,
        )
        for i in range(avgs.shape[1])
    ]


def step(
    field: FieldState,
    config: SolverConfig,
    eos: EosSpec,
    region: InvariantRegion,
) -> FieldState:
    """Advance one time step (CFL-limited, clipped at t_final).

    The candidate step is rejected and halved, up to ten times,
    whenever the update leaves the invariant region or a flux
    evaluation becomes nonphysical; StepFailure is raised when the
    halvings are exhausted.
    """
    cap = config.t_final - field.time
    new_field, _ = _advance(field, config, eos, region, cap if cap > 0.0 else None)
    return new_field


def run(
    config: SolverConfig,
    grid: Grid1D,
    initial_data,
    eos: EosSpec,
    snapshot_times=(),
) -> RunReport:
    """Run from the projected initial data to t_final.

    Records per-step diagnostics (minima of density, internal energy,
    specific entropy and the fundamental derivative, conservation
    totals, limiter activity) and returns field snapshots at the
    requested times, which the step size is clipped to hit exactly.
    """
    state, region = initialize(grid, initial_data, eos)
    pending = sorted({float(t) for t in snapshot_times})
    for t in pending:
        if t < 0.0 or t > config.t_final * (1.0 + 1e-9):
            raise ValueError(f"snapshot time {t} outside [0, t_final]")

    rows = []
    snapshots = []
    warned_G = False

    def record(st: FieldState, dt: float, min_theta: float, limited_fraction: float):
        nonlocal warned_G
        diag = _field_diagnostics(st, eos, grid)
        if diag["min_fundamental_derivative"] <= 0.0 and not warned_G:
            logger.warning(
                "fundamental derivative reached %g at t = %g: acoustic fields "
                "may lose genuine nonlinearity",
                diag["min_fundamental_derivative"],
                st.time,
            )
            warned_G = True
        rows.append(
            (
                st.time,
                dt,
                diag["min_density"],
                diag["min_internal_energy"],
                diag["min_entropy"],
                diag["total_mass"],
                diag["total_momentum"],
                diag["total_energy"],
                min_theta,
                limited_fraction,
                diag["min_fundamental_derivative"],
            )
        )

    def matches(t: float, target: float) -> bool:
        return abs(t - target) <= 1e-9 * max(1.0, abs(target))

    record(state, 0.0, 1.0, 0.0)
    while pending and matches(state.time, pending[0]):
        snapshots.append((pending.pop(0), state))

    time_tol = 1e-12 * max(1.0, config.t_final)
    while state.time < config.t_final - time_tol:
        if state.step >= config.max_steps:
            report = RunReport(
                final_state=state,
                region=region,
                diagnostics=_build_series(rows),
                snapshots=snapshots,
            )
            raise MaxStepsExceeded(
                f"reached max_steps = {config.max_steps} at t = {state.time} "
                f"(t_final = {config.t_final})",
                report=report,
            )
        next_stop = config.t_final
        if pending:
            next_stop = min(next_stop, pending[0])
        state, stats = _advance(state, config, eos, region, next_stop - state.time)
        record(state, stats["dt"], stats["min_theta"], stats["limited_fraction"])
        while pending and matches(state.time, pending[0]):
            snapshots.append((pending.pop(0), state))

    return RunReport(
        final_state=state,
        region=region,
        diagnostics=_build_series(rows),
        snapshots=snapshots,
    )


# -- internals ----------------------------------------------------------------


class _StageReject(Exception):
    """A flux or stage evaluation hit a nonphysical state; retry smaller."""


def _build_series(rows) -> DiagnosticsSeries:
    arr = np.array(rows, dtype=float).reshape(-1, len(DiagnosticsSeries.COLUMNS))
    return DiagnosticsSeries(**{
        name: arr[:, k] for k, name in enumerate(DiagnosticsSeries.COLUMNS)
    })


def _field_diagnostics(state: FieldState, eos: EosSpec, grid: Grid1D) -> dict:
    W = state.cell_averages
    rho = W[0]
    v = 1.0 / rho
    u = W[1] * v
    e = W[2] * v - 0.5 * u * u
    R = W[0] * e
    with np.errstate(all="ignore"):
        s = entropy_total(eos, e, v)
    out = {
        "min_density": float(rho.min()),
        "min_internal_energy": float(R.min()),
        "min_entropy": float(np.min(s)),
        "total_mass": float(np.sum(W[0]) * grid.dx),
        "total_momentum": float(np.sum(W[1]) * grid.dx),
        "total_energy": float(np.sum(W[2]) * grid.dx),
    }
    try:
        dq = dimensionless_quantities(eos, ThermoState(s=s, v=v))
        G = np.asarray(dq.fundamental_derivative, dtype=float)
        out["min_fundamental_derivative"] = float(np.min(G)) if np.all(
            np.isfinite(G)
        ) else float("nan")
    except Exception:
        out["min_fundamental_derivative"] = float("nan")
    return out


def _with_ghosts(W: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Extend (3, n) interior averages by two ghost layers per side."""
    n = W.shape[1]
    Wg = np.empty((3, n + 4))
    Wg[:, 2:-2] = W
    kind = grid.boundary_kind
    if kind == "transmissive":
        Wg[:, 0] = Wg[:, 1] = W[:, 0]
        Wg[:, -1] = Wg[:, -2] = W[:, -1]
    elif kind == "periodic":
        Wg[:, 0] = W[:, -2] if n > 1 else W[:, 0]
        Wg[:, 1] = W[:, -1]
        Wg[:, -2] = W[:, 0]
        Wg[:, -1] = W[:, 1] if n > 1 else W[:, 0]
    else:  # reflective: mirror the state, flip the momentum
        inner = min(1, n - 1)
        for ghost, src in ((1, 0), (0, inner), (-2, n - 1), (-1, n - 1 - inner)):
            Wg[:, ghost] = W[:, src]
            Wg[1, ghost] = -W[1, src]
    return Wg


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    same = (a * b) > 0.0
    return np.where(same, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def _limited_differences(Wg: np.ndarray, kind: str) -> np.ndarray:
    """Per-cell differences (slope * dx) for all cells except the
    outermost ghost layer."""
    d_minus = Wg[:, 1:-1] - Wg[:, :-2]
    d_plus = Wg[:, 2:] - Wg[:, 1:-1]
    if kind == "minmod":
        return _minmod(d_minus, d_plus)
    return 0.5 * (d_minus + d_plus)


def _llf_flux(WL: np.ndarray, WR: np.ndarray, eos: EosSpec):
    """Batch local Lax-Friedrichs flux for (3, k) face-state arrays.

    Returns (flux, bad) where bad flags any nonphysical input
    (undefined entropy, nonpositive pressure, nonhyperbolic state).
    """

    def side(Wk):
        rho = Wk[0]
        with np.errstate(all="ignore"):
            v = 1.0 / rho
            u = Wk[1] * v
            e = Wk[2] * v - 0.5 * u * u
            s = entropy_total(eos, e, v)
            v_safe = np.where(v > 0, v, 1.0)
            P = -np.asarray(eos.F_v(s, v_safe), dtype=float)
            c2 = np.asarray(eos.F_vv(s, v_safe), dtype=float)
            a = v * np.sqrt(np.where(c2 > 0, c2, np.nan))
        ok = (
            np.all(rho > 0)
            and np.all(np.isfinite(s))
            and np.all(np.isfinite(P))
            and np.all(P > 0)
            and np.all(np.isfinite(a))
        )
        F = np.stack([Wk[1], Wk[1] * u + P, (Wk[2] + P) * u])
        return F, np.abs(u) + a, ok

    FL, sL, okL = side(WL)
    FR, sR, okR = side(WR)
    if not (okL and okR):
        return np.zeros_like(WL), True
    alpha = np.maximum(sL, sR)
    return 0.5 * (FL + FR) - 0.5 * alpha * (WR - WL), False


def _stage_rhs(W: np.ndarray, grid: Grid1D, config: SolverConfig, eos, region):
    """Flux divergence for one forward-Euler stage.

    Returns (dW/dt array (3, n), min_theta, limited_fraction);
    raises _StageReject on nonphysical face states and propagates
    AverageOutsideRegion from the limiter.
    """
    n = W.shape[1]
    Wg = _with_ghosts(W, grid)
    min_theta = 1.0
    limited_fraction = 0.0
    if config.scheme_order == "first":
        faces_L = Wg[:, 1 : n + 2]
        faces_R = Wg[:, 2 : n + 3]
    else:
        D = _limited_differences(Wg, config.slope_limiter)  # cells 1 .. n+2
        avg = Wg[:, 1:-1]
        pts = np.stack([avg - 0.5 * D, avg, avg + 0.5 * D], axis=1)
        if config.irp_enabled:
            theta, _, pts = limit_points(avg, pts, 1, eos, region)
            inner = theta[1:-1]  # attribute statistics to interior cells
            if inner.size:
                min_theta = float(inner.min())
                limited_fraction = float(np.mean(inner < 1.0))
        faces_L = pts[:, 2, :-1]  # right face of the left cell
        faces_R = pts[:, 0, 1:]  # left face of the right cell
    flux, bad = _llf_flux(faces_L, faces_R, eos)
    if bad:
        raise _StageReject
    rhs = -(flux[:, 1:] - flux[:, :-1]) / grid.dx
    return rhs, min_theta, limited_fraction


def _cfl_dt(W: np.ndarray, grid: Grid1D, config: SolverConfig, eos: EosSpec) -> float:
    rho = W[0]
    v = 1.0 / rho
    u = W[1] * v
    e = W[2] * v - 0.5 * u * u
    with np.errstate(all="ignore"):
        s = entropy_total(eos, e, v)
        c2 = np.asarray(eos.F_vv(s, v), dtype=float)
        a = v * np.sqrt(np.where(c2 > 0, c2, np.nan))
        speed = np.abs(u) + a
    if not np.all(np.isfinite(speed)) or not np.all(speed > 0):
        raise StepFailure("cannot set a time step: nonphysical cell averages")
    return config.cfl * grid.dx / float(speed.max())


def _try_dt(W, dt, grid, config, eos, region):
    """One SSP-RK2 (or forward-Euler) attempt; returns the new averages."""
    rhs1, th1, fr1 = _stage_rhs(W, grid, config, eos, region)
    W1 = W + dt * rhs1
    if not membership_mask(W1, eos, region).all():
        raise _StageReject
    if config.scheme_order == "first":
        return W1, th1, fr1
    rhs2, th2, fr2 = _stage_rhs(W1, grid, config, eos, region)
    W2 = 0.5 * (W + W1 + dt * rhs2)
    if not membership_mask(W2, eos, region).all():
        raise _StageReject
    return W2, min(th1, th2), max(fr1, fr2)


def _advance(field: FieldState, config, eos, region, dt_cap):
    dt = _cfl_dt(field.cell_averages, field.grid, config, eos)
    if dt_cap is not None and dt_cap > 0.0:
        dt = min(dt, dt_cap)
    for _ in range(_MAX_HALVINGS + 1):
        try:
            Wnew, min_theta, limited_fraction = _try_dt(
                field.cell_averages, dt, field.grid, config, eos, region
            )
        except (_StageReject, AverageOutsideRegion):
            dt *= 0.5
            continue
        if not np.all(np.isfinite(Wnew)):
            dt *= 0.5
            continue
        new_field = FieldState(
            cell_averages=Wnew,
            time=field.time + dt,
            step=field.step + 1,
            grid=field.grid,
        )
        return new_field, {
            "dt": dt,
            "min_theta": min_theta,
            "limited_fraction": limited_fraction,
        }
    raise StepFailure(
        f"step rejected after {_MAX_HALVINGS} halvings at t = {field.time}"
    )
