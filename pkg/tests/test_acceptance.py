"""Acceptance suite: one test per criterion, substance asserted first,
then the runtime budget (conftest prints the per-criterion summary).

The finite-difference comparisons use two independent oracle-validity
gates.  First, determinant minors computed from centrally-differenced
entries lose roughly kappa = sum|terms| / |minor| digits to
cancellation, so closed-form/FD agreement is only decisive on states
where kappa is moderate.  Second, the Richardson pair's own
self-consistency |fine - coarse| / 3 bounds the extrapolated stencil's
truncation-plus-roundoff error; states too close to a domain edge for
the step sizes (where higher derivatives blow up) reject themselves
there.  Both gates are computed without the closed forms on the
comparison side, so a transcription defect in the closed forms cannot
hide behind them.  Positivity of the closed-form minors is asserted at
every sampled state regardless.
"""

import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_BUDGETS, TAIT_KW

import irpeuler as ie
from test_limiter import _random_admissible_cells

GAMMA0 = 1.4


def _finish(record_property, criterion, t0):
    elapsed = time.perf_counter() - t0
    record_property("elapsed_s", elapsed)
    budget = ACCEPTANCE_BUDGETS[criterion]
    assert elapsed < budget, (
        f"criterion {criterion} took {elapsed:.2f} s, budget {budget:g} s"
    )


def _poly(gamma0=GAMMA0):
    return ie.PolytropicEos(ie.PolytropicParams(gamma0=gamma0))


def _tait(nu=2.0):
    return ie.TaitEos(ie.TaitParams(**{**TAIT_KW, "nu": nu}))


def _sod(x):
    return (1.0, 0.0, 1.0) if x < 0.5 else (0.125, 0.0, 0.1)


def _double_shock(x):
    return (1.0, 4.0, 1.0) if x < 0.5 else (1.0, -4.0, 1.0)


def _smooth(x):
    return (1.0 + 0.2 * np.sin(2.0 * np.pi * x), 1.0, 1.0)


def _sample_sv(eos, kind, n, rng):
    """Admissible (s, v) samples over the full acceptance state box."""
    take_s = np.empty(0)
    take_v = np.empty(0)
    while take_s.size < n:
        m = 4 * n
        rho = np.exp(rng.uniform(np.log(0.01), np.log(100.0), m))
        v = 1.0 / rho
        if kind == "poly":
            e = np.exp(rng.uniform(np.log(1e-2), np.log(1e3), m))
        else:
            e = eos.energy_floor(v) + np.exp(rng.uniform(np.log(1e-2), np.log(1e2), m))
        with np.errstate(all="ignore"):
            s = ie.entropy_total(eos, e, v)
            ok = np.isfinite(s)
            P = -np.asarray(eos.F_v(np.where(ok, s, 0.0), v), dtype=float)
        ok &= P > 0.0
        take_s = np.concatenate([take_s, s[ok]])
        take_v = np.concatenate([take_v, v[ok]])
    return take_s[:n], take_v[:n]


def _minor_conditioning(H):
    """Cancellation amplification of the 2x2 and 3x3 minors of H."""
    a, b, c = H[0, 0], H[1, 1], H[2, 2]
    ab, ac, bc = H[0, 1], H[0, 2], H[1, 2]
    with np.errstate(all="ignore"):
        kappa_a = (abs(a * b) + ab * ab) / abs(a * b - ab * ab)
        terms = (
            abs(a * b * c), abs(a * bc * bc), abs(ab * ab * c),
            2.0 * abs(ab * bc * ac), abs(ac * b * ac),
        )
        kappa_b = sum(terms) / abs(np.linalg.det(H))
    return float(max(kappa_a, kappa_b))


# -- criteria ----------------------------------------------------------------------


def test_criterion_1_polytropic_dimensionless(record_property):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    for gamma0 in (1.1, 1.4, 5.0 / 3.0, 3.0):
        eos = _poly(gamma0)
        ts = ie.ThermoState(
            s=rng.uniform(-2.0, 2.0, 25),
            v=np.exp(rng.uniform(np.log(0.2), np.log(5.0), 25)),
        )
        dq = ie.dimensionless_quantities(eos, ts)
        expected = (gamma0, gamma0 - 1.0, gamma0 - 1.0, 0.5 * (gamma0 + 1.0))
        got = (dq.gamma, dq.grueneisen, dq.g, dq.fundamental_derivative)
        for name, arr, const in zip(
            ("gamma", "grueneisen", "g", "fundamental_derivative"), got, expected
        ):
            assert np.allclose(arr, const, rtol=1e-12, atol=0.0), (name, gamma0)
    _finish(record_property, 1, t0)


def test_criterion_2_convexity_criterion(record_property):
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    for kind, eos in (("poly", _poly()), ("tait", _tait())):
        s, v = _sample_sv(eos, kind, 10000, rng)
        rep = ie.check_thermo_stability(eos, ie.ThermoState(s=s, v=v))
        for name, flag in (
            ("convexity", rep.convexity_ok),
            ("genuine nonlinearity", rep.genuinely_nonlinear_ok),
            ("pressure-energy bound", rep.pve_bound_ok),
        ):
            bad = int(np.count_nonzero(~np.asarray(flag, dtype=bool)))
            assert bad == 0, f"{kind}: {bad} {name} violations in 10000 samples"
        assert np.all(np.asarray(rep.g, dtype=float) >= 0.0)
        assert np.all(np.asarray(rep.gamma, dtype=float) >= 0.0)
    _finish(record_property, 2, t0)


def test_criterion_3_convexity_minors_vs_fd(record_property):
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    for kind, eos in (("poly", _poly()), ("tait", _tait())):
        n = 10000
        rho = np.exp(rng.uniform(np.log(0.01), np.log(100.0), n))
        u = rng.uniform(-10.0, 10.0, n)
        v = 1.0 / rho
        if kind == "poly":
            e = np.exp(rng.uniform(np.log(1e-2), np.log(1e3), n))
        else:
            e = eos.energy_floor(v) + np.exp(rng.uniform(np.log(1e-2), np.log(1e2), n))
        m = rho * u
        E = rho * e + 0.5 * rho * u * u

        n_gated = 0
        worst = 0.0
        min_eig_scaled = np.inf
        for i in range(n):
            w = ie.ConservedState(rho[i], m[i], E[i])
            minors = ie.q_hessian_minors(w, eos)
            assert minors.q_rr > 0.0 and minors.A > 0.0 and minors.B > 0.0, i

            if _minor_conditioning(ie.q_hessian_matrix(w, eos)) > 30.0:
                continue
            region = ie.InvariantRegion(s0=float(ie.entropy_total(eos, e[i], v[i])))

            def q_of(state, region=region):
                return ie.q_value(state, eos, region)

            try:
                coarse = ie.fd_hessian(q_of, w, h=2e-4)
                fine = ie.fd_hessian(q_of, w, h=1e-4)
            except (ie.DomainError, ie.InversionFailure):
                continue
            Hfd = (4.0 * fine - coarse) / 3.0
            scale = float(np.max(np.abs(Hfd)))
            # a-posteriori validity estimate of the extrapolated stencil:
            # computed purely from the two FD levels, so a defect in the
            # closed forms cannot hide behind it
            if float(np.max(np.abs(fine - coarse))) / 3.0 > 1e-7 * scale:
                continue
            n_gated += 1
            for a, b in (
                (minors.q_rr, Hfd[0, 0]),
                (minors.A, float(np.linalg.det(Hfd[:2, :2]))),
                (minors.B, float(np.linalg.det(Hfd))),
            ):
                worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
            min_eig_scaled = min(
                min_eig_scaled, float(np.linalg.eigvalsh(Hfd)[0]) / scale
            )
        assert n_gated >= 1000, f"{kind}: only {n_gated} well-conditioned states"
        assert worst <= 1e-5, f"{kind}: worst closed-form/FD gap {worst:.3e}"
        assert min_eig_scaled >= -1e-8, f"{kind}: FD min eigenvalue {min_eig_scaled:.3e}"
    _finish(record_property, 3, t0)


def test_criterion_4_limiter_guarantees(record_property):
    t0 = time.perf_counter()
    eos = _poly()

    # (i)-(iii): randomized cell batch
    rng = np.random.default_rng(404)
    n = 10000
    avg, pts, region = _random_admissible_cells(rng, n)
    theta, per, limited = ie.limit_points(avg, pts, 1, eos, region)
    assert ((theta >= 0.0) & (theta <= 1.0)).all()
    assert (theta < 1.0).any()

    face_mean = 0.5 * (limited[:, 0, :] + limited[:, 2, :])
    rel = np.abs(face_mean - avg) / np.maximum(np.abs(avg), 1e-300)
    assert rel.max() <= 1e-13  # (i) averages preserved

    members = ie.membership_mask(limited.reshape(3, -1), eos, region)
    assert members.all()  # (ii) every limited test value inside the region

    # (iii) distortion identity, exact in the single-rounding sense: the
    # applied increments are (1 - theta) * (avg - pts) with one rounding,
    # and their per-cell max norm equals (1 - theta) * max deviation bitwise
    flattened = theta == 0.0
    inc = (1.0 - theta)[None, None, :] * (avg[:, None, :] - pts)
    keep = ~flattened
    assert np.array_equal(limited[:, :, keep], (pts + inc)[:, :, keep])
    if flattened.any():
        assert np.array_equal(
            limited[:, :, flattened],
            np.broadcast_to(avg[:, None, flattened], limited[:, :, flattened].shape),
        )
    dist = np.max(np.abs(inc), axis=(0, 1))
    rhs = (1.0 - theta) * np.max(np.abs(avg[:, None, :] - pts), axis=(0, 1))
    assert np.array_equal(dist, rhs)

    # refinement study: advected density wave, limited second-order scheme
    errors = []
    sizes = (50, 100, 200, 400)
    t_final = 0.4
    for n_cells in sizes:
        grid = ie.Grid1D(n_cells=n_cells, x_min=0.0, x_max=1.0,
                         boundary_kind="periodic")
        config = ie.SolverConfig(t_final=t_final, cfl=0.4, scheme_order="second",
                                 slope_limiter="none", irp_enabled=True)
        report = ie.run(config, grid, _smooth, eos)
        edges = grid.x_min + grid.dx * np.arange(grid.n_cells + 1)
        anti = -0.2 * np.cos(2.0 * np.pi * (edges - t_final)) / (2.0 * np.pi)
        exact_avg = 1.0 + np.diff(anti) / grid.dx
        errors.append(
            grid.dx * np.abs(report.final_state.cell_averages[0] - exact_avg).sum()
        )
    order = np.polyfit(np.log(1.0 / np.asarray(sizes)), np.log(errors), 1)[0]
    assert order >= 1.9, f"observed L1 order {order:.3f} from errors {errors}"
    _finish(record_property, 4, t0)


def test_criterion_5_minimum_entropy_principle(record_property):
    t0 = time.perf_counter()
    eos = _poly()
    runs = (
        (_sod, 0.2),
        (_double_shock, 0.05),
    )
    for data, t_final in runs:
        grid = ie.Grid1D(n_cells=400, x_min=0.0, x_max=1.0)
        config = ie.SolverConfig(t_final=t_final, cfl=0.4)
        report = ie.run(config, grid, data, eos)
        d = report.diagnostics
        assert np.all(np.diff(d.min_entropy) >= -1e-10)
        assert np.all(d.min_density > 0.0)
        assert np.all(d.min_internal_energy > 0.0)
        assert np.all(d.min_entropy > report.region.s0)
        assert np.all((d.min_theta > 0.0) & (d.min_theta <= 1.0))
        assert ie.membership_mask(
            report.final_state.cell_averages, eos, report.region
        ).all()
    # the strong collision actually exercises the limiter
    assert report.diagnostics.min_theta.min() < 1.0
    _finish(record_property, 5, t0)


def test_criterion_6_sod_error_vs_exact(record_property):
    t0 = time.perf_counter()
    eos = _poly()
    grid = ie.Grid1D(n_cells=400, x_min=0.0, x_max=1.0)
    t_final = 0.2
    centers = grid.cell_centers()
    rho_exact, _, _ = ie.exact_riemann_polytropic(
        (1.0, 0.0, 1.0), (0.125, 0.0, 0.1), GAMMA0, (centers - 0.5) / t_final
    )
    l1 = {}
    for order in ("first", "second"):
        config = ie.SolverConfig(t_final=t_final, cfl=0.4, scheme_order=order)
        report = ie.run(config, grid, _sod, eos)
        rho = report.final_state.cell_averages[0]
        l1[order] = grid.dx * float(np.abs(rho - rho_exact).sum())
    assert l1["first"] < 0.02, l1
    assert l1["second"] < l1["first"], l1
    _finish(record_property, 6, t0)


def test_criterion_7_conservation(record_property):
    t0 = time.perf_counter()
    eos = _poly()
    grid = ie.Grid1D(n_cells=50, x_min=0.0, x_max=1.0, boundary_kind="periodic")
    for order in ("first", "second"):
        config = ie.SolverConfig(
            t_final=1e6, cfl=0.4, scheme_order=order, max_steps=1000
        )
        with pytest.raises(ie.MaxStepsExceeded) as excinfo:
            ie.run(config, grid, _smooth, eos)
        d = excinfo.value.report.diagnostics
        assert d.time.size == 1001  # initial row + 1000 steps
        for col in (d.total_mass, d.total_momentum, d.total_energy):
            drift = np.abs(col - col[0]).max() / abs(col[0])
            assert drift < 1e-12, (order, drift)
    _finish(record_property, 7, t0)


def test_criterion_8_tait_runs(record_property):
    t0 = time.perf_counter()

    def data(x):
        return (1.0, 0.0, 5.0) if x < 0.5 else (0.8, 0.0, 1.0)

    for nu in (1.0, 2.0):
        eos = _tait(nu)
        grid = ie.Grid1D(n_cells=100, x_min=0.0, x_max=1.0, boundary_kind="periodic")
        config = ie.SolverConfig(t_final=0.02, cfl=0.4)
        report = ie.run(config, grid, data, eos)
        d = report.diagnostics
        assert abs(report.final_state.time - 0.02) <= 1e-12
        assert np.all(np.diff(d.min_entropy) >= -1e-10)
        assert np.all(d.min_density > 0.0)
        assert np.all(d.min_internal_energy > 0.0)
        assert np.all(d.min_entropy > report.region.s0)
        assert np.all(d.min_fundamental_derivative > 0.0)
        assert ie.membership_mask(
            report.final_state.cell_averages, eos, report.region
        ).all()
        scale = abs(float(d.total_energy[0]))
        for col in (d.total_mass, d.total_momentum, d.total_energy):
            drift = np.abs(col - col[0]).max() / max(abs(float(col[0])), scale)
            assert drift < 1e-12, (nu, drift)
    _finish(record_property, 8, t0)


def test_criterion_9_entropy_inversion_round_trips(record_property):
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    n = 10000
    half = n // 2
    for kind, eos in (("poly", _poly()), ("tait", _tait())):
        # sample away from vanishing pressure / temperature: the Newton
        # paths stop on a scaled residual, so agreement to 1e-11 is only
        # guaranteed where the stopping bound clears that target
        if kind == "poly":
            vv = np.exp(rng.uniform(np.log(0.5), np.log(2.0), 4 * n))
            ss = rng.uniform(-1.0, 3.5, 4 * n)
            keep = -np.asarray(eos.F_v(ss, vv), dtype=float) >= 0.5
            v, s = vv[keep][:n], ss[keep][:n]
            assert v.size == n
        else:
            v = np.exp(rng.uniform(np.log(0.7), np.log(1.4), n))
            s = TAIT_KW["D"] * (v - TAIT_KW["v_r"]) + rng.uniform(1.0, 3.0, n)
        e = np.asarray(eos.F(s, v), dtype=float)
        P = -np.asarray(eos.F_v(s, v), dtype=float)
        denom = np.maximum(np.abs(s), 1.0)

        # closed-form paths, both directions, all samples
        s_ev = np.asarray(eos.entropy_from_ev(e, v), dtype=float)
        assert np.max(np.abs(s_ev - s) / denom) <= 1e-11, kind
        s_pv = np.asarray(eos.entropy_from_pv(P, v), dtype=float)
        assert np.max(np.abs(s_pv - s) / denom) <= 1e-11, kind

        # Newton paths against the closed forms, half the samples each
        for i in range(half):
            s_newton = ie.generic_entropy_from_ev(eos, float(e[i]), float(v[i]))
            assert abs(s_newton - s_ev[i]) <= 1e-11 * denom[i], (kind, i)
        for i in range(half, n):
            s_newton = ie.EosSpec.entropy_from_pv(eos, float(P[i]), float(v[i]))
            assert abs(s_newton - s_pv[i]) <= 1e-11 * denom[i], (kind, i)
    _finish(record_property, 9, t0)
