"""Command-line front end.

Subcommands:

* solve          run a configured problem, write snapshots, diagnostics
                 and figures
* eos-check      sweep an (s, v) box and report thermodynamic stability
* verify-region  compare closed-form convexity minors against
                 finite-difference Hessians at random states
* riemann-exact  write the exact polytropic Riemann solution profile

Exit codes: 0 success, 1 configuration problem (single-line message on
stderr naming section.key), 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import RunConfigFile, load_run_config
from .eos.core import ThermoState, check_thermo_stability
from .errors import ConfigError, IrpEulerError
from .output import snapshot_table, write_diagnostics, write_snapshot, write_table
from .region import (
    ConservedState,
    InvariantRegion,
    entropy_total,
    q_hessian_matrix,
    q_hessian_minors,
    q_value,
)
from .riemann import exact_riemann_polytropic
from .solver import run
from .verify import fd_hessian

_RIEMANN_KINDS = ("riemann", "sod", "double_shock")


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as configuration errors
    (exit code 1) instead of exiting by itself."""

    def error(self, message):
        raise ConfigError("cli", "arguments", message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="irpeuler", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a configured problem")
    p.add_argument("config", help="run configuration file")
    p.add_argument("--output-dir", help="override the configured output directory")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("eos-check", help="sweep (s, v) stability checks")
    p.add_argument("config", help="configuration file (its [eos] section is used)")
    p.add_argument("--s-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--v-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--samples", type=int, default=25, help="grid points per axis")
    p.add_argument("--output-dir", help="override the configured output directory")
    p.set_defaults(func=_cmd_eos_check)

    p = sub.add_parser(
        "verify-region", help="closed-form vs finite-difference convexity minors"
    )
    p.add_argument("config", help="configuration file (its [eos] section is used)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", help="override the configured output directory")
    p.set_defaults(func=_cmd_verify_region)

    p = sub.add_parser(
        "riemann-exact", help="exact polytropic Riemann solution profile"
    )
    p.add_argument("config", help="run configuration file")
    p.add_argument("--time", type=float, help="sample time (default: t_final)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--output-dir", help="override the configured output directory")
    p.set_defaults(func=_cmd_riemann_exact)
    return parser


def cli_main(argv=None) -> int:
    """Entry point returning the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: config: {_one_line(str(exc))}", file=sys.stderr)
        return 1
    except (IrpEulerError, OSError) as exc:
        print(
            f"error: runtime: {type(exc).__name__}: {_one_line(str(exc))}",
            file=sys.stderr,
        )
        return 2


def main():
    sys.exit(cli_main())


def _one_line(text: str) -> str:
    return " ".join(text.split())


def _out_dir(cfg: RunConfigFile, args) -> Path:
    directory = Path(args.output_dir if args.output_dir else cfg.output_directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


# -- solve ---------------------------------------------------------------------


def _cmd_solve(args) -> int:
    cfg = load_run_config(args.config)
    out = _out_dir(cfg, args)
    eos = cfg.build_eos()
    report = run(
        cfg.solver,
        cfg.grid,
        cfg.build_initial_data(),
        eos,
        snapshot_times=cfg.snapshot_times,
    )
    written = []
    for t, field in report.snapshots:
        path = out / f"{cfg.prefix}_t{t:.6f}.csv"
        write_snapshot(field, eos, report.region, path)
        written.append(path)
        if cfg.plots:
            from .plots import plot_snapshot

            table = snapshot_table(field, eos, report.region)
            exact = _exact_overlay(cfg, t)
            fig_path = path.with_suffix(".png")
            plot_snapshot(table, fig_path, title=f"{cfg.prefix}  t = {t:g}", exact=exact)
            written.append(fig_path)
    diag_path = out / f"{cfg.prefix}_diag.csv"
    write_diagnostics(report.diagnostics, diag_path)
    written.append(diag_path)
    if cfg.plots:
        from .plots import plot_diagnostics

        fig_path = out / f"{cfg.prefix}_diag.png"
        plot_diagnostics(report.diagnostics.as_dict(), fig_path, title=cfg.prefix)
        written.append(fig_path)
    print(
        f"completed {report.final_state.step} steps to t = {report.final_state.time:g}"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _exact_overlay(cfg: RunConfigFile, t: float):
    """Exact Riemann profile for figure overlays, where one exists."""
    if cfg.eos_model != "polytropic" or cfg.ic_kind not in _RIEMANN_KINDS or t <= 0.0:
        return None
    try:
        left, right, x0 = _riemann_setup(cfg)
        x = np.linspace(cfg.grid.x_min, cfg.grid.x_max, 800)
        rho, u, P = exact_riemann_polytropic(
            left, right, cfg.eos_params["gamma0"], (x - x0) / t
        )
        return {"x": x, "rho": rho, "u": u, "P": P}
    except IrpEulerError:
        return None


def _riemann_setup(cfg: RunConfigFile):
    if cfg.ic_kind == "riemann":
        p = cfg.ic_params
        return (
            (p["rho_left"], p["u_left"], p["p_left"]),
            (p["rho_right"], p["u_right"], p["p_right"]),
            p["interface"],
        )
    if cfg.ic_kind == "sod":
        return (1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 0.5
    return (1.0, 4.0, 1.0), (1.0, -4.0, 1.0), 0.5  # double_shock


# -- eos-check -----------------------------------------------------------------


def _load_config_for_tools(path: str) -> RunConfigFile:
    """Full run config, or a minimal stand-in when only [eos] is given."""
    try:
        return load_run_config(path)
    except ConfigError as exc:
        if "required section missing" not in str(exc):
            raise
    import configparser

    from .config import _parse_eos  # shared validation
    from .solver import Grid1D, SolverConfig

    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read(path)
    if not cp.has_section("eos"):
        raise ConfigError("eos", "*", "required section missing")
    model, params = _parse_eos(dict(cp["eos"]))
    return RunConfigFile(
        eos_model=model,
        eos_params=params,
        grid=Grid1D(n_cells=1, x_min=0.0, x_max=1.0),
        solver=SolverConfig(t_final=1.0),
        ic_kind="sod",
        ic_params={},
        prefix=Path(path).stem,
    )


def _cmd_eos_check(args) -> int:
    cfg = _load_config_for_tools(args.config)
    out = _out_dir(cfg, args)
    eos = cfg.build_eos()
    scales = eos.reference_scales()
    s_center = cfg.eos_params.get("s_r", 0.0)
    s_lo, s_hi = args.s_range if args.s_range else (s_center - 1.0, s_center + 1.0)
    v_lo, v_hi = args.v_range if args.v_range else (
        0.5 * scales.v_ref,
        2.0 * scales.v_ref,
    )
    n = max(2, args.samples)
    s_grid, v_grid = np.meshgrid(
        np.linspace(s_lo, s_hi, n), np.linspace(v_lo, v_hi, n), indexing="ij"
    )
    s_flat, v_flat = s_grid.ravel(), v_grid.ravel()
    admissible = np.asarray(eos.admissible_domain(s_flat, v_flat), dtype=bool)
    s_ok, v_ok = s_flat[admissible], v_flat[admissible]
    if s_ok.size == 0:
        print("no admissible states in the requested box", file=sys.stderr)
        return 2
    rep = check_thermo_stability(eos, ThermoState(s=s_ok, v=v_ok))
    table = {
        "s": s_ok,
        "v": v_ok,
        "gamma": rep.gamma,
        "grueneisen": rep.grueneisen,
        "g": rep.g,
        "fundamental_derivative": rep.fundamental_derivative,
        "convexity_ok": np.asarray(rep.convexity_ok, dtype=float),
        "hyperbolic_ok": np.asarray(rep.hyperbolic_ok, dtype=float),
        "genuinely_nonlinear_ok": np.asarray(rep.genuinely_nonlinear_ok, dtype=float),
        "pve_bound_ok": np.asarray(rep.pve_bound_ok, dtype=float),
        "temperature_positive": np.asarray(rep.temperature_positive, dtype=float),
    }
    path = out / f"{cfg.prefix}_eoscheck.csv"
    write_table(path, tuple(table.keys()), table)
    fig_path = None
    if cfg.plots:
        from .plots import plot_stability_map

        fig_path = out / f"{cfg.prefix}_eoscheck.png"
        plot_stability_map(
            {k: np.asarray(v, dtype=float) for k, v in table.items()},
            fig_path,
            title=f"{cfg.eos_model} stability sweep",
        )
    n_all = s_flat.size
    n_adm = s_ok.size
    all_convex = bool(np.all(np.asarray(rep.convexity_ok, dtype=bool)))
    print(
        f"checked {n_all} states, {n_adm} admissible, "
        f"convexity_ok on all admissible: {'yes' if all_convex else 'NO'}"
    )
    print(f"wrote {path}")
    if fig_path is not None:
        print(f"wrote {fig_path}")
    return 0


# -- verify-region -------------------------------------------------------------


def _sample_states(cfg: RunConfigFile, eos, n: int, rng) -> list[ConservedState]:
    """Random conserved states strictly inside {rho > 0, R > 0} and the
    EOS domain, comfortable enough for finite-difference stencils."""
    states = []
    v_ref = eos.reference_scales().v_ref
    while len(states) < n:
        k = 4 * (n - len(states))
        if cfg.eos_model == "polytropic":
            v = np.exp(rng.uniform(np.log(0.02), np.log(50.0), k)) * v_ref
            s = rng.uniform(-1.0, 2.0, k)
        else:
            p = cfg.eos_params
            v = np.exp(rng.uniform(np.log(0.6), np.log(1.4), k)) * p["v_r"]
            x = p["C"] * p["theta_r"] * rng.uniform(-0.5, 3.0, k)
            s = p["s_r"] + p["D"] * (v - p["v_r"]) + x
        ok = np.asarray(eos.admissible_domain(s, v), dtype=bool)
        e = np.where(ok, eos.F(np.where(ok, s, 0.0), np.where(ok, v, v_ref)), -1.0)
        ok &= np.asarray(e, dtype=float) > 0.0
        u = rng.uniform(-10.0, 10.0, k)
        for i in np.flatnonzero(ok):
            rho = 1.0 / v[i]
            m = rho * u[i]
            E = rho * e[i] + 0.5 * rho * u[i] ** 2
            states.append(ConservedState(rho=rho, m=m, E=E))
            if len(states) == n:
                break
    return states


_KAPPA_GATE = 30.0  # minor cancellation factor up to which FD comparison is meaningful


def _minor_conditioning(H: np.ndarray) -> float:
    """How much cancellation the leading minors of H suffer.

    Returns the larger of sum(|terms|)/|value| for the 2x2 and 3x3
    minors.  Central differences carry a small relative error on each
    entry; the minors amplify it by roughly this factor, so comparisons
    against closed forms are only decisive when it is moderate.
    """
    a, b, c = H[0, 0], H[1, 1], H[2, 2]
    ab, ac, bc = H[0, 1], H[0, 2], H[1, 2]
    kappa_a = (abs(a * b) + ab * ab) / abs(a * b - ab * ab)
    terms = (
        abs(a * b * c), abs(a * bc * bc), abs(ab * ab * c),
        2.0 * abs(ab * bc * ac), abs(ac * b * ac),
    )
    kappa_b = sum(terms) / abs(np.linalg.det(H))
    return float(max(kappa_a, kappa_b))


def _cmd_verify_region(args) -> int:
    cfg = _load_config_for_tools(args.config)
    out = _out_dir(cfg, args)
    eos = cfg.build_eos()
    rng = np.random.default_rng(args.seed)
    states = _sample_states(cfg, eos, max(1, args.samples), rng)

    rows = {key: [] for key in (
        "rho", "m", "E",
        "q_rr", "minor2", "det",
        "fd_q_rr", "fd_minor2", "fd_det",
        "kappa", "max_rel_diff",
    )}
    skipped = 0
    for w in states:
        minors = q_hessian_minors(w, eos)
        v = 1.0 / w.rho
        e = (w.E - 0.5 * float(w.m_mag) ** 2 / w.rho) / w.rho
        s_w = float(entropy_total(eos, e, v))
        # centring the deficit at the state keeps |q| small on the
        # stencil, so second differences are not drowned by roundoff
        region_w = InvariantRegion(s0=s_w)

        def q_of(state, region=region_w):
            return q_value(state, eos, region)

        try:
            H = fd_hessian(q_of, w)
        except IrpEulerError:
            skipped += 1
            continue
        fd1 = H[0, 0]
        fd2 = np.linalg.det(H[:2, :2])
        fd3 = np.linalg.det(H)
        diffs = [
            abs(a - b) / max(abs(a), abs(b), 1e-300)
            for a, b in ((minors.q_rr, fd1), (minors.A, fd2), (minors.B, fd3))
        ]
        for key, val in zip(rows, (
            w.rho, float(w.m[0]), w.E,
            minors.q_rr, minors.A, minors.B,
            fd1, fd2, fd3,
            _minor_conditioning(q_hessian_matrix(w, eos)),
            max(diffs),
        )):
            rows[key].append(val)
    table = {k: np.asarray(v, dtype=float) for k, v in rows.items()}
    path = out / f"{cfg.prefix}_verify.csv"
    write_table(path, tuple(table.keys()), table)
    fig_path = None
    if cfg.plots:
        from .plots import plot_minor_comparison

        fig_path = out / f"{cfg.prefix}_verify.png"
        plot_minor_comparison(table, fig_path,
                              title=f"{cfg.eos_model} convexity minors")
    n_done = table["rho"].size
    min_minor = (
        min(table["q_rr"].min(), table["minor2"].min(), table["det"].min())
        if n_done
        else float("nan")
    )
    gated = table["kappa"] <= _KAPPA_GATE if n_done else np.zeros(0, dtype=bool)
    worst = float(table["max_rel_diff"][gated].max()) if gated.any() else float("nan")
    print(
        f"verified {n_done} states ({skipped} skipped near the domain boundary): "
        f"min minor = {min_minor:.3e}; on {int(gated.sum())} well-conditioned "
        f"states worst closed-form/FD relative gap = {worst:.3e}"
    )
    print(f"wrote {path}")
    if fig_path is not None:
        print(f"wrote {fig_path}")
    if n_done == 0 or min_minor <= 0.0 or not gated.any() or worst > 1e-4:
        print("error: runtime: convexity verification failed", file=sys.stderr)
        return 2
    return 0


# -- riemann-exact -------------------------------------------------------------


def _cmd_riemann_exact(args) -> int:
    cfg = load_run_config(args.config)
    out = _out_dir(cfg, args)
    if cfg.eos_model != "polytropic":
        raise ConfigError("eos", "model", "exact solver supports polytropic only")
    if cfg.ic_kind not in _RIEMANN_KINDS:
        raise ConfigError(
            "initial_condition", "kind", "exact solver needs Riemann-type data"
        )
    t = args.time if args.time is not None else cfg.solver.t_final
    if not t > 0.0:
        raise ConfigError("cli", "time", "sample time must be positive")
    left, right, x0 = _riemann_setup(cfg)
    x = np.linspace(cfg.grid.x_min, cfg.grid.x_max, max(2, args.samples))
    rho, u, P = exact_riemann_polytropic(
        left, right, cfg.eos_params["gamma0"], (x - x0) / t
    )
    table = {"x": x, "rho": rho, "u": u, "P": P}
    path = out / f"{cfg.prefix}_exact_t{t:.6f}.csv"
    write_table(path, ("x", "rho", "u", "P"), table)
    print(f"wrote {path}")
    if cfg.plots:
        from .plots import plot_profiles

        fig_path = path.with_suffix(".png")
        plot_profiles(
            table,
            fig_path,
            keys=("rho", "u", "P"),
            title=f"exact solution  t = {t:g}",
        )
        print(f"wrote {fig_path}")
    return 0


if __name__ == "__main__":
    main()
