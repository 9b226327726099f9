"""Run configuration: INI-style parsing, validation and serialization.

A run file has sections [eos], [grid], [solver], [initial_condition]
and optionally [output].  Every key is validated; unknown sections or
keys are rejected with an error naming section.key, so typos fail
loudly instead of silently using a default.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eos.models import PolytropicEos, PolytropicParams, TaitEos, TaitParams
from .errors import ConfigError
from .solver import Grid1D, SolverConfig

_EOS_KEYS = {
    "polytropic": ({"gamma0"}, {"k": 1.0}),
    "tait": (
        {"K_r", "v_r", "p_r", "theta_r", "C", "nu"},
        {"s_r": 0.0, "e_r": 0.0, "D": 0.0},
    ),
}

_IC_KEYS = {
    "riemann": (
        {
            "rho_left", "u_left", "p_left",
            "rho_right", "u_right", "p_right",
            "interface",
        },
        {},
    ),
    "sod": (set(), {}),
    "double_shock": (set(), {}),
    "smooth": (set(), {}),
}

_BOOL_WORDS = {
    "true": True, "yes": True, "on": True, "1": True,
    "false": False, "no": False, "off": False, "0": False,
}


@dataclass(frozen=True)
class RunConfigFile:
    """Validated contents of a run configuration."""

    eos_model: str
    eos_params: dict
    grid: Grid1D
    solver: SolverConfig
    ic_kind: str
    ic_params: dict
    output_directory: str = "."
    snapshot_times: tuple = ()
    prefix: str = "run"
    plots: bool = True

    def build_eos(self):
        if self.eos_model == "polytropic":
            return PolytropicEos(
                PolytropicParams(
                    gamma0=self.eos_params["gamma0"], k=self.eos_params["k"]
                )
            )
        return TaitEos(TaitParams(**self.eos_params))

    def build_initial_data(self):
        """The primitive initial data x -> (rho, u, P) for this run."""
        kind = self.ic_kind
        if kind == "riemann":
            p = self.ic_params
            left = (p["rho_left"], p["u_left"], p["p_left"])
            right = (p["rho_right"], p["u_right"], p["p_right"])
            x0 = p["interface"]

            def riemann_data(x):
                return left if x < x0 else right

            return riemann_data
        if kind == "sod":
            return lambda x: (1.0, 0.0, 1.0) if x < 0.5 else (0.125, 0.0, 0.1)
        if kind == "double_shock":
            return lambda x: (1.0, 4.0, 1.0) if x < 0.5 else (1.0, -4.0, 1.0)
        # smooth: an advecting density wave at uniform velocity and pressure
        return lambda x: (1.0 + 0.2 * np.sin(2.0 * np.pi * x), 1.0, 1.0)


def parse_run_config(text: str, default_prefix: str = "run") -> RunConfigFile:
    """Parse and validate the content of a run configuration file."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", "*", f"not parseable as INI: {exc}") from exc

    known = {"eos", "grid", "solver", "initial_condition", "output"}
    for section in cp.sections():
        if section not in known:
            raise ConfigError(section, "*", "unknown section")
    for section in ("eos", "grid", "solver", "initial_condition"):
        if not cp.has_section(section):
            raise ConfigError(section, "*", "required section missing")

    eos_model, eos_params = _parse_eos(dict(cp["eos"]))
    grid = _parse_grid(dict(cp["grid"]))
    solver = _parse_solver(dict(cp["solver"]))
    ic_kind, ic_params = _parse_ic(dict(cp["initial_condition"]))
    out = dict(cp["output"]) if cp.has_section("output") else {}
    output_directory, snapshot_times, prefix, plots = _parse_output(
        out, solver.t_final, default_prefix
    )
    return RunConfigFile(
        eos_model=eos_model,
        eos_params=eos_params,
        grid=grid,
        solver=solver,
        ic_kind=ic_kind,
        ic_params=ic_params,
        output_directory=output_directory,
        snapshot_times=snapshot_times,
        prefix=prefix,
        plots=plots,
    )


def load_run_config(path) -> RunConfigFile:
    """Read and parse a run configuration file; the file stem becomes
    the default output prefix."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("file", str(path), f"cannot read: {exc}") from exc
    return parse_run_config(text, default_prefix=path.stem)


def serialize_run_config(cfg: RunConfigFile) -> str:
    """Canonical text form; parse(serialize(cfg)) reproduces cfg."""
    lines = ["[eos]", f"model = {cfg.eos_model}"]
    for key in sorted(cfg.eos_params):
        lines.append(f"{key} = {cfg.eos_params[key]!r}")
    lines += [
        "",
        "[grid]",
        f"n_cells = {cfg.grid.n_cells}",
        f"x_min = {cfg.grid.x_min!r}",
        f"x_max = {cfg.grid.x_max!r}",
        f"boundary = {cfg.grid.boundary_kind}",
        "",
        "[solver]",
        f"t_final = {cfg.solver.t_final!r}",
        f"cfl = {cfg.solver.cfl!r}",
        f"scheme_order = {cfg.solver.scheme_order}",
        f"slope_limiter = {cfg.solver.slope_limiter}",
        f"irp_enabled = {'true' if cfg.solver.irp_enabled else 'false'}",
        f"max_steps = {cfg.solver.max_steps}",
        "",
        "[initial_condition]",
        f"kind = {cfg.ic_kind}",
    ]
    for key in sorted(cfg.ic_params):
        lines.append(f"{key} = {cfg.ic_params[key]!r}")
    lines += [
        "",
        "[output]",
        f"directory = {cfg.output_directory}",
        "snapshot_times = " + " ".join(repr(t) for t in cfg.snapshot_times),
        f"prefix = {cfg.prefix}",
        f"plots = {'true' if cfg.plots else 'false'}",
        "",
    ]
    return "\n".join(lines)


# -- section parsers ----------------------------------------------------------


def _number(section: str, key: str, raw: str) -> float:
    try:
        val = float(raw)
    except ValueError:
        raise ConfigError(section, key, f"expected a number, got {raw!r}") from None
    if not np.isfinite(val):
        raise ConfigError(section, key, f"expected a finite number, got {raw!r}")
    return val


def _integer(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(section, key, f"expected an integer, got {raw!r}") from None


def _boolean(section: str, key: str, raw: str) -> bool:
    word = raw.strip().lower()
    if word not in _BOOL_WORDS:
        raise ConfigError(section, key, f"expected true/false, got {raw!r}")
    return _BOOL_WORDS[word]


def _take(section: str, data: dict, key: str) -> str:
    if key not in data:
        raise ConfigError(section, key, "required key missing")
    return data.pop(key)


def _reject_unknown(section: str, data: dict):
    if data:
        key = sorted(data)[0]
        raise ConfigError(section, key, "unknown key")


def _parse_eos(data: dict):
    model = _take("eos", data, "model").strip().lower()
    if model not in _EOS_KEYS:
        raise ConfigError("eos", "model", f"unknown model {model!r}")
    required, optional = _EOS_KEYS[model]
    params = {}
    for key in sorted(required):
        params[key] = _number("eos", key, _take("eos", data, key))
    for key, default in optional.items():
        params[key] = _number("eos", key, data.pop(key)) if key in data else default
    _reject_unknown("eos", data)
    try:
        if model == "polytropic":
            PolytropicParams(gamma0=params["gamma0"], k=params["k"])
        else:
            TaitParams(**params)
    except ValueError as exc:
        raise ConfigError("eos", "model", str(exc)) from None
    return model, params


def _parse_grid(data: dict) -> Grid1D:
    n_cells = _integer("grid", "n_cells", _take("grid", data, "n_cells"))
    x_min = _number("grid", "x_min", _take("grid", data, "x_min"))
    x_max = _number("grid", "x_max", _take("grid", data, "x_max"))
    boundary = data.pop("boundary", "transmissive").strip().lower()
    _reject_unknown("grid", data)
    try:
        return Grid1D(n_cells=n_cells, x_min=x_min, x_max=x_max, boundary_kind=boundary)
    except ValueError as exc:
        raise ConfigError("grid", "*", str(exc)) from None


def _parse_solver(data: dict) -> SolverConfig:
    kwargs = {"t_final": _number("solver", "t_final", _take("solver", data, "t_final"))}
    if "cfl" in data:
        kwargs["cfl"] = _number("solver", "cfl", data.pop("cfl"))
    if "scheme_order" in data:
        kwargs["scheme_order"] = data.pop("scheme_order").strip().lower()
    if "slope_limiter" in data:
        kwargs["slope_limiter"] = data.pop("slope_limiter").strip().lower()
    if "irp_enabled" in data:
        kwargs["irp_enabled"] = _boolean(
            "solver", "irp_enabled", data.pop("irp_enabled")
        )
    if "max_steps" in data:
        kwargs["max_steps"] = _integer("solver", "max_steps", data.pop("max_steps"))
    _reject_unknown("solver", data)
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError("solver", "*", str(exc)) from None


def _parse_ic(data: dict):
    kind = _take("initial_condition", data, "kind").strip().lower()
    if kind not in _IC_KEYS:
        raise ConfigError("initial_condition", "kind", f"unknown kind {kind!r}")
    required, _ = _IC_KEYS[kind]
    params = {}
    for key in sorted(required):
        params[key] = _number(
            "initial_condition", key, _take("initial_condition", data, key)
        )
    _reject_unknown("initial_condition", data)
    if kind == "riemann":
        for key in ("rho_left", "rho_right", "p_left", "p_right"):
            if params[key] <= 0.0:
                raise ConfigError("initial_condition", key, "must be positive")
    return kind, params


def _parse_output(data: dict, t_final: float, default_prefix: str):
    directory = data.pop("directory", ".").strip()
    prefix = data.pop("prefix", default_prefix).strip()
    plots = _boolean("output", "plots", data.pop("plots")) if "plots" in data else True
    if "snapshot_times" in data:
        raw = data.pop("snapshot_times").replace(",", " ").split()
        times = tuple(_number("output", "snapshot_times", tok) for tok in raw)
    else:
        times = (t_final,)
    _reject_unknown("output", data)
    for t in times:
        if t < 0.0 or t > t_final * (1.0 + 1e-9):
            raise ConfigError(
                "output", "snapshot_times", f"time {t} outside [0, t_final]"
            )
    return directory, times, prefix, plots
