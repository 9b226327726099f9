"""Run-configuration parsing/serialization and the delimited writers."""

import numpy as np
import pytest

import irpeuler as ie

GOOD_CFG = """\
[eos]
model = polytropic
gamma0 = 1.4

[grid]
n_cells = 100
x_min = 0.0
x_max = 1.0
boundary = transmissive

[solver]
t_final = 0.2
cfl = 0.4
scheme_order = second
slope_limiter = minmod
irp_enabled = true

[initial_condition]
kind = sod

[output]
directory = out
snapshot_times = 0.1 0.2
prefix = sod
plots = false
"""

TAIT_CFG = """\
[eos]
model = tait
K_r = 10.0
v_r = 1.0
p_r = 1.0
theta_r = 1.0
C = 1.0
nu = 2.0
D = 0.5
e_r = 1.0

[grid]
n_cells = 50
x_min = 0.0
x_max = 1.0

[solver]
t_final = 0.05

[initial_condition]
kind = riemann
rho_left = 1.25
u_left = 0.0
p_left = 5.0
rho_right = 0.8
u_right = 0.0
p_right = 1.0
interface = 0.5
"""


# -- parsing ---------------------------------------------------------------------


def test_parse_good_config():
    cfg = ie.parse_run_config(GOOD_CFG)
    assert cfg.eos_model == "polytropic"
    assert cfg.eos_params == {"gamma0": 1.4, "k": 1.0}
    assert cfg.grid.n_cells == 100
    assert cfg.grid.boundary_kind == "transmissive"
    assert cfg.solver.t_final == 0.2
    assert cfg.solver.irp_enabled is True
    assert cfg.ic_kind == "sod"
    assert cfg.snapshot_times == (0.1, 0.2)
    assert cfg.prefix == "sod"
    assert cfg.plots is False


def test_parse_tait_config_with_defaults():
    cfg = ie.parse_run_config(TAIT_CFG)
    assert cfg.eos_model == "tait"
    assert cfg.eos_params["s_r"] == 0.0  # optional key default
    assert cfg.eos_params["D"] == 0.5
    assert cfg.ic_kind == "riemann"
    assert cfg.snapshot_times == (0.05,)  # defaults to t_final
    assert cfg.plots is True
    eos = cfg.build_eos()
    assert isinstance(eos, ie.TaitEos)
    data = cfg.build_initial_data()
    assert data(0.2) == (1.25, 0.0, 5.0)
    assert data(0.7) == (0.8, 0.0, 1.0)


def test_build_initial_data_presets():
    for kind, at_low, at_high in (
        ("sod", (1.0, 0.0, 1.0), (0.125, 0.0, 0.1)),
        ("double_shock", (1.0, 4.0, 1.0), (1.0, -4.0, 1.0)),
    ):
        text = GOOD_CFG.replace("kind = sod", f"kind = {kind}")
        data = ie.parse_run_config(text).build_initial_data()
        assert data(0.25) == at_low
        assert data(0.75) == at_high
    smooth = ie.parse_run_config(
        GOOD_CFG.replace("kind = sod", "kind = smooth")
    ).build_initial_data()
    rho, u, P = smooth(0.25)
    assert np.isclose(rho, 1.2, rtol=1e-12) and u == 1.0 and P == 1.0


@pytest.mark.parametrize(
    "mutate,section,key",
    [
        (lambda t: t.replace("[grid]", "[mesh]"), "mesh", "*"),
        (lambda t: t.replace("gamma0 = 1.4", "gamma0 = 1.4\nzeta = 2"), "eos", "zeta"),
        (lambda t: t.replace("gamma0 = 1.4\n", ""), "eos", "gamma0"),
        (lambda t: t.replace("t_final = 0.2", "t_final = soon"), "solver", "t_final"),
        (lambda t: t.replace("n_cells = 100", "n_cells = ten"), "grid", "n_cells"),
        (
            lambda t: t.replace("snapshot_times = 0.1 0.2", "snapshot_times = 0.3"),
            "output",
            "snapshot_times",
        ),
        (lambda t: t.replace("plots = false", "plots = maybe"), "output", "plots"),
        (lambda t: t.replace("model = polytropic", "model = stiffened"), "eos", "model"),
    ],
)
def test_parse_errors_name_section_and_key(mutate, section, key):
    with pytest.raises(ie.ConfigError) as excinfo:
        ie.parse_run_config(mutate(GOOD_CFG))
    assert excinfo.value.section == section
    assert excinfo.value.key == key
    assert f"{section}.{key}" in str(excinfo.value)


def test_parse_rejects_invalid_parameter_values():
    with pytest.raises(ie.ConfigError):
        ie.parse_run_config(GOOD_CFG.replace("gamma0 = 1.4", "gamma0 = 1.0"))
    with pytest.raises(ie.ConfigError):
        ie.parse_run_config(GOOD_CFG.replace("cfl = 0.4", "cfl = 1.5"))
    # riemann data with a non-positive density
    text = TAIT_CFG.replace("rho_left = 1.25", "rho_left = 0.0")
    with pytest.raises(ie.ConfigError) as excinfo:
        ie.parse_run_config(text)
    assert excinfo.value.key == "rho_left"


def test_load_run_config_missing_file_is_config_error(tmp_path):
    with pytest.raises(ie.ConfigError):
        ie.load_run_config(tmp_path / "absent.cfg")


def test_load_run_config_uses_stem_as_default_prefix(tmp_path):
    path = tmp_path / "myrun.cfg"
    text = GOOD_CFG.replace("prefix = sod\n", "")
    path.write_text(text)
    assert ie.load_run_config(path).prefix == "myrun"


def test_serialize_parse_round_trip_is_idempotent():
    for text in (GOOD_CFG, TAIT_CFG):
        canonical = ie.serialize_run_config(ie.parse_run_config(text))
        again = ie.serialize_run_config(ie.parse_run_config(canonical))
        assert again == canonical
        assert ie.parse_run_config(canonical) == ie.parse_run_config(text)


# -- writers ---------------------------------------------------------------------


def _small_run(tmp_path, poly_eos):
    grid = ie.Grid1D(n_cells=4, x_min=0.0, x_max=1.0)
    state, region = ie.initialize(grid, lambda x: (1.0, 0.0, 1.0), poly_eos)
    return state, region


def test_write_snapshot_four_cells_five_lines(tmp_path, poly_eos):
    state, region = _small_run(tmp_path, poly_eos)
    path = tmp_path / "snap.csv"
    ie.write_snapshot(state, poly_eos, region, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0] == "x,rho,u,P,e,s,q,in_sigma"


def test_snapshot_table_uniform_values(poly_eos):
    grid = ie.Grid1D(n_cells=4, x_min=0.0, x_max=1.0)
    state, region = ie.initialize(grid, lambda x: (1.0, 0.0, 1.0), poly_eos)
    table = ie.snapshot_table(state, poly_eos, region)
    assert np.allclose(table["rho"], 1.0, rtol=1e-14)
    assert np.allclose(table["u"], 0.0, atol=1e-15)
    assert np.allclose(table["P"], 1.0, rtol=1e-13)
    assert np.allclose(table["e"], 2.5, rtol=1e-13)
    assert np.allclose(table["s"], 0.9162907318741551, rtol=1e-12)
    # the floor sits 1e-11 under the uniform entropy, so q = -1e-11 rho
    assert np.allclose(table["q"], -1e-11, rtol=1e-3)
    assert np.all(table["in_sigma"] == 1.0)


def test_write_read_round_trip_is_bit_exact(tmp_path, poly_eos, rng):
    columns = ("alpha", "beta")
    table = {
        "alpha": rng.standard_normal(37) * 10.0 ** rng.integers(-12, 12, 37),
        "beta": rng.standard_normal(37),
    }
    path = tmp_path / "table.csv"
    ie.output.write_table(path, columns, table)
    back = ie.read_table(path)
    assert set(back) == set(columns)
    assert np.array_equal(back["alpha"], table["alpha"])
    assert np.array_equal(back["beta"], table["beta"])


def test_snapshot_round_trip_bit_exact(tmp_path, poly_eos):
    grid = ie.Grid1D(n_cells=25, x_min=0.0, x_max=1.0)
    config = ie.SolverConfig(t_final=0.02, cfl=0.4)
    report = ie.run(
        config, grid, lambda x: (1.0, 0.0, 1.0) if x < 0.5 else (0.125, 0.0, 0.1),
        poly_eos,
    )
    table = ie.snapshot_table(report.final_state, poly_eos, report.region)
    path = tmp_path / "snap.csv"
    ie.write_snapshot(report.final_state, poly_eos, report.region, path)
    back = ie.read_table(path)
    for name in ie.output.SNAPSHOT_COLUMNS:
        assert np.array_equal(back[name], np.asarray(table[name], dtype=float)), name


def test_write_snapshot_refuses_nonfinite(tmp_path, poly_eos):
    grid = ie.Grid1D(n_cells=2, x_min=0.0, x_max=1.0)
    # a state whose entropy is undefined produces nan columns
    W = np.array([[1.0, 1.0], [0.0, 3.0], [2.5, 2.5]])
    state = ie.FieldState(cell_averages=W, time=0.0, step=0, grid=grid)
    region = ie.InvariantRegion(s0=0.0)
    with pytest.raises(ValueError, match="non-finite"):
        ie.write_snapshot(state, poly_eos, region, tmp_path / "bad.csv")


def test_write_diagnostics_allows_nan(tmp_path, poly_eos):
    grid = ie.Grid1D(n_cells=8, x_min=0.0, x_max=1.0)
    config = ie.SolverConfig(t_final=0.01, cfl=0.4)
    report = ie.run(config, grid, lambda x: (1.0, 0.0, 1.0), poly_eos)
    path = tmp_path / "diag.csv"
    ie.write_diagnostics(report.diagnostics, path)
    back = ie.read_table(path)
    assert list(back) == list(ie.DiagnosticsSeries.COLUMNS)
    assert np.array_equal(back["time"], report.diagnostics.time)
    assert np.array_equal(back["total_mass"], report.diagnostics.total_mass)
