"""Config parsing/validation, CSV round trips and the command line."""
import numpy as np
import pytest

from layerflow import cli
from layerflow.errors import ConfigError, SolverAbort
from layerflow.geometry import LayerPartition
from layerflow.gridops import Grid
from layerflow.output import (ENERGY_COLUMNS, Snapshot, read_energy_series,
                              read_snapshot, snapshot_header, write_energy_series,
                              write_snapshot)
from layerflow.scenario import (ControlsSpec, InitSpec, LayersSpec, MeshSpec,
                                PhysicsSpec, Scenario, bathymetry_values,
                                format_scenario, initial_fields, parse_scenario)
from layerflow.timeloop import run

GOLDEN = """
# layered dam break demo
mesh.x_min = -1.0
mesh.x_max = 3.0
mesh.n_cells = 80
boundary.kind = wall
layers.n = 2
layers.fractions = 0.3, 0.7
bathymetry.kind = slope
bathymetry.z0 = -0.6
bathymetry.s = 0.05
init.kind = dam_break
init.eta_l = 0.4          # upstream surface
init.eta_r = 0.1
init.x0 = 0.5
physics.g = 9.81
physics.mu = 0.003
physics.k_l = 0.02
physics.placement = layer
controls.cfl = 0.45
controls.t_end = 0.8
controls.integrator = forward-euler
output.directory = results
output.snapshot_every = 0.2
"""


def test_parse_golden_config():
    scn = parse_scenario(GOLDEN)
    assert scn.mesh == MeshSpec(-1.0, 3.0, 80)
    assert scn.boundary == "wall"
    assert scn.layers.fractions == (0.3, 0.7)
    assert scn.bathymetry.kind == "slope"
    assert scn.init.eta_l == 0.4
    assert scn.physics.placement == "layer"
    assert scn.physics.mu == 0.003
    assert scn.controls.integrator == "forward-euler"
    assert scn.output.directory == "results"


def test_parse_reports_every_problem_with_lines():
    text = """mesh.x_min = 0
mesh.x_max = oops
mesh.n_cells = 50
boundary.kind = periodic
what even is this line
bogus.key = 3
init.kind = lake_at_rest
init.eta0 = 1
mesh.x_min = 2
"""
    with pytest.raises(ConfigError) as err:
        parse_scenario(text)
    msg = str(err.value)
    assert "line 2" in msg and "malformed float" in msg
    assert "line 5" in msg and "expected 'section.key = value'" in msg
    assert "line 6" in msg and "unknown key" in msg
    assert "line 9" in msg and "duplicate key" in msg
    assert "physics.g: required key is missing" in msg


def test_validation_catches_semantic_errors():
    text = """mesh.x_min = 0
mesh.x_max = 1
mesh.n_cells = 2
boundary.kind = slippery
layers.n = 2
layers.fractions = 0.5, 0.6
init.kind = shear
physics.g = -9.81
physics.solver = sv1
controls.cfl = 1.5
"""
    with pytest.raises(ConfigError) as err:
        parse_scenario(text)
    msg = str(err.value)
    assert "at least 3 cells" in msg
    assert "unknown boundary" in msg
    assert "fractions sum to 1.1" in msg
    assert "init.u: required" in msg
    assert "gravity must be positive" in msg
    assert "sv1 requires layers.n = 1" in msg
    assert "cfl must lie in (0, 1]" in msg
    # the offending line is cited when the key appeared in the file
    assert "(line 10)" in msg


def _random_scenario(rng) -> Scenario:
    N = int(rng.integers(1, 5))
    fr = rng.uniform(0.2, 1.0, N)
    fr = fr / fr.sum()
    return Scenario(
        mesh=MeshSpec(float(rng.uniform(-3, 0)), float(rng.uniform(1, 4)),
                      int(rng.integers(3, 200))),
        boundary=str(rng.choice(["periodic", "wall", "transmissive"])),
        layers=LayersSpec(n=N, fractions=tuple(float(v) for v in fr)),
        init=InitSpec(kind="lake_at_rest", eta0=float(rng.uniform(0.5, 2.0))),
        physics=PhysicsSpec(g=float(rng.uniform(1, 20)),
                            mu=float(10.0 ** rng.uniform(-4, -1)),
                            k_l=float(rng.uniform(0, 1)),
                            placement=str(rng.choice(["interface", "layer"]))),
        controls=ControlsSpec(cfl=float(rng.uniform(0.1, 1.0)),
                              t_end=float(rng.uniform(0.01, 5.0))),
    )


def test_format_parse_round_trip():
    rng = np.random.default_rng(73)
    for _ in range(25):
        scn = _random_scenario(rng)
        text = format_scenario(scn)
        back = parse_scenario(text)
        assert back == scn
        assert format_scenario(back) == text


def test_initial_fields_clip_dry_columns():
    from layerflow.scenario import BathymetrySpec

    scn = Scenario(
        mesh=MeshSpec(0.0, 1.0, 50),
        layers=LayersSpec(n=2),
        bathymetry=BathymetrySpec(kind="bump", a=2.0, x0=0.5, width=0.1),
        init=InitSpec(kind="lake_at_rest", eta0=1.0),
        physics=PhysicsSpec(g=9.81),
    )
    grid = scn.grid()
    zb = bathymetry_values(scn, grid)
    H, q = initial_fields(scn, grid, scn.partition(), zb)
    assert (H >= 0.0).all()
    dry = zb >= 1.0
    assert dry.any()
    assert (H[dry] == 0.0).all()
    assert (q[:, dry] == 0.0).all()


def test_initial_fields_table_layout():
    # u_values lists layer 1 across all cells, then layer 2
    scn = Scenario(
        mesh=MeshSpec(0.0, 1.0, 3),
        layers=LayersSpec(n=2),
        init=InitSpec(kind="table",
                      H_values=(1.0, 2.0, 4.0),
                      u_values=(1.0, 2.0, 3.0, 10.0, 20.0, 30.0)),
        physics=PhysicsSpec(g=9.81),
    )
    grid = scn.grid()
    H, q = initial_fields(scn, grid, scn.partition(), np.zeros(3))
    part = LayerPartition.uniform(2)
    assert np.allclose(q[0], 0.5 * H * np.array([1.0, 2.0, 3.0]))
    assert np.allclose(q[1], 0.5 * H * np.array([10.0, 20.0, 30.0]))


def test_snapshot_round_trip(tmp_path):
    rng = np.random.default_rng(79)
    N, n = 3, 12
    snap = Snapshot(
        t=0.62519,
        x=np.linspace(0, 1, n),
        zb=rng.standard_normal(n),
        H=rng.uniform(0, 2, n),
        eta=rng.standard_normal(n),
        u=rng.standard_normal((N, n)),
        w=rng.standard_normal((N, n)),
        G=rng.standard_normal((N - 1, n)),
        p=rng.uniform(0, 5, (N, n)),
        E=rng.standard_normal((N, n)),
    )
    path = tmp_path / "snap.csv"
    write_snapshot(path, snap)
    t, names, table = read_snapshot(path)
    assert t == snap.t
    assert names == snapshot_header(N)
    assert table.shape == (n, len(names))
    # 17 significant digits reproduce doubles exactly
    assert (table[:, 0] == snap.x).all()
    assert (table[:, 4] == snap.u[0]).all()
    assert (table[:, 4 + N] == snap.w[0]).all()
    assert (table[:, 4 + 2 * N] == snap.G[0]).all()
    assert (table[:, -1] == snap.E[-1]).all()


def test_energy_series_round_trip(tmp_path):
    scn = Scenario(
        mesh=MeshSpec(0.0, 1.0, 30),
        layers=LayersSpec(n=2),
        init=InitSpec(kind="dam_break", eta_l=1.0, eta_r=0.7, x0=0.5),
        physics=PhysicsSpec(g=9.81),
        controls=ControlsSpec(t_end=0.02),
    )
    result = run(scn)
    path = tmp_path / "energy.csv"
    write_energy_series(path, result)
    names, rows = read_energy_series(path)
    assert names == ENERGY_COLUMNS
    assert rows.shape == (result.times.size, 7)
    assert (rows[:, 0] == result.times).all()
    assert (rows[:, 1] == result.E_total).all()
    assert (rows[:-1, 5] == result.residuals).all()
    assert np.isnan(rows[-1, 5])
    assert (rows[:, 6] == result.mass).all()


CLI_CFG = """mesh.x_min = 0
mesh.x_max = 1
mesh.n_cells = 40
boundary.kind = periodic
layers.n = 2
init.kind = dam_break
init.eta_l = 1.0
init.eta_r = 0.8
init.x0 = 0.5
physics.g = 9.81
controls.t_end = 0.05
output.snapshot_every = 0.02
"""


def test_cli_run_writes_outputs(tmp_path, capsys):
    cfg = tmp_path / "case.cfg"
    cfg.write_text(CLI_CFG)
    out = tmp_path / "results"
    rc = cli.main(["run", str(cfg), "--output", str(out)])
    assert rc == 0
    assert (out / "energy.csv").exists()
    assert (out / "snapshot_0000.csv").exists()
    assert (out / "snapshot_0003.csv").exists()
    text = capsys.readouterr().out
    assert "finished" in text and "mass drift" in text


def test_cli_check_accepts_and_rejects(tmp_path, capsys):
    good = tmp_path / "good.cfg"
    good.write_text(CLI_CFG)
    assert cli.main(["check", str(good)]) == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("mesh.n_cells = -3\n")
    assert cli.main(["check", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "required key is missing" in err


def test_cli_missing_file_is_a_usage_error(capsys):
    assert cli.main(["check", "/no/such/file.cfg"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_cli_unknown_flag_exits_1():
    with pytest.raises(SystemExit) as err:
        cli.main(["run", "--frobnicate", "x.cfg"])
    assert err.value.code == 1


def test_cli_runtime_abort_exits_2(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "case.cfg"
    cfg.write_text(CLI_CFG)

    def explode(*a, **k):
        raise SolverAbort("synthetic failure", step=3, time=0.01, cell=5)

    monkeypatch.setattr(cli, "run", explode)
    rc = cli.main(["run", str(cfg), "--output", str(tmp_path / "o")])
    assert rc == 2
    assert "synthetic failure" in capsys.readouterr().err


def test_cli_verify_rejects_bad_criteria(capsys):
    assert cli.main(["verify", "--criteria", "0,11"]) == 1
    assert cli.main(["verify", "--criteria", "pi"]) == 1


def test_cli_verify_subset(capsys):
    rc = cli.main(["verify", "--criteria", "7,10"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "criterion  7" in out and "criterion 10" in out
    assert "2/2 criteria passed" in out
