import numpy as np
import pytest

from invasim.cli import main, parse_tau_range
from invasim.config import config_from_dict, load_config
from invasim.experiments import ConfigError
from invasim.grid import GridSpec
from invasim.storage import (FormatError, load_snapshots, read_snapshot, write_snapshot)

SMALL = """
experiment = "exp1"
t_final = 0.004
snapshot_times = [0.0, 0.002]

[grid]
n = 8

[params]
tau = 15
lambda = 0.2

[solver]
rel_tol = 1e-11

[output]
csv = true
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(SMALL)
    return path


def test_config_loading(config_file):
    cfg, out, taus = load_config(config_file)
    assert cfg.n == 8 and cfg.params.tau == 15.0 and cfg.params.lambda_ == 0.2
    assert cfg.params.D_h == 10.0
    assert cfg.solver.rel_tol == 1e-11 and out.csv and taus == ()


@pytest.mark.parametrize("raw", [
    {"bogus": 1},
    {"experiment": "exp9"},
    {"params": {"zeta": 1.0}},
    {"params": {"chi": 2.0}},
    {"solver": {"freeze": "never"}},
    {"step_control": {"cfl_limit": 3.0}},
    {"t_final": 0.1, "snapshot_times": [0.5]},
])
def test_config_errors(raw):
    with pytest.raises(ConfigError):
        config_from_dict(raw)


def test_custom_experiment_uses_named_preset():
    cfg, _, _ = config_from_dict({"experiment": "custom", "preset": "base", "initial": "exp0"})
    assert cfg.experiment == "exp0" and cfg.params.M_rate == 2.0 and cfg.params.tau == 20.0


def test_snapshot_round_trip(tmp_path):
    g = GridSpec(-2.0, 2.0, 5, 4)
    values = np.random.default_rng(1).standard_normal(g.n_cells)
    write_snapshot(tmp_path / "a.bin", g, 0.25, values)
    g2, t, back = read_snapshot(tmp_path / "a.bin")
    assert g2 == g and t == 0.25 and np.array_equal(back, values)
    raw = (tmp_path / "a.bin").read_bytes()
    (tmp_path / "b.bin").write_bytes(b"X" + raw[1:])
    with pytest.raises(FormatError):
        read_snapshot(tmp_path / "b.bin")
    (tmp_path / "c.bin").write_bytes(raw[:-8])
    with pytest.raises(FormatError):
        read_snapshot(tmp_path / "c.bin")


def test_tau_range_parsing():
    assert parse_tau_range("0:31:1") == [float(i) for i in range(31)]
    assert parse_tau_range("5,10") == [5.0, 10.0]
    with pytest.raises(ConfigError):
        parse_tau_range("0:1")


def test_simulate_is_reproducible_and_comparable(config_file, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(config_file), "--out", str(a)]) == 0
    assert main(["simulate", "--config", str(config_file), "--out", str(b)]) == 0
    for f in sorted(a.rglob("*")):
        if f.is_file():
            assert f.read_bytes() == (b / f.relative_to(a)).read_bytes(), f
    initial = a / "snapshots" / "c2_t0.000000.bin"
    g, t, c2 = read_snapshot(initial)
    cfg, _, _ = load_config(config_file)
    assert t == 0.0 and np.array_equal(c2, cfg.initial_state().c2)
    assert (a / "snapshots" / "c2_t0.000000.csv").exists()
    assert (a / "radial_final.csv").read_text().startswith("r,c1,c2,v,y,kappa")
    assert (a / "report.csv").read_text().startswith("step,t,dt,active,dt_max,cfl,kappa")

    grid, states = load_snapshots(a)
    assert sorted(states) == [0.0, 0.002, 0.004]
    capsys.readouterr()
    assert main(["compare", str(a), str(b)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,component,linf,l1,rel_linf"
    assert len(lines) == 1 + 3 * 5
    assert all(line.split(",")[2] == "0.0" for line in lines[1:])


def test_simulate_overrides(config_file, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(config_file), "--tau", "2", "--chi", "0.02",
                 "--grid", "6", "--t-final", "0.001", "--out", str(out)]) == 0
    grid, states = load_snapshots(out)
    assert grid.nx == 6 and sorted(states) == [0.0, 0.001]


def test_compare_rejects_mismatched_grids(config_file, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["simulate", "--config", str(config_file), "--out", str(a)])
    main(["simulate", "--config", str(config_file), "--grid", "6", "--out", str(b)])
    capsys.readouterr()
    assert main(["compare", str(a), str(b)]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("error: config: ")


def test_eoc_and_sweep_commands(config_file, tmp_path, capsys):
    assert main(["eoc", "--config", str(config_file), "--levels", "6,12", "--out",
                 str(tmp_path / "e")]) == 0
    text = (tmp_path / "e" / "eoc.csv").read_text().splitlines()
    assert text[0] == "component,n_coarse,n_fine,l1,eoc_l1,l2,eoc_l2" and len(text) == 4
    assert main(["sweep", "--config", str(config_file), "--tau", "0:2:1", "--out",
                 str(tmp_path / "s")]) == 0
    rows = (tmp_path / "s" / "sweep.csv").read_text().splitlines()
    assert len(rows) == 3 and rows[1].startswith("0.0,ok,")


@pytest.mark.parametrize("argv, code", [
    (["simulate", "--config", "/nonexistent.toml", "--out", "x"], 2),
    (["eoc", "--levels", "25,60", "--out", "x"], 2),
    (["compare", "/nonexistent_a", "/nonexistent_b"], 2),
])
def test_failures_print_one_error_line(argv, code, capsys):
    assert main(argv) == code
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("error: ")


def test_missing_output_directory(config_file, capsys):
    assert main(["simulate", "--config", str(config_file)]) == 2
