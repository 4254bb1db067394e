import io
import math

import numpy as np
import pytest

from vlcirs.cli import main
from vlcirs.config import ExperimentConfig, default_sweep, load_config, parse_config
from vlcirs.errors import ValidationError
from vlcirs.scenario import Scenario
from vlcirs.secrecy import secrecy_rate_array
from vlcirs.sweeps import (
    EVE_COLUMNS,
    SIZE_COLUMNS,
    emit_csv,
    run_sweep_eve,
    run_sweep_mirror_size,
)

FAST = """
[pso]
swarm_size = 4
max_iterations = 2
"""


def test_empty_config_is_the_default_room():
    cfg = parse_config("")
    sc = cfg.scenario
    assert sc == Scenario()
    assert (sc.room.x_r, sc.room.y_r, sc.room.z_r) == (5.0, 5.0, 3.0)
    assert (sc.source.width, sc.source.length) == (0.01, 0.01)
    assert (sc.array.offset_x, sc.array.offset_y, sc.array.offset_z) == (-0.26, 2.5, 0.5)
    assert sc.array.wall_offset == 2.24 and sc.array.reflectivity == 0.8
    assert (sc.bob.x, sc.bob.y, sc.bob.depth) == (0.2, 2.0, 3.0)
    assert sc.peak == 0.14 and sc.receiver.refractive_index == 1.5 and sc.receiver.area == 1e-4
    assert math.degrees(sc.source.semi_angle) == pytest.approx(70.0)
    assert (sc.receiver.tia_gain, sc.source.efficiency, sc.receiver.responsivity) == (1.0, 0.44, 0.54)
    assert cfg.methods == ("RSF", "FoB", "NoIRS") and cfg.sweep is None
    assert cfg.gain_calibration == "reference"


def test_sweep_only_config_keeps_defaults():
    cfg = parse_config('[sweep]\naxis = "eve_x"\nvalues = [-0.5, 0.0, 0.5]\n')
    assert cfg.scenario == Scenario()
    assert cfg.sweep_for("eve_x").values == (-0.5, 0.0, 0.5)
    with pytest.raises(ValidationError):
        cfg.sweep_for("mirror_edge")


def test_default_sweeps():
    eve = default_sweep("eve_x")
    assert len(eve.values) == 21 and eve.values[0] == -1.0 and eve.values[10] == 0.0 and eve.values[-1] == 1.0
    size = default_sweep("mirror_edge")
    assert size.values == (0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 0.11, 0.12)
    assert size.array_sizes == (4, 5, 6)


@pytest.mark.parametrize(
    "text",
    [
        "[array]\nreflectivity = 1.2\n",
        "[array]\nmirrors = 3\n",
        "[lighting]\nx = 1\n",
        "[sweep]\naxis = \"eve_x\"\nvalues = [0.1, 0.0]\n",
        "[sweep]\nvalues = [0.1]\n",
        "[experiment]\nmethods = [\"RSF\", \"Best\"]\n",
        "[experiment]\ngain_calibration = -2.0\n",
        "[signal]\nnoise_variance = 1e-6\nn0 = 1e-22\nbandwidth = 1e16\n",
        "[pso]\nswarm_size = 2.5\n",
        "[receiver]\nirs_extra_cosine = 1\n",
        "[room]\nx_r = \"five\"\n",
    ],
)
def test_invalid_configs_are_rejected(text):
    with pytest.raises(ValidationError):
        parse_config(text)


def test_parse_error_reports_position():
    with pytest.raises(ValidationError, match="line 2"):
        parse_config("[room]\nx_r = = 3\n", "bad.toml")


def test_sweep_axis_alone_uses_default_values():
    assert parse_config('[sweep]\naxis = "mirror_edge"\n').sweep == default_sweep("mirror_edge")


def test_noise_from_psd_and_bandwidth():
    cfg = parse_config("[signal]\nn0 = 1e-22\nbandwidth = 1e16\n")
    assert cfg.scenario.noise_variance == pytest.approx(1e-6)


def test_load_config_reads_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('[eve]\nx = -0.4\n[experiment]\nmethods = ["NoIRS", "FoB"]\n', encoding="utf-8")
    cfg = load_config(p)
    assert cfg.scenario.eve.x == -0.4
    assert cfg.methods == ("FoB", "NoIRS")
    with pytest.raises(OSError):
        load_config(tmp_path / "missing.toml")


def test_emit_csv_empty_and_single_row(tmp_path):
    p = tmp_path / "empty.csv"
    emit_csv([], p, EVE_COLUMNS)
    assert p.read_text(encoding="utf-8") == ",".join(EVE_COLUMNS) + "\n"
    q = tmp_path / "one.csv"
    emit_csv([{"a": 0.1 + 0.2, "b": "x"}], q)
    assert q.read_text(encoding="utf-8").splitlines() == ["a,b", "0.3,x"]
    emit_csv([{"a": 1 / 3}], q)
    assert q.read_text(encoding="utf-8").splitlines()[1] == "0.333333333333333"


def eve_cfg(values, methods=("RSF", "FoB", "NoIRS")):
    text = FAST + f'[sweep]\naxis = "eve_x"\nvalues = {list(values)}\n[experiment]\nmethods = {list(methods)}\n'
    return parse_config(text)


def test_eve_sweep_rows_ordered_and_without_irs_zero_at_source():
    rows = run_sweep_eve(eve_cfg([0.0, 0.2], ("NoIRS", "RSF")))
    assert [(r["eve_x"], r["method"]) for r in rows] == [(0.0, "RSF"), (0.0, "NoIRS"), (0.2, "RSF"), (0.2, "NoIRS")]
    assert set(rows[0]) == set(EVE_COLUMNS)
    assert rows[1]["secrecy_rate"] == 0.0 and rows[1]["irs_bob"] == 0.0
    # Eve on Bob
    assert rows[2]["secrecy_rate"] == 0.0
    assert all(r["error"] == "" for r in rows)


def test_eve_sweep_method_ordering():
    rows = run_sweep_eve(eve_cfg([-1.0, 0.5]))
    by = {(r["eve_x"], r["method"]): r["secrecy_rate"] for r in rows}
    for x in (-1.0, 0.5):
        assert by[x, "RSF"] >= by[x, "FoB"] >= 0
        assert by[x, "FoB"] >= by[x, "NoIRS"] >= 0


def test_sweep_csv_is_byte_identical_across_runs(tmp_path):
    cfg = eve_cfg([-0.3, 0.6])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_sweep_eve(cfg), a, EVE_COLUMNS)
    emit_csv(run_sweep_eve(cfg), b, EVE_COLUMNS)
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text(encoding="utf-8").splitlines()) == 1 + 2 * 3


def test_failing_point_yields_error_row_not_abort():
    # a 30 x 30 array of 12 cm mirrors does not fit along the wall
    cfg = parse_config(FAST + '[sweep]\naxis = "mirror_edge"\nvalues = [0.12]\narray_sizes = [4, 30]\n'
                       '[experiment]\nmethods = ["NoIRS"]\n')
    rows = run_sweep_mirror_size(cfg)
    assert len(rows) == 2
    assert rows[0]["error"] == "" and rows[0]["secrecy_rate"] == 0.0
    assert rows[1]["error"].startswith("ValidationError")
    assert math.isnan(rows[1]["secrecy_rate"])
    assert set(rows[1]) == set(SIZE_COLUMNS)


def test_mirror_size_sweep_reduces_quadrature_for_small_mirrors():
    cfg = parse_config(FAST + '[quadrature]\nedge = 0.01\n[sweep]\naxis = "mirror_edge"\nvalues = [0.005]\n'
                       'array_sizes = [1]\n[experiment]\nmethods = ["FoB"]\n')
    (row,) = run_sweep_mirror_size(cfg)
    assert row["error"] == "" and row["eve_x"] == 0.1


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_cli_gains_and_exit_codes(tmp_path, capsys):
    code, text = run_cli("gains", "--method", "NoIRS")
    assert code == 0 and "secrecy rate" in text
    code, text = run_cli("gains", "--spot", "0.2", "2.0")
    assert code == 0 and "spot: x=0.200000" in text
    bad = tmp_path / "bad.toml"
    bad.write_text("[array]\nreflectivity = 1.2\n", encoding="utf-8")
    assert run_cli("gains", "--config", str(bad))[0] == 1
    assert run_cli("gains", "--config", str(tmp_path / "none.toml"))[0] == 3
    # a spot far behind the wall has no valid orientation
    assert run_cli("gains", "--spot", "0.0", "-30")[0] == 2
    assert "error:" in capsys.readouterr().err


def test_cli_sweep_to_stdout_and_file(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(FAST + '[sweep]\naxis = "eve_x"\nvalues = [1.0]\n[experiment]\nmethods = ["NoIRS"]\n',
                   encoding="utf-8")
    code, text = run_cli("sweep-eve", "--config", str(cfg))
    lines = text.splitlines()
    assert code == 0 and lines[0] == ",".join(EVE_COLUMNS) and len(lines) == 2
    out = tmp_path / "o.csv"
    assert run_cli("sweep-eve", "--config", str(cfg), "--output", str(out))[0] == 0
    assert out.read_text(encoding="utf-8") == text
    assert run_cli("sweep-eve", "--config", str(cfg), "--output", str(tmp_path / "no" / "o.csv"))[0] == 3


def test_cli_optimize_prints_angle_grids():
    code, text = run_cli("optimize", "--seed", "1", "--edge", "0.002")
    assert code == 0
    assert "best spot" in text and "roll (deg)" in text and "yaw (deg)" in text


def test_cli_calibrate_noise(tmp_path):
    code, text = run_cli("calibrate-noise", "--output", str(tmp_path / "r.csv"))
    assert code == 0
    value = float(text.splitlines()[0].split(":")[1])
    assert value == pytest.approx(9.9177e-7, rel=1e-3)
    rows = (tmp_path / "r.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "h_bob,h_eve,rate,residual,kept"

    triples = tmp_path / "t.csv"
    hb = np.array([0.3, 0.35, 0.25])
    he = np.array([0.2, 0.18, 0.21])
    rate = secrecy_rate_array(hb, he, 0.14, 3e-6)
    triples.write_text("h_bob,h_eve,rate\n" + "".join(f"{a},{b},{float(c)!r}\n" for a, b, c in zip(hb, he, rate)))
    code, text = run_cli("calibrate-noise", "--triples", str(triples), "--trim", "0")
    assert code == 0 and float(text.splitlines()[0].split(":")[1]) == pytest.approx(3e-6, rel=1e-5)
    triples.write_text("h_bob,rate\n0.3,0.1\n")
    assert run_cli("calibrate-noise", "--triples", str(triples))[0] == 1


def test_experiment_config_rejects_bad_calibration():
    with pytest.raises(ValidationError):
        ExperimentConfig(gain_calibration="raw")
    assert ExperimentConfig(gain_calibration=None).gain_calibration is None
