from __future__ import annotations

import copy
import csv
import json

import conftest

import numpy as np
import pytest

from mapdecay import (
    ConfigError,
    DecayParams,
    GridMap,
    MetricError,
    config_from_dict,
    load_config,
    occupancy_iou,
    persistence_from_stream,
    read_map,
    render_frame,
    run_scenario,
)
from mapdecay.cli import main
from mapdecay.scenario import build_offline_phase, compute_trace_region


class TestConfigValidation:
    def test_round_trip_through_json(self, mini_dict, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(mini_dict))
        cfg = load_config(path)
        assert cfg.tick_rate == 20.0
        assert cfg.decay.w_on == 10.0
        assert cfg.world.dynamic_objects[0].name == "cart"

    def test_unknown_key_named_in_error(self, mini_dict):
        mini_dict["velocity"] = 3.0
        with pytest.raises(ConfigError, match="velocity"):
            config_from_dict(mini_dict)

    def test_unknown_nested_key(self, mini_dict):
        mini_dict["sensor"]["fov"] = 1.0
        with pytest.raises(ConfigError, match="sensor.fov"):
            config_from_dict(mini_dict)

    def test_missing_required_field(self, mini_dict):
        del mini_dict["duration"]
        with pytest.raises(ConfigError, match="duration"):
            config_from_dict(mini_dict)

    def test_wrong_type_named(self, mini_dict):
        mini_dict["tick_rate"] = "fast"
        with pytest.raises(ConfigError, match="tick_rate"):
            config_from_dict(mini_dict)

    def test_duplicate_object_names(self, mini_dict):
        objs = mini_dict["world"]["dynamic_objects"]
        objs.append(dict(objs[0]))
        with pytest.raises(ConfigError, match="duplicate"):
            config_from_dict(mini_dict)

    def test_bad_trajectory_shape(self, mini_dict):
        mini_dict["ego_trajectory"] = [[0.0, 1.0]]
        with pytest.raises(ConfigError, match="ego_trajectory"):
            config_from_dict(mini_dict)

    def test_nonpositive_duration(self, mini_dict):
        mini_dict["duration"] = 0.0
        with pytest.raises(ConfigError, match="duration"):
            config_from_dict(mini_dict)

    def test_defaults_applied(self, mini_dict):
        del mini_dict["decay"]
        del mini_dict["render_stride"]
        cfg = config_from_dict(mini_dict)
        assert cfg.decay.w_on == 10.0 and cfg.decay.w_off == 1.0
        assert cfg.render_stride == 5

    def test_malformed_json_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")


class TestMetrics:
    def test_persistence_examples(self):
        assert persistence_from_stream([0.0, 0.0], 0.1) == 0
        assert persistence_from_stream([1.0, 0.5, 0.05], 0.1) == 2
        assert persistence_from_stream([1.0, 0.5], 0.1) is None
        # a single cell left 11.0 above its offline value decays under
        # (10, 1) weights to below 0.1 on the 50th step
        stream = 11.0 * (10.0 / 11.0) ** np.arange(80)
        assert persistence_from_stream(stream, 0.1) == 50

    def test_iou_examples(self):
        a = GridMap.blank(0.2, 0, 0, 4, 4)
        mask = np.ones((4, 4), dtype=bool)
        a.values[0, 0] = 5.0
        assert occupancy_iou(a.values, a.values, mask) == 1.0
        b = GridMap.blank(0.2, 0, 0, 4, 4)
        b.values[1, 1] = 5.0
        assert occupancy_iou(a.values, b.values, mask) == 0.0
        empty = np.zeros((4, 4))
        assert occupancy_iou(empty, empty, mask) == 1.0

    def test_iou_respects_mask(self):
        a = GridMap.blank(0.2, 0, 0, 4, 4)
        b = GridMap.blank(0.2, 0, 0, 4, 4)
        a.values[0, 0] = 5.0
        mask = np.ones((4, 4), dtype=bool)
        mask[0, 0] = False
        assert occupancy_iou(a.values, b.values, mask) == 1.0


class TestRender:
    def test_pixel_values_and_row_order(self, tmp_path):
        g = GridMap.blank(0.5, 0.0, 0.0, 2, 2)
        g.values[0, 0] = -50.0   # certainly free -> white
        g.values[0, 1] = 50.0    # certainly occupied -> black
        g.observed[0, :] = True  # bottom row observed, top row unknown
        path = tmp_path / "f.ppm"
        render_frame(g, path)
        blob = path.read_bytes()
        assert blob.startswith(b"P6\n2 2\n255\n")
        pixels = np.frombuffer(blob[len(b"P6\n2 2\n255\n"):], dtype=np.uint8)
        pixels = pixels.reshape(2, 2, 3)
        # image row 0 is the max-y grid row: both cells unknown, blue
        assert (pixels[0] == [0, 0, 255]).all()
        assert (pixels[1, 0] == [255, 255, 255]).all()
        assert (pixels[1, 1] == [0, 0, 0]).all()

    def test_midscale_gray(self, tmp_path):
        g = GridMap.blank(0.5, 0.0, 0.0, 1, 1)
        g.observed[:] = True     # log-odds 0 -> p = 0.5 -> 128 after rounding
        path = tmp_path / "f.ppm"
        render_frame(g, path)
        assert path.read_bytes().endswith(bytes([128, 128, 128]))


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    cfg = config_from_dict(copy.deepcopy(conftest.MINI_CONFIG))
    out = tmp_path_factory.mktemp("mini_run")
    metrics = run_scenario(cfg, output_dir=str(out))
    return cfg, out, metrics


class TestRunScenario:
    def test_outputs_exist(self, run):
        _, out, _ = run
        assert (out / "offline.ogm").exists()
        assert (out / "online_final.ogm").exists()
        assert (out / "metrics.csv").exists()
        assert any((out / "frames").glob("frame_*.ppm"))

    def test_metrics_csv_layout(self, run):
        cfg, out, _ = run
        with open(out / "metrics.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["tick", "t_sec", "trace_max_dev", "observed_cells", "iou"]
        assert len(rows) - 1 == int(cfg.duration * cfg.tick_rate)
        assert rows[1][0] == "0" and float(rows[1][1]) == 0.0

    def test_trace_decays_within_run(self, run):
        _, _, metrics = run
        assert len(metrics.trace_cells) > 50
        assert metrics.trace_persistence is not None
        # roughly the closed-form step count for a pulled-to-clamp cell
        assert 20 <= metrics.trace_persistence <= 60
        assert metrics.trace_max_dev[-1] < 0.1

    def test_static_wall_holds(self, run):
        _, _, metrics = run
        held = metrics.static_ok / np.maximum(metrics.static_total, 1)
        assert metrics.static_total.max() > 50
        assert held.min() >= 0.99

    def test_decay_off_keeps_traces(self, run, tmp_path):
        cfg, _, metrics_on = run
        metrics_off = run_scenario(cfg, decay_override=DecayParams(10, 1, enabled=False),
                                   output_dir=str(tmp_path / "off"))
        assert metrics_off.trace_max_dev[-1] > 1.0
        assert metrics_off.trace_max_dev[-1] > metrics_on.trace_max_dev[-1]

    def test_trace_region_excludes_walls_and_endpoints(self, run):
        cfg, _, metrics = run
        offline = read_map(metrics.outputs["offline"])
        region = compute_trace_region(cfg, offline)
        xs = offline.origin_x + (region.cols + 0.5) * offline.resolution
        ys = offline.origin_y + (region.rows + 0.5) * offline.resolution
        assert (ys < 6.0).all()          # never inside the wall band
        assert (xs < 3.0 - 0.6).all()    # parked footprint excluded
        assert offline.values[region.rows, region.cols].max() < 0.0


class TestCli:
    def _write_cfg(self, mini_dict, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(mini_dict))
        return path

    def test_build_offline_and_diff_self(self, mini_dict, tmp_path, capsys):
        cfg = self._write_cfg(mini_dict, tmp_path)
        out = tmp_path / "off.ogm"
        assert main(["build-offline", str(cfg), str(out)]) == 0
        assert main(["diff", str(out), str(out)]) == 0
        assert "max_abs_diff=0" in capsys.readouterr().out

    def test_diff_reports_changes(self, mini_dict, tmp_path, capsys):
        cfg = self._write_cfg(mini_dict, tmp_path)
        a = tmp_path / "a.ogm"
        main(["build-offline", str(cfg), str(a)])
        grid = read_map(a)
        grid.values[0, 0] += 1.5
        from mapdecay import write_map
        b = tmp_path / "b.ogm"
        write_map(grid, b)
        assert main(["diff", str(a), str(b)]) == 1
        out = capsys.readouterr().out
        assert "max_abs_diff=1.5" in out and "differing_cells=1" in out

    def test_run_with_prebuilt_offline(self, mini_dict, tmp_path, capsys):
        cfg = self._write_cfg(mini_dict, tmp_path)
        off = tmp_path / "off.ogm"
        main(["build-offline", str(cfg), str(off)])
        rc = main(["run", str(cfg), "--offline", str(off),
                   "--output", str(tmp_path / "out")])
        assert rc == 0
        assert "trace_persistence=" in capsys.readouterr().out
        assert (tmp_path / "out" / "metrics.csv").exists()

    def test_no_decay_flag_changes_result(self, mini_dict, tmp_path, capsys):
        cfg = self._write_cfg(mini_dict, tmp_path)
        off = tmp_path / "off.ogm"
        main(["build-offline", str(cfg), str(off)])
        main(["run", str(cfg), "--offline", str(off), "--output", str(tmp_path / "on")])
        main(["run", str(cfg), "--offline", str(off), "--no-decay",
              "--output", str(tmp_path / "off_run")])
        capsys.readouterr()
        assert main(["diff", str(tmp_path / "on" / "online_final.ogm"),
                     str(tmp_path / "off_run" / "online_final.ogm")]) == 1

    def test_render_subcommand(self, mini_dict, tmp_path, capsys):
        cfg = self._write_cfg(mini_dict, tmp_path)
        off = tmp_path / "off.ogm"
        main(["build-offline", str(cfg), str(off)])
        img = tmp_path / "off.ppm"
        assert main(["render", str(off), str(img)]) == 0
        assert img.read_bytes().startswith(b"P6\n240 240\n255\n")

    def test_config_error_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"duration": 1.0}))
        assert main(["run", str(bad)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_usage_error_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
