"""Scenario configuration, the run loop, metrics, and frame rendering.

A run has two phases.  Phase 1 drives the ego over the offline trajectory
with dynamic objects disabled and builds + cleans the offline map.  Phase 2
replays the ego trajectory with dynamic objects enabled, calling one online
step per tick, recording trace-region metrics and rendering PPM frames.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, MetricError
from .grid import DecayParams, GridMap, logodds_from_prob, write_map
from .instant import ObstacleThresholds
from .fusion import (
    CleanParams,
    build_offline,
    clean_offline,
    offline_window,
    online_init,
    online_step,
)
from .world import (
    Box,
    DynamicObject,
    Pose,
    Rect,
    SensorConfig,
    TAU,
    World,
    ego_pose_at,
    simulate_sweep,
)

UNOBSERVED_RGB = (0, 0, 255)


# ---------------------------------------------------------------------------
# configuration

@dataclass
class ScenarioConfig:
    world: World
    ego_trajectory: list[Pose]
    offline_trajectory: list[Pose]
    sensor: SensorConfig
    decay: DecayParams
    clean: CleanParams
    thresholds: ObstacleThresholds
    extent: Rect
    resolution: float
    window_size: float
    duration: float
    tick_rate: float
    offline_tick_rate: float
    render_stride: int
    epsilon_trace: float
    seed: int
    output_dir: Optional[str]


def _check_keys(section: dict, path: str, known: set[str]) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{path.rstrip('.') or 'config'}: expected an object")
    for key in section:
        if key not in known:
            raise ConfigError(f"{path}{key}: unknown key")


_REQUIRED = object()


def _get(section: dict, path: str, key: str, kind, default=_REQUIRED):
    if key not in section:
        if default is _REQUIRED:
            raise ConfigError(f"{path}{key}: required field is missing")
        return default
    value = section[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{path}{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_trajectory(raw, path: str) -> list[Pose]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}: expected a nonempty list of [t, x, y, yaw] knots")
    knots = []
    for i, item in enumerate(raw):
        if not (isinstance(item, list) and len(item) == 4
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)):
            raise ConfigError(f"{path}[{i}]: expected [t, x, y, yaw] numbers")
        t, x, y, yaw = (float(v) for v in item)
        knots.append(Pose(x, y, yaw, t))
    times = [k.t for k in knots]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError(f"{path}: knot timestamps must be strictly increasing")
    return knots


def _parse_world(raw: dict, path: str) -> World:
    _check_keys(raw, path, {"ground_z", "bounds", "static_boxes", "dynamic_objects"})
    ground_z = _get(raw, path, "ground_z", float, 0.0)
    bounds_raw = _get(raw, path, "bounds", list)
    if len(bounds_raw) != 4:
        raise ConfigError(f"{path}bounds: expected [x_min, y_min, x_max, y_max]")
    bounds = Rect(*(float(v) for v in bounds_raw))
    if bounds.x_min >= bounds.x_max or bounds.y_min >= bounds.y_max:
        raise ConfigError(f"{path}bounds: degenerate rectangle")

    boxes = []
    for i, braw in enumerate(_get(raw, path, "static_boxes", list, [])):
        bpath = f"{path}static_boxes[{i}]."
        _check_keys(braw, bpath, {"x_min", "x_max", "y_min", "y_max", "z_top"})
        boxes.append(Box(*[_get(braw, bpath, k, float)
                           for k in ("x_min", "x_max", "y_min", "y_max", "z_top")]))

    objects = []
    names = set()
    for i, oraw in enumerate(_get(raw, path, "dynamic_objects", list, [])):
        opath = f"{path}dynamic_objects[{i}]."
        _check_keys(oraw, opath, {"name", "length", "width", "height", "trajectory"})
        name = _get(oraw, opath, "name", str)
        if name in names:
            raise ConfigError(f"{opath}name: duplicate object name {name!r}")
        names.add(name)
        objects.append(DynamicObject(
            name,
            _get(oraw, opath, "length", float),
            _get(oraw, opath, "width", float),
            _get(oraw, opath, "height", float),
            _parse_trajectory(oraw.get("trajectory"), f"{opath}trajectory"),
        ))
    try:
        return World(ground_z, bounds, boxes, objects)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_sensor(raw: dict, path: str) -> SensorConfig:
    _check_keys(raw, path, {"beam_count", "vertical_min_deg", "vertical_max_deg",
                            "vertical_angles_deg", "azimuth_steps", "max_range",
                            "mount_height", "sweep_rate", "noise_sigma"})
    beam_count = _get(raw, path, "beam_count", int, 32)
    if "vertical_angles_deg" in raw:
        angles = np.radians(np.asarray(_get(raw, path, "vertical_angles_deg", list),
                                       dtype=np.float64))
    else:
        lo = _get(raw, path, "vertical_min_deg", float, -30.0)
        hi = _get(raw, path, "vertical_max_deg", float, 10.0)
        angles = np.radians(np.linspace(lo, hi, beam_count))
    steps = _get(raw, path, "azimuth_steps", int, 720)
    if steps < 1:
        raise ConfigError(f"{path}azimuth_steps: must be at least 1")
    try:
        return SensorConfig(
            beam_count=beam_count,
            vertical_angles=angles,
            horizontal_step=TAU / steps,
            max_range=_get(raw, path, "max_range", float, 70.0),
            mount_height=_get(raw, path, "mount_height", float, 2.0),
            sweep_rate=_get(raw, path, "sweep_rate", float, 20.0),
            noise_sigma=_get(raw, path, "noise_sigma", float, 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_from_dict(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    _check_keys(raw, "", {
        "world", "ego_trajectory", "offline_trajectory", "sensor", "decay",
        "clean", "obstacle", "extent", "resolution", "window_size", "duration",
        "tick_rate", "offline_tick_rate", "render_stride", "epsilon_trace",
        "seed", "output_dir",
    })
    world = _parse_world(_get(raw, "", "world", dict), "world.")
    ego = _parse_trajectory(raw.get("ego_trajectory"), "ego_trajectory")
    offline_traj = (_parse_trajectory(raw["offline_trajectory"], "offline_trajectory")
                    if "offline_trajectory" in raw else ego)
    sensor = _parse_sensor(_get(raw, "", "sensor", dict, {}), "sensor.")

    draw = _get(raw, "", "decay", dict, {})
    _check_keys(draw, "decay.", {"w_on", "w_off", "enabled"})
    try:
        decay = DecayParams(_get(draw, "decay.", "w_on", float, 10.0),
                            _get(draw, "decay.", "w_off", float, 1.0),
                            _get(draw, "decay.", "enabled", bool, True))
    except ValueError as exc:
        raise ConfigError(f"decay.: {exc}") from exc

    craw = _get(raw, "", "clean", dict, {})
    _check_keys(craw, "clean.", {"occ_threshold", "min_component_cells"})
    try:
        clean = CleanParams(_get(craw, "clean.", "occ_threshold", float, 0.5),
                            _get(craw, "clean.", "min_component_cells", int, 6))
    except ValueError as exc:
        raise ConfigError(f"clean.: {exc}") from exc

    oraw = _get(raw, "", "obstacle", dict, {})
    _check_keys(oraw, "obstacle.", {"min_height", "max_height"})
    thresholds = ObstacleThresholds(_get(oraw, "obstacle.", "min_height", float, 0.30),
                                    _get(oraw, "obstacle.", "max_height", float, 4.0))

    extent_raw = _get(raw, "", "extent", list)
    if len(extent_raw) != 4:
        raise ConfigError("extent: expected [x_min, y_min, x_max, y_max]")
    extent = Rect(*(float(v) for v in extent_raw))
    if extent.x_min >= extent.x_max or extent.y_min >= extent.y_max:
        raise ConfigError("extent: degenerate rectangle")

    cfg = ScenarioConfig(
        world=world,
        ego_trajectory=ego,
        offline_trajectory=offline_traj,
        sensor=sensor,
        decay=decay,
        clean=clean,
        thresholds=thresholds,
        extent=extent,
        resolution=_get(raw, "", "resolution", float, 0.2),
        window_size=_get(raw, "", "window_size", float, 150.0),
        duration=_get(raw, "", "duration", float),
        tick_rate=_get(raw, "", "tick_rate", float, 20.0),
        offline_tick_rate=_get(raw, "", "offline_tick_rate", float, 0.0),
        render_stride=_get(raw, "", "render_stride", int, 5),
        epsilon_trace=_get(raw, "", "epsilon_trace", float, 0.1),
        seed=_get(raw, "", "seed", int, 0),
        output_dir=_get(raw, "", "output_dir", str, None),
    )
    if cfg.duration <= 0.0:
        raise ConfigError("duration: must be positive")
    if cfg.tick_rate <= 0.0:
        raise ConfigError("tick_rate: must be positive")
    if cfg.offline_tick_rate == 0.0:
        cfg.offline_tick_rate = cfg.tick_rate
    if cfg.offline_tick_rate < 0.0:
        raise ConfigError("offline_tick_rate: must be positive")
    if cfg.render_stride < 1:
        raise ConfigError("render_stride: must be at least 1")
    if cfg.resolution <= 0.0:
        raise ConfigError("resolution: must be positive")
    if cfg.window_size <= 0.0:
        raise ConfigError("window_size: must be positive")
    if cfg.epsilon_trace <= 0.0:
        raise ConfigError("epsilon_trace: must be positive")
    return cfg


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}") from exc
    return config_from_dict(raw)


# ---------------------------------------------------------------------------
# metrics

@dataclass
class TraceRegion:
    """Offline-frame cells swept by dynamic footprints and free offline."""
    rows: np.ndarray
    cols: np.ndarray

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class RunMetrics:
    tick_rate: float
    trace_cells: TraceRegion
    trace_offline: np.ndarray        # (M,) offline value per trace cell
    trace_values: np.ndarray         # (T, M) online value per tick
    last_observed: np.ndarray        # (M,) last tick each cell got evidence, -1 never
    observed_cells: np.ndarray       # (T,)
    iou: np.ndarray                  # (T,)
    wall_time: np.ndarray            # (T,)
    static_total: np.ndarray         # (T,) observed cells occupied offline
    static_ok: np.ndarray            # (T,) of those, online prob > 0.9
    trace_persistence: Optional[int]
    final_iou: float
    outputs: dict = field(default_factory=dict)

    @property
    def trace_dev(self) -> np.ndarray:
        return np.abs(self.trace_values - self.trace_offline[None, :])

    @property
    def trace_max_dev(self) -> np.ndarray:
        dev = self.trace_dev
        return dev.max(axis=1) if dev.size else np.zeros(dev.shape[0])

    @property
    def peak_dev(self) -> np.ndarray:
        return self.trace_dev.max(axis=0)


def persistence_from_stream(max_dev, eps_trace: float) -> Optional[int]:
    """First index at which the deviation stream drops below eps, else None."""
    for i, v in enumerate(max_dev):
        if v < eps_trace:
            return i
    return None


def occupancy_iou(a_values: np.ndarray, b_values: np.ndarray,
                  mask: np.ndarray, threshold: float = 0.5) -> float:
    """Cellwise IoU of thresholded occupancy over the masked cells."""
    cut = logodds_from_prob(threshold)
    a_occ = (a_values > cut) & mask
    b_occ = (b_values > cut) & mask
    union = int((a_occ | b_occ).sum())
    if union == 0:
        return 1.0
    return int((a_occ & b_occ).sum()) / union


def compute_metrics(trace_values: np.ndarray, trace_offline: np.ndarray,
                    trace_cells: TraceRegion, last_observed: np.ndarray,
                    observed_cells: np.ndarray, iou: np.ndarray,
                    wall_time: np.ndarray, static_total: np.ndarray,
                    static_ok: np.ndarray, eps_trace: float,
                    tick_rate: float, outputs: Optional[dict] = None) -> RunMetrics:
    """Assemble run metrics from the recorded per-tick state stream.

    Trace persistence counts ticks from the last evidence on any trace cell
    until the region's max deviation from offline drops below eps_trace.
    """
    if len(trace_cells) == 0:
        raise MetricError("trace region is empty")
    metrics = RunMetrics(tick_rate, trace_cells, trace_offline, trace_values,
                         last_observed, observed_cells, iou, wall_time,
                         static_total, static_ok,
                         None, float(iou[-1]) if len(iou) else 1.0,
                         outputs or {})
    seen = last_observed[last_observed >= 0]
    start = int(seen.max()) if seen.size else 0
    metrics.trace_persistence = persistence_from_stream(
        metrics.trace_max_dev[start:], eps_trace)
    return metrics


def _footprint_mask(obj: DynamicObject, t: float, grid: GridMap,
                    margin: float = 0.0) -> np.ndarray:
    """Cells whose center lies in the object footprint at time t, grown by
    ``margin`` meters on every side."""
    mask = np.zeros(grid.values.shape, dtype=bool)
    res = grid.resolution
    corners = obj.footprint_corners(t)
    c0 = max(int(np.floor((corners[:, 0].min() - margin - grid.origin_x) / res)), 0)
    c1 = min(int(np.floor((corners[:, 0].max() + margin - grid.origin_x) / res)) + 1,
             grid.width)
    r0 = max(int(np.floor((corners[:, 1].min() - margin - grid.origin_y) / res)), 0)
    r1 = min(int(np.floor((corners[:, 1].max() + margin - grid.origin_y) / res)) + 1,
             grid.height)
    if c0 >= c1 or r0 >= r1:
        return mask
    cols, rows = np.meshgrid(np.arange(c0, c1), np.arange(r0, r1))
    cx = grid.origin_x + (cols + 0.5) * res
    cy = grid.origin_y + (rows + 0.5) * res
    pose = obj.pose_at(t)
    ca, sa = math.cos(-pose.yaw), math.sin(-pose.yaw)
    lx = ca * (cx - pose.x) - sa * (cy - pose.y)
    ly = sa * (cx - pose.x) + ca * (cy - pose.y)
    inside = ((np.abs(lx) <= obj.length / 2.0 + margin)
              & (np.abs(ly) <= obj.width / 2.0 + margin))
    mask[rows[inside], cols[inside]] = True
    return mask


def rasterize_footprints(cfg: ScenarioConfig, grid: GridMap) -> np.ndarray:
    """Union of the cells swept by every dynamic footprint over phase 2."""
    mask = np.zeros(grid.values.shape, dtype=bool)
    n_ticks = int(round(cfg.duration * cfg.tick_rate))
    for obj in cfg.world.dynamic_objects:
        for k in range(n_ticks):
            mask |= _footprint_mask(obj, k / cfg.tick_rate, grid)
    return mask


def compute_trace_region(cfg: ScenarioConfig, offline: GridMap) -> TraceRegion:
    """Swept cells that the cleaned offline map knows to be free.

    Cells under or next to an object's first and final footprints are
    excluded: final-footprint cells are still legitimately occupied when the
    run ends, and first-footprint interiors may never have been exposed to
    the sensor at all.  Static obstacle footprints are excluded the same way.
    """
    mask = rasterize_footprints(cfg, offline)
    mask &= offline.observed & (offline.values < 0.0)
    t_end = (int(round(cfg.duration * cfg.tick_rate)) - 1) / cfg.tick_rate
    margin = 3.0 * offline.resolution
    for obj in cfg.world.dynamic_objects:
        mask &= ~_footprint_mask(obj, 0.0, offline, margin=margin)
        mask &= ~_footprint_mask(obj, t_end, offline, margin=margin)
    res = offline.resolution
    for box in cfg.world.static_boxes:
        c0 = max(int(np.floor((box.x_min - offline.origin_x) / res)), 0)
        c1 = min(int(np.floor((box.x_max - offline.origin_x) / res)) + 1, offline.width)
        r0 = max(int(np.floor((box.y_min - offline.origin_y) / res)), 0)
        r1 = min(int(np.floor((box.y_max - offline.origin_y) / res)) + 1, offline.height)
        mask[r0:r1, c0:c1] = False
    rows, cols = np.nonzero(mask)
    return TraceRegion(rows, cols)


# ---------------------------------------------------------------------------
# rendering

def render_frame(grid: GridMap, path) -> None:
    """Write a binary PPM (P6), one pixel per cell, image north = world +y.

    Unobserved cells are blue; observed cells are a gray ramp from white
    (free) to black (occupied).
    """
    prob = 1.0 / (1.0 + np.exp(-grid.values))
    gray = np.rint(255.0 * (1.0 - prob)).astype(np.uint8)
    rgb = np.empty((grid.height, grid.width, 3), dtype=np.uint8)
    rgb[:, :, 0] = rgb[:, :, 1] = rgb[:, :, 2] = gray
    rgb[~grid.observed] = UNOBSERVED_RGB
    rgb = rgb[::-1]  # row 0 at the max-y edge
    with open(path, "wb") as fh:
        fh.write(f"P6\n{grid.width} {grid.height}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


# ---------------------------------------------------------------------------
# run loop

def _extent_cells(cfg: ScenarioConfig) -> tuple[float, float, int, int]:
    width = int(round((cfg.extent.x_max - cfg.extent.x_min) / cfg.resolution))
    height = int(round((cfg.extent.y_max - cfg.extent.y_min) / cfg.resolution))
    return cfg.extent.x_min, cfg.extent.y_min, width, height


def build_offline_phase(cfg: ScenarioConfig) -> GridMap:
    """Phase 1: replay the offline trajectory with dynamic objects disabled."""
    world = cfg.world.without_dynamic()
    ox, oy, width, height = _extent_cells(cfg)
    t0 = cfg.offline_trajectory[0].t
    t1 = cfg.offline_trajectory[-1].t
    n = max(1, int(math.floor((t1 - t0) * cfg.offline_tick_rate)) + 1)
    rng = np.random.default_rng(cfg.seed) if cfg.sensor.noise_sigma > 0.0 else None

    def entries():
        for k in range(n):
            t = t0 + k / cfg.offline_tick_rate
            pose = ego_pose_at(cfg.offline_trajectory, t)
            yield pose, simulate_sweep(world, pose, cfg.sensor, t, rng)

    raw = build_offline(entries(), cfg.resolution, ox, oy, width, height,
                        cfg.world.ground_z, cfg.thresholds)
    return clean_offline(raw, cfg.clean)


def run_scenario(cfg: ScenarioConfig, offline: Optional[GridMap] = None,
                 decay_override: Optional[DecayParams] = None,
                 output_dir: Optional[str] = None) -> RunMetrics:
    """Run both phases and write frames, maps, and a metrics CSV.

    Deterministic given the config; partial outputs are removed on failure.
    """
    out = Path(output_dir or cfg.output_dir or "out")
    created: list[Path] = []
    try:
        return _run_scenario(cfg, offline, decay_override, out, created)
    except Exception:
        for p in created:
            p.unlink(missing_ok=True)
        raise


def _run_scenario(cfg: ScenarioConfig, offline: Optional[GridMap],
                  decay_override: Optional[DecayParams], out: Path,
                  created: list[Path]) -> RunMetrics:
    decay = decay_override if decay_override is not None else cfg.decay
    if offline is None:
        offline = build_offline_phase(cfg)

    out.mkdir(parents=True, exist_ok=True)
    frames_dir = out / "frames"
    frames_dir.mkdir(exist_ok=True)
    outputs = {"dir": out}

    region = compute_trace_region(cfg, offline)
    trace_off = offline.values[region.rows, region.cols].copy()

    n_ticks = int(round(cfg.duration * cfg.tick_rate))
    ego0 = ego_pose_at(cfg.ego_trajectory, 0.0)
    online = online_init(offline, ego0, cfg.window_size)
    rng = np.random.default_rng(cfg.seed + 1) if cfg.sensor.noise_sigma > 0.0 else None

    m = len(region)
    trace_values = np.empty((n_ticks, m), dtype=np.float64)
    last_observed = np.full(m, -1, dtype=np.int64)
    observed_cells = np.zeros(n_ticks, dtype=np.int64)
    iou = np.zeros(n_ticks, dtype=np.float64)
    wall = np.zeros(n_ticks, dtype=np.float64)
    static_total = np.zeros(n_ticks, dtype=np.int64)
    static_ok = np.zeros(n_ticks, dtype=np.int64)
    occ_cut = logodds_from_prob(0.9)

    for k in range(n_ticks):
        t_start = time.perf_counter()
        t = k / cfg.tick_rate
        pose = ego_pose_at(cfg.ego_trajectory, t)
        sweep = simulate_sweep(cfg.world, pose, cfg.sensor, t, rng)
        inst = online_step(online, offline, sweep, decay, cfg.world.ground_z,
                           cfg.thresholds)
        grid = online.grid

        # trace region cells mapped into the current window
        dc = round((grid.origin_x - offline.origin_x) / cfg.resolution)
        dr = round((grid.origin_y - offline.origin_y) / cfg.resolution)
        wc = region.cols - dc
        wr = region.rows - dr
        inside = (wc >= 0) & (wc < grid.width) & (wr >= 0) & (wr < grid.height)
        vals = trace_off.copy()  # out-of-window cells sit at their offline value
        vals[inside] = grid.values[wr[inside], wc[inside]]
        trace_values[k] = vals
        touched = np.zeros(m, dtype=bool)
        touched[inside] = inst.kind[wr[inside], wc[inside]] != 0
        last_observed[touched] = k

        observed_cells[k] = int(grid.observed.sum())
        off_win = offline_window(offline, grid.origin_x, grid.origin_y,
                                 grid.width, grid.height)
        iou[k] = occupancy_iou(grid.values, off_win.values, grid.observed)
        static = grid.observed & off_win.observed & (off_win.values > 0.0)
        static_total[k] = int(static.sum())
        static_ok[k] = int((static & (grid.values > occ_cut)).sum())

        if k % cfg.render_stride == 0:
            frame = frames_dir / f"frame_{k:06d}.ppm"
            render_frame(grid, frame)
            created.append(frame)
            outputs.setdefault("frames", []).append(frame)
        wall[k] = time.perf_counter() - t_start

    for name, grid_out in (("offline.ogm", offline), ("online_final.ogm", online.grid)):
        path = out / name
        write_map(grid_out, path)
        created.append(path)
        outputs[name.split(".")[0]] = path

    csv_path = out / "metrics.csv"
    metrics = (compute_metrics(trace_values, trace_off, region, last_observed,
                               observed_cells, iou, wall, static_total, static_ok,
                               cfg.epsilon_trace, cfg.tick_rate, outputs)
               if m else RunMetrics(cfg.tick_rate, region, trace_off, trace_values,
                                    last_observed, observed_cells, iou, wall,
                                    static_total, static_ok,
                                    None, float(iou[-1]) if n_ticks else 1.0, outputs))
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "t_sec", "trace_max_dev", "observed_cells", "iou"])
        max_dev = metrics.trace_max_dev
        for k in range(n_ticks):
            writer.writerow([k, f"{k / cfg.tick_rate:.6f}",
                             f"{max_dev[k]:.12g}" if m else "0",
                             int(observed_cells[k]), f"{iou[k]:.12g}"])
    created.append(csv_path)
    outputs["metrics"] = csv_path

    persistence = metrics.trace_persistence
    print(f"ticks={n_ticks} trace_cells={m} "
          f"trace_persistence={persistence if persistence is not None else 'none'} "
          f"final_iou={metrics.final_iou:.6f} "
          f"total_wall_s={wall.sum():.3f}")
    return metrics
