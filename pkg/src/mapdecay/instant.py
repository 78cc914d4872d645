"""Instantaneous map construction from a single sweep.

Per vertical scan: beams whose hit point rises more than a height threshold
above the ground are obstacle returns; their 2D projections become occupied
evidence.  Cells along the ground track between the first beam's hit and the
first obstacle hit of the same scan are set free by a grid-line raycast.
Occupied marking wins over free on conflicts within one sweep.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AlignmentError, BoundsError
from .grid import GridMap, L_MAX, L_MIN, logodds_from_prob
from .world import Sweep, VerticalScan

#: Evidence added to a cell per obstacle return.
L_OCC = logodds_from_prob(0.9)
#: Value a free-raycast cell is overwritten to.
L_FREE_SET = logodds_from_prob(0.1)

KIND_UNTOUCHED = 0
KIND_FREE_SET = 1
KIND_OCCUPIED = 2


@dataclass(frozen=True)
class ObstacleThresholds:
    """Binary height-window classifier for obstacle returns."""
    min_height: float = 0.30
    max_height: float = 4.0


@dataclass
class ObstacleClassification:
    is_obstacle: np.ndarray
    first_obstacle_index: Optional[int]


def classify_scan(scan: VerticalScan, ground_z: float,
                  thresholds: ObstacleThresholds = ObstacleThresholds()) -> ObstacleClassification:
    """Flag beams whose hit height above the ground falls in the obstacle
    window.  No-return beams are never flagged."""
    heights = scan.hit_points[:, 2] - ground_z
    flags = scan.returned & (heights > thresholds.min_height) & (heights < thresholds.max_height)
    first = int(np.argmax(flags)) if flags.any() else None
    return ObstacleClassification(flags, first)


def _raycast_arrays(starts: np.ndarray, ends: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Grid-line traversal for a batch of rays in cell-index space.

    For each ray the line from start to end is stepped in max(|dx|, |dy|)
    unit steps along the dominant axis, rounding the other coordinate, which
    visits one cell per step, inclusive of start and exclusive of end.
    Returns (ray_index, cols, rows) flat arrays.
    """
    starts = np.asarray(starts, dtype=np.int64).reshape(-1, 2)
    ends = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    delta = ends - starts
    counts = np.abs(delta).max(axis=1)
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    ray = np.repeat(np.arange(len(counts)), counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    step = np.arange(total) - np.repeat(offsets, counts)
    frac = step / counts[ray]
    cols = np.rint(starts[ray, 0] + frac * delta[ray, 0]).astype(np.int64)
    rows = np.rint(starts[ray, 1] + frac * delta[ray, 1]).astype(np.int64)
    return ray, cols, rows


def raycast_cells(frm: tuple[int, int], to: tuple[int, int],
                  width: int, height: int) -> list[tuple[int, int]]:
    """Cells visited on the grid line from ``frm`` to ``to``, inclusive of
    ``frm`` and exclusive of ``to``.  Both endpoints must be inside the grid.
    """
    for col, row in (frm, to):
        if not (0 <= col < width and 0 <= row < height):
            raise BoundsError(f"cell ({col}, {row}) outside {width}x{height} grid")
    _, cols, rows = _raycast_arrays(np.array([frm]), np.array([to]))
    return list(zip(cols.tolist(), rows.tolist()))


@dataclass
class InstantMap:
    """Measurement evidence from one sweep, one kind code per cell.

    Occupied-evidence cells carry value ``l_occ`` (to be summed into the
    target), free-set cells carry ``l_free`` (overwrites the target), and
    untouched cells carry 0.
    """
    resolution: float
    origin_x: float
    origin_y: float
    kind: np.ndarray  # uint8 (height, width)
    l_occ: float = L_OCC
    l_free: float = L_FREE_SET

    @property
    def width(self) -> int:
        return self.kind.shape[1]

    @property
    def height(self) -> int:
        return self.kind.shape[0]

    @property
    def values(self) -> np.ndarray:
        out = np.zeros(self.kind.shape, dtype=np.float64)
        out[self.kind == KIND_FREE_SET] = self.l_free
        out[self.kind == KIND_OCCUPIED] = self.l_occ
        return out


def build_instant_map(sweep: Sweep, origin_x: float, origin_y: float,
                      width: int, height: int, resolution: float,
                      ground_z: float,
                      thresholds: ObstacleThresholds = ObstacleThresholds(),
                      l_occ: float = L_OCC, l_free: float = L_FREE_SET) -> InstantMap:
    """Project one sweep into an instantaneous occupancy grid.

    Cells outside the extent are silently dropped; the extent must contain
    the sensor position itself.
    """
    sx, sy = sweep.ego_pose.x, sweep.ego_pose.y
    s_col = int(np.floor((sx - origin_x) / resolution))
    s_row = int(np.floor((sy - origin_y) / resolution))
    if not (0 <= s_col < width and 0 <= s_row < height):
        raise AlignmentError("instant map extent does not contain the sensor position")

    kind = np.zeros((height, width), dtype=np.uint8)

    heights_above = sweep.hit_points[:, :, 2] - ground_z
    returned = np.isfinite(sweep.ranges)
    obstacle = returned & (heights_above > thresholds.min_height) \
        & (heights_above < thresholds.max_height)

    hit_cols = np.floor((sweep.hit_points[:, :, 0] - origin_x) / resolution)
    hit_rows = np.floor((sweep.hit_points[:, :, 1] - origin_y) / resolution)

    # free intervals, one per vertical scan with a usable first-beam anchor
    n_az, n_beams = sweep.ranges.shape
    any_obs = obstacle.any(axis=1)
    first_obs = np.argmax(obstacle, axis=1)
    last_ret = n_beams - 1 - np.argmax(returned[:, ::-1], axis=1)
    end_beam = np.where(any_obs, first_obs, last_ret)

    usable = returned[:, 0]
    az = np.arange(n_az)
    start_d = sweep.ranges[az, 0]
    end_d = sweep.ranges[az, end_beam]
    # hit distances are along unit rays, so horizontal ordering follows them;
    # an obstacle nearer than the first beam's hit yields an empty interval
    usable &= np.isfinite(end_d) & (end_d >= start_d)

    starts = np.stack([hit_cols[az, 0], hit_rows[az, 0]], axis=1)
    starts = np.nan_to_num(starts, nan=0.0).astype(np.int64)
    # pull the span endpoint back a hair along the ray: a hit exactly on a
    # surface that coincides with a cell boundary must index the cell on the
    # near side, or grid-line rounding frees cells inside the surface
    ex = sweep.hit_points[az, end_beam, 0]
    ey = sweep.hit_points[az, end_beam, 1]
    dxy = np.hypot(ex - sx, ey - sy)
    dxy[~np.isfinite(dxy) | (dxy == 0.0)] = 1.0
    eps = 1e-6
    ex = ex - eps * (ex - sx) / dxy
    ey = ey - eps * (ey - sy) / dxy
    ends = np.stack([np.floor((ex - origin_x) / resolution),
                     np.floor((ey - origin_y) / resolution)], axis=1)
    ends = np.nan_to_num(ends, nan=0.0).astype(np.int64)

    _, f_cols, f_rows = _raycast_arrays(starts[usable], ends[usable])
    # with no obstacle in the scan, the last ground return itself is free
    inc_end = usable & ~any_obs
    f_cols = np.concatenate([f_cols, ends[inc_end, 0]])
    f_rows = np.concatenate([f_rows, ends[inc_end, 1]])
    in_grid = (f_cols >= 0) & (f_cols < width) & (f_rows >= 0) & (f_rows < height)
    kind[f_rows[in_grid], f_cols[in_grid]] = KIND_FREE_SET

    # occupied marking last: it takes precedence over free on conflicts.
    # Hits landing exactly on a surface that coincides with a cell boundary
    # would alias between the two adjacent cells, so nudge the lookup point
    # a hair further along the ray, into the surface.
    ox = sweep.hit_points[:, :, 0][obstacle]
    oy = sweep.hit_points[:, :, 1][obstacle]
    dx, dy = ox - sx, oy - sy
    norm = np.hypot(dx, dy)
    norm[norm == 0.0] = 1.0
    eps = 1e-6
    o_cols = np.floor((ox + eps * dx / norm - origin_x) / resolution).astype(np.int64)
    o_rows = np.floor((oy + eps * dy / norm - origin_y) / resolution).astype(np.int64)
    in_grid = (o_cols >= 0) & (o_cols < width) & (o_rows >= 0) & (o_rows < height)
    kind[o_rows[in_grid], o_cols[in_grid]] = KIND_OCCUPIED

    return InstantMap(resolution, origin_x, origin_y, kind, l_occ, l_free)


def apply_instant(target: GridMap, inst: InstantMap,
                  lo: float = L_MIN, hi: float = L_MAX) -> None:
    """Fold an instantaneous map into ``target``.

    Occupied evidence is summed (clamped); free cells are overwritten to the
    free value.  Both mark the cell observed.  Untouched cells are unchanged.
    """
    if (target.values.shape != inst.kind.shape
            or abs(target.resolution - inst.resolution) > 1e-9
            or abs(target.origin_x - inst.origin_x) > 1e-9
            or abs(target.origin_y - inst.origin_y) > 1e-9):
        raise AlignmentError("instant map extent does not match the target grid")
    occ = inst.kind == KIND_OCCUPIED
    free = inst.kind == KIND_FREE_SET
    target.values[occ] = np.clip(target.values[occ] + inst.l_occ, lo, hi)
    target.values[free] = inst.l_free
    target.observed[occ | free] = True
