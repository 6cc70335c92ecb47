"""Random Waypoint mobility traces: generation, interpolation and the text file format.

Every stored number is quantized to 6 decimals at generation time, so a trace
written to disk and read back compares equal to the in-memory original.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import DomainError, ParameterError, TraceParseError

FORMAT_VERSION = 1
RNG_NAME = "numpy.PCG64"
# leg boundaries are rounded up to the 6-decimal grid, so a successor may start
# up to 1e-6 s after the exact arrival instant
CONTIGUITY_TOL = 2e-6


def quantize(x: float) -> float:
    """Round to the value that ``%.6f`` prints and ``float()`` reads back."""
    return float(f"{x:.6f}")


def _ceil6(x: float) -> float:
    v = quantize(math.ceil(x * 1e6) / 1e6)
    while v < x:
        v = quantize(v + 1e-6)
    return v


class Point2D(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class RwpParams:
    width: float
    height: float
    node_count: int
    v_max: float
    duration: float
    v_min: float = 0.0
    pause: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not (self.width > 0 and self.height > 0):
            raise ParameterError(f"area must be positive, got {self.width}x{self.height}")
        if self.node_count < 1:
            raise ParameterError(f"node_count must be positive, got {self.node_count}")
        if not (0 <= self.v_min < self.v_max):
            raise ParameterError(f"need 0 <= v_min < v_max, got v_min={self.v_min} v_max={self.v_max}")
        if self.duration <= 0:
            raise ParameterError(f"duration must be positive, got {self.duration}")
        if self.pause < 0:
            raise ParameterError(f"pause must be non-negative, got {self.pause}")
        if not (0 <= self.seed < 2**64):
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class WaypointLeg:
    node: int
    t_start: float
    origin: Point2D
    destination: Point2D
    speed: float

    @property
    def length(self) -> float:
        return math.hypot(self.destination.x - self.origin.x, self.destination.y - self.origin.y)

    @property
    def arrival(self) -> float:
        return self.t_start + self.length / self.speed


@dataclass(frozen=True)
class _NodeArrays:
    t_start: np.ndarray
    origin: np.ndarray  # (L, 2)
    dest: np.ndarray  # (L, 2)
    unit: np.ndarray  # (L, 2)
    speed: np.ndarray
    length: np.ndarray


@dataclass(frozen=True)
class MobilityTrace:
    params: RwpParams
    legs: tuple[tuple[WaypointLeg, ...], ...] = field(repr=False)

    @property
    def node_count(self) -> int:
        return self.params.node_count

    @property
    def duration(self) -> float:
        return self.params.duration

    @cached_property
    def _arrays(self) -> list[_NodeArrays]:
        out = []
        for node_legs in self.legs:
            t0 = np.array([leg.t_start for leg in node_legs])
            org = np.array([leg.origin for leg in node_legs], dtype=float)
            dst = np.array([leg.destination for leg in node_legs], dtype=float)
            spd = np.array([leg.speed for leg in node_legs])
            delta = dst - org
            length = np.hypot(delta[:, 0], delta[:, 1])
            with np.errstate(invalid="ignore", divide="ignore"):
                unit = np.where(length[:, None] > 0, delta / length[:, None], 0.0)
            out.append(_NodeArrays(t0, org, dst, unit, spd, length))
        return out

    def _check_times(self, times: np.ndarray):
        if times.size and (times.min() < 0 or times.max() > self.duration):
            raise DomainError(f"time outside [0, {self.duration}]")

    def node_positions(self, node: int, times) -> np.ndarray:
        """Positions of one node at each of ``times``, shape (len(times), 2)."""
        if not (0 <= node < self.node_count):
            raise DomainError(f"unknown node {node}")
        times = np.asarray(times, dtype=float)
        self._check_times(times)
        return self._interp(self._arrays[node], times)

    def positions(self, times) -> np.ndarray:
        """Positions of all nodes, shape (len(times), node_count, 2)."""
        times = np.asarray(times, dtype=float)
        self._check_times(times)
        out = np.empty((times.size, self.node_count, 2))
        for node, arr in enumerate(self._arrays):
            out[:, node, :] = self._interp(arr, times)
        return out

    def _interp(self, arr: _NodeArrays, times: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(arr.t_start, times, side="right") - 1
        idx = np.clip(idx, 0, len(arr.t_start) - 1)
        travelled = (times - arr.t_start[idx]) * arr.speed[idx]
        arrived = travelled >= arr.length[idx]
        pos = arr.origin[idx] + arr.unit[idx] * travelled[:, None]
        pos = np.where(arrived[:, None], arr.dest[idx], pos)
        np.clip(pos[:, 0], 0.0, self.params.width, out=pos[:, 0])
        np.clip(pos[:, 1], 0.0, self.params.height, out=pos[:, 1])
        return pos


def generate_trace(params: RwpParams) -> MobilityTrace:
    """Random Waypoint with uniform placement, uniform waypoints and speeds in (v_min, v_max]."""
    params.validate()
    if params.node_count < 2:
        raise ParameterError(f"need at least 2 nodes to generate a trace, got {params.node_count}")
    rng = np.random.Generator(np.random.PCG64(params.seed))
    w, h = params.width, params.height
    pause = quantize(params.pause)

    def draw_point() -> Point2D:
        return Point2D(quantize(rng.uniform(0.0, w)), quantize(rng.uniform(0.0, h)))

    def draw_speed() -> float:
        while True:
            # 1 - U lies in (0, 1], so the draw never hits v_min itself
            s = quantize(params.v_max - rng.random() * (params.v_max - params.v_min))
            if s > params.v_min:
                return s

    starts = [draw_point() for _ in range(params.node_count)]
    all_legs = []
    for node in range(params.node_count):
        legs = []
        here, t = starts[node], 0.0
        while True:
            dest = draw_point()
            while dest == here:
                dest = draw_point()
            leg = WaypointLeg(node, t, here, dest, draw_speed())
            legs.append(leg)
            arrival = _ceil6(leg.arrival)
            nxt = quantize(arrival + pause)
            if arrival >= params.duration or nxt >= params.duration:
                break
            here, t = dest, nxt
        all_legs.append(tuple(legs))
    return MobilityTrace(params, tuple(all_legs))


def position_at(trace: MobilityTrace, node: int, t: float) -> Point2D:
    x, y = trace.node_positions(node, [t])[0]
    return Point2D(float(x), float(y))


_HEADER_KEYS = ("format", "width", "height", "node_count", "v_min", "v_max", "pause", "duration", "rng", "seed")
COLUMNS = "node_id,t_start,origin_x,origin_y,dest_x,dest_y,speed"


def format_trace(trace: MobilityTrace) -> str:
    p = trace.params
    lines = [
        f"# format={FORMAT_VERSION}",
        f"# width={p.width:.6f}",
        f"# height={p.height:.6f}",
        f"# node_count={p.node_count}",
        f"# v_min={p.v_min:.6f}",
        f"# v_max={p.v_max:.6f}",
        f"# pause={p.pause:.6f}",
        f"# duration={p.duration:.6f}",
        f"# rng={RNG_NAME}",
        f"# seed={p.seed}",
        f"# columns={COLUMNS}",
    ]
    for node_legs in trace.legs:
        for leg in node_legs:
            lines.append(
                f"{leg.node},{leg.t_start:.6f},{leg.origin.x:.6f},{leg.origin.y:.6f},"
                f"{leg.destination.x:.6f},{leg.destination.y:.6f},{leg.speed:.6f}"
            )
    return "\n".join(lines) + "\n"


def write_trace(trace: MobilityTrace, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(format_trace(trace))
    return path


def parse_trace(text: str) -> MobilityTrace:
    header: dict[str, str] = {}
    records: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                raise TraceParseError(lineno, f"malformed header {raw!r}")
            header[key.strip()] = value.strip()
        else:
            records.append((lineno, line.split(",")))

    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise TraceParseError(1, f"missing header keys: {', '.join(missing)}")
    if header["format"] != str(FORMAT_VERSION):
        raise TraceParseError(1, f"unsupported format version {header['format']}")
    try:
        params = RwpParams(
            width=float(header["width"]),
            height=float(header["height"]),
            node_count=int(header["node_count"]),
            v_min=float(header["v_min"]),
            v_max=float(header["v_max"]),
            pause=float(header["pause"]),
            duration=float(header["duration"]),
            seed=int(header["seed"]),
        )
    except (ValueError, ParameterError) as exc:
        raise TraceParseError(1, f"bad header: {exc}") from None

    def inside(p: Point2D) -> bool:
        return 0 <= p.x <= params.width and 0 <= p.y <= params.height

    per_node: list[list[WaypointLeg]] = [[] for _ in range(params.node_count)]
    last_line = [0] * params.node_count
    prev_key = (-1, -math.inf)
    for lineno, fields in records:
        if len(fields) != 7:
            raise TraceParseError(lineno, f"expected 7 fields, got {len(fields)}")
        try:
            node = int(fields[0])
            t0, ox, oy, dx, dy, speed = map(float, fields[1:])
        except ValueError:
            raise TraceParseError(lineno, "non-numeric field") from None
        if not (0 <= node < params.node_count):
            raise TraceParseError(lineno, f"unknown node id {node}")
        if (node, t0) <= prev_key:
            raise TraceParseError(lineno, "records not strictly sorted by (node_id, t_start)")
        prev_key = (node, t0)
        leg = WaypointLeg(node, t0, Point2D(ox, oy), Point2D(dx, dy), speed)
        if not (inside(leg.origin) and inside(leg.destination)):
            raise TraceParseError(lineno, "coordinate outside the area")
        if speed <= 0:
            raise TraceParseError(lineno, "speed must be positive")
        legs = per_node[node]
        if not legs:
            if t0 != 0:
                raise TraceParseError(lineno, f"first leg of node {node} must start at 0")
        else:
            prev = legs[-1]
            expected = prev.arrival + params.pause
            if abs(t0 - expected) > CONTIGUITY_TOL:
                kind = "gap" if t0 > expected else "overlap"
                raise TraceParseError(lineno, f"{kind} between legs of node {node}: starts {t0}, expected {expected:.6f}")
            if leg.origin != prev.destination:
                raise TraceParseError(lineno, f"leg origin of node {node} does not match previous destination")
        legs.append(leg)
        last_line[node] = lineno

    for node, legs in enumerate(per_node):
        if not legs:
            raise TraceParseError(len(text.splitlines()), f"node {node} has no legs")
        if legs[-1].arrival + params.pause < params.duration - CONTIGUITY_TOL:
            raise TraceParseError(last_line[node], f"legs of node {node} end before the duration")
    return MobilityTrace(params, tuple(tuple(legs) for legs in per_node))


def read_trace(path: Union[str, Path]) -> MobilityTrace:
    return parse_trace(Path(path).read_text())


def static_trace(points: Sequence[tuple[float, float]], width: float, height: float, duration: float) -> MobilityTrace:
    """A practically frozen topology for tests and calibration.

    Each node creeps at 1e-6 m/s (the smallest speed the file format stores)
    along x, moving ``duration * 1e-6`` m in total.
    """
    drift = duration * 1e-6
    legs = []
    for node, (x, y) in enumerate(points):
        origin = Point2D(quantize(x), quantize(y))
        dx = drift if origin.x + drift <= width else -drift
        dest = Point2D(quantize(origin.x + dx), origin.y)
        legs.append((WaypointLeg(node, 0.0, origin, dest, 1e-6),))
    params = RwpParams(width=width, height=height, node_count=len(points), v_max=1e-6, duration=duration)
    return MobilityTrace(params, tuple(legs))
