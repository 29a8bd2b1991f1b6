"""Scenario files: schema, unit checking, validation, resolved dumps.

A scenario is one YAML document describing the body, the wire routing,
controller settings and the experiment timeline.  Every dimensional
quantity is written as a ``{value, unit}`` pair and the loader refuses a
file whose units do not match the schema, naming the offending field.
Loading fills in every default and keeps the fully resolved document
around so a run can be reproduced from its dump alone.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .allocation import AllocationWeights, TensionBounds, WinchParams
from .anchors import Pillar, RelativePoseSensor, TrackerGains
from .simulator import BodyModel, SensorModel
from .spatial import PidGains, Pose
from .wires import WireAttachment

FORMAT_VERSION = 1

POSE_CONTROL = "pose_control"
TENSION_SCHEDULE = "tension_schedule"


class ParseError(Exception):
    """The scenario file is not well-formed YAML / not a mapping."""


class ValidationError(Exception):
    """The scenario violates the schema; `field` names the culprit."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


# canonical unit spellings accepted per dimension
_UNIT_ALIASES = {
    "m": {"m"},
    "m/s": {"m/s"},
    "m/s^2": {"m/s^2", "m/s2"},
    "kg": {"kg"},
    "kg m^2": {"kg m^2", "kg*m^2", "kg m2"},
    "N": {"N"},
    "N m": {"N m", "Nm", "N*m"},
    "N m/A": {"N m/A", "Nm/A"},
    "N m s/rad": {"N m s/rad", "Nm s/rad"},
    "s": {"s"},
    "Hz": {"Hz"},
    "rad": {"rad"},
    "rad/s": {"rad/s"},
    "m/s, rad/s": {"m/s, rad/s"},
    "N/m, N m/rad": {"N/m, N m/rad"},
    "N s/m, N m s/rad": {"N s/m, N m s/rad"},
    "N/(m s), N m/(rad s)": {"N/(m s), N m/(rad s)"},
    "m s, rad s": {"m s, rad s"},
    "1/s": {"1/s"},
}


_REQUIRED = object()

# wires waiting on a flying anchor get a far-away placeholder anchor; the
# deployment phase must replace it before any dynamics run
DEPLOYMENT_PLACEHOLDER = np.array([1e6, 1e6, 1e6])


def _require_mapping(node: Any, path: str) -> dict:
    if not isinstance(node, dict):
        raise ValidationError(path, f"expected a mapping, got {type(node).__name__}")
    return node


def _get(node: dict, path: str, key: str, default=_REQUIRED):
    if key in node:
        return node[key]
    if default is _REQUIRED:
        raise ValidationError(f"{path}.{key}" if path else key, "required field is missing")
    return default


def _quantity(node: dict, path: str, key: str, unit: str, default=None, shape=None):
    """Read a {value, unit} pair, enforcing the expected unit."""
    full = f"{path}.{key}" if path else key
    if key not in node:
        if default is None:
            raise ValidationError(full, "required field is missing")
        return np.asarray(default, dtype=float) if shape else float(default)
    raw = node[key]
    if not isinstance(raw, dict) or "value" not in raw or "unit" not in raw:
        raise ValidationError(full, "physical quantities need a {value, unit} pair")
    if str(raw["unit"]) not in _UNIT_ALIASES[unit]:
        raise ValidationError(full, f"unit {raw['unit']!r} does not match expected {unit!r}")
    value = raw["value"]
    try:
        if shape is None:
            out = float(value)
        else:
            out = np.asarray(value, dtype=float)
            if out.shape != shape:
                raise ValidationError(full, f"expected shape {shape}, got {out.shape}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(full, f"value is not numeric: {value!r}") from exc
    if shape is None and not np.isfinite(out):
        raise ValidationError(full, "value must be finite")
    if shape is not None and not np.all(np.isfinite(out)):
        raise ValidationError(full, "values must be finite")
    return out


def _plain_number(node: dict, path: str, key: str, default=None):
    full = f"{path}.{key}" if path else key
    value = _get(node, path, key, default)
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(full, f"expected a number, got {value!r}") from exc


def _qdump(value, unit: str):
    if isinstance(value, np.ndarray):
        value = [float(v) for v in value.ravel()] if value.ndim == 1 else [
            [float(v) for v in row] for row in value
        ]
    else:
        value = float(value)
    return {"value": value, "unit": unit}


@dataclass(frozen=True, eq=False)
class SegmentSpec:
    goal_pose: Pose
    goal_velocity: np.ndarray  # (6,)
    duration: float


@dataclass(frozen=True, eq=False)
class AnchorTask:
    wire_id: int
    pillar_index: int
    approach: np.ndarray  # (3,)
    clearance: float
    wrap_altitude: float


@dataclass(frozen=True, eq=False)
class DeploymentConfig:
    tracker: TrackerGains
    sensor: RelativePoseSensor
    capture_radius: float
    waypoint_spacing: float
    drone_dt: float


@dataclass(eq=False)
class Scenario:
    """A fully resolved experiment description."""

    name: str
    seed: int
    gravity: float
    body: BodyModel
    wires: list[WireAttachment]
    bounds: TensionBounds
    weights: AllocationWeights
    winch: WinchParams
    gains: PidGains
    mode: str
    schedule_table: list[tuple[float, np.ndarray]] | None
    start_pose: Pose
    segments: list[SegmentSpec]
    dt: float
    duration: float
    control_rate: float
    speed_limit: float
    sensor: SensorModel
    pillars: list[Pillar] = field(default_factory=list)
    anchors: list[AnchorTask] = field(default_factory=list)
    deployment: DeploymentConfig | None = None
    resolved: dict = field(default_factory=dict)

    @property
    def wire_count(self) -> int:
        return len(self.wires)

    @property
    def substeps(self) -> int:
        return int(round(1.0 / (self.control_rate * self.dt)))


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    base = importlib.resources.files("wiredrive.scenarios")
    candidate = base / f"{name}.yaml"
    if not candidate.is_file():
        available = sorted(p.stem for p in Path(str(base)).glob("*.yaml"))
        raise FileNotFoundError(f"no bundled scenario {name!r}; available: {available}")
    return Path(str(candidate))


def load_scenario(path) -> Scenario:
    """Parse, validate and resolve a scenario file."""
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"scenario file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed YAML in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"scenario root must be a mapping, got {type(raw).__name__}")
    return _build_scenario(raw)


def _build_scenario(raw: dict) -> Scenario:
    version = int(_get(raw, "", "format_version", FORMAT_VERSION))
    if version != FORMAT_VERSION:
        raise ValidationError("format_version", f"unsupported version {version}")
    name = str(_get(raw, "", "name"))
    seed = int(_get(raw, "", "seed", 0))
    gravity = _quantity(raw, "", "gravity", "m/s^2", default=9.80665)

    body_node = _require_mapping(_get(raw, "", "body"), "body")
    mass = _quantity(body_node, "body", "mass", "kg")
    if mass <= 0:
        raise ValidationError("body.mass", "must be strictly positive")
    radius = _quantity(body_node, "body", "radius", "m", default=0.2)
    if "inertia_diagonal" in body_node:
        diag = _quantity(body_node, "body", "inertia_diagonal", "kg m^2", shape=(3,))
        inertia = np.diag(diag)
    elif "inertia_cube_side" in body_node:
        side = _quantity(body_node, "body", "inertia_cube_side", "m")
        inertia = np.eye(3) * mass * side**2 / 6.0
    else:
        raise ValidationError(
            "body.inertia_diagonal", "body needs inertia_diagonal or inertia_cube_side"
        )
    try:
        body = BodyModel(mass, inertia, radius=radius)
    except ValueError as exc:
        raise ValidationError("body", str(exc)) from exc

    wires_node = _get(raw, "", "wires")
    if not isinstance(wires_node, list) or not wires_node:
        raise ValidationError("wires", "need a non-empty list of wires")
    anchors_node = raw.get("anchors", []) or []
    deployed_ids = set()
    for j, a in enumerate(anchors_node):
        deployed_ids.add(int(_get(_require_mapping(a, f"anchors[{j}]"), f"anchors[{j}]", "wire_id")))
    wires = []
    for i, w in enumerate(wires_node):
        wpath = f"wires[{i}]"
        wnode = _require_mapping(w, wpath)
        exit_body = _quantity(wnode, wpath, "exit_body", "m", shape=(3,))
        if np.linalg.norm(exit_body) > body.radius + 1e-9:
            raise ValidationError(
                f"{wpath}.exit_body",
                f"exit point magnitude {np.linalg.norm(exit_body):.3f} m "
                f"exceeds the body radius {body.radius:.3f} m",
            )
        if "anchor_world" in wnode:
            anchor = _quantity(wnode, wpath, "anchor_world", "m", shape=(3,))
        elif i in deployed_ids:
            anchor = DEPLOYMENT_PLACEHOLDER
        else:
            raise ValidationError(
                f"{wpath}.anchor_world",
                "wire needs an anchor_world or a deployment anchor task",
            )
        wires.append(WireAttachment(exit_body, anchor, wire_id=i))
    m = len(wires)

    bounds_node = _require_mapping(_get(raw, "", "tension_bounds", {}), "tension_bounds")
    lower = _quantity(bounds_node, "tension_bounds", "lower", "N", default=2.0)
    upper = _quantity(bounds_node, "tension_bounds", "upper", "N", default=180.0)
    try:
        bounds = TensionBounds(np.full(m, lower), np.full(m, upper))
    except ValueError as exc:
        raise ValidationError("tension_bounds", str(exc)) from exc

    weights_node = _require_mapping(_get(raw, "", "allocation_weights", {}), "allocation_weights")
    weight_scale = _plain_number(weights_node, "allocation_weights", "scale", default=1e4)
    torque_lever = _quantity(
        weights_node, "allocation_weights", "torque_lever", "m", default=body.radius
    )
    if weight_scale <= 0 or torque_lever <= 0:
        raise ValidationError("allocation_weights", "scale and torque_lever must be positive")
    weights = AllocationWeights.diagonal(scale=weight_scale, torque_lever=torque_lever)

    winch_node = _require_mapping(_get(raw, "", "winch", {}), "winch")
    try:
        winch = WinchParams(
            pulley_radius=_quantity(winch_node, "winch", "pulley_radius", "m", default=0.008),
            gear_ratio=_plain_number(winch_node, "winch", "gear_ratio", default=53.0),
            torque_constant=_quantity(
                winch_node, "winch", "torque_constant", "N m/A", default=0.014
            ),
            eff_pulley=_plain_number(winch_node, "winch", "eff_pulley", default=1.0),
            eff_gear=_plain_number(winch_node, "winch", "eff_gear", default=1.0),
            rotor_inertia=_quantity(winch_node, "winch", "rotor_inertia", "kg m^2", default=1e-6),
            coulomb_friction=_quantity(
                winch_node, "winch", "coulomb_friction", "N m", default=0.002
            ),
            viscous_friction=_quantity(
                winch_node, "winch", "viscous_friction", "N m s/rad", default=1e-4
            ),
            max_tension=_quantity(winch_node, "winch", "max_tension", "N", default=float(upper)),
            max_line_speed=_quantity(
                winch_node, "winch", "max_line_speed", "m/s", default=0.242
            ),
            winding_capacity=_quantity(
                winch_node, "winch", "winding_capacity", "m", default=5.3
            ),
        )
    except ValueError as exc:
        raise ValidationError("winch", str(exc)) from exc

    control_node = _require_mapping(_get(raw, "", "control", {}), "control")
    mode = str(_get(control_node, "control", "mode", POSE_CONTROL))
    if mode not in (POSE_CONTROL, TENSION_SCHEDULE):
        raise ValidationError("control.mode", f"unknown mode {mode!r}")
    control_rate = _quantity(control_node, "control", "rate", "Hz", default=200.0)
    pid_node = _require_mapping(_get(control_node, "control", "pid", {}), "control.pid")
    try:
        gains = PidGains(
            kp=_quantity(pid_node, "control.pid", "kp", "N/m, N m/rad",
                         default=np.zeros(6), shape=(6,)),
            ki=_quantity(pid_node, "control.pid", "ki", "N/(m s), N m/(rad s)",
                         default=np.zeros(6), shape=(6,)),
            kd=_quantity(pid_node, "control.pid", "kd", "N s/m, N m s/rad",
                         default=np.zeros(6), shape=(6,)),
            integral_limit=_quantity(pid_node, "control.pid", "integral_limit", "m s, rad s",
                                     default=np.zeros(6), shape=(6,)),
        )
    except ValueError as exc:
        raise ValidationError("control.pid", str(exc)) from exc

    schedule_table = None
    if mode == TENSION_SCHEDULE:
        schedule = _get(control_node, "control", "schedule", "quasistatic")
        if isinstance(schedule, list):
            schedule_table = []
            last_t = -np.inf
            for k, row in enumerate(schedule):
                rpath = f"control.schedule[{k}]"
                rnode = _require_mapping(row, rpath)
                t_k = _quantity(rnode, rpath, "t", "s")
                tensions_k = _quantity(rnode, rpath, "tensions", "N", shape=(m,))
                if t_k <= last_t:
                    raise ValidationError(rpath + ".t", "schedule times must increase")
                if np.any(tensions_k < 0):
                    raise ValidationError(rpath + ".tensions", "tensions must be non-negative")
                last_t = t_k
                schedule_table.append((t_k, tensions_k))
            if not schedule_table:
                raise ValidationError("control.schedule", "schedule table is empty")
        elif schedule != "quasistatic":
            raise ValidationError(
                "control.schedule", "must be 'quasistatic' or a list of {t, tensions} rows"
            )

    traj_node = _require_mapping(_get(raw, "", "trajectory"), "trajectory")
    start_node = _require_mapping(_get(traj_node, "trajectory", "start"), "trajectory.start")
    start_pose = Pose.from_rotvec(
        _quantity(start_node, "trajectory.start", "position", "m", shape=(3,)),
        _quantity(start_node, "trajectory.start", "orientation_rotvec", "rad",
                  default=np.zeros(3), shape=(3,)),
    )
    seg_nodes = _get(traj_node, "trajectory", "segments")
    if not isinstance(seg_nodes, list) or not seg_nodes:
        raise ValidationError("trajectory.segments", "need at least one segment")
    segments = []
    for k, seg in enumerate(seg_nodes):
        spath = f"trajectory.segments[{k}]"
        snode = _require_mapping(seg, spath)
        duration = _quantity(snode, spath, "duration", "s")
        if duration <= 0:
            raise ValidationError(f"{spath}.duration", "must be positive")
        goal = Pose.from_rotvec(
            _quantity(snode, spath, "goal_position", "m", shape=(3,)),
            _quantity(snode, spath, "goal_orientation_rotvec", "rad",
                      default=np.zeros(3), shape=(3,)),
        )
        velocity = _quantity(snode, spath, "goal_velocity", "m/s, rad/s",
                             default=np.zeros(6), shape=(6,))
        segments.append(SegmentSpec(goal, velocity, duration))

    sim_node = _require_mapping(_get(raw, "", "sim", {}), "sim")
    dt = _quantity(sim_node, "sim", "dt", "s", default=1e-3)
    if not 0 < dt <= 0.01:
        raise ValidationError("sim.dt", "dt must lie in (0, 0.01] seconds")
    total_segments = sum(s.duration for s in segments)
    duration = _quantity(sim_node, "sim", "duration", "s", default=total_segments + 2.0)
    if duration <= 0:
        raise ValidationError("sim.duration", "must be positive")
    speed_limit = _plain_number(sim_node, "sim", "speed_limit", default=1e3)
    substeps = 1.0 / (control_rate * dt)
    if abs(substeps - round(substeps)) > 1e-9 or round(substeps) < 1:
        raise ValidationError(
            "control.rate", f"control period must be a whole multiple of sim.dt (got {substeps})"
        )
    sensor_node = _require_mapping(_get(sim_node, "sim", "sensor", {}), "sim.sensor")
    try:
        sensor = SensorModel(
            position_noise=_quantity(sensor_node, "sim.sensor", "position_noise", "m", default=0.0),
            rotation_noise=_quantity(sensor_node, "sim.sensor", "rotation_noise", "rad", default=0.0),
            velocity_noise=_quantity(sensor_node, "sim.sensor", "velocity_noise", "m/s", default=0.0),
            angular_velocity_noise=_quantity(
                sensor_node, "sim.sensor", "angular_velocity_noise", "rad/s", default=0.0
            ),
            latency=int(_get(sensor_node, "sim.sensor", "latency", 0)),
        )
    except ValueError as exc:
        raise ValidationError("sim.sensor", str(exc)) from exc

    pillars = []
    for k, p in enumerate(raw.get("pillars", []) or []):
        ppath = f"pillars[{k}]"
        pnode = _require_mapping(p, ppath)
        z_range = _quantity(pnode, ppath, "z_range", "m", default=np.array([0.0, 2.5]), shape=(2,))
        try:
            pillars.append(
                Pillar(
                    center=_quantity(pnode, ppath, "center", "m", shape=(2,)),
                    half_extents=_quantity(pnode, ppath, "half_extents", "m",
                                           default=np.array([0.175, 0.35]), shape=(2,)),
                    z_range=(float(z_range[0]), float(z_range[1])),
                )
            )
        except ValueError as exc:
            raise ValidationError(ppath, str(exc)) from exc

    anchors = []
    for k, a in enumerate(anchors_node):
        apath = f"anchors[{k}]"
        anode = _require_mapping(a, apath)
        wire_id = int(_get(anode, apath, "wire_id"))
        pillar_index = int(_get(anode, apath, "pillar"))
        if wire_id < 0 or wire_id >= m:
            raise ValidationError(f"{apath}.wire_id", f"no wire with id {wire_id}")
        if pillar_index < 0 or pillar_index >= len(pillars):
            raise ValidationError(f"{apath}.pillar", f"no pillar with index {pillar_index}")
        pillar = pillars[pillar_index]
        anchors.append(
            AnchorTask(
                wire_id=wire_id,
                pillar_index=pillar_index,
                approach=_quantity(anode, apath, "approach", "m", shape=(3,)),
                clearance=_quantity(anode, apath, "clearance", "m", default=0.3),
                wrap_altitude=_quantity(
                    anode, apath, "wrap_altitude", "m",
                    default=0.5 * (pillar.z_range[0] + pillar.z_range[1]),
                ),
            )
        )

    deployment = None
    if anchors:
        dep_node = _require_mapping(_get(raw, "", "deployment", {}), "deployment")
        tr_node = _require_mapping(_get(dep_node, "deployment", "tracker", {}), "deployment.tracker")
        sn_node = _require_mapping(_get(dep_node, "deployment", "sensor", {}), "deployment.sensor")
        try:
            deployment = DeploymentConfig(
                tracker=TrackerGains(
                    kp=_quantity(tr_node, "deployment.tracker", "kp", "1/s", default=1.5),
                    speed_cap=_quantity(tr_node, "deployment.tracker", "speed_cap", "m/s",
                                        default=0.5),
                ),
                sensor=RelativePoseSensor(
                    noise_std=_quantity(sn_node, "deployment.sensor", "noise_std", "m",
                                        default=0.0),
                    detection_range=_quantity(sn_node, "deployment.sensor", "detection_range",
                                              "m", default=np.inf),
                ),
                capture_radius=_quantity(dep_node, "deployment", "capture_radius", "m",
                                         default=0.05),
                waypoint_spacing=_quantity(dep_node, "deployment", "waypoint_spacing", "m",
                                           default=0.15),
                drone_dt=_quantity(dep_node, "deployment", "drone_dt", "s", default=0.02),
            )
        except ValueError as exc:
            raise ValidationError("deployment", str(exc)) from exc

    scenario = Scenario(
        name=name,
        seed=seed,
        gravity=gravity,
        body=body,
        wires=wires,
        bounds=bounds,
        weights=weights,
        winch=winch,
        gains=gains,
        mode=mode,
        schedule_table=schedule_table,
        start_pose=start_pose,
        segments=segments,
        dt=dt,
        duration=duration,
        control_rate=control_rate,
        speed_limit=speed_limit,
        sensor=sensor,
        pillars=pillars,
        anchors=anchors,
        deployment=deployment,
    )
    scenario.resolved = resolve_dict(scenario)
    return scenario


def resolve_dict(s: Scenario) -> dict:
    """Fully resolved scenario as a plain document (defaults included)."""
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "name": s.name,
        "seed": s.seed,
        "gravity": _qdump(s.gravity, "m/s^2"),
        "body": {
            "mass": _qdump(s.body.mass, "kg"),
            "inertia_diagonal": _qdump(np.diag(s.body.inertia), "kg m^2"),
            "radius": _qdump(s.body.radius, "m"),
        },
        "wires": [
            {
                "exit_body": _qdump(w.exit_body, "m"),
                "anchor_world": _qdump(w.anchor_world, "m"),
            }
            for w in s.wires
        ],
        "tension_bounds": {
            "lower": _qdump(float(s.bounds.lower[0]), "N"),
            "upper": _qdump(float(s.bounds.upper[0]), "N"),
        },
        "allocation_weights": {
            "scale": float(s.weights.matrix[0, 0]),
            "torque_lever": _qdump(
                float(np.sqrt(s.weights.matrix[0, 0] / s.weights.matrix[3, 3])), "m"
            ),
        },
        "winch": {
            "pulley_radius": _qdump(s.winch.pulley_radius, "m"),
            "gear_ratio": s.winch.gear_ratio,
            "torque_constant": _qdump(s.winch.torque_constant, "N m/A"),
            "eff_pulley": s.winch.eff_pulley,
            "eff_gear": s.winch.eff_gear,
            "rotor_inertia": _qdump(s.winch.rotor_inertia, "kg m^2"),
            "coulomb_friction": _qdump(s.winch.coulomb_friction, "N m"),
            "viscous_friction": _qdump(s.winch.viscous_friction, "N m s/rad"),
            "max_tension": _qdump(s.winch.max_tension, "N"),
            "max_line_speed": _qdump(s.winch.max_line_speed, "m/s"),
            "winding_capacity": _qdump(s.winch.winding_capacity, "m"),
        },
        "control": {
            "mode": s.mode,
            "rate": _qdump(s.control_rate, "Hz"),
            "pid": {
                "kp": _qdump(s.gains.kp, "N/m, N m/rad"),
                "ki": _qdump(s.gains.ki, "N/(m s), N m/(rad s)"),
                "kd": _qdump(s.gains.kd, "N s/m, N m s/rad"),
                "integral_limit": _qdump(s.gains.integral_limit, "m s, rad s"),
            },
        },
        "trajectory": {
            "start": {
                "position": _qdump(s.start_pose.position, "m"),
                "orientation_rotvec": _qdump(_pose_rotvec(s.start_pose), "rad"),
            },
            "segments": [
                {
                    "goal_position": _qdump(seg.goal_pose.position, "m"),
                    "goal_orientation_rotvec": _qdump(
                        _pose_rotvec(seg.goal_pose), "rad"
                    ),
                    "goal_velocity": _qdump(seg.goal_velocity, "m/s, rad/s"),
                    "duration": _qdump(seg.duration, "s"),
                }
                for seg in s.segments
            ],
        },
        "sim": {
            "dt": _qdump(s.dt, "s"),
            "duration": _qdump(s.duration, "s"),
            "speed_limit": s.speed_limit,
            "sensor": {
                "position_noise": _qdump(s.sensor.position_noise, "m"),
                "rotation_noise": _qdump(s.sensor.rotation_noise, "rad"),
                "velocity_noise": _qdump(s.sensor.velocity_noise, "m/s"),
                "angular_velocity_noise": _qdump(s.sensor.angular_velocity_noise, "rad/s"),
                "latency": s.sensor.latency,
            },
        },
    }
    if s.mode == TENSION_SCHEDULE:
        if s.schedule_table is None:
            doc["control"]["schedule"] = "quasistatic"
        else:
            doc["control"]["schedule"] = [
                {"t": _qdump(t, "s"), "tensions": _qdump(f, "N")} for t, f in s.schedule_table
            ]
    if s.pillars:
        doc["pillars"] = [
            {
                "center": _qdump(p.center, "m"),
                "half_extents": _qdump(p.half_extents, "m"),
                "z_range": _qdump(np.array(p.z_range), "m"),
            }
            for p in s.pillars
        ]
    if s.anchors:
        doc["anchors"] = [
            {
                "wire_id": a.wire_id,
                "pillar": a.pillar_index,
                "approach": _qdump(a.approach, "m"),
                "clearance": _qdump(a.clearance, "m"),
                "wrap_altitude": _qdump(a.wrap_altitude, "m"),
            }
            for a in s.anchors
        ]
    if s.deployment is not None:
        d = s.deployment
        doc["deployment"] = {
            "tracker": {
                "kp": _qdump(d.tracker.kp, "1/s"),
                "speed_cap": _qdump(d.tracker.speed_cap, "m/s"),
            },
            "sensor": {
                "noise_std": _qdump(d.sensor.noise_std, "m"),
                "detection_range": _qdump(d.sensor.detection_range, "m"),
            },
            "capture_radius": _qdump(d.capture_radius, "m"),
            "waypoint_spacing": _qdump(d.waypoint_spacing, "m"),
            "drone_dt": _qdump(d.drone_dt, "s"),
        }
    return doc


def _pose_rotvec(pose: Pose) -> np.ndarray:
    from .spatial import rotvec_from_quat

    return rotvec_from_quat(pose.orientation)


def dump_scenario(scenario: Scenario) -> str:
    """Stable YAML text of the resolved scenario."""
    return yaml.safe_dump(scenario.resolved, sort_keys=True, default_flow_style=None)
