"""Pose trajectories and the full control pipeline.

Segments are per-axis cubics: three translation axes plus three axes of a
rotation-vector chart anchored at the segment's start orientation, so the
chart singularity sits a full half-turn away from the path.  Boundary
angular velocities are pulled into the chart through the inverse left
Jacobian, and sampling pushes chart rates back out analytically, second
derivatives included.

The controller runs the classic cascade: sampled reference -> PID feedback
wrench + gravity feedforward -> bounded tension allocation -> winch
compensation -> motor currents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import (
    AllocationWeights,
    TensionBounds,
    WinchSet,
    solve_tension_command,
)
from .errors import RotationTooLarge
from .simulator import STANDARD_GRAVITY, BodyModel
from .spatial import (
    PidGains,
    PidState,
    Pose,
    Twist,
    Wrench,
    compose,
    quat_conjugate,
    quat_multiply,
    rotvec_from_quat,
    so3_left_jacobian,
    so3_left_jacobian_dot,
    so3_left_jacobian_inv,
    wrench_error_pid,
)
from .wires import wire_jacobian, wire_lengths_and_rates

ROTATION_CHART_LIMIT = np.pi - 0.1  # rad; reject segments near the chart edge


def _cubic_coeffs(p0, v0, p1, v1, duration):
    """Coefficient rows [a, b, c, d] of a*t^3 + b*t^2 + c*t + d per axis."""
    p0, v0, p1, v1 = (np.asarray(x, dtype=float) for x in (p0, v0, p1, v1))
    t = duration
    d = p0
    c = v0
    a = (v1 * t + v0 * t - 2.0 * (p1 - p0)) / t**3
    b = (p1 - p0 - v0 * t) / t**2 - a * t
    return np.stack([a, b, c, d])


def _cubic_eval(coeffs, t):
    a, b, c, d = coeffs
    pos = ((a * t + b) * t + c) * t + d
    vel = (3.0 * a * t + 2.0 * b) * t + c
    acc = 6.0 * a * t + 2.0 * b
    return pos, vel, acc


@dataclass(frozen=True, eq=False)
class SplineSegment:
    """One cubic segment between boundary poses and twists."""

    start_pose: Pose
    end_pose: Pose
    duration: float
    translation: np.ndarray  # (4, 3) cubic coefficients
    rotation: np.ndarray  # (4, 3) cubic coefficients in the start chart

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("segment duration must be positive")


def plan_spline(
    start_pose: Pose,
    start_twist: Twist,
    end_pose: Pose,
    end_twist: Twist,
    duration: float,
) -> SplineSegment:
    """Fit boundary-matching cubics in position and the rotation chart."""
    if duration <= 0:
        raise ValueError("segment duration must be positive")
    chart_end = rotvec_from_quat(
        quat_multiply(end_pose.orientation, quat_conjugate(start_pose.orientation))
    )
    angle = float(np.linalg.norm(chart_end))
    if angle >= ROTATION_CHART_LIMIT:
        raise RotationTooLarge(
            f"relative rotation {angle:.3f} rad is too close to the chart "
            f"singularity (limit {ROTATION_CHART_LIMIT:.3f})"
        )
    chart_rate_start = start_twist.angular  # J_l(0) is the identity
    chart_rate_end = so3_left_jacobian_inv(chart_end) @ end_twist.angular
    return SplineSegment(
        start_pose=start_pose,
        end_pose=end_pose,
        duration=float(duration),
        translation=_cubic_coeffs(
            start_pose.position, start_twist.linear, end_pose.position, end_twist.linear, duration
        ),
        rotation=_cubic_coeffs(np.zeros(3), chart_rate_start, chart_end, chart_rate_end, duration),
    )


def sample(segment: SplineSegment, t: float) -> tuple[Pose, Twist, np.ndarray]:
    """Reference pose, twist and 6-D acceleration at time t.

    Outside [0, duration] the sample clamps to the nearer endpoint pose
    with zero velocity and acceleration.
    """
    if t < 0.0:
        return segment.start_pose, Twist.zero(), np.zeros(6)
    if t > segment.duration:
        return segment.end_pose, Twist.zero(), np.zeros(6)
    pos, vel, acc = _cubic_eval(segment.translation, t)
    chart, chart_rate, chart_acc = _cubic_eval(segment.rotation, t)
    orientation = quat_multiply(
        Pose.from_rotvec(np.zeros(3), chart).orientation, segment.start_pose.orientation
    )
    jac = so3_left_jacobian(chart)
    omega = jac @ chart_rate
    omega_dot = jac @ chart_acc + so3_left_jacobian_dot(chart, chart_rate) @ chart_rate
    return (
        Pose(pos, orientation),
        Twist(vel, omega),
        np.concatenate([acc, omega_dot]),
    )


@dataclass(frozen=True, eq=False)
class ControlTick:
    """Everything one pass of the control loop produced."""

    timestamp: float
    pose: Pose
    twist: Twist
    pose_ref: Pose
    twist_ref: Twist
    accel_ref: np.ndarray
    feedback_wrench: Wrench
    gravity_wrench: Wrench
    desired_wrench: Wrench
    tensions: np.ndarray
    tensions_final: np.ndarray
    currents: np.ndarray
    residual_norm: float
    saturated: np.ndarray


def gravity_feedforward(body: BodyModel, gravity: float = STANDARD_GRAVITY) -> Wrench:
    """Wrench the wires must supply to hold the body against gravity."""
    return Wrench(np.array([0.0, 0.0, body.mass * gravity]), np.zeros(3))


class PoseController:
    """Full pose-control loop for one wire-driven body.

    Owns the PID integral state and the previous tension solution (used
    to warm-start the allocator).  One instance drives one loop; it is
    not meant to be shared across threads.
    """

    def __init__(
        self,
        body: BodyModel,
        attachments,
        bounds: TensionBounds,
        weights: AllocationWeights,
        winches: WinchSet,
        gains: PidGains,
        dt: float,
        gravity: float = STANDARD_GRAVITY,
    ):
        if dt <= 0:
            raise ValueError("controller period must be positive")
        self.body = body
        self.attachments = list(attachments)
        self.bounds = bounds
        self.weights = weights
        self.winches = winches
        self.gains = gains
        self.dt = dt
        self.gravity = gravity
        self.pid_state = PidState()
        self._warm_start: np.ndarray | None = None

    def reset(self) -> None:
        self.pid_state.reset()
        self._warm_start = None

    def step(
        self, pose: Pose, twist: Twist, segment: SplineSegment, t: float
    ) -> ControlTick:
        """One control tick: may raise DegenerateWire or SolverFailure;
        the loop policy on those is the caller's (hold last currents)."""
        pose_ref, twist_ref, accel_ref = sample(segment, t)
        feedback = wrench_error_pid(
            pose, twist, pose_ref, twist_ref, self.gains, self.pid_state, self.dt
        )
        gravity_ff = gravity_feedforward(self.body, self.gravity)
        desired = feedback + gravity_ff
        jacobian = wire_jacobian(pose, self.attachments)
        wire_state = wire_lengths_and_rates(pose, twist, self.attachments)
        command = solve_tension_command(
            jacobian,
            desired,
            self.bounds,
            self.weights,
            accel_ref,
            wire_state,
            self.winches,
            start=self._warm_start,
        )
        self._warm_start = command.tensions
        return ControlTick(
            timestamp=t,
            pose=pose,
            twist=twist,
            pose_ref=pose_ref,
            twist_ref=twist_ref,
            accel_ref=accel_ref,
            feedback_wrench=feedback,
            gravity_wrench=gravity_ff,
            desired_wrench=desired,
            tensions=command.tensions,
            tensions_final=command.tensions_final,
            currents=command.currents,
            residual_norm=command.residual_norm,
            saturated=command.saturated,
        )


def chain_segments(poses_twists_durations):
    """Plan consecutive segments through a waypoint schedule.

    Takes an iterable of (pose, twist, duration) where the first entry's
    duration is ignored (it is the start state).  Returns the segment
    list plus each segment's start time.
    """
    items = list(poses_twists_durations)
    if len(items) < 2:
        raise ValueError("need a start state and at least one waypoint")
    segments = []
    starts = []
    clock = 0.0
    for (pose_a, twist_a, _), (pose_b, twist_b, duration) in zip(items, items[1:]):
        segments.append(plan_spline(pose_a, twist_a, pose_b, twist_b, duration))
        starts.append(clock)
        clock += duration
    return segments, starts


def sample_schedule(segments, starts, t: float):
    """Sample a chained schedule at absolute time t (clamping at the ends)."""
    if t <= starts[0]:
        return sample(segments[0], t - starts[0])
    for seg, start in zip(reversed(segments), reversed(starts)):
        if t >= start:
            return sample(seg, t - start)
    return sample(segments[0], t - starts[0])
