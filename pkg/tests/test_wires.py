import numpy as np
import pytest

from wiredrive.errors import DegenerateWire
from wiredrive.spatial import Pose, Twist, quat_from_rotvec, quat_multiply
from wiredrive.wires import (
    WireAttachment,
    wire_directions,
    wire_jacobian,
    wire_lengths_and_rates,
    wrench_from_tensions,
)


def random_layout(rng, m, body_radius=0.3, span=2.0):
    wires = []
    for i in range(m):
        exit_body = rng.uniform(-body_radius, body_radius, size=3)
        anchor = rng.uniform(-span, span, size=3)
        anchor += np.sign(anchor) * 0.8  # keep anchors well away from the body
        wires.append(WireAttachment(exit_body, anchor, wire_id=i))
    return wires


def random_pose(rng, scale=0.3):
    rv = rng.normal(size=3)
    rv *= rng.uniform(0, 1.5) / max(np.linalg.norm(rv), 1e-12)
    return Pose.from_rotvec(rng.normal(scale=scale, size=3), rv)


def test_axis_aligned_direction():
    wires = [WireAttachment([0, 0, 0], [2.0, 0.0, 0.0])]
    dirs, exits = wire_directions(Pose.identity(), wires)
    assert np.allclose(dirs[0], [1.0, 0.0, 0.0])
    assert np.allclose(exits[0], [0.0, 0.0, 0.0])


def test_direction_normalization():
    wires = [WireAttachment([0, 0, 0], [1.0, 1.0, 0.0])]
    dirs, _ = wire_directions(Pose.identity(), wires)
    assert np.allclose(dirs[0], [np.sqrt(2) / 2, np.sqrt(2) / 2, 0.0])


def test_direction_in_rotated_frame():
    pose = Pose.from_rotvec(np.zeros(3), [0.0, 0.0, np.pi / 2])
    wires = [WireAttachment([0.1, 0.0, 0.0], [0.0, 2.0, 0.0])]
    dirs, exits = wire_directions(pose, wires)
    assert np.allclose(exits[0], [0.0, 0.1, 0.0], atol=1e-12)
    assert np.allclose(dirs[0], [0.0, 1.0, 0.0], atol=1e-12)


def test_degenerate_wire_raises_with_id():
    wires = [
        WireAttachment([0, 0, 0], [1.0, 0.0, 0.0], wire_id=0),
        WireAttachment([0.1, 0.0, 0.0], [0.1, 0.0, 0.0], wire_id=7),
    ]
    with pytest.raises(DegenerateWire) as info:
        wire_directions(Pose.identity(), wires)
    assert info.value.wire_id == 7


def test_jacobian_zero_lever_column():
    wires = [WireAttachment([0, 0, 0], [3.0, 0.0, 0.0])]
    jac = wire_jacobian(Pose.identity(), wires)
    assert np.allclose(jac.matrix[:, 0], [1, 0, 0, 0, 0, 0])


def test_jacobian_hand_cross_product():
    # lever (0, 0.1, 0) with direction +x gives torque (0, 0, -0.1)
    wires = [WireAttachment([0.0, 0.1, 0.0], [5.0, 0.1, 0.0])]
    jac = wire_jacobian(Pose.identity(), wires)
    assert np.allclose(jac.matrix[:, 0], [1, 0, 0, 0, 0, -0.1], atol=1e-12)


def test_jacobian_lever_uses_rotation_not_translation():
    # translating the body must not change the lever arm term
    wires = [WireAttachment([0.0, 0.1, 0.0], [5.0, 0.1, 0.0])]
    near = wire_jacobian(Pose.identity(), wires).matrix
    far = wire_jacobian(Pose.from_translation([1.0, 0.0, 0.0]), wires).matrix
    assert np.allclose(near[3:, 0], far[3:, 0], atol=1e-12)


def test_wrench_matches_per_wire_accumulation():
    # independent oracle: accumulate each wire's force/torque separately
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = int(rng.integers(1, 9))
        wires = random_layout(rng, m)
        pose = random_pose(rng)
        tensions = rng.uniform(0.0, 150.0, size=m)
        total = wrench_from_tensions(pose, wires, tensions).as_array()
        rot = pose.rotation_matrix()
        expected = np.zeros(6)
        for wire, tension in zip(wires, tensions):
            exit_world = pose.position + rot @ wire.exit_body
            span = wire.anchor_world - exit_world
            direction = span / np.linalg.norm(span)
            force = tension * direction
            torque = np.cross(rot @ wire.exit_body, force)
            expected[:3] += force
            expected[3:] += torque
        assert np.allclose(total, expected, atol=1e-12)


def test_jacobian_invariant_to_anchor_distance_along_ray():
    rng = np.random.default_rng(1)
    for _ in range(20):
        pose = random_pose(rng)
        exit_body = rng.uniform(-0.2, 0.2, size=3)
        exit_world = pose.transform_point(exit_body)
        ray = rng.normal(size=3)
        ray /= np.linalg.norm(ray)
        near = [WireAttachment(exit_body, exit_world + 1.0 * ray)]
        far = [WireAttachment(exit_body, exit_world + 7.3 * ray)]
        assert np.allclose(
            wire_jacobian(pose, near).matrix, wire_jacobian(pose, far).matrix, atol=1e-12
        )


def test_static_body_has_zero_rates():
    rng = np.random.default_rng(2)
    wires = random_layout(rng, 6)
    state = wire_lengths_and_rates(random_pose(rng), Twist.zero(), wires)
    assert np.allclose(state.rates, np.zeros(6))
    assert np.all(state.lengths > 0)


def test_collinear_motion_rate():
    wires = [WireAttachment([0, 0, 0], [4.0, 0.0, 0.0])]
    twist = Twist([1.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    state = wire_lengths_and_rates(Pose.identity(), twist, wires)
    assert state.rates[0] == pytest.approx(-1.0)
    assert state.lengths[0] == pytest.approx(4.0)


def test_rates_match_central_difference():
    rng = np.random.default_rng(3)
    h = 1e-5
    for _ in range(100):
        m = int(rng.integers(1, 9))
        wires = random_layout(rng, m)
        pose = random_pose(rng)
        twist = Twist(rng.normal(size=3), rng.normal(size=3))
        state = wire_lengths_and_rates(pose, twist, wires)

        def lengths_at(offset):
            pos = pose.position + offset * twist.linear
            quat = quat_multiply(quat_from_rotvec(offset * twist.angular), pose.orientation)
            shifted = Pose(pos, quat)
            return wire_lengths_and_rates(shifted, Twist.zero(), wires).lengths

        fd = (lengths_at(h) - lengths_at(-h)) / (2 * h)
        assert np.allclose(state.rates, fd, atol=1e-6)


def eight_wire_cube_layout(frame_half=0.5, exit_radius=0.15, exit_height=0.1, twist=0.6):
    """Eight wires between the corners of a cube frame and two exit rings.

    Each frame corner connects to the exit ring on its own side (upper
    corners to the upper ring), which makes gravity support passively
    stable, and the azimuthal twist alternates sign around each ring so
    yaw torque is available in both directions.  This is the geometry the
    bundled scenarios use: rank 6 with the full wrench space positively
    spanned.
    """
    anchor_radius = frame_half * np.sqrt(2.0)
    wires = []
    i = 0
    for z_sign in (1, -1):
        for k in range(4):
            theta = np.deg2rad(45 + 90 * k)
            d = twist if k % 2 == 0 else -twist
            exit_body = np.array(
                [
                    exit_radius * np.cos(theta + d),
                    exit_radius * np.sin(theta + d),
                    z_sign * exit_height,
                ]
            )
            anchor = np.array(
                [anchor_radius * np.cos(theta), anchor_radius * np.sin(theta), z_sign * frame_half]
            )
            wires.append(WireAttachment(exit_body, anchor, wire_id=i))
            i += 1
    return wires


def test_rank_of_eight_wire_cube_layout():
    jac = wire_jacobian(Pose.identity(), eight_wire_cube_layout())
    svals = np.linalg.svd(jac.matrix, compute_uv=False)
    assert np.sum(svals > 1e-9 * svals[0]) == 6
