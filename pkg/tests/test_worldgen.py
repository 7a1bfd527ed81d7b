import json

import numpy as np
import pytest

from symdrive.worldgen import (
    Camera,
    EgoTrajectory,
    SceneGraph,
    build_scene,
    default_ego_trajectory,
    ego_pose,
    lateral_shift,
    look_at_camera,
    render_reference,
)
from symdrive.worldgen.camera import RangeError


def scene_hash(scene):
    return hash(json.dumps(scene.to_json(), sort_keys=True))


def test_build_scene_deterministic():
    assert scene_hash(build_scene(0, "sparse")) == scene_hash(build_scene(0, "sparse"))


def test_build_scene_seed_sensitive():
    assert scene_hash(build_scene(0, "sparse")) != scene_hash(build_scene(1, "sparse"))


def test_build_scene_contents():
    for seed in range(5):
        s = build_scene(seed, "sparse")
        assert s.ground.stripe_count >= 3  # >= 2 lanes
        assert len(s.props) >= 3
        assert 1 <= len(s.vehicles) <= 8
        assert abs(np.linalg.norm(np.asarray(s.light.direction)) - 1.0) < 1e-6


@pytest.mark.parametrize("seed", range(10))
def test_dense_has_at_least_sparse_vehicles(seed):
    assert len(build_scene(seed, "dense").vehicles) >= len(build_scene(seed, "sparse").vehicles)


def test_build_scene_bad_difficulty():
    with pytest.raises(ValueError):
        build_scene(0, "extreme")


def test_scene_json_roundtrip(tmp_path):
    s = build_scene(3, "dense")
    p = tmp_path / "scene.json"
    s.save(p)
    s2 = SceneGraph.load(p)
    assert scene_hash(s) == scene_hash(s2)


def test_sky_only_camera():
    scene = build_scene(0, "sparse")
    cam = look_at_camera(position=(0.0, 2.0, 0.0), forward=(0.0, 0.7, 0.7), width=32, height=24)
    r = render_reference(scene, cam)
    assert np.all(r.depth == 0.0)
    np.testing.assert_allclose(r.image, np.broadcast_to(np.clip(scene.sky, 0, 1), r.image.shape).astype(np.float32), atol=1e-6)
    assert not r.lane_mask.any() and not r.vehicle_mask.any()


def test_single_ray_shading_oracle():
    # camera looking straight down from 5 m onto the central stripe
    scene = build_scene(0, "sparse")
    scene.props = []
    scene.vehicles = []
    rot = np.array([[1.0, 0, 0], [0, 0, 1.0], [0, -1.0, 0]])  # forward = -y
    pos = np.array([0.0, 5.0, 20.0])
    cam = Camera(fx=50, fy=50, cx=16.5, cy=12.5, width=32, height=24, rot=rot, t=-rot @ pos)
    r = render_reference(scene, cam)
    i, j = 12, 16  # pixel centre (16.5, 12.5) = principal point: ray exactly straight down
    l = scene.light.unit()
    expected = np.asarray(scene.ground.stripe_albedo) * (scene.ambient + scene.light.intensity * max(0.0, l[1]))
    np.testing.assert_allclose(r.image[i, j], np.clip(expected, 0, 1), atol=2e-3)
    assert abs(r.depth[i, j] - 5.0) < 1e-4
    assert r.lane_mask[i, j]


def test_masks_partition():
    scene = build_scene(1, "dense")
    cam = ego_pose(default_ego_trajectory(scene), 2.0)
    r = render_reference(scene, cam, t=2.0)
    assert not np.any(r.lane_mask & ~r.ground_mask)  # lane stripes lie on the ground
    assert not np.any(r.vehicle_mask & r.lane_mask)


def test_depth_matches_analytic_ground_distance():
    scene = build_scene(0, "sparse")
    scene.props = []
    scene.vehicles = []
    cam = ego_pose(default_ego_trajectory(scene), 1.0)
    r = render_reference(scene, cam)
    dirs = cam.pixel_rays().reshape(cam.height, cam.width, 3)
    origin = cam.position
    ground = r.ground_mask
    expected = -origin[1] / dirs[..., 1]
    assert np.abs(r.depth[ground] - expected[ground]).max() < 1e-4


def test_resolution_consistency():
    scene = build_scene(0, "sparse")
    cam = ego_pose(default_ego_trajectory(scene), 1.0, width=80, height=48)
    low = render_reference(scene, cam, t=1.0).image
    high = render_reference(scene, cam.scaled(2), t=1.0).image
    down = high.reshape(48, 2, 80, 2, 3).mean(axis=(1, 3))
    assert np.abs(down - low).mean() < 0.02


def test_camera_validation():
    with pytest.raises(ValueError):
        Camera(fx=-1, fy=1, cx=1, cy=1, width=4, height=4, rot=np.eye(3), t=np.zeros(3))
    with pytest.raises(ValueError):
        Camera(fx=10, fy=10, cx=2, cy=2, width=4, height=4, rot=np.eye(3) * 2.0, t=np.zeros(3))


def test_render_requires_camera_above_ground():
    scene = build_scene(0, "sparse")
    cam = look_at_camera(position=(0.0, -1.0, 0.0), forward=(0, 0, 1.0))
    with pytest.raises(ValueError):
        render_reference(scene, cam)


def test_ego_pose_start_and_uniform_motion():
    traj = EgoTrajectory(waypoints=np.array([[1.0, 2.0], [1.0, 22.0]]), speed=4.0, height=1.5)
    c0 = ego_pose(traj, 0.0)
    np.testing.assert_allclose(c0.position, [1.0, 1.5, 2.0], atol=1e-12)
    c2 = ego_pose(traj, 2.0)
    np.testing.assert_allclose(c2.position, [1.0, 1.5, 2.0 + 4.0 * 2.0], atol=1e-12)


def test_ego_pose_arc_length_oracle():
    # numeric arc-length integration over a finely sampled two-segment path
    wp = np.array([[0.0, 0.0], [3.0, 4.0], [10.0, 4.0]])
    traj = EgoTrajectory(waypoints=wp, speed=2.0, height=1.2)
    t_query = 0.5 * traj.duration
    target_s = 2.0 * t_query

    # brute-force: walk tiny steps along the polyline until target arc length
    fine = []
    for a, b in zip(wp[:-1], wp[1:]):
        n = 20000
        seg = np.linspace(0, 1, n, endpoint=False)[:, None] * (b - a) + a
        fine.append(seg)
    fine = np.vstack(fine + [wp[-1:]])
    deltas = np.linalg.norm(np.diff(fine, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(deltas)])
    idx = np.searchsorted(cum, target_s)
    oracle = fine[min(idx, len(fine) - 1)]

    pos = ego_pose(traj, t_query).position
    assert np.linalg.norm(np.array([pos[0], pos[2]]) - oracle) < 1e-3


def test_ego_pose_out_of_range():
    traj = EgoTrajectory(waypoints=np.array([[0.0, 0.0], [0.0, 10.0]]), speed=5.0)
    with pytest.raises(RangeError):
        ego_pose(traj, 100.0)
    with pytest.raises(RangeError):
        ego_pose(traj, -0.5)


def test_lateral_shift_identity_and_inverse():
    scene = build_scene(0, "sparse")
    cam = ego_pose(default_ego_trajectory(scene), 1.0)
    same = lateral_shift(cam, 0.0)
    np.testing.assert_allclose(same.position, cam.position, atol=1e-12)
    np.testing.assert_array_equal(same.rot, cam.rot)
    back = lateral_shift(lateral_shift(cam, 0.7), -0.7)
    np.testing.assert_allclose(back.position, cam.position, atol=1e-9)
    np.testing.assert_allclose(back.t, cam.t, atol=1e-9)


def test_lateral_shift_identity_rotation_half_metre():
    cam = Camera(fx=100, fy=100, cx=8, cy=6, width=16, height=12, rot=np.eye(3), t=np.array([1.0, -1.5, -3.0]))
    shifted = lateral_shift(cam, 0.5)
    assert abs((shifted.t[0] - cam.t[0]) + 0.5) < 1e-12  # t = -R p, so t.x moves by -d
    np.testing.assert_allclose(np.abs(shifted.position - cam.position), [0.5, 0.0, 0.0], atol=1e-12)
    np.testing.assert_array_equal(shifted.rot, cam.rot)


@pytest.mark.parametrize("d", [0.25, 0.5, 1.0, 3.0])
def test_lateral_shift_moves_exactly_d(d):
    scene = build_scene(2, "sparse")
    cam = ego_pose(default_ego_trajectory(scene), 3.0)
    shifted = lateral_shift(cam, d)
    assert abs(np.linalg.norm(shifted.position - cam.position) - d) < 1e-12
    assert abs(shifted.position[1] - cam.position[1]) < 1e-12  # stays level
