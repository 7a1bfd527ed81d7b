"""Pinhole cameras and ego-path poses.

World frame: +y is up, the ground plane sits at y = 0, roads run roughly
along +z.  A camera is intrinsics plus a world-to-camera rigid transform;
``p_cam = rot @ p_world + t`` with camera x right, y down, z forward in image
terms.  Pixel (i, j) corresponds to the continuous image point
``(u, v) = (j + 0.5, i + 0.5)`` and ``u = fx * x/z + cx``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = ["Camera", "EgoTrajectory", "look_at_camera", "lateral_shift", "ego_pose", "RangeError"]

_UP = np.array([0.0, 1.0, 0.0])


class RangeError(ValueError):
    """Query parameter outside the supported domain."""


@dataclass(frozen=True)
class Camera:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    rot: np.ndarray  # 3x3 world-to-camera rotation
    t: np.ndarray  # translation, p_cam = rot @ p_world + t

    def __post_init__(self):
        object.__setattr__(self, "rot", np.asarray(self.rot, dtype=np.float64).reshape(3, 3))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=np.float64).reshape(3))
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if not (0 <= self.cx <= self.width and 0 <= self.cy <= self.height):
            raise ValueError("principal point outside image")
        err = np.abs(self.rot @ self.rot.T - np.eye(3)).max()
        if err > 1e-6:
            raise ValueError(f"rotation not orthonormal (max error {err:.2e})")

    @property
    def position(self) -> np.ndarray:
        """Camera centre in world coordinates."""
        return -self.rot.T @ self.t

    def axis_right(self) -> np.ndarray:
        return self.rot[0].copy()

    def axis_forward(self) -> np.ndarray:
        return self.rot[2].copy()

    def with_position(self, pos: np.ndarray) -> "Camera":
        return replace(self, t=-self.rot @ np.asarray(pos, dtype=np.float64))

    def scaled(self, factor: int) -> "Camera":
        """Same view at ``factor``-times the pixel resolution."""
        return replace(
            self,
            fx=self.fx * factor,
            fy=self.fy * factor,
            cx=self.cx * factor,
            cy=self.cy * factor,
            width=self.width * factor,
            height=self.height * factor,
        )

    def pixel_rays(self) -> np.ndarray:
        """Unit world-space ray directions through every pixel centre, (H*W, 3)."""
        j, i = np.meshgrid(np.arange(self.width), np.arange(self.height))
        u = (j.ravel() + 0.5 - self.cx) / self.fx
        v = (i.ravel() + 0.5 - self.cy) / self.fy
        d_cam = np.stack([u, v, np.ones_like(u)], axis=1)
        d_world = d_cam @ self.rot  # rot.T applied row-wise
        return d_world / np.linalg.norm(d_world, axis=1, keepdims=True)

    def to_json(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
            "rot": self.rot.reshape(-1).tolist(),
            "t": self.t.tolist(),
        }

    @staticmethod
    def from_json(d: dict) -> "Camera":
        return Camera(
            fx=d["fx"], fy=d["fy"], cx=d["cx"], cy=d["cy"],
            width=d["width"], height=d["height"],
            rot=np.array(d["rot"]).reshape(3, 3), t=np.array(d["t"]),
        )


def look_at_camera(
    position: np.ndarray,
    forward: np.ndarray,
    width: int = 160,
    height: int = 96,
    fx: float = 110.0,
    fy: float = 110.0,
) -> Camera:
    """Camera at ``position`` looking along ``forward`` with world-up y."""
    f = np.asarray(forward, dtype=np.float64)
    f = f / np.linalg.norm(f)
    x_cam = np.cross(f, _UP)
    n = np.linalg.norm(x_cam)
    if n < 1e-9:
        raise ValueError("forward direction parallel to world up")
    x_cam /= n
    y_cam = np.cross(f, x_cam)
    rot = np.stack([x_cam, y_cam, f])
    return Camera(fx=fx, fy=fy, cx=width / 2.0, cy=height / 2.0, width=width, height=height,
                  rot=rot, t=-rot @ np.asarray(position, dtype=np.float64))


def lateral_shift(cam: Camera, d: float) -> Camera:
    """Move the camera ``d`` metres along its +x axis projected to the ground plane.

    Rotation is unchanged; for a level camera the position moves by exactly
    ``|d|``.
    """
    axis = cam.rot[0].copy()
    axis[1] = 0.0
    n = np.linalg.norm(axis)
    if n < 1e-9:
        raise ValueError("camera x axis is vertical; lateral direction undefined")
    axis /= n
    return cam.with_position(cam.position + d * axis)


@dataclass(frozen=True)
class EgoTrajectory:
    """Ground-plane polyline traversed at constant speed, camera at fixed height."""

    waypoints: np.ndarray  # (K, 2) ground coordinates (x, z)
    speed: float
    height: float = 1.5

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=np.float64).reshape(-1, 2)
        object.__setattr__(self, "waypoints", wp)
        if len(wp) < 2:
            raise ValueError("trajectory needs at least two waypoints")
        if self.speed <= 0:
            raise ValueError("speed must be positive")

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.waypoints, axis=0), axis=1)

    @property
    def duration(self) -> float:
        return float(self.segment_lengths.sum() / self.speed)

    def point_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(ground position (x, z), unit tangent (x, z)) at time ``t``."""
        if t < -1e-9 or t > self.duration + 1e-9:
            raise RangeError(f"t={t} outside [0, {self.duration:.3f}]")
        s = np.clip(t, 0.0, self.duration) * self.speed
        lens = self.segment_lengths
        acc = 0.0
        for k, seg_len in enumerate(lens):
            if s <= acc + seg_len or k == len(lens) - 1:
                a, b = self.waypoints[k], self.waypoints[k + 1]
                tangent = (b - a) / seg_len
                return a + tangent * (s - acc), tangent
            acc += seg_len
        raise AssertionError("unreachable")


def ego_pose(trajectory: EgoTrajectory, t: float, width: int = 160, height: int = 96,
             fx: float = 110.0, fy: float = 110.0) -> Camera:
    """Camera on the ego path at time ``t``: yaw follows the path tangent."""
    ground, tangent = trajectory.point_at(t)
    pos = np.array([ground[0], trajectory.height, ground[1]])
    forward = np.array([tangent[0], 0.0, tangent[1]])
    return look_at_camera(pos, forward, width=width, height=height, fx=fx, fy=fy)
