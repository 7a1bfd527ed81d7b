from .camera import Camera, EgoTrajectory, ego_pose, lateral_shift, look_at_camera
from .scene import (
    BoxProp,
    DirectionalLight,
    EllipsoidProp,
    GroundSpec,
    SceneGraph,
    SceneVehicle,
    VehicleTrack,
    build_scene,
    default_ego_trajectory,
)
from .raycast import RefRender, render_reference

__all__ = [
    "Camera",
    "EgoTrajectory",
    "ego_pose",
    "lateral_shift",
    "look_at_camera",
    "SceneGraph",
    "GroundSpec",
    "BoxProp",
    "EllipsoidProp",
    "SceneVehicle",
    "VehicleTrack",
    "DirectionalLight",
    "build_scene",
    "default_ego_trajectory",
    "RefRender",
    "render_reference",
]
