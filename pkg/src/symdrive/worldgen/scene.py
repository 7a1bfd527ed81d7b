"""Procedural driving world used as ground truth for every stage.

A scene is a striped ground plane, a handful of boxy/ellipsoidal roadside
props, scripted vehicles, one directional light, an ambient term, and a sky
colour.  Everything is generated deterministically from a seed so the same
scene can be rebuilt anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..rngs import stream
from .camera import EgoTrajectory

__all__ = [
    "GroundSpec",
    "BoxProp",
    "EllipsoidProp",
    "VehicleTrack",
    "SceneVehicle",
    "DirectionalLight",
    "SceneGraph",
    "build_scene",
    "default_ego_trajectory",
]


def _rot_y(yaw: float) -> np.ndarray:
    c, s = np.cos(yaw), np.sin(yaw)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass
class GroundSpec:
    albedo: tuple[float, float, float]
    stripe_albedo: tuple[float, float, float]
    stripe_width: float
    stripe_period: float
    stripe_count: int

    def stripe_centers(self) -> np.ndarray:
        offset = (self.stripe_count - 1) / 2.0
        return (np.arange(self.stripe_count) - offset) * self.stripe_period

    def on_stripe(self, x: np.ndarray) -> np.ndarray:
        dist = np.abs(x[..., None] - self.stripe_centers())
        return (dist.min(axis=-1) <= self.stripe_width / 2.0)


@dataclass
class BoxProp:
    center: tuple[float, float, float]
    size: tuple[float, float, float]
    yaw: float
    albedo: tuple[float, float, float]


@dataclass
class EllipsoidProp:
    center: tuple[float, float, float]
    radii: tuple[float, float, float]
    albedo: tuple[float, float, float]


@dataclass
class VehicleTrack:
    """Scripted rigid motion: parked pose or constant velocity along +z."""

    kind: str  # "parked" | "straight"
    x: float
    z0: float
    yaw: float = 0.0
    speed: float = 0.0

    def pose(self, t: float, center_height: float) -> tuple[np.ndarray, np.ndarray]:
        """(R(t), T(t)) mapping vehicle-local points into the world frame."""
        z = self.z0 + (self.speed * t if self.kind == "straight" else 0.0)
        return _rot_y(self.yaw), np.array([self.x, center_height, z])


@dataclass
class SceneVehicle:
    size: tuple[float, float, float]
    albedo: tuple[float, float, float]
    track: VehicleTrack

    def pose(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        return self.track.pose(t, self.size[1] / 2.0)


@dataclass
class DirectionalLight:
    direction: tuple[float, float, float]  # unit vector pointing toward the light
    intensity: float

    def unit(self) -> np.ndarray:
        d = np.asarray(self.direction, dtype=np.float64)
        return d / np.linalg.norm(d)


@dataclass
class SceneGraph:
    ground: GroundSpec
    props: list
    vehicles: list[SceneVehicle]
    light: DirectionalLight
    ambient: float
    sky: tuple[float, float, float]

    def to_json(self) -> dict:
        def prop_json(p):
            if isinstance(p, BoxProp):
                return {"type": "box", "center": list(p.center), "size": list(p.size),
                        "yaw": p.yaw, "albedo": list(p.albedo)}
            return {"type": "ellipsoid", "center": list(p.center), "radii": list(p.radii),
                    "albedo": list(p.albedo)}

        return {
            "ground": {
                "albedo": list(self.ground.albedo),
                "stripe_albedo": list(self.ground.stripe_albedo),
                "stripe_width": self.ground.stripe_width,
                "stripe_period": self.ground.stripe_period,
                "stripe_count": self.ground.stripe_count,
            },
            "props": [prop_json(p) for p in self.props],
            "vehicles": [
                {
                    "size": list(v.size),
                    "albedo": list(v.albedo),
                    "track": {"kind": v.track.kind, "x": v.track.x, "z0": v.track.z0,
                              "yaw": v.track.yaw, "speed": v.track.speed},
                }
                for v in self.vehicles
            ],
            "light": {"direction": list(self.light.direction), "intensity": self.light.intensity},
            "ambient": self.ambient,
            "sky": list(self.sky),
        }

    @staticmethod
    def from_json(d: dict) -> "SceneGraph":
        g = d["ground"]
        props = []
        for p in d["props"]:
            if p["type"] == "box":
                props.append(BoxProp(tuple(p["center"]), tuple(p["size"]), p["yaw"], tuple(p["albedo"])))
            else:
                props.append(EllipsoidProp(tuple(p["center"]), tuple(p["radii"]), tuple(p["albedo"])))
        vehicles = [
            SceneVehicle(
                tuple(v["size"]),
                tuple(v["albedo"]),
                VehicleTrack(**v["track"]),
            )
            for v in d["vehicles"]
        ]
        return SceneGraph(
            ground=GroundSpec(tuple(g["albedo"]), tuple(g["stripe_albedo"]), g["stripe_width"],
                              g["stripe_period"], g["stripe_count"]),
            props=props,
            vehicles=vehicles,
            light=DirectionalLight(tuple(d["light"]["direction"]), d["light"]["intensity"]),
            ambient=d["ambient"],
            sky=tuple(d["sky"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True))

    @staticmethod
    def load(path: str | Path) -> "SceneGraph":
        return SceneGraph.from_json(json.loads(Path(path).read_text()))


_VEHICLE_ALBEDOS = [
    (0.18, 0.20, 0.38),  # dark blue
    (0.35, 0.35, 0.37),  # gunmetal
    (0.55, 0.12, 0.10),  # dark red
    (0.16, 0.30, 0.18),  # green
    (0.42, 0.40, 0.34),  # beige
    (0.12, 0.12, 0.14),  # near black
    (0.50, 0.48, 0.50),  # silver
    (0.28, 0.22, 0.12),  # brown
]


def build_scene(seed: int, difficulty: str = "sparse") -> SceneGraph:
    """Deterministic scene: >=2 lanes, >=3 props, 1-8 scripted vehicles."""
    if difficulty not in ("sparse", "dense"):
        raise ValueError(f"difficulty must be 'sparse' or 'dense', got {difficulty!r}")
    rng = stream(seed, "scene", difficulty)

    lane_width = 3.5
    n_lanes = 2
    ground = GroundSpec(
        albedo=tuple(0.20 + 0.05 * rng.uniform(size=3)),
        stripe_albedo=(0.92, 0.92, 0.90),
        stripe_width=0.18,
        stripe_period=lane_width,
        stripe_count=n_lanes + 1,
    )

    props: list = []
    # roadside boxes act as buildings/walls; near-road ellipsoids create the
    # occlusions that lateral shifts have to look behind
    n_boxes = int(rng.integers(2, 4))
    for k in range(n_boxes):
        side = -1.0 if rng.uniform() < 0.5 else 1.0
        props.append(
            BoxProp(
                center=(side * rng.uniform(8.0, 13.0), 0.0, rng.uniform(8.0, 50.0)),
                size=(rng.uniform(2.5, 5.0), rng.uniform(2.5, 6.0), rng.uniform(3.0, 8.0)),
                yaw=rng.uniform(-0.3, 0.3),
                albedo=tuple(rng.uniform(0.3, 0.75, size=3)),
            )
        )
    n_ell = int(rng.integers(2, 4))
    for k in range(n_ell):
        side = -1.0 if rng.uniform() < 0.5 else 1.0
        r = rng.uniform(0.6, 1.4)
        props.append(
            EllipsoidProp(
                center=(side * rng.uniform(4.6, 6.5), r * 0.8, rng.uniform(6.0, 48.0)),
                radii=(r, r * rng.uniform(0.7, 1.1), r * rng.uniform(0.8, 1.3)),
                albedo=tuple(rng.uniform((0.10, 0.25, 0.08), (0.25, 0.5, 0.2))),
            )
        )
    if len(props) < 3:
        props.append(EllipsoidProp((5.5, 0.8, 30.0), (1.0, 0.8, 1.0), (0.15, 0.35, 0.12)))

    lane_centers = [(-0.5 + i) * lane_width for i in range(-(n_lanes // 2) + 1, n_lanes // 2 + 1)]
    n_vehicles = int(rng.integers(1, 4)) if difficulty == "sparse" else int(rng.integers(4, 9))
    vehicles: list[SceneVehicle] = []
    zs = rng.uniform(8.0, 46.0, size=n_vehicles)
    zs.sort()
    for k in range(n_vehicles):
        albedo = _VEHICLE_ALBEDOS[int(rng.integers(0, len(_VEHICLE_ALBEDOS)))]
        size = (
            float(rng.uniform(1.7, 2.0)),
            float(rng.uniform(1.3, 1.6)),
            float(rng.uniform(4.0, 4.8)),
        )
        moving = difficulty == "dense" and rng.uniform() < 0.5
        if moving:
            lane_x = float(lane_centers[int(rng.integers(0, len(lane_centers)))])
            track = VehicleTrack("straight", x=lane_x, z0=float(zs[k]), yaw=0.0,
                                 speed=float(rng.uniform(3.0, 8.0)))
        else:
            # parked on the opposite lane or at the kerb
            kerb = float(rng.choice([-1.0, 1.0])) * (n_lanes * lane_width / 2.0 + 1.2)
            x = float(rng.choice([lane_centers[0], kerb]))
            track = VehicleTrack("parked", x=x, z0=float(zs[k]), yaw=float(rng.uniform(-0.05, 0.05)))
        vehicles.append(SceneVehicle(size=size, albedo=albedo, track=track))

    d = np.array([rng.uniform(0.25, 0.55), 1.0, rng.uniform(-0.3, 0.3)])
    d /= np.linalg.norm(d)
    light = DirectionalLight(direction=tuple(d), intensity=float(rng.uniform(0.70, 0.85)))
    sky = tuple(np.array([0.60, 0.72, 0.88]) + rng.uniform(-0.04, 0.04, size=3))
    return SceneGraph(ground=ground, props=props, vehicles=vehicles, light=light,
                      ambient=float(rng.uniform(0.25, 0.33)), sky=sky)


def default_ego_trajectory(scene: SceneGraph, length: float = 40.0, speed: float = 5.0) -> EgoTrajectory:
    """Straight run down the right lane; deterministic for a given scene."""
    lane_x = -scene.ground.stripe_period / 2.0
    return EgoTrajectory(waypoints=np.array([[lane_x, 1.0], [lane_x, 1.0 + length]]), speed=speed, height=1.5)
