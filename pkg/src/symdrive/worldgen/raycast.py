"""Analytic reference renderer: one primary ray per pixel, Lambertian shading.

This is the oracle the whole pipeline is judged against.  It produces RGB,
per-pixel nearest-hit ray distance (0 where only sky is seen), and binary
masks for lane stripes, vehicles, and the ground region.  An optional
hard-shadow toggle exists so that inserted assets have a lighting gap for
harmonization to close.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import Camera
from .scene import BoxProp, EllipsoidProp, SceneGraph, _rot_y

__all__ = ["RefRender", "render_reference", "trace_rays", "Hit"]

_EPS = 1e-9
_KIND_NONE, _KIND_GROUND, _KIND_PROP, _KIND_VEHICLE = 0, 1, 2, 3


@dataclass
class RefRender:
    image: np.ndarray  # (H, W, 3) float32 in [0, 1]
    depth: np.ndarray  # (H, W) float32 ray distance in metres, 0 = no hit
    lane_mask: np.ndarray  # (H, W) bool
    vehicle_mask: np.ndarray  # (H, W) bool
    ground_mask: np.ndarray  # (H, W) bool


@dataclass
class Hit:
    s: np.ndarray  # (N,) distance, inf = miss
    normal: np.ndarray  # (N, 3)
    albedo: np.ndarray  # (N, 3)
    kind: np.ndarray  # (N,) int8


def _box_intersect(origin, dirs, center, size, yaw):
    rot = _rot_y(yaw)  # local -> world
    half = np.asarray(size, dtype=np.float64) / 2.0
    o_l = (np.asarray(origin) - np.asarray(center)) @ rot  # rot.T @ v
    d_l = dirs @ rot
    safe = np.where(np.abs(d_l) < _EPS, _EPS, d_l)
    t1 = (-half - o_l) / safe
    t2 = (half - o_l) / safe
    tmin = np.minimum(t1, t2)
    tmax = np.maximum(t1, t2)
    tnear = tmin.max(axis=1)
    tfar = tmax.min(axis=1)
    hit = (tnear <= tfar) & (tnear > 1e-6)
    s = np.where(hit, tnear, np.inf)
    axis = tmin.argmax(axis=1)
    n_l = np.zeros_like(dirs)
    rows = np.arange(len(dirs))
    n_l[rows, axis] = -np.sign(d_l[rows, axis])
    normal = n_l @ rot.T
    return s, normal


def _ellipsoid_intersect(origin, dirs, center, radii):
    radii = np.asarray(radii, dtype=np.float64)
    o_e = (np.asarray(origin) - np.asarray(center)) / radii
    d_e = dirs / radii
    a = (d_e * d_e).sum(axis=1)
    b = (o_e * d_e).sum(axis=1)
    c = (o_e * o_e).sum() - 1.0
    disc = b * b - a * c
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    s = (-b - sq) / a
    hit = ok & (s > 1e-6)
    s = np.where(hit, s, np.inf)
    p_l = o_e + np.where(hit, s, 0.0)[:, None] * d_e  # unit-sphere frame, valid only where hit
    n = (p_l / radii)  # gradient of the implicit surface
    norm = np.linalg.norm(n, axis=1, keepdims=True)
    normal = n / np.where(norm < _EPS, 1.0, norm)
    return s, normal


def trace_rays(origin: np.ndarray, dirs: np.ndarray, scene: SceneGraph, t: float) -> tuple[Hit, np.ndarray]:
    """Nearest hit over ground plane, props, and vehicles at time ``t``.

    Returns the hit record and the ground-plane x coordinate of every ray's
    plane intersection (used for stripe lookup).
    """
    n = len(dirs)
    best = Hit(
        s=np.full(n, np.inf),
        normal=np.zeros((n, 3)),
        albedo=np.zeros((n, 3)),
        kind=np.zeros(n, dtype=np.int8),
    )

    def take(s, normal, albedo, kind):
        closer = s < best.s
        best.s[closer] = s[closer]
        best.normal[closer] = normal[closer]
        best.albedo[closer] = albedo if np.ndim(albedo) == 1 else albedo[closer]
        best.kind[closer] = kind

    # ground plane y = 0
    dy = dirs[:, 1]
    s_g = np.where(dy < -_EPS, -origin[1] / np.where(np.abs(dy) < _EPS, -_EPS, dy), np.inf)
    s_g = np.where(s_g > 1e-6, s_g, np.inf)
    hit_x = origin[0] + s_g * dirs[:, 0]
    on_stripe = np.isfinite(s_g) & scene.ground.on_stripe(np.where(np.isfinite(s_g), hit_x, 0.0))
    g_albedo = np.where(
        on_stripe[:, None], np.asarray(scene.ground.stripe_albedo), np.asarray(scene.ground.albedo)
    )
    take(s_g, np.tile([0.0, 1.0, 0.0], (n, 1)), g_albedo, _KIND_GROUND)

    for p in scene.props:
        if isinstance(p, BoxProp):
            s, normal = _box_intersect(origin, dirs, p.center, p.size, p.yaw)
        else:
            s, normal = _ellipsoid_intersect(origin, dirs, p.center, p.radii)
        take(s, normal, np.asarray(p.albedo, dtype=np.float64), _KIND_PROP)

    for v in scene.vehicles:
        rot, center = v.pose(t)
        yaw = np.arctan2(rot[0, 2], rot[0, 0])
        s, normal = _box_intersect(origin, dirs, center, v.size, yaw)
        take(s, normal, np.asarray(v.albedo, dtype=np.float64), _KIND_VEHICLE)

    return best, hit_x


def _occluded(points: np.ndarray, light_dir: np.ndarray, scene: SceneGraph, t: float) -> np.ndarray:
    """True where the to-light ray from a surface point hits any prop/vehicle."""
    n = len(points)
    blocked = np.zeros(n, dtype=bool)
    dirs = np.tile(light_dir, (n, 1))
    for p in scene.props:
        if isinstance(p, BoxProp):
            s, _ = _box_intersect(points, dirs, p.center, p.size, p.yaw)
        else:
            # vectorized over per-ray origins
            radii = np.asarray(p.radii, dtype=np.float64)
            o_e = (points - np.asarray(p.center)) / radii
            d_e = dirs / radii
            a = (d_e * d_e).sum(axis=1)
            b = (o_e * d_e).sum(axis=1)
            c = (o_e * o_e).sum(axis=1) - 1.0
            disc = b * b - a * c
            sq = np.sqrt(np.where(disc >= 0, disc, 0.0))
            s = np.where(disc >= 0, (-b - sq) / a, np.inf)
            s = np.where(s > 1e-6, s, np.inf)
        blocked |= np.isfinite(s)
    for v in scene.vehicles:
        rot, center = v.pose(t)
        yaw = np.arctan2(rot[0, 2], rot[0, 0])
        s, _ = _box_intersect(points, dirs, center, v.size, yaw)
        blocked |= np.isfinite(s)
    return blocked


def render_reference(scene: SceneGraph, cam: Camera, t: float = 0.0, shadows: bool = False) -> RefRender:
    """Ray-cast the scene at time ``t`` from ``cam``.

    Shading is ``albedo * (ambient + intensity * max(0, n . l))`` with ``l``
    the unit to-light direction; with ``shadows`` on, occluded points keep
    only the ambient term.
    """
    if cam.fx <= 0 or cam.fy <= 0:
        raise ValueError("degenerate camera")
    origin = cam.position
    if origin[1] <= 0:
        raise ValueError(f"camera must be above ground, y={origin[1]:.3f}")
    h, w = cam.height, cam.width
    dirs = cam.pixel_rays()
    hit, hit_x = trace_rays(origin, dirs, scene, t)

    light = scene.light.unit()
    lam = np.maximum(0.0, hit.normal @ light)
    if shadows:
        pts = origin + hit.s[:, None] * dirs
        valid = np.isfinite(hit.s)
        pts = np.where(valid[:, None], pts, 0.0) + hit.normal * 1e-4
        shadowed = _occluded(pts, light, scene, t) & valid
        lam = np.where(shadowed, 0.0, lam)
    shade = scene.ambient + scene.light.intensity * lam
    img = hit.albedo * shade[:, None]
    miss = ~np.isfinite(hit.s)
    img[miss] = np.asarray(scene.sky)

    image = np.clip(img, 0.0, 1.0).astype(np.float32).reshape(h, w, 3)
    depth = np.where(miss, 0.0, hit.s).astype(np.float32).reshape(h, w)
    ground_mask = (hit.kind == _KIND_GROUND).reshape(h, w)
    stripe = scene.ground.on_stripe(hit_x).reshape(h, w)
    lane_mask = ground_mask & stripe
    vehicle_mask = (hit.kind == _KIND_VEHICLE).reshape(h, w)
    return RefRender(image=image, depth=depth, lane_mask=lane_mask,
                     vehicle_mask=vehicle_mask, ground_mask=ground_mask)
