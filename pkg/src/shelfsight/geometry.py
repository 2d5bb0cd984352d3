"""Pinhole camera math: screen/world transfer, marker depth, rotations.

Conventions, used everywhere in the engine:

* Camera frame: +x right, +y down, +z forward (optical axis). The axes
  follow image-coordinate direction, so screen<->world transfer needs no
  sign flips.
* Screen coordinates are pixels with the origin at the top-left corner.
* Rotations are unit quaternions (w, x, y, z), right-handed.
* The camera is an ideal pinhole; lens distortion is out of scope.

All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import BehindCameraError, DegenerateMarkerError, InvalidArgumentError

Vec3 = tuple[float, float, float]

# Tolerance for |q| = 1 on rotation inputs.
UNIT_NORM_TOL = 1e-9


class ScreenPoint(NamedTuple):
    x: float
    y: float


class Size(NamedTuple):
    width: float
    height: float


class Quaternion(NamedTuple):
    w: float
    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)


IDENTITY_ROTATION = Quaternion(1.0, 0.0, 0.0, 0.0)


def quat_from_axis_angle(axis: Vec3, angle_rad: float) -> Quaternion:
    """Unit quaternion for a right-handed rotation of angle_rad about axis."""
    ax, ay, az = axis
    n = math.sqrt(ax * ax + ay * ay + az * az)
    if n == 0.0:
        raise InvalidArgumentError("rotation axis must be non-zero")
    s = math.sin(angle_rad / 2.0) / n
    return Quaternion(math.cos(angle_rad / 2.0), ax * s, ay * s, az * s)


def quat_multiply(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a*b (apply b first, then a)."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


@dataclass(frozen=True)
class CameraIntrinsics:
    """Ideal pinhole intrinsics: one focal length, principal point, image size."""

    focal_length_px: float
    principal_point: ScreenPoint
    image_size: Size

    def __post_init__(self):
        if not self.focal_length_px > 0:
            raise InvalidArgumentError(
                f"focal_length_px must be > 0, got {self.focal_length_px}"
            )
        cx, cy = self.principal_point
        w, h = self.image_size
        if not (0 <= cx <= w and 0 <= cy <= h):
            raise InvalidArgumentError(
                f"principal point ({cx}, {cy}) outside image {w}x{h}"
            )


@dataclass(frozen=True)
class WorldPose:
    """Position, orientation and physical size of a product, camera frame."""

    position: Vec3
    rotation: Quaternion
    size: Size

    def __post_init__(self):
        if abs(self.rotation.norm() - 1.0) > UNIT_NORM_TOL:
            raise InvalidArgumentError(f"rotation must be unit, |q|={self.rotation.norm()}")
        if not (self.size.width > 0 and self.size.height > 0):
            raise InvalidArgumentError(f"size must be positive, got {self.size}")
        if not self.position[2] > 0:
            raise InvalidArgumentError(f"position must be in front of camera, z={self.position[2]}")


def screen_to_world(p: ScreenPoint, depth_m: float, k: CameraIntrinsics) -> Vec3:
    """Lift a screen point to the camera-frame plane z = depth_m."""
    if not depth_m > 0:
        raise InvalidArgumentError(f"depth_m must be > 0, got {depth_m}")
    cx, cy = k.principal_point
    f = k.focal_length_px
    return ((p.x - cx) * depth_m / f, (p.y - cy) * depth_m / f, depth_m)


def world_to_screen(w: Vec3, k: CameraIntrinsics) -> ScreenPoint:
    """Project a camera-frame point onto the image plane."""
    x, y, z = w
    if not z > 0:
        raise BehindCameraError(f"cannot project point with z={z}")
    cx, cy = k.principal_point
    f = k.focal_length_px
    return ScreenPoint(f * x / z + cx, f * y / z + cy)


def marker_depth(physical_size_m: float, apparent_size_px: float, k: CameraIntrinsics) -> float:
    """Similar-triangles depth of a marker of known physical side length."""
    if not physical_size_m > 0:
        raise InvalidArgumentError(f"physical_size_m must be > 0, got {physical_size_m}")
    if not apparent_size_px > 0:
        raise DegenerateMarkerError(f"apparent_size_px must be > 0, got {apparent_size_px}")
    return k.focal_length_px * physical_size_m / apparent_size_px


def rotate_point(q: Quaternion, v: Vec3) -> Vec3:
    """Rotate v by unit quaternion q (sandwich product q v q*)."""
    if abs(q.norm() - 1.0) > UNIT_NORM_TOL:
        raise InvalidArgumentError(f"rotation must be unit, |q|={q.norm()}")
    vx, vy, vz = v
    # t = 2 (q_vec x v); v' = v + w t + q_vec x t
    tx = 2.0 * (q.y * vz - q.z * vy)
    ty = 2.0 * (q.z * vx - q.x * vz)
    tz = 2.0 * (q.x * vy - q.y * vx)
    return (
        vx + q.w * tx + (q.y * tz - q.z * ty),
        vy + q.w * ty + (q.z * tx - q.x * tz),
        vz + q.w * tz + (q.x * ty - q.y * tx),
    )
