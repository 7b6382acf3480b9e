"""Rigid-alignment and rotation primitives shared by the feature extractors."""

from __future__ import annotations

import numpy as np


class DegenerateInput(Exception):
    """Point set too flat (rank < 2) to determine a rotation."""


class NotARotation(Exception):
    pass


def wrap_angle(x):
    """Wrap angles to (-pi, pi]."""
    return np.pi - np.remainder(np.pi - np.asarray(x, dtype=np.float64), 2 * np.pi)


def kabsch_align(points: np.ndarray, reference: np.ndarray):
    """Least-squares rigid alignment of `reference` onto `points`.

    Returns (R, t) minimizing sum ||R @ reference[i] + t - points[i]||^2 with
    R a proper rotation (the reflection case is repaired by flipping the sign
    of the smallest singular value).
    """
    pts = np.asarray(points, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if pts.shape != ref.shape or pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"point sets must share shape (N, 3), got {pts.shape} vs {ref.shape}")

    centroid_pts = pts.mean(axis=0)
    centroid_ref = ref.mean(axis=0)
    p = pts - centroid_pts
    q = ref - centroid_ref

    for centered in (q, p):
        s = np.linalg.svd(centered, compute_uv=False)
        if s[1] <= 1e-12 * max(s[0], 1.0):
            raise DegenerateInput("centered point matrix has rank < 2")

    h = q.T @ p
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    r = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    t = centroid_pts - r @ centroid_ref
    return r, t


def euler_to_matrix(rx: float, ry: float, rz: float, convention: str = "xyz") -> np.ndarray:
    """Rotation matrix for intrinsic Euler angles.

    "xyz" composes R = Rx @ Ry @ Rz (intrinsic x-y'-z''); "zyx" composes
    R = Rz @ Ry @ Rx.
    """
    cx, sx = np.cos(rx), np.sin(rx)
    cy, sy = np.cos(ry), np.sin(ry)
    cz, sz = np.cos(rz), np.sin(rz)
    mx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    my = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    mz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    if convention == "xyz":
        return mx @ my @ mz
    if convention == "zyx":
        return mz @ my @ mx
    raise ValueError(f"unknown Euler convention: {convention!r}")


def _principal(angle: float) -> float:
    """atan2 results live in [-pi, pi]; fold the -pi edge onto +pi."""
    return np.pi if angle == -np.pi else float(angle)


def rotation_to_euler(r: np.ndarray, convention: str = "xyz"):
    """Intrinsic Euler angles (r_x, r_y, r_z) of a proper rotation matrix.

    Near gimbal lock (|middle-axis sine| > 1 - 1e-9) the last angle of the
    composition is fixed to 0 and the remaining angle absorbs the rest.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (3, 3):
        raise NotARotation(f"expected 3x3 matrix, got {r.shape}")
    if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-6 or np.linalg.det(r) < 0:
        raise NotARotation("matrix is not a proper rotation")

    if convention == "xyz":
        sy = np.clip(r[0, 2], -1.0, 1.0)
        ry = float(np.arcsin(sy))
        if abs(sy) > 1.0 - 1e-9:
            return _principal(np.arctan2(r[2, 1], r[1, 1])), ry, 0.0
        rx = _principal(np.arctan2(-r[1, 2], r[2, 2]))
        rz = _principal(np.arctan2(-r[0, 1], r[0, 0]))
        return rx, ry, rz
    if convention == "zyx":
        sy = np.clip(-r[2, 0], -1.0, 1.0)
        ry = float(np.arcsin(sy))
        if abs(sy) > 1.0 - 1e-9:
            return 0.0, ry, _principal(np.arctan2(-r[0, 1], r[1, 1]))
        rx = _principal(np.arctan2(r[2, 1], r[2, 2]))
        rz = _principal(np.arctan2(r[1, 0], r[0, 0]))
        return rx, ry, rz
    raise ValueError(f"unknown Euler convention: {convention!r}")


def cartesian_to_spherical(v: np.ndarray):
    """(rho, theta, phi): radius, polar angle from +z, azimuth atan2(y, x).

    The origin maps to (0, 0, 0).
    """
    x, y, z = np.asarray(v, dtype=np.float64)
    rho = float(np.sqrt(x * x + y * y + z * z))
    if rho == 0.0:
        return 0.0, 0.0, 0.0
    theta = float(np.arccos(np.clip(z / rho, -1.0, 1.0)))
    phi = float(np.arctan2(y, x))
    return rho, theta, phi


def rotate_about_axis(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation of vector(s) `v` about a unit `axis`."""
    k = np.asarray(axis, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    c, s = np.cos(angle), np.sin(angle)
    return v * c + np.cross(k, v) * s + k * np.dot(k, v) * (1.0 - c)
