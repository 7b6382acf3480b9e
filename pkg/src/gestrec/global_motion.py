"""Global hand motion features: rigid pose per frame, distance-adaptive
amplitude binning, and offset/dynamic pose differences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .geometry import (
    DegenerateInput,
    cartesian_to_spherical,
    kabsch_align,
    rotation_to_euler,
    wrap_angle,
)
from .hand_model import DEFAULT_TEMPLATE, reference_palm
from .skeleton import DEFAULT_LAYOUT, JointLayout, SkeletonSequence, palm_radius

DEFAULT_LAGS = (1, 5, 10)


class InvalidConfig(Exception):
    pass


@dataclass(frozen=True)
class GlobalPose:
    """Rigid pose of one frame: Euler rotation + spherical translation."""

    rotation: tuple[float, float, float]
    translation_spherical: tuple[float, float, float]


@dataclass(frozen=True)
class DadConfig:
    """Distance-adaptive discretization of translation amplitude.

    `thresholds` are the equal-Gaussian-mass bin edges on [0, sigma]; the last
    edge equals sigma and larger amplitudes clamp into the top bin.
    """

    bins: int
    sigma: float
    thresholds: np.ndarray

    def __post_init__(self):
        if self.bins < 1 or self.sigma <= 0:
            raise InvalidConfig(f"bins={self.bins}, sigma={self.sigma}")
        edges = np.asarray(self.thresholds, dtype=np.float64)
        if edges.shape != (self.bins,):
            raise InvalidConfig(f"expected {self.bins} thresholds, got {edges.shape}")
        if np.any(np.diff(edges) <= 0):
            raise InvalidConfig("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", edges)


def dad_thresholds(bins: int, sigma: float) -> np.ndarray:
    """Bin edges eta_1..eta_M with equal Gaussian mass per bin on [0, sigma].

    The kernel is g(x) = exp(-x^2 / (2 sigma^2)); edge i solves
    integral(g, 0, eta_i) = (i/M) * integral(g, 0, sigma). Edges are found by
    bisection on the numerically integrated kernel to within 1e-9 * sigma;
    the last edge is sigma exactly.
    """
    if bins < 1 or sigma <= 0:
        raise InvalidConfig(f"bins={bins}, sigma={sigma}")

    def mass(upper):
        return quad(lambda x: np.exp(-x * x / (2.0 * sigma * sigma)), 0.0, upper)[0]

    total = mass(sigma)
    edges = np.empty(bins)
    edges[-1] = sigma
    for i in range(1, bins):
        target = total * i / bins
        lo, hi = 0.0, sigma
        while hi - lo > 1e-9 * sigma:
            mid = 0.5 * (lo + hi)
            if mass(mid) < target:
                lo = mid
            else:
                hi = mid
        edges[i - 1] = 0.5 * (lo + hi)
    return edges


def make_dad_config(bins: int, sigma: float) -> DadConfig:
    return DadConfig(bins, sigma, dad_thresholds(bins, sigma))


def dad_config_for_sequence(seq: SkeletonSequence, layout: JointLayout = DEFAULT_LAYOUT,
                            bins: int = 5, sigma_scale: float = 1.5) -> DadConfig:
    """Per-sequence config with sigma = sigma_scale * first-frame palm radius."""
    return make_dad_config(bins, sigma_scale * palm_radius(seq.positions[0], layout))


def discretize_rho(rho: float, config: DadConfig) -> int:
    """1-based bin index: smallest i with rho <= eta_i, clamped to the top bin."""
    idx = int(np.searchsorted(config.thresholds, rho, side="left")) + 1
    return min(idx, config.bins)


def frame_global_pose(frame: np.ndarray, layout: JointLayout = DEFAULT_LAYOUT,
                      reference: np.ndarray | None = None,
                      convention: str = "xyz") -> GlobalPose:
    """Kabsch-estimated rigid pose of one frame against the reference palm."""
    if reference is None:
        reference = reference_palm(DEFAULT_TEMPLATE)
    points = np.asarray(frame, dtype=np.float64)[list(layout.global_indices)]
    rot, trans = kabsch_align(points, reference)
    return GlobalPose(rotation_to_euler(rot, convention), cartesian_to_spherical(trans))


def _difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Feature difference with angle slots wrapped; the bin slot stays plain."""
    d = a - b
    d[..., 1:] = wrap_angle(d[..., 1:])
    return d


def global_features(seq: SkeletonSequence, layout: JointLayout = DEFAULT_LAYOUT,
                    reference: np.ndarray | None = None,
                    config: DadConfig | None = None,
                    lags: tuple[int, ...] = DEFAULT_LAGS,
                    convention: str = "xyz") -> np.ndarray:
    """Per-frame global motion features, shape (T, 6 + 6 + 6*len(lags)).

    Each frame yields [rho_bin, theta, phi, r_x, r_y, r_z], its offset from
    frame 1, and its differences to the frames `lags` steps back (clamped to
    frame 1). Expects a validated sequence.
    """
    if reference is None:
        reference = reference_palm(DEFAULT_TEMPLATE)
    if config is None:
        config = dad_config_for_sequence(seq, layout)
    pos = seq.positions
    t_count = pos.shape[0]
    idx = list(layout.global_indices)

    phi = np.empty((t_count, 6))
    for t in range(t_count):
        try:
            rot, trans = kabsch_align(pos[t, idx], reference)
        except DegenerateInput as e:
            raise DegenerateInput(f"frame {t}: {e}") from e
        rho, theta, azimuth = cartesian_to_spherical(trans)
        rx, ry, rz = rotation_to_euler(rot, convention)
        phi[t] = (discretize_rho(rho, config), theta, azimuth, rx, ry, rz)

    offset = _difference(phi, phi[0:1])
    dynamic = [
        _difference(phi, phi[np.maximum(np.arange(t_count) - lag, 0)])
        for lag in lags
    ]
    return np.concatenate([phi, offset, *dynamic], axis=1)
