"""Anisotropic voxel-grid geometry: world (nm) / voxel index conversions.

Axis order is (x, y, z) everywhere in the API. All public coordinates are
world-space nanometres; voxel indices appear only where an operation is
explicitly index-based. The world position of voxel v is
``origin + v * resolution`` (the voxel centre).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ValidationError

AXIS_NAMES = ("x", "y", "z")


def round_half_away(values):
    """Round to nearest integer, ties away from zero (not banker's rounding)."""
    v = np.asarray(values, dtype=np.float64)
    return (np.sign(v) * np.floor(np.abs(v) + 0.5)).astype(np.int64)


@dataclass(frozen=True)
class VolumeGeometry:
    """Shape, nm-per-voxel resolution, and nm origin of a voxel grid."""

    shape: tuple[int, int, int]
    resolution: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        resolution = tuple(float(r) for r in self.resolution)
        origin = tuple(float(o) for o in self.origin)
        if len(shape) != 3 or len(resolution) != 3 or len(origin) != 3:
            raise ValidationError("geometry fields must be triples (x, y, z)")
        if any(s < 1 for s in shape):
            raise ValidationError(f"shape entries must be >= 1, got {shape}")
        if any(r <= 0 for r in resolution):
            raise ValidationError(f"resolution entries must be > 0, got {resolution}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "origin", origin)

    @property
    def n_voxels(self) -> int:
        sx, sy, sz = self.shape
        return sx * sy * sz

    def voxel_to_world(self, v) -> np.ndarray:
        """World-space nm centre(s) of voxel index/indices ``v``."""
        v = np.asarray(v, dtype=np.float64)
        return np.asarray(self.origin) + v * np.asarray(self.resolution)

    def world_to_voxel(self, p) -> np.ndarray:
        """Nearest voxel index for nm point(s) ``p``, ties away from zero.

        Raises BoundsError naming the first offending axis if a point rounds
        outside the grid.
        """
        p = np.asarray(p, dtype=np.float64)
        v = round_half_away((p - np.asarray(self.origin)) / np.asarray(self.resolution))
        flat = v.reshape(-1, 3)
        pflat = p.reshape(-1, 3)
        for axis in range(3):
            bad = (flat[:, axis] < 0) | (flat[:, axis] >= self.shape[axis])
            if bad.any():
                i = int(np.argmax(bad))
                raise BoundsError(AXIS_NAMES[axis], float(pflat[i, axis]))
        return v.reshape(p.shape)

    def contains_world(self, p) -> bool:
        """True iff every point in ``p`` rounds to a voxel inside the grid."""
        try:
            self.world_to_voxel(p)
        except BoundsError:
            return False
        return True

    def voxel_distance_nm(self, a, b) -> float:
        """Euclidean nm distance between the centres of voxels ``a`` and ``b``."""
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        return float(np.sqrt(np.sum(((a - b) * np.asarray(self.resolution)) ** 2)))

    def linearize(self, v) -> np.ndarray:
        """Row-major (x, y, z) linear index of voxel indices ``v``."""
        v = np.asarray(v, dtype=np.int64)
        _, sy, sz = self.shape
        return (v[..., 0] * sy + v[..., 1]) * sz + v[..., 2]

    def delinearize(self, lin) -> np.ndarray:
        """Inverse of :meth:`linearize`; returns (..., 3) voxel indices."""
        lin = np.asarray(lin, dtype=np.int64)
        _, sy, sz = self.shape
        z = lin % sz
        rem = lin // sz
        y = rem % sy
        x = rem // sy
        return np.stack([x, y, z], axis=-1)


def world_distance_nm(a, b) -> float:
    """Euclidean distance between two nm points."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.linalg.norm(a - b))
