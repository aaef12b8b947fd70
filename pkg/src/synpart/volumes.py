"""Volume and annotation containers.

SegmentationVolume holds integer neuron labels on a grid (label 0 is the
reserved background). Point annotations are pre/post nm location pairs and
stay in float world space; they are rounded to voxels only when indexed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryMismatchError, ValidationError
from .geometry import AXIS_NAMES, VolumeGeometry


@dataclass(frozen=True)
class SegmentationVolume:
    """Neuron labels on an anisotropic grid, axis order (x, y, z)."""

    geometry: VolumeGeometry
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.shape != self.geometry.shape:
            raise GeometryMismatchError(
                f"label array shape {labels.shape} != geometry shape {self.geometry.shape}"
            )
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValidationError(f"labels must be integers, got {labels.dtype}")
        if labels.size and int(labels.min()) < 0:
            raise ValidationError("labels must be non-negative (0 = background)")
        object.__setattr__(self, "labels", np.ascontiguousarray(labels, dtype=np.uint64))

    def label_at_world(self, p) -> int:
        """Neuron label under nm point ``p`` (0 = background)."""
        v = self.geometry.world_to_voxel(p)
        return int(self.labels[tuple(int(c) for c in np.atleast_1d(v))])

    def labels_at_world(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        vox = self.geometry.world_to_voxel(pts).astype(np.int64)
        return self.labels[vox[:, 0], vox[:, 1], vox[:, 2]].astype(np.int64)


@dataclass(frozen=True)
class SynapticPartnerAnnotation:
    """One directed synaptic partner: a pre and a post nm location."""

    id: int
    pre_location: tuple[float, float, float]
    post_location: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "pre_location", tuple(float(c) for c in self.pre_location))
        object.__setattr__(self, "post_location", tuple(float(c) for c in self.post_location))
        if self.pre_location == self.post_location:
            raise ValidationError(
                f"annotation {self.id}: pre and post locations coincide at {self.pre_location}"
            )


@dataclass(frozen=True)
class PointAnnotationSet:
    """Partner annotations validated against a volume geometry."""

    annotations: tuple[SynapticPartnerAnnotation, ...]
    geometry: VolumeGeometry

    def __post_init__(self):
        anns = tuple(self.annotations)
        ids = [a.id for a in anns]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate annotation ids: {dupes}")
        for a in anns:
            for name, loc in (("pre", a.pre_location), ("post", a.post_location)):
                if not self.geometry.contains_world(loc):
                    raise ValidationError(
                        f"annotation {a.id}: {name} location {loc} outside volume "
                        f"(shape {self.geometry.shape}, resolution {self.geometry.resolution})"
                    )
        object.__setattr__(self, "annotations", anns)

    def __len__(self) -> int:
        return len(self.annotations)

    def __iter__(self):
        return iter(self.annotations)

    def by_id(self, annotation_id: int) -> SynapticPartnerAnnotation:
        for a in self.annotations:
            if a.id == annotation_id:
                return a
        raise KeyError(annotation_id)


@dataclass(frozen=True)
class EdgeScoreVolume:
    """Per-voxel, per-offset edge scores in [0, 1], stored [n_e, x, y, z]."""

    geometry: VolumeGeometry
    offsets: "OffsetSet"  # noqa: F821 - synpart.offsets imports this module
    scores: np.ndarray

    def __post_init__(self):
        scores = np.ascontiguousarray(self.scores, dtype=np.float32)
        expected = (len(self.offsets),) + self.geometry.shape
        if scores.shape != expected:
            raise GeometryMismatchError(
                f"score array shape {scores.shape} != expected {expected}"
            )
        lo, hi = (float(scores.min()), float(scores.max())) if scores.size else (0.0, 0.0)
        if lo < 0.0 or hi > 1.0:
            raise ValidationError(f"scores must lie in [0, 1], got range [{lo}, {hi}]")
        object.__setattr__(self, "scores", scores)

    @property
    def n_channels(self) -> int:
        return self.scores.shape[0]

    def is_binary(self) -> bool:
        return bool(np.isin(self.scores, (0.0, 1.0)).all())


@dataclass(frozen=True)
class PartnerRow:
    """A located partner prediction as it appears in a partner list file."""

    pre_location: tuple[float, float, float]
    post_location: tuple[float, float, float]
    pre_segment: int | None = None
    post_segment: int | None = None
    confidence: float | None = None
    n_edges: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "pre_location", tuple(float(c) for c in self.pre_location))
        object.__setattr__(self, "post_location", tuple(float(c) for c in self.post_location))


def require_same_geometry(a: VolumeGeometry, b: VolumeGeometry, what: str = "volumes"):
    if a != b:
        raise GeometryMismatchError(f"{what} have different geometries: {a} vs {b}")
