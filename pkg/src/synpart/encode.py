"""Point annotations -> per-voxel, per-offset binary edge targets.

Each annotation endpoint is expanded into a synaptic region: the closed
anisotropic ball of radius r_syn around the nm point, clipped to the neuron
segment under the point. An edge channel k is switched on at voxel v when v
lies in some annotation's pre-region and v + offset_k lies in the same
annotation's post-region. Edges leaving the volume stay 0.

simulate_scores() degrades such a binary volume into a plausible classifier
output (dropped regions, spurious blobs, additive noise) for testing the
downstream extraction without a trained network.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ._kernels import component_roots
from .errors import BackgroundEndpointError, ValidationError
from .geometry import VolumeGeometry
from .volumes import EdgeScoreVolume, PointAnnotationSet, SegmentationVolume

if TYPE_CHECKING:
    from .offsets import OffsetSet


def expand_region(
    p_nm,
    r_syn_nm: float,
    seg: SegmentationVolume,
    annotation_id=None,
) -> np.ndarray:
    """Voxels of the synaptic region around nm point ``p_nm``.

    Returns an (N, 3) int64 array in linear-index order: all voxels whose
    centre is within r_syn_nm of the point (closed ball, anisotropic nm
    metric) and whose label matches the label under the point. The voxel
    under the point itself is always included, so r_syn = 0 degenerates to
    that single voxel.
    """
    if r_syn_nm < 0:
        raise ValidationError(f"r_syn_nm must be >= 0, got {r_syn_nm}")
    g = seg.geometry
    p = np.asarray(p_nm, dtype=np.float64)
    centre = g.world_to_voxel(p).astype(np.int64)
    label = seg.labels[tuple(centre)]
    if label == 0:
        raise BackgroundEndpointError(p_nm, annotation_id)

    res = np.asarray(g.resolution)
    origin = np.asarray(g.origin)
    lo = np.maximum(np.ceil((p - r_syn_nm - origin) / res).astype(np.int64), 0)
    hi = np.minimum(np.floor((p + r_syn_nm - origin) / res).astype(np.int64), np.asarray(g.shape) - 1)
    lo = np.minimum(lo, centre)
    hi = np.maximum(hi, centre)

    grids = np.meshgrid(
        *(np.arange(lo[a], hi[a] + 1) for a in range(3)), indexing="ij", sparse=True
    )
    d2 = sum(((grids[a] * res[a] + origin[a]) - p[a]) ** 2 for a in range(3))
    box = seg.labels[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1, lo[2] : hi[2] + 1]
    mask = (d2 <= r_syn_nm * r_syn_nm) & (box == label)
    mask[tuple(centre - lo)] = True
    coords = np.argwhere(mask) + lo  # argwhere is C-ordered, so rows are lin-sorted
    return coords.astype(np.int64)


def encode_labels(
    annotations: PointAnnotationSet,
    offsets: "OffsetSet",
    seg: SegmentationVolume,
) -> EdgeScoreVolume:
    """Binary edge-target volume [n_e, x, y, z] for a set of partner annotations.

    Overlapping regions from different annotations combine by logical OR.
    Raises BackgroundEndpointError naming the annotation if an endpoint sits
    on label 0.
    """
    g = seg.geometry
    scores = np.zeros((len(offsets),) + g.shape, dtype=np.float32)
    shape = np.asarray(g.shape, dtype=np.int64)
    for a in annotations:
        pre = expand_region(a.pre_location, offsets.r_syn_nm, seg, annotation_id=a.id)
        post = expand_region(a.post_location, offsets.r_syn_nm, seg, annotation_id=a.id)
        post_lin = g.linearize(post)  # already sorted
        for k, off in enumerate(offsets.offsets_vox):
            tgt = pre + off
            inb = np.all((tgt >= 0) & (tgt < shape), axis=1)
            if not inb.any():
                continue
            tgt_lin = g.linearize(tgt[inb])
            pos = np.searchsorted(post_lin, tgt_lin)
            pos_ok = pos < post_lin.size
            hit = np.zeros(tgt_lin.size, dtype=bool)
            hit[pos_ok] = post_lin[pos[pos_ok]] == tgt_lin[pos_ok]
            if hit.any():
                src = pre[inb][hit]
                scores[k, src[:, 0], src[:, 1], src[:, 2]] = 1.0
    return EdgeScoreVolume(geometry=g, offsets=offsets, scores=scores)


@dataclass(frozen=True)
class NoiseSpec:
    """Deterministic degradation applied to binary edge targets.

    gaussian_sigma   std-dev of additive zero-mean noise (clamped to [0, 1])
    false_blob_rate  expected spurious blob seeds per voxel of the volume
    drop_synapse_prob probability of erasing each connected true region
    seed             RNG seed; identical specs reproduce identical volumes
    """

    gaussian_sigma: float = 0.0
    false_blob_rate: float = 0.0
    drop_synapse_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.gaussian_sigma < 0:
            raise ValidationError(f"gaussian_sigma must be >= 0, got {self.gaussian_sigma}")
        for name in ("false_blob_rate", "drop_synapse_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1], got {v}")


def simulate_scores(labels: EdgeScoreVolume, noise: NoiseSpec) -> EdgeScoreVolume:
    """Stand-in for a trained classifier: binary targets -> noisy scores.

    Applied in fixed RNG order so a seed fully determines the output:
    1. drop whole true regions (26-connected components of the source mask)
       with probability drop_synapse_prob each;
    2. plant spurious positive blobs (expected false_blob_rate per voxel),
       each a 3x3x1 patch of 1.0 on a random channel;
    3. add zero-mean gaussian noise, then clamp to [0, 1].
    """
    if not labels.is_binary():
        raise ValidationError("simulate_scores expects a binary label volume")
    g = labels.geometry
    rng = np.random.default_rng(noise.seed)
    scores = labels.scores.astype(np.float32, copy=True)

    if noise.drop_synapse_prob > 0.0:
        src_mask = scores.any(axis=0)
        coords = np.argwhere(src_mask)
        if coords.size:
            lin = np.sort(g.linearize(coords))
            roots = component_roots(lin, g.shape, 26)
            vox = g.delinearize(lin)
            for root in np.unique(roots):  # ascending, deterministic
                if rng.random() < noise.drop_synapse_prob:
                    sel = vox[roots == root]
                    scores[:, sel[:, 0], sel[:, 1], sel[:, 2]] = 0.0

    if noise.false_blob_rate > 0.0:
        n_blobs = rng.poisson(noise.false_blob_rate * g.n_voxels)
        sx, sy, sz = g.shape
        for _ in range(int(n_blobs)):
            k = int(rng.integers(labels.n_channels))
            cx = int(rng.integers(sx))
            cy = int(rng.integers(sy))
            cz = int(rng.integers(sz))
            scores[
                k,
                max(0, cx - 1) : min(sx, cx + 2),
                max(0, cy - 1) : min(sy, cy + 2),
                cz : cz + 1,
            ] = 1.0

    if noise.gaussian_sigma > 0.0:
        scores = scores + rng.normal(0.0, noise.gaussian_sigma, scores.shape).astype(np.float32)

    np.clip(scores, 0.0, 1.0, out=scores)
    return EdgeScoreVolume(geometry=g, offsets=labels.offsets, scores=scores)
