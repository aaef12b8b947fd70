"""Directed candidate-edge offsets and coverage search.

An OffsetSet is the n_e relative displacements (nm) that turn each voxel into
the source of n_e directed candidate edges, plus the synaptic region radius
r_syn. A partner annotation is *covered* when at least one offset maps some
voxel of its pre-region onto its post-region; the grid search picks a minimal
configuration whose coverage over a ground-truth set is 100%.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .encode import expand_region
from .errors import BackgroundEndpointError, ConfigError, ValidationError
from .geometry import VolumeGeometry, round_half_away
from .volumes import PointAnnotationSet, SegmentationVolume, SynapticPartnerAnnotation

# Offset configuration found for the CREMI dataset (4x4x40 nm): two z-axis
# edges at 80 nm, x/y-axis pairs at 120 nm, and the eight sign variants of the
# (40, 60, 40) diagonal; tuned together with a 100 nm region radius.
CREMI_R_SYN_NM = 100.0
CREMI_OFFSETS_NM = tuple(
    [(0.0, 0.0, s * 80.0) for s in (1, -1)]
    + [(s * 120.0, 0.0, 0.0) for s in (1, -1)]
    + [(0.0, s * 120.0, 0.0) for s in (1, -1)]
    + [
        (sx * 40.0, sy * 60.0, sz * 40.0)
        for sx in (1, -1)
        for sy in (1, -1)
        for sz in (1, -1)
    ]
)


@dataclass(frozen=True)
class OffsetSet:
    """Candidate-edge offsets in nm with their voxel-space images."""

    offsets_nm: np.ndarray  # (n_e, 3) float64
    offsets_vox: np.ndarray  # (n_e, 3) int64
    r_syn_nm: float
    resolution: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "offsets_nm", np.asarray(self.offsets_nm, dtype=np.float64))
        object.__setattr__(self, "offsets_vox", np.asarray(self.offsets_vox, dtype=np.int64))
        object.__setattr__(self, "resolution", tuple(float(r) for r in self.resolution))

    @classmethod
    def from_nm(cls, offsets_nm, r_syn_nm: float, resolution) -> "OffsetSet":
        """Build an offset set, deriving voxel offsets by rounding nm / resolution."""
        nm = np.asarray(offsets_nm, dtype=np.float64).reshape(-1, 3)
        if r_syn_nm < 0:
            raise ValidationError(f"r_syn_nm must be >= 0, got {r_syn_nm}")
        res = tuple(float(r) for r in resolution)
        if len(res) != 3 or any(r <= 0 for r in res):
            raise ValidationError(f"resolution must be three positive values, got {resolution}")
        if nm.shape[0] == 0:
            raise ConfigError("offset set must contain at least one offset")
        if (np.abs(nm).sum(axis=1) == 0).any():
            raise ConfigError("zero nm offset is not allowed")
        uniq = {tuple(row) for row in nm}
        if len(uniq) != nm.shape[0]:
            raise ConfigError("duplicate offsets in set")
        vox = round_half_away(nm / np.asarray(res))
        zero = np.abs(vox).sum(axis=1) == 0
        if zero.any():
            bad = [tuple(row) for row in nm[zero]]
            raise ConfigError(
                f"offsets {bad} round to the zero voxel vector at resolution {res}"
            )
        return cls(offsets_nm=nm, offsets_vox=vox, r_syn_nm=float(r_syn_nm), resolution=res)

    def __len__(self) -> int:
        return int(self.offsets_nm.shape[0])

    @property
    def lengths_nm(self) -> np.ndarray:
        return np.linalg.norm(self.offsets_nm, axis=1)

    @property
    def max_reach_nm(self) -> float:
        return float(self.lengths_nm.max())


def cremi_offset_set(geometry_or_resolution) -> OffsetSet:
    """The 14-offset configuration tuned on CREMI, with r_syn = 100 nm."""
    res = (
        geometry_or_resolution.resolution
        if isinstance(geometry_or_resolution, VolumeGeometry)
        else geometry_or_resolution
    )
    return OffsetSet.from_nm(CREMI_OFFSETS_NM, CREMI_R_SYN_NM, res)


@dataclass(frozen=True)
class CoverageReport:
    """How many annotations an offset set can represent."""

    covered: int
    total: int
    uncovered_ids: tuple[int, ...]
    rate: float
    background_ids: tuple[int, ...] = ()
    note: str = ""

    @classmethod
    def from_parts(cls, covered_ids, uncovered_ids, background_ids) -> "CoverageReport":
        covered = len(covered_ids)
        total = covered + len(uncovered_ids)
        if total == 0:
            rate, note = 1.0, "vacuous: no coverable annotations"
        else:
            rate, note = covered / total, ""
        return cls(
            covered=covered,
            total=total,
            uncovered_ids=tuple(uncovered_ids),
            rate=rate,
            background_ids=tuple(background_ids),
            note=note,
        )


def _region_pair(a: SynapticPartnerAnnotation, r_syn_nm: float, seg: SegmentationVolume):
    pre = expand_region(a.pre_location, r_syn_nm, seg, annotation_id=a.id)
    post = expand_region(a.post_location, r_syn_nm, seg, annotation_id=a.id)
    return pre, np.sort(seg.geometry.linearize(post))


def _any_offset_hits(pre, post_lin, offsets_vox, shape) -> bool:
    for off in offsets_vox:
        tgt = pre + off
        inb = np.all((tgt >= 0) & (tgt < shape), axis=1)
        if not inb.any():
            continue
        lin = (tgt[inb][:, 0] * shape[1] + tgt[inb][:, 1]) * shape[2] + tgt[inb][:, 2]
        pos = np.searchsorted(post_lin, lin)
        pos_ok = pos < post_lin.size
        if pos_ok.any() and (post_lin[pos[pos_ok]] == lin[pos_ok]).any():
            return True
    return False


def is_covered(
    a: SynapticPartnerAnnotation, offsets: OffsetSet, seg: SegmentationVolume
) -> bool:
    """True iff some offset connects a voxel of the pre-region to the post-region.

    Raises BackgroundEndpointError if either endpoint sits on label 0 (the
    annotation is uncoverable rather than uncovered).
    """
    pre, post_lin = _region_pair(a, offsets.r_syn_nm, seg)
    shape = np.asarray(seg.geometry.shape, dtype=np.int64)
    return _any_offset_hits(pre, post_lin, offsets.offsets_vox, shape)


def coverage(
    annotations: PointAnnotationSet, offsets: OffsetSet, seg: SegmentationVolume
) -> CoverageReport:
    """Aggregate is_covered over a set; background endpoints reported separately."""
    covered_ids, uncovered_ids, background_ids = [], [], []
    for a in annotations:
        try:
            hit = is_covered(a, offsets, seg)
        except BackgroundEndpointError:
            background_ids.append(a.id)
            continue
        (covered_ids if hit else uncovered_ids).append(a.id)
    return CoverageReport.from_parts(covered_ids, uncovered_ids, background_ids)


def _candidate_blocks(candidate_lengths, resolution):
    """Structured offset family: per length, axis-aligned +/- pairs for each
    axis plus the full sign-orbit of one diagonal prototype (L/2, 3L/4, L/2).

    Blocks whose offsets collapse to the zero voxel vector at this resolution
    are dropped from the family.
    """
    blocks = []
    for L in sorted({float(v) for v in candidate_lengths}):
        if L <= 0:
            raise ValidationError(f"candidate lengths must be > 0, got {L}")
        members = [
            ("x-pair", [(L, 0.0, 0.0), (-L, 0.0, 0.0)]),
            ("y-pair", [(0.0, L, 0.0), (0.0, -L, 0.0)]),
            ("z-pair", [(0.0, 0.0, L), (0.0, 0.0, -L)]),
            (
                "diagonal",
                [
                    (sx * L / 2.0, sy * 3.0 * L / 4.0, sz * L / 2.0)
                    for sx in (1, -1)
                    for sy in (1, -1)
                    for sz in (1, -1)
                ],
            ),
        ]
        for kind, offs in members:
            nm = np.asarray(offs, dtype=np.float64)
            vox = round_half_away(nm / np.asarray(resolution, dtype=np.float64))
            if (np.abs(vox).sum(axis=1) == 0).any():
                continue
            blocks.append({"kind": kind, "length": L, "offsets_nm": nm})
    return blocks


def grid_search_offsets(
    annotations: PointAnnotationSet,
    seg: SegmentationVolume,
    candidate_lengths,
    candidate_counts=None,
    candidate_radii=(100.0,),
    threads: int | None = None,
) -> tuple[OffsetSet, CoverageReport]:
    """Search offset-family subsets and region radii for full coverage.

    Enumerates every subset of the structured blocks (optionally restricted to
    edge counts in ``candidate_counts``) against every radius, and returns the
    configuration reaching coverage 1.0 with minimal n_e, then minimal r_syn,
    then minimal summed offset length. If nothing reaches 1.0 the best-rate
    configuration is returned with its (flagged) report.
    """
    if not list(candidate_lengths) or not list(candidate_radii):
        raise ValidationError("candidate_lengths and candidate_radii must be non-empty")
    if candidate_counts is not None and not list(candidate_counts):
        raise ValidationError("candidate_counts must be non-empty when given")
    radii = sorted({float(r) for r in candidate_radii})
    if any(r < 0 for r in radii):
        raise ValidationError("candidate radii must be >= 0")
    counts = None if candidate_counts is None else {int(c) for c in candidate_counts}

    res = seg.geometry.resolution
    blocks = _candidate_blocks(candidate_lengths, res)
    if not blocks:
        raise ConfigError(
            f"no candidate offsets survive voxel rounding at resolution {res}"
        )
    if len(blocks) > 16:
        raise ConfigError(
            f"{len(blocks)} candidate blocks would mean {2 ** len(blocks)} subsets; "
            "use fewer candidate lengths"
        )

    shape = np.asarray(seg.geometry.shape, dtype=np.int64)
    valid = []
    background_ids = []
    for a in annotations:
        if seg.label_at_world(a.pre_location) == 0 or seg.label_at_world(a.post_location) == 0:
            background_ids.append(a.id)
        else:
            valid.append(a)

    block_vox = [round_half_away(b["offsets_nm"] / np.asarray(res)) for b in blocks]

    # per-annotation, per-radius, per-block coverage bits; subsets then reduce
    # to a boolean OR, so each region pair is expanded only once per radius
    def bits_for(a):
        rows = {}
        for r_syn in radii:
            pre, post_lin = _region_pair(a, r_syn, seg)
            rows[r_syn] = np.array(
                [_any_offset_hits(pre, post_lin, vox, shape) for vox in block_vox],
                dtype=bool,
            )
        return rows

    if threads and threads > 1 and len(valid) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_bits = list(pool.map(bits_for, valid))
    else:
        all_bits = [bits_for(a) for a in valid]

    block_sizes = np.array([b["offsets_nm"].shape[0] for b in blocks])
    block_lengths = np.array([np.linalg.norm(b["offsets_nm"], axis=1).sum() for b in blocks])

    best = None  # (covered, -n_e, -r_syn, -sum_len) maximized lexicographically
    best_cfg = None
    n_total = len(valid)
    for r_syn in radii:
        cov = (
            np.stack([bits[r_syn] for bits in all_bits], axis=0)
            if valid
            else np.zeros((0, len(blocks)), dtype=bool)
        )
        for size in range(1, len(blocks) + 1):
            for subset in itertools.combinations(range(len(blocks)), size):
                idx = list(subset)
                n_e = int(block_sizes[idx].sum())
                if counts is not None and n_e not in counts:
                    continue
                covered_mask = cov[:, idx].any(axis=1) if n_total else np.zeros(0, bool)
                covered = int(covered_mask.sum())
                key = (covered, -n_e, -r_syn, -float(block_lengths[idx].sum()))
                if best is None or key > best:
                    best = key
                    best_cfg = (r_syn, idx, covered_mask)
    if best_cfg is None:
        raise ConfigError("no subset matches the requested candidate_counts")

    r_syn, idx, covered_mask = best_cfg
    offsets_nm = np.concatenate([blocks[i]["offsets_nm"] for i in idx], axis=0)
    chosen = OffsetSet.from_nm(offsets_nm, r_syn, res)
    covered_ids = [a.id for a, c in zip(valid, covered_mask) if c]
    uncovered_ids = [a.id for a, c in zip(valid, covered_mask) if not c]
    report = CoverageReport.from_parts(covered_ids, uncovered_ids, background_ids)
    return chosen, report
