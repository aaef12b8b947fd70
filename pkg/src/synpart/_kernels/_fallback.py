"""Pure numpy implementations of the hot scan kernels.

Used when the compiled extension is unavailable (or explicitly disabled via
SYNPART_PURE=1). Output is bit-identical to the compiled path: candidates in
channel-major, C-order source traversal; component roots canonicalized to the
minimum linearized member index.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _csgraph_components

IMPLEMENTATION = "numpy"


def forward_neighbor_offsets(connectivity: int) -> np.ndarray:
    """Lexicographically-positive half of the 6/26 voxel neighborhood."""
    if connectivity == 6:
        offs = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    elif connectivity == 26:
        offs = [
            (dx, dy, dz)
            for dx in (-1, 0, 1)
            for dy in (-1, 0, 1)
            for dz in (-1, 0, 1)
            if (dx, dy, dz) > (0, 0, 0)
        ]
    else:
        raise ValueError(f"connectivity must be 6 or 26, got {connectivity}")
    return np.asarray(offs, dtype=np.int64)


def edge_candidates(scores, labels, offsets_vox, t1):
    """Scan a score volume for above-threshold edges crossing segment borders.

    Parameters
    ----------
    scores : float32 [C, X, Y, Z]
    labels : uint64 [X, Y, Z]
    offsets_vox : int64 [C, 3]
    t1 : per-edge score threshold (score >= t1 keeps the edge)

    Returns (chan, src_lin, tgt_lin, score, src_label, tgt_label) arrays with
    one entry per kept edge: source and target voxels in bounds, both labels
    nonzero and different. Scores are compared against t1 in float64.
    """
    C, X, Y, Z = scores.shape
    t1 = np.float64(t1)
    chans, src_lins, tgt_lins, vals, src_labs, tgt_labs = [], [], [], [], [], []
    for c in range(C):
        ox, oy, oz = (int(o) for o in offsets_vox[c])
        sx = slice(max(0, -ox), min(X, X - ox))
        sy = slice(max(0, -oy), min(Y, Y - oy))
        sz = slice(max(0, -oz), min(Z, Z - oz))
        if sx.start >= sx.stop or sy.start >= sy.stop or sz.start >= sz.stop:
            continue
        tx = slice(sx.start + ox, sx.stop + ox)
        ty = slice(sy.start + oy, sy.stop + oy)
        tz = slice(sz.start + oz, sz.stop + oz)
        src_lab = labels[sx, sy, sz]
        tgt_lab = labels[tx, ty, tz]
        keep = (
            (scores[c, sx, sy, sz] >= t1)
            & (src_lab != 0)
            & (tgt_lab != 0)
            & (src_lab != tgt_lab)
        )
        ix, iy, iz = np.nonzero(keep)
        if ix.size == 0:
            continue
        x = ix + sx.start
        y = iy + sy.start
        z = iz + sz.start
        src_lin = (x * Y + y) * Z + z
        tgt_lin = ((x + ox) * Y + (y + oy)) * Z + (z + oz)
        chans.append(np.full(x.size, c, dtype=np.int64))
        src_lins.append(src_lin.astype(np.int64))
        tgt_lins.append(tgt_lin.astype(np.int64))
        vals.append(scores[c, sx, sy, sz][keep].astype(np.float64))
        src_labs.append(src_lab[keep].astype(np.int64))
        tgt_labs.append(tgt_lab[keep].astype(np.int64))
    if not chans:
        empty_i = np.empty(0, dtype=np.int64)
        return empty_i, empty_i.copy(), empty_i.copy(), np.empty(0, np.float64), empty_i.copy(), empty_i.copy()
    return (
        np.concatenate(chans),
        np.concatenate(src_lins),
        np.concatenate(tgt_lins),
        np.concatenate(vals),
        np.concatenate(src_labs),
        np.concatenate(tgt_labs),
    )


def component_roots(lin_sorted, shape, connectivity):
    """Connected components of a sparse voxel set given as sorted linear indices.

    Returns, for each input voxel, the minimum linearized index of its
    component (the canonical component id). Adjacency is the 6- or
    26-neighborhood; indices linearize row-major over (x, y, z).
    """
    lin = np.ascontiguousarray(lin_sorted, dtype=np.int64)
    n = lin.size
    if n == 0:
        return np.empty(0, dtype=np.int64)
    _, Y, Z = (int(s) for s in shape)
    X = int(shape[0])
    z = lin % Z
    rem = lin // Z
    y = rem % Y
    x = rem // Y
    rows, cols = [], []
    for dx, dy, dz in forward_neighbor_offsets(connectivity):
        nx, ny, nz = x + dx, y + dy, z + dz
        ok = (nx >= 0) & (nx < X) & (ny >= 0) & (ny < Y) & (nz >= 0) & (nz < Z)
        if not ok.any():
            continue
        nlin = (nx[ok] * Y + ny[ok]) * Z + nz[ok]
        pos = np.searchsorted(lin, nlin)
        pos_ok = pos < n
        hit = np.zeros(nlin.size, dtype=bool)
        hit[pos_ok] = lin[pos[pos_ok]] == nlin[pos_ok]
        if hit.any():
            rows.append(np.nonzero(ok)[0][hit])
            cols.append(pos[hit])
    if rows:
        i = np.concatenate(rows)
        j = np.concatenate(cols)
        graph = coo_matrix((np.ones(i.size, dtype=np.int8), (i, j)), shape=(n, n))
        _, comp = _csgraph_components(graph, directed=False)
    else:
        comp = np.arange(n)
    ncomp = int(comp.max()) + 1
    roots = np.full(ncomp, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(roots, comp, lin)
    return roots[comp]
