# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled scan kernels: edge-candidate extraction and sparse voxel CCL.

Semantics match synpart._kernels._fallback exactly (same traversal order,
same float64 threshold comparison, same canonical component roots).
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def edge_candidates(const float[:, :, :, ::1] scores,
                    const cnp.uint64_t[:, :, ::1] labels,
                    const cnp.int64_t[:, ::1] offsets_vox,
                    double t1):
    """Single-pass scan for edges with score >= t1 crossing segment borders."""
    cdef Py_ssize_t C = scores.shape[0]
    cdef Py_ssize_t X = scores.shape[1]
    cdef Py_ssize_t Y = scores.shape[2]
    cdef Py_ssize_t Z = scores.shape[3]
    cdef Py_ssize_t c, x, y, z
    cdef Py_ssize_t x0, x1, y0, y1, z0, z1
    cdef cnp.int64_t ox, oy, oz
    cdef cnp.uint64_t a, b
    cdef Py_ssize_t n = 0, i = 0

    # pass 1: count survivors so the output buffers can be exact-sized
    with nogil:
        for c in range(C):
            ox = offsets_vox[c, 0]; oy = offsets_vox[c, 1]; oz = offsets_vox[c, 2]
            x0 = max(0, -ox); x1 = min(X, X - ox)
            y0 = max(0, -oy); y1 = min(Y, Y - oy)
            z0 = max(0, -oz); z1 = min(Z, Z - oz)
            for x in range(x0, x1):
                for y in range(y0, y1):
                    for z in range(z0, z1):
                        if <double> scores[c, x, y, z] < t1:
                            continue
                        a = labels[x, y, z]
                        if a == 0:
                            continue
                        b = labels[x + ox, y + oy, z + oz]
                        if b == 0 or b == a:
                            continue
                        n += 1

    chan_arr = np.empty(n, dtype=np.int64)
    src_arr = np.empty(n, dtype=np.int64)
    tgt_arr = np.empty(n, dtype=np.int64)
    val_arr = np.empty(n, dtype=np.float64)
    alab_arr = np.empty(n, dtype=np.int64)
    blab_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] chan = chan_arr
    cdef cnp.int64_t[::1] src = src_arr
    cdef cnp.int64_t[::1] tgt = tgt_arr
    cdef double[::1] val = val_arr
    cdef cnp.int64_t[::1] alab = alab_arr
    cdef cnp.int64_t[::1] blab = blab_arr

    with nogil:
        for c in range(C):
            ox = offsets_vox[c, 0]; oy = offsets_vox[c, 1]; oz = offsets_vox[c, 2]
            x0 = max(0, -ox); x1 = min(X, X - ox)
            y0 = max(0, -oy); y1 = min(Y, Y - oy)
            z0 = max(0, -oz); z1 = min(Z, Z - oz)
            for x in range(x0, x1):
                for y in range(y0, y1):
                    for z in range(z0, z1):
                        if <double> scores[c, x, y, z] < t1:
                            continue
                        a = labels[x, y, z]
                        if a == 0:
                            continue
                        b = labels[x + ox, y + oy, z + oz]
                        if b == 0 or b == a:
                            continue
                        chan[i] = c
                        src[i] = (x * Y + y) * Z + z
                        tgt[i] = ((x + ox) * Y + (y + oy)) * Z + (z + oz)
                        val[i] = <double> scores[c, x, y, z]
                        alab[i] = <cnp.int64_t> a
                        blab[i] = <cnp.int64_t> b
                        i += 1

    return chan_arr, src_arr, tgt_arr, val_arr, alab_arr, blab_arr


cdef Py_ssize_t _find(cnp.int64_t[::1] parent, Py_ssize_t i) nogil:
    while parent[i] != i:
        parent[i] = parent[parent[i]]  # path halving
        i = parent[i]
    return i


def component_roots(const cnp.int64_t[::1] lin_sorted,
                    Py_ssize_t sx, Py_ssize_t sy, Py_ssize_t sz,
                    int connectivity):
    """Union-find CCL over a sorted sparse voxel set; roots = min linear index."""
    cdef Py_ssize_t n = lin_sorted.shape[0]
    out_arr = np.empty(n, dtype=np.int64)
    if n == 0:
        return out_arr

    cdef cnp.int64_t[::1] out = out_arr
    parent_arr = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] parent = parent_arr

    # lexicographically-positive neighbor offsets: targets always have a
    # larger linear index, so each adjacency is discovered exactly once
    cdef cnp.int64_t[26][3] offs
    cdef int n_off = 0
    cdef int dx, dy, dz
    if connectivity == 6:
        offs[0][0] = 1; offs[0][1] = 0; offs[0][2] = 0
        offs[1][0] = 0; offs[1][1] = 1; offs[1][2] = 0
        offs[2][0] = 0; offs[2][1] = 0; offs[2][2] = 1
        n_off = 3
    elif connectivity == 26:
        for dx in range(-1, 2):
            for dy in range(-1, 2):
                for dz in range(-1, 2):
                    if dx > 0 or (dx == 0 and (dy > 0 or (dy == 0 and dz > 0))):
                        offs[n_off][0] = dx
                        offs[n_off][1] = dy
                        offs[n_off][2] = dz
                        n_off += 1
    else:
        raise ValueError(f"connectivity must be 6 or 26, got {connectivity}")

    cdef Py_ssize_t i, t, lo, hi, mid, ri, rj
    cdef cnp.int64_t lin, nlin
    cdef cnp.int64_t x, y, z, nx, ny, nz
    with nogil:
        for i in range(n):
            lin = lin_sorted[i]
            z = lin % sz
            y = (lin // sz) % sy
            x = lin // (sy * sz)
            for t in range(n_off):
                nx = x + offs[t][0]
                ny = y + offs[t][1]
                nz = z + offs[t][2]
                if nx < 0 or nx >= sx or ny < 0 or ny >= sy or nz < 0 or nz >= sz:
                    continue
                nlin = (nx * sy + ny) * sz + nz
                # binary search in the tail (nlin > lin by construction)
                lo = i + 1
                hi = n
                while lo < hi:
                    mid = (lo + hi) // 2
                    if lin_sorted[mid] < nlin:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < n and lin_sorted[lo] == nlin:
                    ri = _find(parent, i)
                    rj = _find(parent, lo)
                    if ri < rj:
                        parent[rj] = ri
                    elif rj < ri:
                        parent[ri] = rj
        for i in range(n):
            out[i] = lin_sorted[_find(parent, i)]
    return out_arr
