"""Hot-kernel dispatch: compiled Cython core with a numpy fallback.

The compiled module is preferred when importable; set SYNPART_PURE=1 to force
the numpy path (used by the parity tests and the benchmark).
"""
from __future__ import annotations

import os

from ._fallback import forward_neighbor_offsets  # noqa: F401

if os.environ.get("SYNPART_PURE"):
    from . import _fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

IMPLEMENTATION = "numpy" if _impl.__name__.endswith("_fallback") else "cython"


def edge_candidates(scores, labels, offsets_vox, t1):
    return _impl.edge_candidates(scores, labels, offsets_vox, float(t1))


def component_roots(lin_sorted, shape, connectivity):
    if IMPLEMENTATION == "cython":
        return _impl.component_roots(
            lin_sorted, int(shape[0]), int(shape[1]), int(shape[2]), int(connectivity)
        )
    return _impl.component_roots(lin_sorted, shape, connectivity)
