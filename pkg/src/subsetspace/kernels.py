"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``SUBSETSPACE_BACKEND=python`` is set, the numpy
implementations take over. Both expose the same functions.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SUBSETSPACE_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

COLLIDED, REACHED, MAXSTEPS = 0, 1, 2

pairwise = _impl.pairwise
cross = _impl.cross
hausdorff = _impl.hausdorff
hausdorff_matrix = _impl.hausdorff_matrix
flow_field = _impl.flow_field
integrate = _impl.integrate
small_ball = _impl.small_ball
min_ball_l2 = _impl.min_ball_l2
two_center = _impl.two_center


def backends():
    """Available backend modules keyed by name (for cross-checks and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
