"""Backend selection for the hot counting kernels.

Set ``PPCLAB_BACKEND=numpy`` to force the pure-numpy implementations; the
default is ``numba`` whenever numba imports cleanly.
"""
import os

_requested = os.environ.get("PPCLAB_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"PPCLAB_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe, which warns on older system TBB builds
        numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAVE_NUMBA = False

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def set_threads(n):
    """Cap the worker count used by parallel numba kernels (None = all)."""
    if n is None or not HAVE_NUMBA:
        return
    import numba

    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
