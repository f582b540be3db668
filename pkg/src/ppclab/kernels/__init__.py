"""Hot counting kernels, dispatched to numba or numpy by ``PPCLAB_BACKEND``."""
import importlib

from ppclab._backend import BACKEND

_impl = importlib.import_module(f"ppclab.kernels._{BACKEND}")

window_bounds = _impl.window_bounds
filtered_window_count = _impl.filtered_window_count
grid_pair_count = _impl.grid_pair_count
power_sums = _impl.power_sums


def implementation(name):
    """Return the kernel module for ``name`` ('numba' or 'numpy')."""
    return importlib.import_module(f"ppclab.kernels._{name}")
