"""Other utility components."""

import numpy as np


def always_iterable(obj, base_type=(str, bytes)):
    """Ensure that the object it is passed is iterable.

    - If ``obj`` is iterable, return an iterator over its items.
    - If ``obj`` is not iterable, return a one-item iterable containing ``obj``.
    - If ``obj`` is `None`, return an empty iterable.

    .. note::

        Copied from the more-itertools library
        [https://github.com/more-itertools].
    """
    if obj is None:
        return iter(())

    if (base_type is not None) and isinstance(obj, base_type):
        return iter((obj,))

    try:
        return iter(obj)
    except TypeError:
        return iter((obj,))


def as_float_vector(x):
    """Convert ``x`` to a read-only 1D float array."""
    result = np.array(x, dtype=float).reshape(-1)
    result.setflags(write=False)
    return result


def as_float_matrix(x):
    """Convert ``x`` to a read-only 2D float array."""
    result = np.array(x, dtype=float)
    if result.ndim != 2:
        raise ValueError(f"expected a 2D array, got shape {result.shape}")
    result.setflags(write=False)
    return result


def is_grid_multiple(value, step, rtol=1e-9):
    """Return the integer ratio ``value / step`` if ``value`` is an integer
    multiple of ``step`` (up to relative tolerance ``rtol``), ``None``
    otherwise."""
    ratio = value / step
    n = int(round(ratio))
    if abs(ratio - n) <= rtol * max(1., abs(ratio)):
        return n
    return None
