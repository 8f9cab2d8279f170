"""Distributed resource allocation over time-varying weight-balanced digraphs
under continuous, periodic and event-triggered communication."""

__version__ = "0.1.0"  #: resalloc version number.

# -- Required imports ----------------------------------------------------------

from .util.xarray import ResallocDataArrayAccessor, ResallocDatasetAccessor

# -- Cleanup -------------------------------------------------------------------

del ResallocDataArrayAccessor, ResallocDatasetAccessor
