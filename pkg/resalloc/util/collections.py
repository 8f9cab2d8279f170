"""Specialised container datatypes used to manipulate scenario documents."""

from copy import deepcopy

import dpath
from dpath.exceptions import PathNotFound


class ndict(dict):
    """A nested dict structure addressed with separator-delimited paths, *e.g.*
    ``"gains.beta"``. Keys are expected to be strings.
    """

    # Requires dpath [https://github.com/dpath-maintainers/dpath-python]

    def __init__(self, d=None, separator="."):
        """Initialise from another dictionary.

        Parameter ``d`` (dict or None)
            Dictionary to initialise from. Nested containers are deep-copied.

        Parameter ``separator`` (str)
            Key separator.
        """
        super().__init__(deepcopy(dict(d)) if d is not None else {})
        self.separator = separator

    def update(self, other):
        """Recursively update with content of another nested dict structure.
        Existing leaves are overwritten.

        Parameter ``other`` (dict):
            Dictionary to update ``self`` with.
        """
        dpath.merge(self, other, separator=self.separator,
                    flags=dpath.MergeType.REPLACE)

    def rget(self, key):
        """Recursively access an element in the nested dictionary.

        Parameter ``key`` (str)
            Path to the queried element. The path separator is defined by
            ``self.separator``.

        Returns → object
            Requested object.

        Raises → ``KeyError``
            The requested key could not be found.
        """
        try:
            return dpath.get(self, key, separator=self.separator)
        except (KeyError, ValueError):
            raise KeyError(key)

    def rset(self, key, value):
        """Set an element in the nested dictionary. Missing intermediate
        levels are created.

        Parameter ``key`` (str)
            Path to the element to set. The path separator is defined by
            ``self.separator``.

        Raises → ``KeyError``
            The path traverses a leaf.
        """
        try:
            dpath.new(self, key, value, separator=self.separator)
        except (PathNotFound, TypeError):
            raise KeyError(key)

    def with_overrides(self, overrides):
        """Return a copy of ``self`` with the leaves listed in ``overrides``
        (a mapping of paths to values) replaced.

        Parameter ``overrides`` (dict):
            Path-value pairs.

        Returns → :class:`ndict`:
            Updated copy.
        """
        result = ndict(self, separator=self.separator)
        for key, value in overrides.items():
            result.rset(key, value)
        return result
