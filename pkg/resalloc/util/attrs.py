"""attrs helpers: unit-enabled fields and the validators shared by
configuration classes."""

import enum
from functools import lru_cache

import attr
import numpy as np

from .exceptions import UnitsError
from .misc import always_iterable
from .units import compatible, ensure_units, ureg


# ------------------------------------------------------------------------------
#                                Unit-enabled fields
# ------------------------------------------------------------------------------

class MKey(enum.Enum):
    """Field metadata keys."""
    SUPPORTS_UNITS = enum.auto()  #: Field accepts a ``<name>_units`` entry
    COMPATIBLE_UNITS = enum.auto()  #: Units the field value must convert to


def unit_enabled(cls):
    """Class decorator for attrs classes holding fields created with
    :func:`attrib_quantity`.

    The decorated class gains:

    * ``_fields_supporting_units()``, the names of its unit-enabled fields;
    * ``_fields_compatible_units()``, a mapping of those names to their
      compatible units;
    * ``from_dict()``, which merges every ``<name>_units`` entry of a
      configuration dictionary into the value of ``<name>``.

    Returns → type:
        Decorated class.
    """

    @classmethod
    @lru_cache(maxsize=None)
    def fields_supporting_units(wrapped_cls):
        return tuple(f.name for f in attr.fields(wrapped_cls)
                     if f.metadata.get(MKey.SUPPORTS_UNITS))

    @classmethod
    @lru_cache(maxsize=None)
    def fields_compatible_units(wrapped_cls):
        return {f.name: f.metadata[MKey.COMPATIBLE_UNITS]
                for f in attr.fields(wrapped_cls)
                if f.metadata.get(MKey.COMPATIBLE_UNITS) is not None}

    @classmethod
    def from_dict(wrapped_cls, d):
        """Create from a configuration dictionary. A ``<name>_units`` entry
        applies its units to the value of ``<name>``; unit-enabled fields
        without one fall back to their compatible units.

        Parameter ``d`` (dict):
            Configuration dictionary.

        Returns → wrapped_cls:
            Created object.

        Raises → ValueError:
            If a ``<name>_units`` entry comes without a ``<name>`` entry.
        """
        kwargs = dict(d)
        for name in wrapped_cls._fields_supporting_units():
            units = kwargs.pop(f"{name}_units", None)
            if units is None:
                continue
            if name not in kwargs:
                raise ValueError(f"'{name}_units' specified without a value "
                                 f"for '{name}'")
            kwargs[name] = ensure_units(kwargs[name], units, convert=True)
        return wrapped_cls(**kwargs)

    cls._fields_supporting_units = fields_supporting_units
    cls._fields_compatible_units = fields_compatible_units
    cls.from_dict = from_dict
    return cls


def attrib_quantity(default=attr.NOTHING, validator=None, converter=None,
                    units_compatible=None, metadata=None, **kwargs):
    """Create a unit-enabled :func:`attr.ib` field. The owner class must be
    decorated with :func:`unit_enabled`.

    If ``units_compatible`` is set, plain numbers assigned to the field are
    wrapped in these units (after ``converter``) and the field rejects values
    with incompatible units. Both steps are skipped for ``None`` if
    ``default`` is ``None``.

    Parameter ``units_compatible`` (:class:`pint.Unit` or str or None):
        Units of the field.

    Other parameters are those of :func:`attr.ib`.

    Returns → :class:`attr._make._CountingAttr`:
        Field definition.
    """
    metadata = dict(metadata or {})
    metadata[MKey.SUPPORTS_UNITS] = True
    converters = list(always_iterable(converter))
    validators = list(always_iterable(validator))

    if units_compatible is not None:
        metadata[MKey.COMPATIBLE_UNITS] = ureg.Unit(units_compatible)

        def wrap(x):
            return ensure_units(x, units_compatible)

        if default is None:
            converters.append(attr.converters.optional(wrap))
            validators.append(
                attr.validators.optional(validator_has_compatible_units)
            )
        else:
            converters.append(wrap)
            validators.append(validator_has_compatible_units)

    return attr.ib(
        default=default,
        validator=validators or None,
        converter=attr.converters.pipe(*converters) if converters else None,
        metadata=metadata,
        **kwargs
    )


# ------------------------------------------------------------------------------
#                                    Validators
# ------------------------------------------------------------------------------

def validator_has_compatible_units(instance, attribute, value):
    """Check that ``value`` carries units compatible with those declared for
    a field created with :func:`attrib_quantity`.

    Raises → :class:`.UnitsError`
    """
    expected = instance._fields_compatible_units()[attribute.name]
    units = getattr(value, "units", None)
    if units is None:
        raise UnitsError(f"{attribute.name} requires units compatible with "
                         f"'{expected}', got unitless value {value}")
    if not compatible(units, expected):
        raise UnitsError(f"{attribute.name} requires units compatible with "
                         f"'{expected}', got '{units}'")


def validator_is_number(_, attribute, value):
    """Raise a ``TypeError`` unless ``value`` is a real number (booleans
    excluded)."""
    if isinstance(value, bool) or not isinstance(value, (int, float, np.number)):
        raise TypeError(f"{attribute.name} must be a real number, "
                        f"got {value} which is a {type(value)}")


def validator_is_positive(_, attribute, value):
    """Raise a ``ValueError`` if ``value`` is negative."""
    if value < 0.:
        raise ValueError(f"{attribute.name} must be positive or zero, got {value}")


def validator_is_strictly_positive(_, attribute, value):
    """Raise a ``ValueError`` unless ``value > 0``."""
    if not value > 0.:
        raise ValueError(f"{attribute.name} must be strictly positive, got {value}")


def validator_all_finite(_, attribute, value):
    """Raise a ``ValueError`` if an element of ``value`` is infinite or NaN."""
    if not np.all(np.isfinite(np.asarray(value, dtype=float))):
        raise ValueError(f"{attribute.name} must be finite, got {value}")


def validator_in_open_interval(lower, upper):
    """Validator factory: the generated validator raises a ``ValueError``
    unless ``lower < value < upper``."""

    def f(_, attribute, value):
        if not lower < value < upper:
            raise ValueError(f"{attribute.name} must lie in ({lower}, {upper}), "
                             f"got {value}")

    return f


def validator_quantity(wrapped_validator):
    """Make ``wrapped_validator`` apply to the magnitude of
    :class:`pint.Quantity` values and to other values as is."""

    def f(instance, attribute, value):
        magnitude = value.magnitude if isinstance(value, ureg.Quantity) else value
        return wrapped_validator(instance, attribute, magnitude)

    return f
