"""Time quantities. Every duration handled by resalloc (sampling periods,
integration steps, horizons, graph dwell times) may be given as a
:class:`pint.Quantity` or as a plain number of seconds."""

__all__ = [
    "ureg",
    "compatible",
    "ensure_units",
    "to_seconds",
]

import pint

#: Unit registry shared by all resalloc components
ureg = pint.UnitRegistry()


def compatible(unit1, unit2):
    """``True`` if ``unit1`` and ``unit2`` (:class:`pint.Unit`) share the same
    dimensionality."""
    return ureg.Quantity(1., unit1).is_compatible_with(unit2)


def ensure_units(value, default_units, convert=False):
    """Wrap ``value`` in a :class:`pint.Quantity` expressed in
    ``default_units`` unless it already carries units.

    Parameter ``value`` (float or :class:`pint.Quantity`):
        Value to wrap.

    Parameter ``default_units`` (:class:`pint.Unit` or str):
        Units applied to plain numbers.

    Parameter ``convert`` (bool):
        If ``True``, quantities are also converted to ``default_units``.

    Returns → :class:`pint.Quantity`

    Raises → :class:`pint.errors.DimensionalityError`:
        If ``convert`` is ``True`` and ``value`` has incompatible units.
    """
    if not isinstance(value, pint.Quantity):
        return ureg.Quantity(value, default_units)
    return value.to(default_units) if convert else value


def to_seconds(value):
    """Magnitude of a duration in seconds, as a float. Plain numbers are
    returned unchanged."""
    if isinstance(value, pint.Quantity):
        return float(value.m_as(ureg.s))
    return float(value)
