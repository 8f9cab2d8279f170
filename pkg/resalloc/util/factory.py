"""Dictionary-driven object factories."""

import warnings
from copy import deepcopy

from .exceptions import ConfigError


class BaseFactory:
    """Base class for factories creating objects from configuration
    dictionaries, such as the node cost entries of a scenario file.

    A factory accepts registrations of subclasses of its
    ``_constructed_type`` class attribute (``object`` by default). Every
    derived factory must declare its own ``registry`` dictionary; otherwise,
    it shares the one of its parent.

    Classes are registered with the :meth:`register` decorator, applied
    *after* :func:`attr.s`, and must provide a ``from_dict()`` class method.
    :meth:`create` then instantiates them from a dictionary whose ``type``
    entry names the registered class; the remaining entries are passed to
    ``from_dict()``.

    .. admonition:: Example
        :class: hint

        .. code:: python

            @CostFactory.register("quadratic")
            @attr.s(frozen=True, eq=False)
            class QuadraticCost(CostSpec):
                ...

            cost = CostFactory.create({
                "type": "quadratic", "q": [[2.]], "demand": [1.],
                "lipschitz": 2.
            })
    """
    #: Base class of registrable classes
    _constructed_type = object

    #: Registered classes, by name
    registry = {}

    @classmethod
    def register(cls, *names):
        """Class decorator registering the decorated class under each of
        ``names``. Replacing an existing registration issues a warning.

        Raises → TypeError:
            If the decorated class does not derive from ``_constructed_type``.

        Raises → AttributeError:
            If the decorated class has no ``from_dict()`` method.
        """

        def decorator(registered):
            if not issubclass(registered, cls._constructed_type):
                raise TypeError(f"{cls.__name__} only accepts subclasses of "
                                f"'{cls._constructed_type.__name__}', got "
                                f"'{registered.__name__}'")
            if not hasattr(registered, "from_dict"):
                raise AttributeError(f"cannot register '{registered.__name__}' "
                                     f"to {cls.__name__}: missing "
                                     f"'from_dict()'")

            for name in names:
                if name in cls.registry:
                    warnings.warn(f"'{name}' already registered to "
                                  f"{cls.__name__} "
                                  f"('{cls.registry[name].__name__}'), "
                                  f"replaced by '{registered.__name__}'")
                cls.registry[name] = registered
            return registered

        return decorator

    @classmethod
    def create(cls, config_dict):
        """Instantiate the registered class named by the ``type`` entry of
        ``config_dict``. ``config_dict`` is left untouched.

        Returns → ``_constructed_type``

        Raises → :class:`.ConfigError`:
            If ``type`` is missing or not registered.
        """
        kwargs = deepcopy(dict(config_dict))
        known = ", ".join(sorted(cls.registry))

        if "type" not in kwargs:
            raise ConfigError(f"missing 'type' entry (registered: {known})")
        name = kwargs.pop("type")
        if name not in cls.registry:
            raise ConfigError(f"no class registered as '{name}' "
                              f"(registered: {known})")

        return cls.registry[name].from_dict(kwargs)

    @classmethod
    def convert(cls, value):
        """Converter forwarding dictionaries to :meth:`create`; other values
        are returned unchanged."""
        return cls.create(value) if isinstance(value, dict) else value
