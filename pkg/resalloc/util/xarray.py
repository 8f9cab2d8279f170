"""Metadata specifications and accessors for recorded trajectories.

Trajectories are :class:`~xarray.Dataset` objects with dimensions ``t``,
``node`` and ``component`` (plus ``event`` for the broadcast log). Their
CF-style metadata is described by :class:`DatasetSpec`, :class:`VarSpec` and
:class:`CoordSpec` objects and checked or filled in with :mod:`cerberus`.
"""

import attr
import cerberus
import numpy as np
import xarray as xr


def validate_metadata(data, spec, normalize=False, allow_unknown=False):
    """Check the ``attrs`` of a dataset, data variable or coordinate against
    a specification.

    Parameter ``data`` (:class:`~xarray.Dataset` or :class:`~xarray.DataArray`):
        Object whose metadata is checked.

    Parameter ``spec`` (:class:`CoordSpec` or :class:`VarSpec` or :class:`DatasetSpec`):
        Specification matching the type of ``data``.

    Parameter ``normalize`` (bool):
        If ``True``, missing entries are filled with their specified values.

    Parameter ``allow_unknown`` (bool):
        If ``True``, entries absent from the specification are accepted.

    Returns → dict:
        Normalised metadata if ``normalize`` is ``True``, ``data.attrs``
        otherwise.

    Raises → ValueError:
        If the metadata does not comply with ``spec``.
    """
    validator = cerberus.Validator(schema=spec.schema,
                                   allow_unknown=allow_unknown)
    if not validator.validate(data.attrs, normalize=normalize):
        raise ValueError(f"while validating metadata, got errors "
                         f"{validator.errors}")
    return validator.document if normalize else data.attrs


def _fixed(value, **rules):
    # Schema of an entry which may only take (and defaults to) ``value``
    return {"allowed": [value], "default": value, "required": True, **rules}


def _naming_schema(standard_name, long_name, units):
    schema = {
        "standard_name": _fixed(standard_name, empty=False),
        "long_name": _fixed(long_name, empty=False),
    }
    if units is not None:
        schema["units"] = _fixed(units)
    return schema


def _all_or_none(instance, names):
    values = [getattr(instance, name) is None for name in names]
    if any(values) and not all(values):
        names = ", ".join(f"'{name}'" for name in names)
        raise ValueError(f"either all or none of {names} must be None")


@attr.s(frozen=True)
class CoordSpec:
    """Coordinate variable metadata.

    .. rubric:: Constructor arguments / instance attributes

    ``standard_name`` (str):
        CF standard name.

    ``units`` (str or None):
        CF units; ``None`` for index coordinates (which carry no units entry).

    ``long_name`` (str):
        CF long name.
    """
    standard_name = attr.ib()
    units = attr.ib()
    long_name = attr.ib()

    @property
    def schema(self):
        """Cerberus schema of the coordinate's ``attrs``."""
        return _naming_schema(self.standard_name, self.long_name, self.units)


class CoordSpecRegistry:
    """Named coordinate specifications and collections of them (one
    collection per dimension layout of trajectory variables). Not meant to be
    instantiated.
    """

    #: Coordinate specifications, by id (dict[str, :class:`CoordSpec`])
    registry = {}

    #: Collections, by id (dict[str, dict[str, :class:`CoordSpec`]])
    registry_collections = {}

    @classmethod
    def register(cls, spec_id, coord_spec):
        cls.registry[spec_id] = coord_spec

    @classmethod
    def register_collection(cls, collection_id, spec_ids):
        """Register a collection of already registered specifications; its
        keys are the dimension names, in order."""
        cls.registry_collections[collection_id] = {
            spec_id: cls.registry[spec_id] for spec_id in spec_ids
        }

    @classmethod
    def get(cls, spec_id):
        return cls.registry[spec_id]

    @classmethod
    def get_collection(cls, collection_id):
        return cls.registry_collections[collection_id]

    @classmethod
    def str_to_collection(cls, x):
        """``attrs`` converter: collection ids are replaced by the collection
        they name, other values pass through."""
        return cls.get_collection(x) if isinstance(x, str) else x


def _mapping_of(value_type):
    def validator(instance, attribute, value):
        if not all(isinstance(x, value_type) for x in value.values()):
            raise TypeError(f"{attribute.name} must be a "
                            f"dict[str, {value_type.__name__}]")

    return [attr.validators.instance_of(dict), validator]


_optional_str = attr.validators.optional(attr.validators.instance_of(str))


@attr.s
class VarSpec:
    """Data variable metadata.

    .. rubric:: Constructor arguments / instance attributes

    ``standard_name``, ``long_name`` (str or None):
        CF names. Either both or none must be set; with none, only the
        coordinates are checked.

    ``units`` (str or None):
        CF units; ``None`` for unitless variables.

    ``coord_specs`` (str or dict[str, :class:`CoordSpec`]):
        Coordinate specifications, or the id of a registered collection.
    """
    standard_name = attr.ib(default=None, validator=_optional_str)
    units = attr.ib(default=None, validator=_optional_str)
    long_name = attr.ib(default=None, validator=_optional_str)
    coord_specs = attr.ib(factory=dict,
                          converter=CoordSpecRegistry.str_to_collection,
                          validator=_mapping_of(CoordSpec))

    def __attrs_post_init__(self):
        _all_or_none(self, ["standard_name", "long_name"])

    @property
    def dims(self):
        """Dimension names, in order."""
        return list(self.coord_specs)

    @property
    def schema(self):
        """Cerberus schema of the variable's ``attrs``."""
        return _naming_schema(self.standard_name, self.long_name, self.units)


#: Global attributes of a dataset specification
_DATASET_ATTRS = ("convention", "title", "history", "source", "references")


@attr.s
class DatasetSpec:
    """Dataset metadata.

    .. rubric:: Constructor arguments / instance attributes

    ``convention``, ``title``, ``history``, ``source``, ``references`` (str or None):
        Global attributes. Either all or none must be set; with none, only
        variables and coordinates are checked.

    ``var_specs`` (dict[str, :class:`VarSpec`]):
        Data variable specifications. Variables absent from the dataset are
        skipped.

    ``coord_specs`` (str or dict[str, :class:`CoordSpec`]):
        Dimension coordinate specifications, or the id of a registered
        collection.
    """
    convention = attr.ib(default=None, validator=_optional_str)
    title = attr.ib(default=None, validator=_optional_str)
    history = attr.ib(default=None, validator=_optional_str)
    source = attr.ib(default=None, validator=_optional_str)
    references = attr.ib(default=None, validator=_optional_str)
    var_specs = attr.ib(factory=dict, validator=_mapping_of(VarSpec))
    coord_specs = attr.ib(factory=dict,
                          converter=CoordSpecRegistry.str_to_collection,
                          validator=_mapping_of(CoordSpec))

    def __attrs_post_init__(self):
        _all_or_none(self, _DATASET_ATTRS)

    @property
    def schema(self):
        """Cerberus schema of the dataset's global ``attrs``."""
        return {
            name: {"type": "string", "default": getattr(self, name),
                   "required": True}
            for name in _DATASET_ATTRS
        }


for spec_id, coord_spec in [
    ("t", CoordSpec("time", "s", "time")),
    ("node", CoordSpec("node_index", None, "node index")),
    ("component", CoordSpec("resource_component", None, "resource component")),
]:
    CoordSpecRegistry.register(spec_id, coord_spec)

for collection_id, spec_ids in [
    ("node_vector_series", ("t", "node", "component")),
    ("node_scalar_series", ("t", "node")),
    ("network_series", ("t",)),
    ("trajectory", ("t", "node", "component")),
]:
    CoordSpecRegistry.register_collection(collection_id, spec_ids)


def _node_vector(standard_name, long_name):
    return VarSpec(standard_name=standard_name, long_name=long_name,
                   coord_specs="node_vector_series")


def _network(standard_name, long_name):
    return VarSpec(standard_name=standard_name, long_name=long_name,
                   coord_specs="network_series")


#: Metadata of trajectories recorded by :func:`resalloc.engine.run`
trajectory_dataset_spec = DatasetSpec(
    convention="CF-1.8",
    title="Untitled resource allocation trajectory",
    history="Unknown",
    source="Unknown",
    references="Unknown",
    var_specs={
        "lambda": _node_vector("dual_variable", "local multiplier estimate"),
        "gamma": _node_vector("integral_state", "consensus integral state"),
        "u": _node_vector("coupling_input", "held consensus coupling input"),
        "z": _node_vector("dual_variable_rate", "multiplier time derivative"),
        "x": _node_vector("primal_allocation", "recovered local allocation"),
        "V": VarSpec(standard_name="storage_value",
                     long_name="passivity storage function",
                     coord_specs="node_scalar_series"),
        "cost": _network("total_cost",
                         "total cost of the recovered allocations"),
        "consensus_err": _network("consensus_error",
                                  "maximum pairwise multiplier distance"),
        "dual_residual": _network("dual_residual",
                                  "resource balance residual"),
        "dist_to_lstar": _network("distance_to_optimum",
                                  "maximum distance to optimal multiplier"),
    },
    coord_specs="trajectory",
)


# ------------------------------------------------------------------------------
#                                    Accessors
# ------------------------------------------------------------------------------

def _check_coords(obj, coord_specs, normalize, allow_unknown, skip_missing):
    for dim, coord_spec in coord_specs.items():
        if skip_missing and dim not in obj.coords:
            continue
        try:
            obj.coords[dim].attrs = validate_metadata(
                obj.coords[dim], coord_spec, normalize=normalize,
                allow_unknown=allow_unknown
            )
        except ValueError as e:
            raise ValueError(f"coordinate '{dim}': {e}")


@xr.register_dataarray_accessor("ra")
class ResallocDataArrayAccessor:
    """``DataArray.ra`` accessor."""

    def __init__(self, xarray_obj):
        self._obj = xarray_obj

    def validate_metadata(self, var_spec, normalize=False, allow_unknown=True):
        """Check (and if ``normalize`` is ``True``, fill in place) the
        metadata of the wrapped array and of its coordinates against
        ``var_spec`` (:class:`VarSpec`)."""
        da = self._obj
        if var_spec.standard_name is not None:
            da.attrs = validate_metadata(da, var_spec, normalize=normalize,
                                         allow_unknown=allow_unknown)
        _check_coords(da, var_spec.coord_specs, normalize, allow_unknown,
                      skip_missing=True)

    def norm(self, dim="component"):
        """Euclidean norm along ``dim``."""
        return np.sqrt((self._obj ** 2).sum(dim=dim))


@xr.register_dataset_accessor("ra")
class ResallocDatasetAccessor:
    """``Dataset.ra`` accessor."""

    def __init__(self, xarray_obj):
        self._obj = xarray_obj

    def validate_metadata(self, dataset_spec, normalize=False,
                          allow_unknown=True):
        """Check (and if ``normalize`` is ``True``, fill in place) the
        metadata of the wrapped dataset against ``dataset_spec``
        (:class:`DatasetSpec`): global attributes, then data variables
        present in the dataset, then dimension coordinates."""
        ds = self._obj
        if dataset_spec.title is not None:
            ds.attrs = validate_metadata(ds, dataset_spec, normalize=normalize,
                                         allow_unknown=allow_unknown)

        for name, var_spec in dataset_spec.var_specs.items():
            if name not in ds.data_vars or var_spec.standard_name is None:
                continue
            try:
                ds[name].ra.validate_metadata(var_spec, normalize=normalize,
                                              allow_unknown=allow_unknown)
            except ValueError as e:
                raise ValueError(f"data variable '{name}': {e}")

        _check_coords(ds, dataset_spec.coord_specs, normalize, allow_unknown,
                      skip_missing=False)

    def normalize_metadata(self, dataset_spec):
        """Fill missing metadata in place; unknown entries are kept."""
        self.validate_metadata(dataset_spec, normalize=True, allow_unknown=True)

    def at_node(self, node):
        """Records of node ``node``."""
        return self._obj.sel(node=node)

    def terminal(self):
        """Records at the last recorded time."""
        return self._obj.isel(t=-1)
