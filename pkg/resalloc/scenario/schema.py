"""Cerberus schema of scenario documents."""

from ..comms import Regime
from ..costs import CostFactory, builtin_problems
from ..graphs import builtin_schedules

_number = {"type": "number"}
_units = {"type": "string"}
_matrix = {"type": "list", "schema": {"type": "list", "schema": _number}}


_problem = {
    "type": "dict",
    "required": True,
    "schema": {
        "builtin": {
            "type": "string",
            "allowed": list(builtin_problems),
            "excludes": "nodes",
        },
        "nodes": {
            "type": "list",
            "minlength": 1,
            "excludes": "builtin",
            "schema": {
                "type": "dict",
                "allow_unknown": True,
                "schema": {
                    "type": {
                        "type": "string",
                        "required": True,
                        "allowed": sorted(CostFactory.registry),
                    },
                    "demand": {"type": "list", "required": True,
                               "schema": _number},
                    "lipschitz": {"type": "number", "required": True},
                },
            },
        },
        "dim": {"type": "integer", "min": 1},
    },
}

_segment = {
    "type": "dict",
    "schema": {
        "start_time": {"type": "number", "required": True},
        "start_time_units": _units,
        "n": {"type": "integer", "min": 1},
        "weights": {**_matrix, "required": True},
    },
}

_graph = {
    "type": "dict",
    "required": True,
    "schema": {
        "builtin": {
            "type": "string",
            "allowed": list(builtin_schedules),
            "excludes": ["segments", "cycle"],
        },
        "period": _number,
        "period_units": _units,
        "segments": {
            "type": "list",
            "minlength": 1,
            "excludes": ["builtin", "cycle"],
            "schema": _segment,
        },
        "cycle": {
            "type": "dict",
            "excludes": ["builtin", "segments"],
            "schema": {
                "dwell": {"type": "number", "required": True},
                "dwell_units": _units,
                "graphs": {"type": "list", "minlength": 1, "required": True,
                           "schema": _matrix},
            },
        },
    },
}

_gains = {
    "type": "dict",
    "default": {},
    "schema": {
        "alpha": _number,
        "beta": _number,
    },
}

_comm = {
    "type": "dict",
    "default": {},
    "schema": {
        "regime": {"type": "string",
                   "allowed": [regime.value for regime in Regime]},
        "ts": _number,
        "ts_units": _units,
        "c": _number,
        "trigger_coefficient": _number,
    },
}

_sim = {
    "type": "dict",
    "default": {},
    "schema": {
        "horizon": _number,
        "horizon_units": _units,
        "dt": _number,
        "dt_units": _units,
        "seed": {"type": "integer", "min": 0},
        "x0": _matrix,
        "record_every": {"type": "integer", "min": 1},
    },
}

_verify = {
    "type": "dict",
    "default": {},
    "schema": {
        key: _number for key in (
            "gamma_drift", "ifp_continuous", "ifp_sampled", "z_gain",
            "convergence", "lyapunov",
        )
    },
}

#: Schema of a scenario document
SCENARIO_SCHEMA = {
    "problem": _problem,
    "graph": _graph,
    "gains": _gains,
    "comm": _comm,
    "sim": _sim,
    "verify": _verify,
}
