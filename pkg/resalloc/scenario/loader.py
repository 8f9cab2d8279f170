"""Scenario documents: YAML parsing, schema validation and conversion to a
:class:`.ScenarioConfig`.

Every error raised by this module is a :class:`.ScenarioError` anchored, when
possible, to the line of the offending entry in the source document.
"""

import logging
import re
from pathlib import Path

import attr
import cerberus
import pint
from ruamel.yaml import YAML
from ruamel.yaml.comments import CommentedMap, CommentedSeq
from ruamel.yaml.error import MarkedYAMLError, YAMLError

from .schema import SCENARIO_SCHEMA
from ..comms import Regime
from ..conditions import design_report
from ..costs import CostFactory, CostStack, builtin_problems
from ..engine import ScenarioConfig, VerifyThresholds
from ..graphs import GraphSchedule, WeightedDigraph, builtin_schedules
from ..util.collections import ndict
from ..util.exceptions import GraphError, ScenarioError
from ..util.units import ensure_units, to_seconds

logger = logging.getLogger(__name__)

#: Document paths of the fields named in configuration error messages
FIELD_PATHS = {
    "gain design": "gains.beta",
    "graph switch": "graph",
    "schedule": "graph",
    "costs": "problem",
    "alpha": "gains.alpha",
    "beta": "gains.beta",
    "regime": "comm.regime",
    "ts": "comm.ts",
    "c": "comm.c",
    "trigger_coefficient": "comm.trigger_coefficient",
    "horizon": "sim.horizon",
    "dt": "sim.dt",
    "seed": "sim.seed",
    "x0": "sim.x0",
    "record_every": "sim.record_every",
}

#: Configuration fields read from each document section
_CONFIG_FIELDS = {
    "gains": ("alpha", "beta"),
    "comm": ("regime", "ts", "ts_units", "c", "trigger_coefficient"),
    "sim": ("horizon", "horizon_units", "dt", "dt_units", "seed", "x0",
            "record_every"),
}


# ------------------------------------------------------------------------------
#                          Raw document and line lookup
# ------------------------------------------------------------------------------

def read_document(text):
    """Parse YAML text with the round-trip loader.

    Parameter ``text`` (str):
        Document source.

    Returns → :class:`ruamel.yaml.comments.CommentedMap`:
        Parsed document, with line information.

    Raises → :class:`.ScenarioError`:
        If the text is not valid YAML or is not a mapping.
    """
    yaml = YAML(typ="rt")
    try:
        raw = yaml.load(text)
    except MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        raise ScenarioError(f"invalid YAML: {e.problem or e}",
                            line=None if mark is None else mark.line + 1)
    except YAMLError as e:
        raise ScenarioError(f"invalid YAML: {e}")

    if not isinstance(raw, CommentedMap):
        raise ScenarioError("a scenario document must be a mapping", line=1)
    return raw


def line_of(raw, path):
    """Return the 1-based line of the deepest existing entry along ``path``.

    Parameter ``raw`` (:class:`~ruamel.yaml.comments.CommentedMap` or None):
        Round-trip document.

    Parameter ``path`` (str or sequence):
        Dotted path or sequence of keys and list indices.

    Returns → int or None:
        Line number; ``None`` if not even the first key exists.
    """
    if raw is None:
        return None
    if isinstance(path, str):
        path = [int(key) if key.isdigit() else key
                for key in path.split(".") if key]

    line = None
    node = raw
    for key in path:
        if isinstance(node, CommentedMap) and key in node:
            line = node.lc.key(key)[0] + 1
        elif (isinstance(node, CommentedSeq) and isinstance(key, int)
              and 0 <= key < len(node)):
            line = node.lc.item(key)[0] + 1
        else:
            break
        node = node[key]
    return line


def _plain(node):
    # Round-trip containers and scalar subclasses to builtin types
    if isinstance(node, dict):
        return {str(key): _plain(value) for key, value in node.items()}
    if isinstance(node, (list, tuple)):
        return [_plain(value) for value in node]
    if isinstance(node, bool) or node is None:
        return node
    if isinstance(node, int):
        return int(node)
    if isinstance(node, float):
        return float(node)
    if isinstance(node, str):
        return str(node)
    return node


def _flatten_errors(errors, prefix=()):
    # Cerberus nests errors as {field: [message or {subfield: [...]}]}
    for key, items in errors.items():
        path = prefix + (key,)
        for item in items:
            if isinstance(item, dict):
                yield from _flatten_errors(item, path)
            else:
                yield path, item


def field_path(message):
    """Return the document path of the field a configuration error message
    names first, or ``None``."""
    best = None
    for name, path in FIELD_PATHS.items():
        match = re.search(rf"(?<![\w.]){re.escape(name)}(?!\w)", message)
        if match is None:
            continue
        key = (match.start(), -len(name))
        if best is None or key < best[0]:
            best = (key, path)
    return None if best is None else best[1]


def validate_document(raw):
    """Validate a round-trip document against :data:`.SCENARIO_SCHEMA`.

    Parameter ``raw`` (:class:`~ruamel.yaml.comments.CommentedMap`):
        Round-trip document.

    Returns → :class:`.ndict`:
        Normalised document (plain Python types, defaults applied).

    Raises → :class:`.ScenarioError`:
        On the error located first in the document.
    """
    validator = cerberus.Validator(SCENARIO_SCHEMA)

    if not validator.validate(_plain(raw)):
        located = [
            (line_of(raw, path), path, message)
            for path, message in _flatten_errors(validator.errors)
        ]
        located.sort(key=lambda x: (x[0] is None, x[0] or 0))
        line, path, message = located[0]
        dotted = ".".join(str(key) for key in path)
        raise ScenarioError(f"{dotted}: {message}", line=line or 1)

    document = ndict(validator.document)

    if not {"builtin", "nodes"} & set(document["problem"]):
        raise ScenarioError("problem: expected 'builtin' or 'nodes'",
                            line=line_of(raw, "problem"))
    if not {"builtin", "segments", "cycle"} & set(document["graph"]):
        raise ScenarioError("graph: expected 'builtin', 'segments' or 'cycle'",
                            line=line_of(raw, "graph"))

    return document


# ------------------------------------------------------------------------------
#                                  Builders
# ------------------------------------------------------------------------------

def _seconds(section, key, raw, path, default=None):
    # Unit-enabled time entry: plain numbers are seconds
    if key not in section:
        return default
    units = section.get(f"{key}_units", "s")
    try:
        return to_seconds(ensure_units(section[key], units, convert=True))
    except (pint.errors.UndefinedUnitError,
            pint.errors.DimensionalityError) as e:
        raise ScenarioError(f"{path}.{key}: {e}",
                            line=line_of(raw, f"{path}.{key}_units"))


def build_costs(document, raw=None):
    """Build the node costs of a validated document.

    Parameter ``document`` (dict):
        Validated document.

    Parameter ``raw`` (:class:`~ruamel.yaml.comments.CommentedMap` or None):
        Round-trip document used to locate errors.

    Returns → list[:class:`.CostSpec`]
    """
    problem = document["problem"]

    if "builtin" in problem:
        costs = builtin_problems[problem["builtin"]]()
    else:
        costs = []
        for i, node in enumerate(problem["nodes"]):
            try:
                costs.append(CostFactory.convert(node))
            except (ValueError, TypeError) as e:
                raise ScenarioError(f"problem.nodes.{i}: {e}",
                                    line=line_of(raw, ("problem", "nodes", i)))

    dim = problem.get("dim")
    if dim is not None:
        for i, cost in enumerate(costs):
            if cost.dim != dim:
                raise ScenarioError(
                    f"problem.nodes.{i}: dimension {cost.dim} does not match "
                    f"declared dim = {dim}",
                    line=line_of(raw, ("problem", "nodes", i))
                )

    return costs


def build_schedule(document, horizon, raw=None):
    """Build the graph schedule of a validated document.

    Parameter ``document`` (dict):
        Validated document.

    Parameter ``horizon`` (float):
        Simulation horizon [s]; built-in and cycled schedules end there.

    Parameter ``raw`` (:class:`~ruamel.yaml.comments.CommentedMap` or None):
        Round-trip document used to locate errors.

    Returns → :class:`.GraphSchedule`
    """
    graph = document["graph"]

    if "builtin" in graph:
        period = _seconds(graph, "period", raw, "graph", default=1.)
        try:
            return builtin_schedules[graph["builtin"]](horizon=horizon,
                                                      period=period)
        except (ValueError, GraphError) as e:
            raise ScenarioError(f"graph: {e}", line=line_of(raw, "graph"))

    if "cycle" in graph:
        cycle = graph["cycle"]
        dwell = _seconds(cycle, "dwell", raw, "graph.cycle")
        graphs = []
        for i, weights in enumerate(cycle["graphs"]):
            try:
                graphs.append(WeightedDigraph(weights))
            except (ValueError, TypeError) as e:
                raise ScenarioError(
                    f"graph.cycle.graphs.{i}: {e}",
                    line=line_of(raw, ("graph", "cycle", "graphs", i))
                )
        try:
            return GraphSchedule.cycle(graphs, dwell=dwell, horizon=horizon)
        except (ValueError, GraphError) as e:
            raise ScenarioError(f"graph.cycle: {e}",
                                line=line_of(raw, "graph.cycle"))

    segments = []
    for i, segment in enumerate(graph["segments"]):
        start = _seconds(segment, "start_time", raw, f"graph.segments.{i}")
        try:
            digraph = WeightedDigraph.from_dict(
                {key: segment[key] for key in ("n", "weights") if key in segment}
            )
        except (ValueError, TypeError) as e:
            raise ScenarioError(
                f"graph.segments.{i}: {e}",
                line=line_of(raw, ("graph", "segments", i))
            )
        segments.append((start, digraph))

    try:
        return GraphSchedule.from_segments(segments, horizon=horizon)
    except (ValueError, GraphError) as e:
        raise ScenarioError(f"graph.segments: {e}",
                            line=line_of(raw, "graph.segments"))


def build_config(document, raw=None):
    """Build a :class:`.ScenarioConfig` from a validated document.

    Configuration errors are anchored to the field their message names first.

    Raises → :class:`.ScenarioError`
    """
    costs = build_costs(document, raw)
    horizon = _seconds(
        document["sim"], "horizon", raw, "sim",
        default=to_seconds(attr.fields(ScenarioConfig).horizon.default)
    )
    schedule = build_schedule(document, horizon, raw)

    d = {"costs": costs, "schedule": schedule}
    for section, fields in _CONFIG_FIELDS.items():
        for key in fields:
            if key in document[section]:
                d[key] = document[section][key]
            if key.endswith("_units") and key in document[section]:
                # Unit errors are anchored to the units entry
                _seconds(document[section], key[:-len("_units")], raw,
                         section)

    try:
        return ScenarioConfig.from_dict(d)
    except (ValueError, TypeError) as e:
        message = str(e)
        path = field_path(message) or ""
        raise ScenarioError(message, line=line_of(raw, path) or 1) from e


# ------------------------------------------------------------------------------
#                               Scenario objects
# ------------------------------------------------------------------------------

@attr.s(frozen=True, eq=False)
class Scenario:
    """A validated scenario document and the objects built from it.

    .. rubric:: Constructor arguments / instance attributes

    ``document`` (:class:`.ndict`):
        Normalised document.

    ``config`` (:class:`.ScenarioConfig`):
        Simulation configuration.

    ``thresholds`` (:class:`.VerifyThresholds`):
        Property check thresholds (``verify`` section).

    ``source`` (str):
        Origin of the document (file path or ``"<string>"``).
    """
    document = attr.ib(converter=ndict)
    config = attr.ib(validator=attr.validators.instance_of(ScenarioConfig))
    thresholds = attr.ib(
        factory=VerifyThresholds,
        validator=attr.validators.instance_of(VerifyThresholds)
    )
    source = attr.ib(default="<string>", converter=str)

    @classmethod
    def from_document(cls, document, raw=None, source="<string>"):
        """Build from a validated document."""
        config = build_config(document, raw)
        try:
            thresholds = VerifyThresholds.from_dict(document["verify"])
        except ValueError as e:
            raise ScenarioError(f"verify: {e}", line=line_of(raw, "verify"))
        return cls(document=document, config=config, thresholds=thresholds,
                   source=source)

    def with_overrides(self, overrides):
        """Return a scenario rebuilt with document leaves replaced.

        Parameter ``overrides`` (dict):
            Mapping of dotted document paths (*e.g.* ``"gains.beta"``) to
            values.

        Returns → :class:`Scenario`

        Raises → :class:`.ScenarioError`:
            If the updated document is invalid. Errors carry no line number.
        """
        document = self.document.with_overrides(overrides)
        validator = cerberus.Validator(SCENARIO_SCHEMA)
        if not validator.validate(dict(document)):
            path, message = next(_flatten_errors(validator.errors))
            raise ScenarioError(
                f"{'.'.join(str(key) for key in path)}: {message}"
            )
        return Scenario.from_document(ndict(validator.document),
                                      source=self.source)


def parse_scenario(text, source="<string>"):
    """Parse, validate and build a scenario from YAML text.

    Parameter ``text`` (str):
        Document source.

    Parameter ``source`` (str):
        Origin reported by the scenario.

    Returns → :class:`Scenario`

    Raises → :class:`.ScenarioError`
    """
    raw = read_document(text)
    document = validate_document(raw)
    scenario = Scenario.from_document(document, raw, source=source)
    logger.info("loaded scenario %s: %d nodes, regime %s", source,
                scenario.config.n, scenario.config.regime.value)
    return scenario


def _read_text(path):
    path = Path(path)
    try:
        return path.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file '{path}': {e}")


def load_scenario(path):
    """Load a scenario file.

    Parameter ``path`` (path-like):
        Path to a YAML scenario document.

    Returns → :class:`Scenario`

    Raises → :class:`.ScenarioError`:
        If the file cannot be read, parsed or validated.
    """
    return parse_scenario(_read_text(path), source=str(path))


# ------------------------------------------------------------------------------
#                                Gain design
# ------------------------------------------------------------------------------

def parse_design(text):
    """Evaluate the gain design of a scenario document.

    Only the costs, the graph schedule, the gains and the sampling period are
    built: a design which the simulation configuration would reject (*e.g.*
    inadmissible gains in the event regime) is reported, not raised.

    Parameter ``text`` (str):
        Document source.

    Returns → :class:`.DesignReport`

    Raises → :class:`.ScenarioError`
    """
    raw = read_document(text)
    document = validate_document(raw)

    costs = build_costs(document, raw)
    try:
        stack = CostStack(costs)
    except ValueError as e:
        raise ScenarioError(f"problem: {e}", line=line_of(raw, "problem"))

    defaults = attr.fields(ScenarioConfig)
    horizon = _seconds(document["sim"], "horizon", raw, "sim",
                       default=to_seconds(defaults.horizon.default))
    schedule = build_schedule(document, horizon, raw)
    if schedule.n != stack.n:
        raise ScenarioError(f"schedule has {schedule.n} nodes, got "
                            f"{stack.n} costs", line=line_of(raw, "graph"))

    gains = {}
    for key in ("alpha", "beta"):
        value = float(document["gains"].get(key, getattr(defaults, key).default))
        if value <= 0.:
            raise ScenarioError(f"{key} must be strictly positive, got {value}",
                                line=line_of(raw, f"gains.{key}"))
        gains[key] = value

    comm = document["comm"]
    regime = Regime(comm.get("regime", defaults.regime.default))
    ts = 0.
    if regime.is_sampled:
        ts = _seconds(comm, "ts", raw, "comm")
        if ts is None:
            raise ScenarioError(f"regime '{regime.value}' requires ts",
                                line=line_of(raw, "comm.regime"))

    return design_report(schedule, stack.lipschitz, ts=ts, **gains)


def load_design(path):
    """Evaluate the gain design of a scenario file (see
    :func:`parse_design`)."""
    return parse_design(_read_text(path))
