"""Piecewise-constant time-varying digraphs."""

import attr
import networkx as nx
import numpy as np

from .digraph import BALANCE_TOL, WeightedDigraph
from ..util.exceptions import GraphError, ScheduleRangeError
from ..util.misc import as_float_vector


def _start_times_validator(instance, attribute, value):
    if len(value) == 0:
        raise GraphError("a schedule requires at least one segment")
    if value[0] != 0.:
        raise GraphError(f"first segment must start at t = 0, got {value[0]}")
    if np.any(np.diff(value) <= 0.):
        raise GraphError(f"{attribute.name} must be strictly increasing, "
                         f"got {list(value)}")


def _graphs_validator(instance, attribute, value):
    for graph in value:
        if not isinstance(graph, WeightedDigraph):
            raise TypeError(f"{attribute.name} must be a sequence of "
                            f"WeightedDigraph, got {type(graph)}")
    sizes = {graph.n for graph in value}
    if len(sizes) > 1:
        raise GraphError(f"all segment graphs must have the same node count, "
                         f"got {sorted(sizes)}")
    if len(value) != len(instance.start_times):
        raise GraphError(f"got {len(instance.start_times)} start times for "
                         f"{len(value)} graphs")


def _horizon_validator(instance, attribute, value):
    if not value > instance.start_times[-1]:
        raise GraphError(f"horizon ({value}) must exceed the last segment "
                         f"start time ({instance.start_times[-1]})")


@attr.s(frozen=True, eq=False)
class GraphSchedule:
    """A piecewise-constant digraph schedule :math:`\\mathcal{G}(t)` on
    :math:`[0, T)`. Segment ``k`` is active on the half-open interval
    ``[start_times[k], start_times[k+1])``, the last one until ``horizon``.

    .. rubric:: Constructor arguments / instance attributes

    ``start_times`` (array[float]):
        Segment start times [s]. Strictly increasing from 0.

    ``graphs`` (tuple[:class:`.WeightedDigraph`]):
        Segment digraphs. All share the same node count.

    ``horizon`` (float):
        Schedule end time [s], excluded from the covered range.
    """
    start_times = attr.ib(converter=as_float_vector,
                          validator=_start_times_validator)
    graphs = attr.ib(converter=tuple, validator=_graphs_validator)
    horizon = attr.ib(converter=float, validator=_horizon_validator)

    @classmethod
    def from_segments(cls, segments, horizon):
        """Create from a list of ``(start_time, graph)`` pairs."""
        segments = list(segments)
        return cls(
            start_times=[start for start, _ in segments],
            graphs=[graph for _, graph in segments],
            horizon=horizon
        )

    @classmethod
    def constant(cls, graph, horizon):
        """Schedule holding a single digraph over the whole horizon."""
        return cls(start_times=[0.], graphs=[graph], horizon=horizon)

    @classmethod
    def cycle(cls, graphs, dwell, horizon):
        """Schedule cycling through ``graphs``, each held for ``dwell`` seconds,
        until ``horizon``.

        Parameter ``graphs`` (list[:class:`.WeightedDigraph`]):
            Cycled digraphs.

        Parameter ``dwell`` (float):
            Segment duration [s].

        Parameter ``horizon`` (float):
            Schedule end time [s].
        """
        graphs = list(graphs)
        if not graphs:
            raise GraphError("cannot cycle through an empty graph list")
        if not dwell > 0.:
            raise GraphError(f"dwell must be strictly positive, got {dwell}")
        n_segments = int(np.ceil(horizon / dwell - 1e-9))
        return cls(
            start_times=np.arange(n_segments) * dwell,
            graphs=[graphs[k % len(graphs)] for k in range(n_segments)],
            horizon=horizon
        )

    @property
    def n(self):
        """Node count."""
        return self.graphs[0].n

    @property
    def segments(self):
        """List of ``(start_time, graph)`` pairs."""
        return list(zip(self.start_times.tolist(), self.graphs))

    def switch_times(self):
        """Return the switching instants (start times of all segments but the
        first one)."""
        return self.start_times[1:]

    def segment_index(self, t):
        """Index of the segment active at time ``t``.

        Raises → :class:`.ScheduleRangeError`:
            If ``t`` lies outside ``[0, horizon)``.
        """
        if not 0. <= t < self.horizon:
            raise ScheduleRangeError(f"t = {t} outside schedule range "
                                     f"[0, {self.horizon})")
        return int(np.searchsorted(self.start_times, t, side="right")) - 1

    def graph_at(self, t):
        """Digraph active at time ``t``. Switching instants belong to the
        segment they open.

        Raises → :class:`.ScheduleRangeError`:
            If ``t`` lies outside ``[0, horizon)``.
        """
        return self.graphs[self.segment_index(t)]

    def is_weight_balanced(self, tol=BALANCE_TOL):
        """Return one :class:`.BalanceReport` per segment."""
        return [graph.is_weight_balanced(tol=tol) for graph in self.graphs]

    def din_sup(self):
        """Per-node supremum of the in-degree over all segments."""
        return np.max([graph.in_degree() for graph in self.graphs], axis=0)

    def union_graph(self, window):
        """Union digraph over the half-open time window ``window = (t0, t1)``:
        an edge is present if it is present in any segment intersecting the
        window. Union weights are the maximum segment weights.

        Raises → :class:`.GraphError`:
            If the window is empty.

        Raises → :class:`.ScheduleRangeError`:
            If the window is not contained in ``[0, horizon]``.
        """
        t0, t1 = (float(x) for x in window)
        if not t1 > t0:
            raise GraphError(f"empty window [{t0}, {t1})")
        if t0 < 0. or t1 > self.horizon:
            raise ScheduleRangeError(f"window [{t0}, {t1}) outside schedule "
                                     f"range [0, {self.horizon})")

        ends = np.append(self.start_times[1:], self.horizon)
        active = (self.start_times < t1) & (ends > t0)
        weights = np.max([graph.weights
                          for graph, keep in zip(self.graphs, active) if keep],
                         axis=0)
        return WeightedDigraph(weights)

    def union_strongly_connected(self, window):
        """Wraps :func:`union_strongly_connected`."""
        return union_strongly_connected(self, window)


def union_strongly_connected(schedule, window):
    """Test whether the union digraph of ``schedule`` over ``window`` is
    strongly connected.

    Parameter ``schedule`` (:class:`GraphSchedule`):
        Schedule to query.

    Parameter ``window`` (tuple[float, float]):
        Half-open time window ``[t0, t1)``.

    Returns → bool:
        Verdict.
    """
    return nx.is_strongly_connected(schedule.union_graph(window).to_networkx())


# -- Built-in schedules --------------------------------------------------------

#: Visiting order of the second ring of the built-in ten-node schedule
TEN_NODE_SECOND_ORDER = [0, 4, 5, 2, 9, 6, 3, 8, 7, 1]


def default_ten_node_schedule(horizon=300., period=1.):
    """Ten-node schedule alternating every ``period`` seconds between two
    unit-weight directed rings: :math:`\\mathcal{G}_1` visits nodes in natural
    order (``0 → 1 → … → 9 → 0``), :math:`\\mathcal{G}_2` visits them in
    the order ``0 → 4 → 5 → 2 → 9 → 6 → 3 → 8 → 7 → 1 → 0``.

    Both rings are weight-balanced and strongly connected, and every node has
    in-degree 1 in both. The second ordering makes the switched network
    sensitive to the coupling gain: the multipliers reach consensus for gains
    near the admissible bound (about 0.05) and keep oscillating for gains an
    order of magnitude above it (0.5), with a consensus error that does not
    decay below 0.1 over the default horizon.
    """
    g1 = WeightedDigraph.directed_cycle(range(10))
    g2 = WeightedDigraph.directed_cycle(TEN_NODE_SECOND_ORDER)
    return GraphSchedule.cycle([g1, g2], dwell=period, horizon=horizon)


#: Built-in schedule generators, called with the simulation horizon
builtin_schedules = {
    "ten_node_default": default_ten_node_schedule,
}
