"""Local cost functions, inverse gradient maps and dual functions.

.. admonition:: Registered factory members [:class:`.CostFactory`]
   :class: hint

   ``quadratic`` (:class:`.QuadraticCost`), ``separable_logexp``
   (:class:`.SeparableLogExpCost`)
"""

from .core import (
    BOUNDARY_MARGIN, INV_MAX_ITER, INV_TOL, CostFactory, CostSpec,
    DualFunction, RegularityReport, dual_gradient, dual_value, gradient,
    inverse_gradient, validate_regularity
)
from .quadratic import QuadraticCost
from .logexp import (
    CoordinateTermFactory, LogExpTerm, QuadraticTerm, SeparableLogExpCost
)
from .stack import CostStack
from .builtin import builtin_problems, ten_node_costs
