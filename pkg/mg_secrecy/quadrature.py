"""
Gauss-Hermite, Gauss-Laguerre and Gauss-Legendre rules.

Hermite and Legendre nodes come from numpy.polynomial (companion matrix
eigenvalues polished by one Newton step). Laguerre rules, including the
generalized weight x^alpha e^(-x), come from scipy.special, which stays finite
up to the maximum order. Rules are cached by (kind, order, alpha) and their
arrays are read-only, so a rule can be shared between threads.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite, legendre
from scipy.special import roots_genlaguerre

from .errors import InvalidArgumentError, NumericalError
from .utils import mapping

MAX_ORDER = 256

_logger = logging.getLogger(__name__)


class RuleKind(str, Enum):
    HERMITE = "hermite"       # weight e^(-x^2) on the real line
    LAGUERRE = "laguerre"     # weight x^alpha e^(-x) on [0, inf)
    LEGENDRE = "legendre"     # weight 1 on [-1, 1]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    kind: RuleKind
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float = 0.0

    def integrate(self, values) -> float:
        """
        Weighted sum of function values sampled at the nodes
        """
        return float(np.dot(self.weights, values))

    def on_interval(self, a: float, b: float):
        """
        Legendre nodes and weights moved from [-1, 1] to [a, b].

        Returns
        --
        - nodes [np.ndarray] mapped abscissas
        - weights [np.ndarray] weights scaled by (b-a)/2
        """
        if self.kind is not RuleKind.LEGENDRE:
            raise InvalidArgumentError("Only Legendre rules can be mapped onto a finite interval")
        nodes = mapping(self.nodes, -1.0, 1.0, a, b)
        weights = self.weights * (0.5 * (b - a))
        return nodes, weights


_GENERATORS = {
    RuleKind.HERMITE: hermite.hermgauss,
    RuleKind.LEGENDRE: legendre.leggauss,
}


def make_rule(kind, order: int, alpha: float = 0.0) -> QuadratureRule:
    """
    Returns the Gaussian rule of the given kind and order.

    Params
    --
    - kind [RuleKind or str] hermite | laguerre | legendre
    - order [int] number of nodes, 1~256
    - alpha [float] exponent of the generalized Laguerre weight x^alpha e^(-x), alpha > -1

    Returns
    --
    [QuadratureRule] cached, read-only rule
    """
    try:
        kind = RuleKind(kind)
    except ValueError:
        raise InvalidArgumentError("Unknown quadrature kind '{}'".format(kind)) from None
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)):
        raise InvalidArgumentError("Quadrature order must be an integer, got {!r}".format(order))
    if order < 1 or order > MAX_ORDER:
        raise InvalidArgumentError("Quadrature order {} is outside 1~{}".format(order, MAX_ORDER))
    alpha = float(alpha)
    if kind is RuleKind.LAGUERRE:
        if not alpha > -1.0 or not math.isfinite(alpha):
            raise InvalidArgumentError("Laguerre exponent must be finite and > -1, got {}".format(alpha))
    elif alpha != 0.0:
        raise InvalidArgumentError("Only Laguerre rules take an exponent")
    return _cached_rule(kind, int(order), alpha)


def graded_rule(a: float, b: float, order: int, left_depth: int = 0, right_depth: int = 0):
    """
    Composite Gauss-Legendre rule on [a, b] whose panels halve in width
    towards either end, for integrands that vary on a much finer scale
    near an endpoint than across the interval.

    Params
    --
    - a, b [float] interval, a < b
    - order [int] Legendre order of every panel
    - left_depth [int] number of halvings towards a
    - right_depth [int] number of halvings towards b

    Returns
    --
    - nodes [np.ndarray] ascending abscissas
    - weights [np.ndarray]
    """
    if not b > a:
        raise InvalidArgumentError("Integration interval must satisfy a < b, got [{}, {}]".format(a, b))
    rule = make_rule(RuleKind.LEGENDRE, order)
    left = [2.0 ** -k for k in range(left_depth, 0, -1)]
    right = [1.0 - 2.0 ** -k for k in range(1, right_depth + 1)]
    edges = a + (b - a) * np.unique(np.array([0.0, 1.0] + left + right))
    nodes, weights = zip(*(rule.on_interval(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])))
    return np.concatenate(nodes), np.concatenate(weights)


@lru_cache(maxsize=1024)
def _cached_rule(kind: RuleKind, order: int, alpha: float) -> QuadratureRule:
    if kind is RuleKind.LAGUERRE:
        nodes, weights = roots_genlaguerre(order, alpha)
    else:
        nodes, weights = _GENERATORS[kind](order)
    nodes = np.array(nodes, dtype=float)
    weights = np.array(weights, dtype=float)
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        raise NumericalError("{} rule of order {} has non-finite nodes or weights".format(kind.value, order))
    if kind is not RuleKind.LAGUERRE:
        # symmetric rules: enforce exact symmetry of the computed nodes
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    if np.any(weights <= 0.0):
        _logger.debug("%s rule of order %d has %d underflowed weight(s)",
                      kind.value, order, int(np.sum(weights <= 0.0)))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    _logger.debug("Built %s rule of order %d, alpha %g", kind.value, order, alpha)
    return QuadratureRule(kind=kind, order=order, nodes=nodes, weights=weights, alpha=alpha)
