"""
Quadrature rules shared by the field and analysis layers

All rules return (nodes, weights) arrays; the adaptive driver doubles an
order until two successive sums agree relative to the L1 size of the sum.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

logger = logging.getLogger(__name__)

HERMITE_ORDER_CAP = 256
TINY = 1e-300


class AdaptiveResult(NamedTuple):
    """Value of an adaptive quadrature with its error estimate"""
    value: complex
    error: float
    converged: bool
    order: int


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on [-1, 1]"""
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=16)
def _hermite_scaled(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = hermgauss(n)
    # weights * exp(u^2) integrate plain functions with Gaussian-like decay
    scaled = np.exp(np.log(weights) + nodes ** 2)
    nodes.setflags(write=False)
    scaled.setflags(write=False)
    return nodes, scaled


def hermite_rule(center: float, a: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Hermite rule matched to the envelope exp(-a (theta - center)^2)

    The returned weights integrate the full integrand (the Gaussian weight
    is divided out), so the rule applies to any function dominated by the
    envelope.
    """
    n = min(n, HERMITE_ORDER_CAP)
    u, w = _hermite_scaled(n)
    scale = 1.0 / math.sqrt(a)
    return center + scale * u, scale * w


def legendre_interval(lower: float, upper: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = gauss_legendre(n)
    half = 0.5 * (upper - lower)
    return lower + half * (nodes + 1.0), half * weights


SINH_NODES_PER_PANEL = (8, 12, 16)


@lru_cache(maxsize=8)
def sinh_rule(level: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Legendre rule on the real rapidity line in the variable u = sinh t

    Uniform panels of width 1 in u resolve the exp(i m x sinh t) oscillation
    of on-shell transforms. Level l uses the cutoff |t| <= 4 + l and
    8, 12 or 16 nodes per panel. The cutoff bounds the accuracy on
    Gaussian-decaying integrands: exp(-t^2) is integrated to a relative
    2e-8 at level 0 (its tail beyond 4), 2e-12 at level 1 and near rounding at level 2.
    """
    cutoff = 4.0 + level
    per_panel = SINH_NODES_PER_PANEL[min(level, len(SINH_NODES_PER_PANEL) - 1)]
    u_max = math.sinh(cutoff)
    panels = int(math.ceil(2 * u_max))
    edges = np.linspace(-u_max, u_max, panels + 1)
    x, w = gauss_legendre(per_panel)
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    wu = (half[:, None] * w[None, :]).ravel()
    nodes = np.arcsinh(u)
    weights = wu / np.sqrt(1.0 + u ** 2)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def circle_rule(center: complex, radius: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Trapezoidal rule for (1 / 2 pi i) times a closed contour integral on a circle

    sum(weights * F(nodes)) approximates (1/2 pi i) * integral of F dz.
    """
    phi = 2.0 * math.pi * np.arange(n) / n
    offsets = radius * np.exp(1j * phi)
    return center + offsets, offsets / n


def adaptive_sum(evaluate: Callable[[int], Tuple[complex, float]], orders: Sequence[int],
                 tol: float) -> AdaptiveResult:
    """
    Run a quadrature at increasing orders until successive values agree

    Args:
        evaluate: order -> (value, L1 size of the weighted summands)
        orders: Increasing orders to try
        tol: Relative tolerance against the L1 size

    Returns:
        AdaptiveResult of the last order evaluated
    """
    previous: Optional[complex] = None
    value, error, order = 0j, float('inf'), orders[0]
    for order in orders:
        value, l1 = evaluate(order)
        if previous is not None:
            error = abs(value - previous)
            if error <= tol * max(l1, TINY):
                return AdaptiveResult(value, error, True, order)
        previous = value
    logger.debug(f"adaptive quadrature stopped at order {order} with error {error:.3e}")
    return AdaptiveResult(value, error, False, order)


def doubling_orders(start: int, cap: int) -> Tuple[int, ...]:
    orders = []
    n = start
    while n <= cap:
        orders.append(n)
        n *= 2
    if not orders or orders[-1] != cap and cap > start:
        orders.append(cap)
    return tuple(orders)
