"""
Square M-QAM with unit average energy, and its constellation-constrained
mutual information over the complex AWGN channel y = sqrt(gamma) s + z.

Each complex symbol is p_a + i p_b with p_a, p_b taken from a sqrt(M)-level
PAM alphabet, so every quantity separates into two identical real dimensions
with noise variance 1/2.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, softmax

from .errors import InvalidArgumentError, NumericalError, OutOfDomainError
from .quadrature import RuleKind, make_rule
from .utils import asScalarOrArray

SUPPORTED_ORDERS = (4, 16, 64, 256)
DEFAULT_HERMITE_ORDER = 20
DEFAULT_BISECTION_TOL = 1e-9

LOG2E = math.log2(math.e)

# upper bound on the (gamma, j, l, k) tensor built per chunk
_CHUNK_ELEMENTS = 2_000_000
_MAX_DOUBLINGS = 80
_MAX_BISECTIONS = 400

_logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Constellation:
    order: int
    pam_levels: np.ndarray
    symbols: np.ndarray

    @classmethod
    def square_qam(cls, order: int) -> "Constellation":
        """
        Builds unit-energy square M-QAM.

        Params
        --
        - order [int] M, one of 4, 16, 64, 256
        """
        if order not in SUPPORTED_ORDERS:
            raise InvalidArgumentError(
                "Only square QAM with M in {} is supported, got {}".format(SUPPORTED_ORDERS, order))
        side = math.isqrt(order)
        # levels +-d, +-3d, ... with (2/sqrt(M)) sum p^2 = 1
        spacing = math.sqrt(3.0 / (2.0 * (order - 1)))
        levels = (2.0 * np.arange(side) - (side - 1)) * spacing
        symbols = (levels[:, None] + 1j * levels[None, :]).reshape(-1)
        levels.setflags(write=False)
        symbols.setflags(write=False)
        return cls(order=order, pam_levels=levels, symbols=symbols)

    @property
    def side(self) -> int:
        return len(self.pam_levels)

    @property
    def bits(self) -> float:
        """log2(M), the saturation value of I_M"""
        return math.log2(self.order)

    def __repr__(self):
        return "Constellation({}-QAM)".format(self.order)


@dataclass(frozen=True)
class MiEvaluation:
    gamma: float
    l_value: float
    mi: float
    hermite_order: int


def _check_gamma(gamma):
    g = np.atleast_1d(np.asarray(gamma, dtype=float)).reshape(-1)
    if np.any(np.isnan(g)) or np.any(g < 0.0):
        raise InvalidArgumentError("SNR must be nonnegative")
    return g


def _check_order(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgumentError("Hermite order must be a positive integer, got {!r}".format(n))


def _chunks(g: np.ndarray, c: Constellation, n: int):
    size = max(1, _CHUNK_ELEMENTS // (c.side * c.side * n))
    for start in range(0, len(g), size):
        yield slice(start, start + size)


def _exponents(c: Constellation, g: np.ndarray, nodes: np.ndarray):
    """
    -(t_l + sqrt(gamma) p_jk)^2 with axes (gamma, j, l, k)
    """
    diffs = c.pam_levels[:, None] - c.pam_levels[None, :]
    shift = np.sqrt(g)[:, None, None, None] * diffs[None, :, None, :]
    return -np.square(nodes[None, None, :, None] + shift), diffs


def l_function(c: Constellation, gamma, n: int = DEFAULT_HERMITE_ORDER):
    """
    Order-n Gauss-Hermite approximation of L_M(gamma), in bits.

    Params
    --
    - c [Constellation]
    - gamma [float or array] linear SNR >= 0
    - n [int] Hermite order

    Returns
    --
    L_M(gamma), float for scalar input, array otherwise
    """
    _check_order(n)
    g = _check_gamma(gamma)
    rule = make_rule(RuleKind.HERMITE, n)
    out = np.empty_like(g)
    scale = 2.0 / math.sqrt(c.order * math.pi) / math.log(2.0)
    for part in _chunks(g, c, n):
        expo, _ = _exponents(c, g[part], rule.nodes)
        # the k = j term exp(-t_l^2) keeps the sum strictly positive
        lse = logsumexp(expo, axis=-1)
        out[part] = scale * np.einsum("gjl,l->g", lse, rule.weights)
    return asScalarOrArray(out, gamma)


def mutual_information(c: Constellation, gamma, n: int = DEFAULT_HERMITE_ORDER):
    """
    I_M(gamma) = log2(M/e) - L_M(gamma) in bits, clamped to [0, log2 M]
    """
    value = math.log2(c.order / math.e) - np.atleast_1d(l_function(c, gamma, n))
    return asScalarOrArray(np.clip(value, 0.0, c.bits), gamma)


def evaluate(c: Constellation, gamma: float, n: int = DEFAULT_HERMITE_ORDER) -> MiEvaluation:
    l_value = float(l_function(c, float(gamma), n))
    mi = min(max(math.log2(c.order / math.e) - l_value, 0.0), c.bits)
    return MiEvaluation(gamma=float(gamma), l_value=l_value, mi=mi, hermite_order=n)


def mmse(c: Constellation, gamma, n: int = DEFAULT_HERMITE_ORDER):
    """
    MMSE of estimating the unit-energy symbol from y = sqrt(gamma) s + z.

    Computed per real dimension from the posterior pi_k over the PAM levels at
    each Hermite node, then summed over both dimensions:

        (2/sqrt(M pi)) sum_j sum_l w_l sum_k pi_k p_jk (p_jk + t_l / sqrt(gamma))

    The expression is the exact gamma-derivative of the order-n Hermite form of
    I_M in nats, so dI_M/dgamma = MMSE holds at every order n. The k = j term
    vanishes and every other term carries its own posterior weight, so small
    values keep their relative precision at high SNR.

    Returns
    --
    MMSE in [0, 1], float for scalar input, array otherwise
    """
    _check_order(n)
    g = _check_gamma(gamma)
    rule = make_rule(RuleKind.HERMITE, n)
    out = np.ones_like(g)
    positive = g > 0.0
    gp = g[positive]
    vals = np.empty_like(gp)
    scale = 2.0 / math.sqrt(c.order * math.pi)
    for part in _chunks(gp, c, n):
        expo, diffs = _exponents(c, gp[part], rule.nodes)
        post = softmax(expo, axis=-1)
        p_jk = diffs[None, :, None, :]
        drift = rule.nodes[None, None, :, None] / np.sqrt(gp[part])[:, None, None, None]
        vals[part] = scale * np.einsum("gjlk,l->g", post * p_jk * (p_jk + drift), rule.weights)
    out[positive] = vals
    return asScalarOrArray(np.clip(out, 0.0, 1.0), gamma)


def inverse_mi(c: Constellation, target, n: int = DEFAULT_HERMITE_ORDER, tol: float = DEFAULT_BISECTION_TOL):
    """
    Inverts I_M by bisection.

    The bracket [0, gamma_hi] starts at gamma_hi = 1 and doubles until
    I_M(gamma_hi) > target. Arrays of targets are solved together.

    Params
    --
    - target [float or array] bits, 0 <= target < log2 M
    - n [int] Hermite order
    - tol [float] tolerance on |I_M(gamma) - target|, in bits

    Returns
    --
    gamma >= 0, float for scalar input, array otherwise
    """
    if not tol > 0.0:
        raise InvalidArgumentError("Bisection tolerance must be positive")
    t = np.atleast_1d(np.asarray(target, dtype=float)).reshape(-1)
    if np.any(np.isnan(t)) or np.any(t < 0.0):
        raise InvalidArgumentError("Mutual information target must be nonnegative")
    if np.any(t >= c.bits):
        raise OutOfDomainError(
            "I_M^-1 does not exist for targets >= log2(M) = {} bits".format(c.bits))

    result = np.zeros_like(t)
    active = np.abs(mutual_information(c, np.zeros_like(t), n) - t) > tol
    lo = np.zeros_like(t)
    hi = np.ones_like(t)

    for _ in range(_MAX_DOUBLINGS):
        below = active & (mutual_information(c, hi, n) <= t)
        if not below.any():
            break
        lo = np.where(below, hi, lo)
        hi = np.where(below, 2.0 * hi, hi)
    else:
        raise NumericalError("Could not bracket I_M^-1 for target(s) close to log2(M)")

    for _ in range(_MAX_BISECTIONS):
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        val = mutual_information(c, mid, n)
        done = active & ((np.abs(val - t) <= tol) | (hi - lo <= 4.0 * np.finfo(float).eps * hi))
        result = np.where(done, mid, result)
        active &= ~done
        lower = val < t
        lo = np.where(active & lower, mid, lo)
        hi = np.where(active & ~lower, mid, hi)
    if active.any():
        _logger.warning("Bisection hit its iteration cap for %d target(s)", int(active.sum()))
        result = np.where(active, 0.5 * (lo + hi), result)
    return asScalarOrArray(result, target)
