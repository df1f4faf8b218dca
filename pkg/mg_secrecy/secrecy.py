"""
Average secrecy rate and secrecy outage probability of square M-QAM over
mixture-Gamma wiretap channels, explicit and at high main-channel SNR.
"""
import logging
import math
import threading
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .constellation import (LOG2E, Constellation, DEFAULT_HERMITE_ORDER, inverse_mi, l_function,
                            mmse, mutual_information)
from .errors import InvalidArgumentError, NumericalError
from .fading import MixtureGamma
from .quadrature import RuleKind, graded_rule, make_rule

DEFAULT_LAGUERRE_ORDER = 30
DEFAULT_LEGENDRE_ORDER = 30
SOP_BISECTION_TOL = 1e-10

# MMSE truncation point for the gap integrals
CUTOFF_START = 50.0
CUTOFF_MAX = 1e6
CUTOFF_MMSE = 1e-12

# composite Legendre layout: panel order and halvings towards the endpoints
GAP_PANEL_ORDER = 20
GAP_LEFT_DEPTH = 48
THRESHOLD_DEPTH = 40
SOP_DEPTH = 16


@dataclass(frozen=True, eq=False)
class SecrecyScenario:
    main: MixtureGamma
    eve: MixtureGamma
    constellation: Constellation
    target_rate: Optional[float] = None
    hermite_order: int = DEFAULT_HERMITE_ORDER
    laguerre_order: int = DEFAULT_LAGUERRE_ORDER
    legendre_order: int = DEFAULT_LEGENDRE_ORDER
    bisection_tol: float = SOP_BISECTION_TOL

    def __post_init__(self):
        for name in ("hermite_order", "laguerre_order", "legendre_order"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise InvalidArgumentError("{} must be a positive integer, got {!r}".format(name, value))
        if self.target_rate is not None and not self.target_rate > 0.0:
            raise InvalidArgumentError("Target secrecy rate must be positive, got {}".format(self.target_rate))
        if not self.bisection_tol > 0.0:
            raise InvalidArgumentError("Bisection tolerance must be positive")

    def with_main_snr(self, avg_snr: float) -> "SecrecyScenario":
        return replace(self, main=self.main.rescaled(avg_snr))

    def with_eve_snr(self, avg_snr: float) -> "SecrecyScenario":
        return replace(self, eve=self.eve.rescaled(avg_snr))


@dataclass(frozen=True)
class AsrResult:
    asr: float
    i_lim: float
    i1: float
    i2: float
    i3: float
    i_con: float


@dataclass(frozen=True)
class SopResult:
    sop: float
    h_m: float
    limit_sop: float
    p_con: float
    degenerate: bool = False


@dataclass(frozen=True)
class AsymptoticAsr:
    i_lim: float
    g_a: float
    g_d: float
    theta: tuple = ()

    def gap(self, avg_snr_main):
        """G_a avg_snr^(-G_d), the predicted I_lim - ASR"""
        return self.g_a * np.power(avg_snr_main, -self.g_d)

    def predict(self, avg_snr_main):
        return self.i_lim - self.gap(avg_snr_main)


@dataclass(frozen=True)
class AsymptoticSop:
    limit_sop: float
    g_a: float
    g_d: float
    h_m: float = 0.0
    delta: tuple = ()
    degenerate: bool = False

    def gap(self, avg_snr_main):
        """G'_a avg_snr^(-G_d), the predicted SOP - (1 - F_E(H_M))"""
        return self.g_a * np.power(avg_snr_main, -self.g_d)

    def predict(self, avg_snr_main):
        return self.limit_sop + self.gap(avg_snr_main)


@dataclass(frozen=True)
class AsymptoticSecrecy:
    g_d: float
    g_a_asr: float
    g_a_sop: float
    theta: tuple
    delta: tuple
    asr: AsymptoticAsr = field(repr=False, default=None)
    sop: AsymptoticSop = field(repr=False, default=None)


@dataclass(frozen=True, eq=False)
class _GapGrid:
    cutoff: float
    nodes: np.ndarray
    weights: np.ndarray
    mmse: np.ndarray


class SecrecyAnalyzer:
    def __init__(self, debug=False):
        """
        Evaluates secrecy metrics of a SecrecyScenario.

        Params
        --
        - debug [bool] log intermediate values
        """
        self._debug = debug
        if self._debug:
            d_level = logging.DEBUG
        else:
            d_level = logging.INFO
        LOG_FORMAT = '[%(levelname)s] %(asctime)s [SecrecyAnalyzer::%(funcName)s] :\t%(message)s'
        logging.basicConfig(format=LOG_FORMAT, level=d_level)
        self._logger = logging.getLogger(self.__class__.__name__)
        self._logger.setLevel(d_level)

        # MMSE sampled on [0, cutoff], one grid per (M, hermite order)
        self._grids = {}
        self._grid_lock = threading.Lock()

    ##################################################
    #               Shared integrals                 #
    ##################################################
    def _gapGrid(self, c: Constellation, n: int) -> _GapGrid:
        key = (c.order, n)
        with self._grid_lock:
            grid = self._grids.get(key)
        if grid is not None:
            return grid

        cutoff = CUTOFF_START
        while mmse(c, cutoff, n) > CUTOFF_MMSE:
            if cutoff >= CUTOFF_MAX:
                self._logger.warning("MMSE of %s is still %g at the maximum cutoff %g",
                                     c, mmse(c, cutoff, n), cutoff)
                break
            cutoff = min(2.0 * cutoff, CUTOFF_MAX)
        nodes, weights = graded_rule(0.0, cutoff, GAP_PANEL_ORDER, left_depth=GAP_LEFT_DEPTH)
        grid = _GapGrid(cutoff=cutoff, nodes=nodes, weights=weights, mmse=mmse(c, nodes, n))
        self._logger.debug("%s: MMSE cutoff %g, %d nodes", c, cutoff, len(nodes))
        with self._grid_lock:
            return self._grids.setdefault(key, grid)

    def _eveLaguerre(self, s: SecrecyScenario, fn) -> float:
        """
        E[fn(gamma_E)] = sum_j alpha_E,j / zeta_E,j^beta_E,j sum_q w_q fn(tau_q / zeta_E,j)

        Each component takes the generalized Laguerre rule with weight
        x^(beta_E,j - 1) e^(-x). The power factor is singular at 0 for shapes
        below 1 and must stay out of the integrand.
        """
        eve = s.eve
        log_coef, x = [], []
        for log_alpha, beta, zeta in zip(eve.log_alpha, eve.beta, eve.zeta):
            rule = make_rule(RuleKind.LAGUERRE, s.laguerre_order, alpha=beta - 1.0)
            with np.errstate(divide="ignore"):
                log_coef.append(log_alpha - beta * np.log(zeta) + np.log(rule.weights))
            x.append(rule.nodes / zeta)
        return float(np.sum(np.exp(np.array(log_coef)) * fn(np.array(x))))

    def _lOnGrid(self, s: SecrecyScenario):
        c, n = s.constellation, s.hermite_order
        return lambda x: l_function(c, x.ravel(), n).reshape(x.shape)

    def _inverseMap(self, s: SecrecyScenario, y: np.ndarray) -> np.ndarray:
        """
        F_M(y) = I_M^-1(R_s + I_M(y)). Targets too close to log2(M) are
        capped just below it so F_M stays finite.
        """
        c, n = s.constellation, s.hermite_order
        targets = s.target_rate + mutual_information(c, y, n)
        targets = np.minimum(targets, c.bits - 2.0 * s.bisection_tol)
        return inverse_mi(c, targets, n, tol=s.bisection_tol)

    def _threshold(self, s: SecrecyScenario) -> float:
        c = s.constellation
        return inverse_mi(c, c.bits - s.target_rate, s.hermite_order, tol=s.bisection_tol)

    def _checkRate(self, s: SecrecyScenario):
        if s.target_rate is None:
            raise InvalidArgumentError("A target secrecy rate is required for outage metrics")

    @staticmethod
    def _finite(name, value):
        if not np.all(np.isfinite(value)):
            raise NumericalError("{} is not finite ({})".format(name, value))
        return value

    ##################################################
    #               Average secrecy rate             #
    ##################################################
    def i_lim(self, s: SecrecyScenario) -> float:
        """
        High-SNR limit of the ASR, log2(M) - E[I_M(gamma_E)], by Gauss-Laguerre
        quadrature over the eavesdropper mixture.
        """
        i3 = self._eveLaguerre(s, self._lOnGrid(s))
        return self._finite("I_lim", LOG2E + i3)

    def i_con(self, s: SecrecyScenario) -> float:
        """
        Gap I_lim - ASR = log2(e) * int F_B F_E MMSE dgamma, in bits.
        """
        grid = self._gapGrid(s.constellation, s.hermite_order)
        fb = s.main.cdf(grid.nodes)
        fe = s.eve.cdf(grid.nodes)
        return self._finite("I_con", LOG2E * float(np.dot(grid.weights, fb * fe * grid.mmse)))

    def asr(self, s: SecrecyScenario) -> AsrResult:
        """
        Average secrecy rate as I3 - I2 - I1.

        I3 = E[L_M(gamma_E)] and I2 = E[L_M(gamma_E) F_B(gamma_E)] use the
        order-p Gauss-Laguerre rule in the eavesdropper variable. I1 is not
        integrated: it is derived from I1 + I2 = I_con - log2(e), so I2 cancels
        and asr = I_lim - I_con. The i1 and i2 fields are reported for
        inspection only.

        Returns
        --
        [AsrResult] with asr clamped to [0, log2 M]
        """
        l_on = self._lOnGrid(s)
        main = s.main
        i3 = self._eveLaguerre(s, l_on)
        i2 = self._eveLaguerre(s, lambda x: l_on(x) * main.cdf(x.ravel()).reshape(x.shape))
        i_con = self.i_con(s)
        i1 = i_con - LOG2E - i2
        raw = i3 - i2 - i1
        self._finite("ASR", raw)
        if raw < 0.0:
            self._logger.debug("ASR %.3e clamped to 0", raw)
        asr = min(max(raw, 0.0), s.constellation.bits)
        result = AsrResult(asr=asr, i_lim=LOG2E + i3, i1=i1, i2=i2, i3=i3, i_con=i_con)
        self._logger.debug("main %r, eve %r: %s", main, s.eve, result)
        return result

    ##################################################
    #            Secrecy outage probability          #
    ##################################################
    def sop(self, s: SecrecyScenario) -> SopResult:
        """
        SOP = 1 - F_E(H_M) + int_0^H_M F_B(F_M(y)) f_E(y) dy with
        H_M = I_M^-1(log2 M - R_s). The integral uses order-v Legendre panels
        refined towards both ends of [0, H_M].

        A target rate at or above log2 M can never be met: sop = 1 with the
        degenerate flag set.
        """
        self._checkRate(s)
        c = s.constellation
        if s.target_rate >= c.bits:
            self._logger.debug("R_s = %g >= log2(M) = %g, outage is certain", s.target_rate, c.bits)
            return SopResult(sop=1.0, h_m=0.0, limit_sop=1.0, p_con=0.0, degenerate=True)

        h_m = self._threshold(s)
        limit = 1.0 - s.eve.cdf(h_m)
        if h_m <= 0.0:
            return SopResult(sop=limit, h_m=h_m, limit_sop=limit, p_con=0.0)
        y, w = graded_rule(0.0, h_m, s.legendre_order, left_depth=SOP_DEPTH, right_depth=SOP_DEPTH)
        fm = self._inverseMap(s, y)
        p_con = float(np.dot(w, s.main.cdf(fm) * s.eve.pdf(y)))
        self._finite("SOP", p_con)
        sop = min(max(limit + p_con, 0.0), 1.0)
        result = SopResult(sop=sop, h_m=h_m, limit_sop=limit, p_con=p_con)
        self._logger.debug("main %r, eve %r, R_s=%g: %s", s.main, s.eve, s.target_rate, result)
        return result

    ##################################################
    #                   Asymptotics                  #
    ##################################################
    def asymptotic_asr(self, s: SecrecyScenario) -> AsymptoticAsr:
        """
        I_lim, G_a and G_d of ASR ~ I_lim - G_a avg_snr_B^(-G_d).

        Theta_l = log2(e) * int gamma^Lambda_l F_E MMSE dgamma for each
        dominant expansion term, G_a = sum Theta_l Phi_l, G_d = Psi_1.
        """
        expansion = s.main.asymptotic_expansion()
        grid = self._gapGrid(s.constellation, s.hermite_order)
        integrand = s.eve.cdf(grid.nodes) * grid.mmse
        dom = expansion.dominant
        theta = np.array([LOG2E * np.dot(grid.weights, grid.nodes ** lam * integrand)
                          for lam in expansion.lam[dom]])
        self._finite("Theta", theta)
        g_a = float(np.dot(theta, expansion.phi[dom]))
        result = AsymptoticAsr(i_lim=self.i_lim(s), g_a=g_a, g_d=expansion.dominant_psi,
                               theta=tuple(theta.tolist()))
        self._logger.debug("%r: %s", s.main, result)
        return result

    def asymptotic_sop(self, s: SecrecyScenario) -> AsymptoticSop:
        """
        1 - F_E(H_M), G'_a and G_d of SOP ~ 1 - F_E(H_M) + G'_a avg_snr_B^(-G_d).

        Delta_l = int_0^H_M F_M(gamma)^Lambda_l f_E(gamma) dgamma, computed in
        the gamma variable on panels refined towards H_M where F_M diverges.
        """
        self._checkRate(s)
        expansion = s.main.asymptotic_expansion()
        c = s.constellation
        dom = expansion.dominant
        if s.target_rate >= c.bits:
            return AsymptoticSop(limit_sop=1.0, g_a=0.0, g_d=expansion.dominant_psi,
                                 delta=tuple([0.0] * int(dom.sum())), degenerate=True)

        h_m = self._threshold(s)
        limit = 1.0 - s.eve.cdf(h_m)
        y, w = graded_rule(0.0, h_m, GAP_PANEL_ORDER, left_depth=SOP_DEPTH, right_depth=THRESHOLD_DEPTH)
        fm = self._inverseMap(s, y)
        fe = s.eve.pdf(y)
        delta = np.array([np.dot(w, fm ** lam * fe) for lam in expansion.lam[dom]])
        self._finite("Delta", delta)
        g_a = float(np.dot(delta, expansion.phi[dom]))
        result = AsymptoticSop(limit_sop=limit, g_a=g_a, g_d=expansion.dominant_psi, h_m=h_m,
                               delta=tuple(delta.tolist()))
        self._logger.debug("%r: %s", s.main, result)
        return result

    def asymptotics(self, s: SecrecyScenario) -> AsymptoticSecrecy:
        """
        Both sets of high-SNR coefficients. The outage part needs a target rate
        and is left empty without one.
        """
        a = self.asymptotic_asr(s)
        o = self.asymptotic_sop(s) if s.target_rate is not None else None
        return AsymptoticSecrecy(g_d=a.g_d, g_a_asr=a.g_a,
                                 g_a_sop=o.g_a if o is not None else math.nan,
                                 theta=a.theta, delta=o.delta if o is not None else (),
                                 asr=a, sop=o)
