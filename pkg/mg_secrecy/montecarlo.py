"""
Monte Carlo estimators used as an independent check of the quadrature layer.

Stream i of a run seeded with `seed` is
    np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
Draws are split over `workers` shards, shard i using stream i, and shard
results are combined in shard order, so an estimate only depends on
(seed, n_samples, workers).
"""
import logging
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .constellation import Constellation, mutual_information
from .errors import InvalidArgumentError
from .secrecy import SecrecyScenario

BLOCK_SIZE = 1 << 16
MI_MIN_SAMPLES = 10_000
SECRECY_MIN_SAMPLES = 100_000


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def z_score(self, reference: float) -> float:
        """(value - reference) / std_error, 0 when both agree exactly"""
        diff = self.value - reference
        if self.std_error > 0.0:
            return diff / self.std_error
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)


@dataclass(frozen=True)
class _Moments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: np.ndarray) -> "_Moments":
        if len(values) == 0:
            return cls(0, 0.0, 0.0)
        mean = float(np.mean(values))
        return cls(len(values), mean, float(np.sum(np.square(values - mean))))

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.count + other.count
        if n == 0:
            return self
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return _Moments(n, mean, m2)


def stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


class MonteCarloSimulator:
    def __init__(self, workers=1, debug=False):
        """
        Params
        --
        - workers [int] number of shards and threads; estimates depend on it
        - debug [bool] log shard progress
        """
        self._debug = debug
        if self._debug:
            d_level = logging.DEBUG
        else:
            d_level = logging.INFO
        LOG_FORMAT = '[%(levelname)s] %(asctime)s [MonteCarloSimulator::%(funcName)s] :\t%(message)s'
        logging.basicConfig(format=LOG_FORMAT, level=d_level)
        self._logger = logging.getLogger(self.__class__.__name__)
        self._logger.setLevel(d_level)

        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            raise InvalidArgumentError("workers must be a positive integer, got {!r}".format(workers))
        self._workers = workers

    @property
    def workers(self) -> int:
        return self._workers

    def _shardSizes(self, n_samples: int):
        base, extra = divmod(n_samples, self._workers)
        return [base + (1 if i < extra else 0) for i in range(self._workers)]

    def _run(self, draw_block, n_samples: int, seed: int) -> _Moments:
        """
        Runs draw_block(rng, size) -> per-draw values over all shards and
        merges the shard moments in shard order.
        """
        sizes = self._shardSizes(n_samples)
        results = [None] * len(sizes)
        errors = [None] * len(sizes)

        def shard(i, size):
            try:
                rng = stream(seed, i)
                acc = _Moments(0, 0.0, 0.0)
                done = 0
                while done < size:
                    k = min(BLOCK_SIZE, size - done)
                    acc = acc.merge(_Moments.of(draw_block(rng, k)))
                    done += k
                results[i] = acc
                self._logger.debug("shard %d: %d draws, mean %.6g", i, size, acc.mean)
            except Exception as e:
                errors[i] = e

        if len(sizes) == 1:
            shard(0, sizes[0])
        else:
            threads = [threading.Thread(target=shard, args=(i, size)) for i, size in enumerate(sizes)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        for e in errors:
            if e is not None:
                raise e

        total = _Moments(0, 0.0, 0.0)
        for r in results:
            total = total.merge(r)
        return total

    def _estimate(self, moments: _Moments, seed: int) -> McEstimate:
        n = moments.count
        var = moments.m2 / (n - 1) if n > 1 else 0.0
        return McEstimate(value=moments.mean, std_error=math.sqrt(var / n), n_samples=n, seed=seed)

    def _checkSamples(self, n_samples, recommended):
        if isinstance(n_samples, bool) or not isinstance(n_samples, int) or n_samples < 2:
            raise InvalidArgumentError("n_samples must be an integer >= 2, got {!r}".format(n_samples))
        if n_samples < recommended:
            self._logger.warning("%d samples is below the recommended %d, expect a wide standard error",
                                 n_samples, recommended)

    ##################################################
    #              Constellation level               #
    ##################################################
    def mc_mutual_information(self, c: Constellation, gamma: float, n_samples: int, seed: int) -> McEstimate:
        """
        Estimates I_M(gamma) from the Gaussian integral defining L_M:
        u = sqrt(gamma) p_j + N(0, 1/2) with j uniform over the PAM levels,
        L_M = 2 E[log2 sum_k exp(-(u - sqrt(gamma) p_k)^2)].

        Returns
        --
        [McEstimate] of log2(M/e) - L_M(gamma) in bits
        """
        self._checkSamples(n_samples, MI_MIN_SAMPLES)
        if not gamma >= 0.0:
            raise InvalidArgumentError("SNR must be nonnegative")
        shifted = math.sqrt(gamma) * c.pam_levels
        offset = math.log2(c.order / math.e)

        def draw(rng, k):
            j = rng.integers(0, c.side, size=k)
            u = shifted[j] + rng.normal(0.0, math.sqrt(0.5), size=k)
            lse = logsumexp(-np.square(u[:, None] - shifted[None, :]), axis=1) / math.log(2.0)
            return offset - 2.0 * lse

        result = self._estimate(self._run(draw, n_samples, seed), seed)
        self._logger.debug("%s, gamma=%g: %s", c, gamma, result)
        return result

    ##################################################
    #                 Fading level                   #
    ##################################################
    def _secrecyRates(self, s: SecrecyScenario, rate_fn):
        def draw(rng, k):
            g_b = s.main.sample(rng, k)
            g_e = s.eve.sample(rng, k)
            return np.maximum(rate_fn(g_b) - rate_fn(g_e), 0.0)
        return draw

    def _discreteRate(self, s: SecrecyScenario):
        c, n = s.constellation, s.hermite_order
        return lambda g: mutual_information(c, g, n)

    def _binomial(self, s: SecrecyScenario, rate_fn, n_samples, seed) -> McEstimate:
        rates = self._secrecyRates(s, rate_fn)
        moments = self._run(lambda rng, k: (rates(rng, k) < s.target_rate).astype(float), n_samples, seed)
        p = moments.mean
        return McEstimate(value=p, std_error=math.sqrt(p * (1.0 - p) / moments.count),
                          n_samples=moments.count, seed=seed)

    def mc_asr(self, s: SecrecyScenario, n_samples: int, seed: int) -> McEstimate:
        """
        Mean of max(I_M(gamma_B) - I_M(gamma_E), 0) over independent fading draws
        """
        self._checkSamples(n_samples, SECRECY_MIN_SAMPLES)
        draw = self._secrecyRates(s, self._discreteRate(s))
        result = self._estimate(self._run(draw, n_samples, seed), seed)
        self._logger.debug("%r vs %r: %s", s.main, s.eve, result)
        return result

    def mc_sop(self, s: SecrecyScenario, n_samples: int, seed: int) -> McEstimate:
        """
        Frequency of max(I_M(gamma_B) - I_M(gamma_E), 0) < R_s with a binomial
        standard error. R_s >= log2 M gives exactly 1.
        """
        self._checkSamples(n_samples, SECRECY_MIN_SAMPLES)
        if s.target_rate is None:
            raise InvalidArgumentError("A target secrecy rate is required for outage metrics")
        if s.target_rate >= s.constellation.bits:
            return McEstimate(value=1.0, std_error=0.0, n_samples=n_samples, seed=seed)
        result = self._binomial(s, self._discreteRate(s), n_samples, seed)
        self._logger.debug("%r vs %r, R_s=%g: %s", s.main, s.eve, s.target_rate, result)
        return result

    def mc_gaussian_baseline(self, s: SecrecyScenario, metric: str, n_samples: int, seed: int) -> McEstimate:
        """
        Same estimators with Gaussian inputs, I(gamma) = log2(1 + gamma).

        Params
        --
        - metric [str] asr | sop
        """
        self._checkSamples(n_samples, SECRECY_MIN_SAMPLES)
        if metric == "asr":
            draw = self._secrecyRates(s, np.log1p)
            moments = self._run(lambda rng, k: draw(rng, k) / math.log(2.0), n_samples, seed)
            return self._estimate(moments, seed)
        if metric == "sop":
            if s.target_rate is None:
                raise InvalidArgumentError("A target secrecy rate is required for outage metrics")
            return self._binomial(s, lambda g: np.log1p(g) / math.log(2.0), n_samples, seed)
        raise InvalidArgumentError("Unknown metric '{}', expected asr or sop".format(metric))
