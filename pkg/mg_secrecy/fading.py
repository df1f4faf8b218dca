"""
Mixture-Gamma SNR distributions.

f(g) = sum_l alpha_l g^(beta_l - 1) exp(-zeta_l g)

The coefficients alpha_l are kept as log values: for Hoyt and kappa-mu at
large average SNR they span hundreds of decades.
"""
import configparser
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.special import gammainc, gammaln, logsumexp

from .errors import ConfigError, InvalidArgumentError, UnsupportedFamilyError
from .quadrature import RuleKind, make_rule
from .utils import asScalarOrArray, toLinear

HOYT_TERMS = 20
GENERALIZED_K_TERMS = 15
KAPPA_MU_TERMS = 20
NORMALIZATION_TOL = 1e-6
FILE_NORMALIZATION_TOL = 1e-4

_logger = logging.getLogger(__name__)


class FadingFamily(str, Enum):
    NAKAGAMI = "nakagami"
    HOYT = "hoyt"
    GENERALIZED_K = "generalized_k"
    KAPPA_MU = "kappa_mu"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class AsymptoticExpansion:
    """
    High-SNR expansion F(g) ~ sum_l phi_l g^lam_l avg_snr^(-psi_l),
    terms sorted by psi ascending.
    """
    phi: np.ndarray
    lam: np.ndarray
    psi: np.ndarray

    @property
    def dominant_psi(self) -> float:
        return float(self.psi[0])

    @property
    def dominant(self) -> np.ndarray:
        """Mask of the terms sharing the smallest psi"""
        return np.isclose(self.psi, self.psi[0], rtol=1e-12, atol=0.0)

    @property
    def terms(self):
        return list(zip(self.phi.tolist(), self.lam.tolist(), self.psi.tolist()))

    def cdf(self, gamma, avg_snr: float):
        g = np.atleast_1d(np.asarray(gamma, dtype=float))[:, None]
        val = np.sum(self.phi * g ** self.lam * avg_snr ** (-self.psi), axis=1)
        return asScalarOrArray(val, gamma)

    def pdf(self, gamma, avg_snr: float):
        g = np.atleast_1d(np.asarray(gamma, dtype=float))[:, None]
        val = np.sum(self.phi * self.lam * g ** (self.lam - 1.0) * avg_snr ** (-self.psi), axis=1)
        return asScalarOrArray(val, gamma)


@dataclass(frozen=True, eq=False)
class MixtureGamma:
    log_alpha: np.ndarray
    beta: np.ndarray
    zeta: np.ndarray
    avg_snr: float
    family: FadingFamily = FadingFamily.CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("log_alpha", "beta", "zeta"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.log_alpha) == len(self.beta) == len(self.zeta)) or len(self.beta) == 0:
            raise InvalidArgumentError("Mixture needs the same nonzero number of alpha, beta and zeta values")
        if np.any(self.beta <= 0.0) or np.any(self.zeta <= 0.0):
            raise InvalidArgumentError("Mixture shapes and rates must be positive")
        if not np.all(np.isfinite(self.log_alpha)):
            raise InvalidArgumentError("Mixture coefficients must be positive and finite")
        _check_avg_snr(self.avg_snr)
        object.__setattr__(self, "family", FadingFamily(self.family))

    @property
    def size(self) -> int:
        return len(self.beta)

    @property
    def alpha(self) -> np.ndarray:
        return np.exp(self.log_alpha)

    @property
    def log_weights(self) -> np.ndarray:
        return self.log_alpha + gammaln(self.beta) - self.beta * np.log(self.zeta)

    @property
    def weights(self) -> np.ndarray:
        """w_l = alpha_l Gamma(beta_l) zeta_l^(-beta_l), the component probabilities"""
        return np.exp(self.log_weights)

    @property
    def components(self):
        return list(zip(self.alpha.tolist(), self.beta.tolist(), self.zeta.tolist()))

    def normalization(self) -> float:
        return float(np.exp(logsumexp(self.log_weights)))

    def mean(self) -> float:
        return float(np.sum(self.weights * self.beta / self.zeta))

    def pdf(self, gamma):
        """
        Mixture density. At gamma = 0 a component with beta < 1 makes the
        density infinite, which is returned as +inf.
        """
        g = np.atleast_1d(np.asarray(gamma, dtype=float))
        if np.any(g < 0.0):
            raise InvalidArgumentError("SNR must be nonnegative")
        out = np.empty_like(g, dtype=float)
        pos = g > 0.0
        if pos.any():
            gp = g[pos][:, None]
            logs = self.log_alpha + (self.beta - 1.0) * np.log(gp) - self.zeta * gp
            out[pos] = np.exp(logsumexp(logs, axis=1))
        if (~pos).any():
            if np.any(self.beta < 1.0):
                out[~pos] = math.inf
            else:
                at_zero = self.beta == 1.0
                out[~pos] = float(np.sum(self.alpha[at_zero]))
        return asScalarOrArray(out, gamma)

    def cdf(self, gamma):
        """
        sum_l alpha_l zeta_l^(-beta_l) lower_gamma(beta_l, zeta_l g), in [0, 1]
        """
        g = np.atleast_1d(np.asarray(gamma, dtype=float))
        if np.any(g < 0.0):
            raise InvalidArgumentError("SNR must be nonnegative")
        reg = gammainc(self.beta[None, :], self.zeta[None, :] * g.reshape(-1, 1))
        val = (reg @ self.weights).reshape(g.shape)
        return asScalarOrArray(np.clip(val, 0.0, 1.0), gamma)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """
        Draws `count` SNR values: a component is picked with probability w_l,
        then Gamma(beta_l, rate zeta_l) is drawn.

        Params
        --
        - rng [np.random.Generator] caller-owned stream
        - count [int] number of draws, >= 1
        """
        if count < 1:
            raise InvalidArgumentError("Sample count must be at least 1")
        w = self.weights
        idx = rng.choice(self.size, size=count, p=w / w.sum())
        return rng.gamma(self.beta[idx], 1.0 / self.zeta[idx])

    def rescaled(self, avg_snr: float) -> "MixtureGamma":
        """
        Same family at another average SNR: alpha_l c^(-beta_l), zeta_l / c with
        c = avg_snr / self.avg_snr.
        """
        _check_avg_snr(avg_snr)
        log_c = math.log(avg_snr) - math.log(self.avg_snr)
        return replace(self,
                       log_alpha=self.log_alpha - self.beta * log_c,
                       zeta=self.zeta * math.exp(-log_c),
                       avg_snr=float(avg_snr))

    def asymptotic_expansion(self) -> AsymptoticExpansion:
        return asymptotic_expansion(self)

    def __repr__(self):
        args = ", ".join("{}={}".format(k, v) for k, v in self.params.items())
        return "MixtureGamma({}({}), avg_snr={}, L={})".format(self.family.value, args, self.avg_snr, self.size)


def _check_avg_snr(avg_snr):
    try:
        valid = math.isfinite(avg_snr) and avg_snr > 0.0
    except TypeError:
        valid = False
    if not valid:
        raise InvalidArgumentError("Average SNR must be positive and finite, got {!r}".format(avg_snr))


def _normalized(log_theta, beta, zeta):
    # psi(theta, beta, zeta) = theta / sum_j theta_j Gamma(beta_j) zeta_j^(-beta_j)
    log_norm = logsumexp(log_theta + gammaln(beta) - beta * np.log(zeta))
    return log_theta - log_norm


def from_nakagami(m: float, avg_snr: float) -> MixtureGamma:
    """
    Nakagami-m: a single Gamma(m, m/avg_snr) component.
    """
    if not m >= 0.5:
        raise InvalidArgumentError("Nakagami m must be >= 0.5, got {}".format(m))
    _check_avg_snr(avg_snr)
    log_alpha = np.array([m * math.log(m) - m * math.log(avg_snr) - gammaln(m)])
    return MixtureGamma(log_alpha=log_alpha, beta=np.array([float(m)]), zeta=np.array([m / avg_snr]),
                        avg_snr=float(avg_snr), family=FadingFamily.NAKAGAMI, params={"m": m})


def from_hoyt(q: float, avg_snr: float) -> MixtureGamma:
    """
    Hoyt (Nakagami-q) from the power series of the Bessel I0 factor,
    truncated at 20 terms.

    Params
    --
    - q [float] 0 < q < 1
    - avg_snr [float] linear average SNR
    """
    if not 0.0 < q < 1.0:
        raise InvalidArgumentError("Hoyt q must lie in (0, 1), got {}".format(q))
    _check_avg_snr(avg_snr)
    l = np.arange(1, HOYT_TERMS + 1, dtype=float)
    beta = 2.0 * l - 1.0
    zeta = np.full(HOYT_TERMS, (1.0 + q * q) ** 2 / (4.0 * q * q * avg_snr))
    log_theta = (math.log1p(q * q) - math.log(2.0 * q * avg_snr) - 2.0 * gammaln(l)
                 + (2.0 * l - 2.0) * math.log((1.0 - q ** 4) / (8.0 * q * q * avg_snr)))
    return MixtureGamma(log_alpha=_normalized(log_theta, beta, zeta), beta=beta, zeta=zeta,
                        avg_snr=float(avg_snr), family=FadingFamily.HOYT, params={"q": q})


def from_generalized_k(k: float, m: float, avg_snr: float) -> MixtureGamma:
    """
    Generalized-K (Gamma shadowing of Nakagami-m fading), with the shadowing
    integral replaced by a 15-point Gauss-Laguerre rule.
    """
    if not (k > 0.0 and m > 0.0):
        raise InvalidArgumentError("Generalized-K needs k > 0 and m > 0, got k={}, m={}".format(k, m))
    _check_avg_snr(avg_snr)
    rule = make_rule(RuleKind.LAGUERRE, GENERALIZED_K_TERMS)
    lam = k * m / avg_snr
    beta = np.full(GENERALIZED_K_TERMS, float(m))
    zeta = lam / rule.nodes
    # tau^(k-m-1) stays in log space, small nodes with k-m-1 < 0 blow up otherwise
    log_theta = (m * math.log(lam) + np.log(rule.weights) + (k - m - 1.0) * np.log(rule.nodes)
                 - gammaln(m) - gammaln(k))
    return MixtureGamma(log_alpha=_normalized(log_theta, beta, zeta), beta=beta, zeta=zeta,
                        avg_snr=float(avg_snr), family=FadingFamily.GENERALIZED_K, params={"k": k, "m": m})


def from_kappa_mu(kappa: float, mu: float, avg_snr: float) -> MixtureGamma:
    if not (kappa > 0.0 and mu > 0.0):
        raise InvalidArgumentError("kappa-mu needs kappa > 0 and mu > 0, got kappa={}, mu={}".format(kappa, mu))
    _check_avg_snr(avg_snr)
    l = np.arange(1, KAPPA_MU_TERMS + 1, dtype=float)
    beta = mu - 1.0 + l
    zeta = np.full(KAPPA_MU_TERMS, mu * (1.0 + kappa) / avg_snr)
    log_theta = ((2.0 * l + mu - 2.0) * math.log(mu) + (mu + l - 1.0) * math.log1p(kappa)
                 + (l - 1.0) * math.log(kappa) - mu * kappa - (mu + l - 1.0) * math.log(avg_snr)
                 - gammaln(beta) - gammaln(l))
    return MixtureGamma(log_alpha=_normalized(log_theta, beta, zeta), beta=beta, zeta=zeta,
                        avg_snr=float(avg_snr), family=FadingFamily.KAPPA_MU,
                        params={"kappa": kappa, "mu": mu})


def from_components(components, avg_snr: float, tol: float = FILE_NORMALIZATION_TOL) -> MixtureGamma:
    """
    Custom mixture from explicit (alpha, beta, zeta) triples.

    Raises
    --
    InvalidArgumentError when a value is not positive or when the weights do
    not sum to 1 within `tol`
    """
    comps = np.asarray(components, dtype=float)
    if comps.ndim != 2 or comps.shape[1] != 3 or comps.shape[0] == 0:
        raise InvalidArgumentError("Components must be a nonempty list of (alpha, beta, zeta) triples")
    if np.any(comps <= 0.0) or not np.all(np.isfinite(comps)):
        raise InvalidArgumentError("Component values must be positive and finite")
    d = MixtureGamma(log_alpha=np.log(comps[:, 0]), beta=comps[:, 1], zeta=comps[:, 2],
                     avg_snr=float(avg_snr), family=FadingFamily.CUSTOM)
    norm = d.normalization()
    if abs(norm - 1.0) > tol:
        raise InvalidArgumentError(
            "Mixture weights sum to {:.8g}, which is off by more than {:g}".format(norm, tol))
    return d


def load_mixture(path) -> MixtureGamma:
    """
    Reads a custom mixture file:

        [mixture]
        avg_snr_db = 3
        components =
            0.5, 1.0, 1.0
            ...

    Raises
    --
    ConfigError on a missing file, malformed content or a normalization error
    """
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with open(path) as f:
            parser.read_file(f)
    except (OSError, configparser.Error) as e:
        raise ConfigError("{}: {}".format(path, e)) from e
    if not parser.has_section("mixture"):
        raise ConfigError("{}: missing [mixture] section".format(path))
    sec = parser["mixture"]
    try:
        avg_snr = toLinear(float(sec["avg_snr_db"]))
    except KeyError:
        raise ConfigError("{}: [mixture] avg_snr_db: missing".format(path)) from None
    except ValueError as e:
        raise ConfigError("{}: [mixture] avg_snr_db: {}".format(path, e)) from None

    rows = []
    for lineno, line in enumerate(sec.get("components", "").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            triple = [float(x) for x in line.split(",")]
        except ValueError:
            triple = []
        if len(triple) != 3:
            raise ConfigError("{}: [mixture] components line {}: expected 'alpha, beta, zeta', got '{}'"
                              .format(path, lineno, line))
        rows.append(triple)
    if not rows:
        raise ConfigError("{}: [mixture] components: no components given".format(path))
    try:
        d = from_components(rows, avg_snr)
    except InvalidArgumentError as e:
        raise ConfigError("{}: [mixture] components: {}".format(path, e)) from None
    _logger.debug("Loaded %d-component mixture from %s", d.size, path)
    return replace(d, params={"file": str(path)})


def asymptotic_expansion(d: MixtureGamma) -> AsymptoticExpansion:
    """
    Terms of F(g) ~ sum phi_l g^lam_l avg_snr^(-psi_l) as avg_snr grows.

    Each component contributes phi_l = alpha_l avg_snr^beta_l / beta_l with
    lam_l = psi_l = beta_l. Hoyt and kappa-mu keep their dominant term only;
    every Generalized-K term shares psi = m and all of them are kept.

    Raises
    --
    UnsupportedFamilyError for custom mixtures
    """
    if d.family is FadingFamily.CUSTOM:
        raise UnsupportedFamilyError(d.family.value)
    log_phi = d.log_alpha + d.beta * math.log(d.avg_snr) - np.log(d.beta)
    order = np.argsort(d.beta, kind="stable")
    if d.family in (FadingFamily.HOYT, FadingFamily.KAPPA_MU):
        order = order[:1]
    phi, beta = np.exp(log_phi[order]), d.beta[order]
    for arr in (phi, beta):
        arr.setflags(write=False)
    return AsymptoticExpansion(phi=phi, lam=beta, psi=beta)


def build_fading(family, avg_snr: float, **params) -> MixtureGamma:
    """
    Dispatches to the family constructor by name.
    """
    try:
        family = FadingFamily(family)
    except ValueError:
        raise InvalidArgumentError("Unknown fading family '{}'".format(family)) from None
    if family is FadingFamily.NAKAGAMI:
        return from_nakagami(params["m"], avg_snr)
    if family is FadingFamily.HOYT:
        return from_hoyt(params["q"], avg_snr)
    if family is FadingFamily.GENERALIZED_K:
        return from_generalized_k(params["k"], params["m"], avg_snr)
    if family is FadingFamily.KAPPA_MU:
        return from_kappa_mu(params["kappa"], params["mu"], avg_snr)
    return load_mixture(params["file"]).rescaled(avg_snr)
