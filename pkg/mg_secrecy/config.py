"""
Run configuration: an INI file parsed with configparser and validated into
pydantic models.

    [main]              family = nakagami | hoyt | generalized_k | kappa_mu | custom
    [eve] / [eve.<x>]   one or more eavesdropper channels
    [constellation]     order(s), target_rate
    [sweep]             points_db or start_db/stop_db/step_db, outputs, mc_metric, ...
    [precision]         hermite_order, laguerre_order, legendre_order, bisection_tol

SNR values are given in dB only.
"""
import configparser
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .constellation import SUPPORTED_ORDERS, Constellation
from .errors import ConfigError, InvalidArgumentError
from .fading import FadingFamily, MixtureGamma, build_fading, load_mixture
from .secrecy import SOP_BISECTION_TOL, SecrecyScenario
from .utils import toLinear

ASR_OUTPUTS = ("asr", "i_lim", "i_con")
SOP_OUTPUTS = ("sop", "limit_sop", "p_con")
OUTPUTS = ASR_OUTPUTS + SOP_OUTPUTS + ("asymptote", "mc", "gaussian_baseline")
LIST_KEYS = ("orders", "points_db", "outputs")

_FAMILY_KEYS = {
    FadingFamily.NAKAGAMI: ("m",),
    FadingFamily.HOYT: ("q",),
    FadingFamily.GENERALIZED_K: ("k", "m"),
    FadingFamily.KAPPA_MU: ("kappa", "mu"),
    FadingFamily.CUSTOM: ("file",),
}

_logger = logging.getLogger(__name__)


class FadingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: FadingFamily
    avg_snr_db: Optional[float] = None
    m: Optional[float] = None
    q: Optional[float] = None
    k: Optional[float] = None
    kappa: Optional[float] = None
    mu: Optional[float] = None
    file: Optional[str] = None

    @model_validator(mode="after")
    def _familyKeys(self):
        needed = _FAMILY_KEYS[self.family]
        missing = [key for key in needed if getattr(self, key) is None]
        if missing:
            raise ValueError("family {} needs key(s) {}".format(self.family.value, ", ".join(missing)))
        extra = [key for key in ("m", "q", "k", "kappa", "mu", "file")
                 if key not in needed and getattr(self, key) is not None]
        if extra:
            raise ValueError("key(s) {} do not apply to family {}".format(", ".join(extra), self.family.value))
        return self

    def params(self) -> dict:
        return {key: getattr(self, key) for key in _FAMILY_KEYS[self.family]}

    def build(self, base_dir: Path) -> MixtureGamma:
        if self.family is FadingFamily.CUSTOM:
            d = load_mixture(base_dir / self.file)
            return d if self.avg_snr_db is None else d.rescaled(toLinear(self.avg_snr_db))
        avg_snr_db = 0.0 if self.avg_snr_db is None else self.avg_snr_db
        return build_fading(self.family, toLinear(avg_snr_db), **self.params())


class ConstellationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    orders: List[int] = Field(default_factory=lambda: [4])
    target_rate: Optional[float] = Field(default=None, gt=0.0)

    @field_validator("orders")
    @classmethod
    def _supported(cls, orders):
        if not orders:
            raise ValueError("at least one modulation order is required")
        bad = [m for m in orders if m not in SUPPORTED_ORDERS]
        if bad:
            raise ValueError("unsupported order(s) {}, expected one of {}".format(bad, SUPPORTED_ORDERS))
        return orders


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points_db: List[float]
    outputs: List[str] = Field(default_factory=lambda: ["asr"])
    mc_metric: Literal["asr", "sop"] = "asr"
    mc_target_rate: Optional[float] = Field(default=None, gt=0.0)
    workers: int = Field(default=1, ge=1)

    @field_validator("points_db")
    @classmethod
    def _increasing(cls, points):
        if not points:
            raise ValueError("the sweep needs at least one point")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise ValueError("points must be strictly increasing")
        return points

    @field_validator("outputs")
    @classmethod
    def _knownOutputs(cls, outputs):
        bad = [o for o in outputs if o not in OUTPUTS]
        if bad:
            raise ValueError("unknown output(s) {}, expected some of {}".format(bad, OUTPUTS))
        if not outputs:
            raise ValueError("at least one output is required")
        return outputs


class PrecisionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hermite_order: int = Field(default=20, ge=1, le=256)
    laguerre_order: int = Field(default=30, ge=1, le=256)
    legendre_order: int = Field(default=30, ge=1, le=256)
    bisection_tol: float = Field(default=SOP_BISECTION_TOL, gt=0.0)


class RunConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    path: Path
    main: FadingConfig
    eves: Dict[str, FadingConfig]
    constellation: ConstellationConfig
    sweep: SweepConfig
    precision: PrecisionConfig

    def wants(self, *outputs) -> bool:
        return any(o in self.sweep.outputs for o in outputs)

    def needs_rate(self) -> bool:
        return self.wants(*SOP_OUTPUTS) or (self.wants("mc", "gaussian_baseline") and self.sweep.mc_metric == "sop")

    def scenario(self, order: int, eve: str) -> SecrecyScenario:
        """
        Scenario of one (modulation, eavesdropper) group at the main channel's
        configured average SNR
        """
        base = self.path.parent
        try:
            return SecrecyScenario(main=self.main.build(base), eve=self.eves[eve].build(base),
                                   constellation=Constellation.square_qam(order),
                                   target_rate=self.constellation.target_rate,
                                   hermite_order=self.precision.hermite_order,
                                   laguerre_order=self.precision.laguerre_order,
                                   legendre_order=self.precision.legendre_order,
                                   bisection_tol=self.precision.bisection_tol)
        except InvalidArgumentError as e:
            raise ConfigError("{}: {}".format(self.path, e)) from None

    def resolved(self) -> dict:
        """Fully resolved configuration, recorded in output headers"""
        return {
            "main": self.main.model_dump(mode="json", exclude_none=True),
            "eve": {label: e.model_dump(mode="json", exclude_none=True) for label, e in self.eves.items()},
            "constellation": self.constellation.model_dump(mode="json", exclude_none=True),
            "sweep": self.sweep.model_dump(mode="json", exclude_none=True),
            "precision": self.precision.model_dump(mode="json"),
        }


def _splitList(value: str) -> List[str]:
    return [v for v in (x.strip() for x in value.replace("\n", ",").split(",")) if v]


def _lineOf(lines: List[str], section: str, key: Optional[str]) -> int:
    in_section = False
    header = None
    for i, line in enumerate(lines, 1):
        stripped = line.strip()
        if stripped.startswith("["):
            in_section = stripped == "[{}]".format(section)
            if in_section:
                header = i
            continue
        if in_section and key is not None and stripped.split("=")[0].strip() == key:
            return i
    return header or 0


def _raise(path: Path, lines, section: str, err: ValidationError, keymap=None):
    first = err.errors()[0]
    key = str(first["loc"][0]) if first["loc"] else None
    if keymap and key in keymap:
        key = keymap[key]
    msg = first["msg"]
    lineno = _lineOf(lines, section, key)
    where = "[{}] {}".format(section, key) if key else "[{}]".format(section)
    raise ConfigError("{}:{}: {}: {}".format(path, lineno, where, msg)) from None


def _sweepPoints(path, lines, sec) -> Optional[List[float]]:
    if "points_db" in sec:
        try:
            return [float(x) for x in _splitList(sec.pop("points_db"))]
        except ValueError as e:
            raise ConfigError("{}:{}: [sweep] points_db: {}".format(
                path, _lineOf(lines, "sweep", "points_db"), e)) from None
    keys = ("start_db", "stop_db", "step_db")
    if not any(k in sec for k in keys):
        return None
    try:
        start, stop, step = (float(sec.pop(k)) for k in keys)
    except KeyError:
        raise ConfigError("{}:{}: [sweep] start_db, stop_db and step_db must be given together".format(
            path, _lineOf(lines, "sweep", None))) from None
    except ValueError as e:
        raise ConfigError("{}:{}: [sweep] {}".format(path, _lineOf(lines, "sweep", None), e)) from None
    if not step > 0.0 or stop < start:
        raise ConfigError("{}:{}: [sweep] step_db: need step_db > 0 and stop_db >= start_db".format(
            path, _lineOf(lines, "sweep", "step_db")))
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def load_config(path) -> RunConfig:
    """
    Parses and validates a run configuration.

    Raises
    --
    ConfigError with a "<path>:<line>: [section] key: reason" message
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError("{}: {}".format(path, e.strerror or e)) from None
    lines = text.splitlines()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as e:
        raise ConfigError("{}: {}".format(path, e)) from None

    known = {"main", "constellation", "sweep", "precision"}
    eve_sections = [s for s in parser.sections() if s == "eve" or s.startswith("eve.")]
    unknown = [s for s in parser.sections() if s not in known and s not in eve_sections]
    if unknown:
        raise ConfigError("{}:{}: [{}]: unknown section".format(path, _lineOf(lines, unknown[0], None), unknown[0]))
    for required in ("main", "sweep"):
        if not parser.has_section(required):
            raise ConfigError("{}: missing [{}] section".format(path, required))
    if not eve_sections:
        raise ConfigError("{}: at least one [eve] section is required".format(path))

    def model(cls, section, keymap=None, prepare=None):
        values = dict(parser[section]) if parser.has_section(section) else {}
        if prepare is not None:
            values = prepare(values)
        for key in LIST_KEYS:
            if key in values and isinstance(values[key], str):
                values[key] = _splitList(values[key])
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            _raise(path, lines, section, e, keymap)

    def constellation_values(values):
        if "order" in values:
            if "orders" in values:
                raise ConfigError("{}:{}: [constellation] order: give either order or orders".format(
                    path, _lineOf(lines, "constellation", "order")))
            values["orders"] = values.pop("order")
        return values

    def sweep_values(values):
        points = _sweepPoints(path, lines, values)
        if points is not None:
            values["points_db"] = points
        return values

    eves = {}
    for section in eve_sections:
        label = section[len("eve."):] if section.startswith("eve.") else "eve"
        eves[label] = model(FadingConfig, section)

    config = RunConfig(path=path,
                       main=model(FadingConfig, "main"),
                       eves=eves,
                       constellation=model(ConstellationConfig, "constellation",
                                           keymap={"orders": "order"} if parser.has_option("constellation", "order") else None,
                                           prepare=constellation_values),
                       sweep=model(SweepConfig, "sweep", prepare=sweep_values),
                       precision=model(PrecisionConfig, "precision"))

    if config.needs_rate() and config.constellation.target_rate is None:
        raise ConfigError("{}:{}: [constellation] target_rate: required by the requested outputs".format(
            path, _lineOf(lines, "constellation", None)))
    _logger.debug("Loaded %s: %d eavesdropper(s), orders %s, %d point(s)",
                  path, len(eves), config.constellation.orders, len(config.sweep.points_db))
    return config
