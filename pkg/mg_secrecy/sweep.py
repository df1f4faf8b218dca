"""
Metric sweeps over the main channel's average SNR and Monte Carlo validation
reports, with their CSV / JSON writers.
"""
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional

from .config import ASR_OUTPUTS, SOP_OUTPUTS, RunConfig
from .errors import ConfigError, NumericalError
from .montecarlo import McEstimate, MonteCarloSimulator
from .secrecy import SecrecyAnalyzer, SecrecyScenario
from .utils import formatFloat, toLinear

COLUMNS = ("modulation", "eve", "snr_db", "asr_bits", "i_lim_bits", "i_con_bits", "sop", "limit_sop", "p_con",
           "asym_asr_bits", "asym_sop", "mc_value", "mc_stderr", "gauss_value", "gauss_stderr")
REPORT_COLUMNS = ("modulation", "eve", "snr_db", "metric", "quadrature", "mc_value", "mc_stderr", "z")
ASYMPTOTE_COLUMNS = ("modulation", "eve", "g_d", "i_lim_bits", "g_a_asr", "limit_sop", "g_a_sop", "h_m")
Z_LIMIT = 3.0
DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 0


@dataclass(frozen=True)
class SweepGroup:
    modulation: str
    eve: str
    scenario: SecrecyScenario


@dataclass(frozen=True)
class SweepSpec:
    groups: List[SweepGroup]
    points_db: List[float]
    outputs: List[str]
    mc_metric: str = "asr"
    mc_target_rate: Optional[float] = None
    workers: int = 1
    header: Dict = field(default_factory=dict)
    sweep_axis: str = "avg_snr_main_db"

    @classmethod
    def from_config(cls, config: RunConfig) -> "SweepSpec":
        groups = [SweepGroup(modulation="{}-QAM".format(order), eve=label, scenario=config.scenario(order, label))
                  for order in config.constellation.orders for label in config.eves]
        return cls(groups=groups, points_db=list(config.sweep.points_db), outputs=list(config.sweep.outputs),
                   mc_metric=config.sweep.mc_metric, mc_target_rate=config.sweep.mc_target_rate,
                   workers=config.sweep.workers, header=config.resolved())

    def wants(self, *outputs) -> bool:
        return any(o in self.outputs for o in outputs)

    def columns(self) -> List[str]:
        present = {"modulation", "eve", "snr_db"}
        if self.wants("asr"):
            present.add("asr_bits")
        if self.wants("i_lim"):
            present.add("i_lim_bits")
        if self.wants("i_con"):
            present.add("i_con_bits")
        present.update(o for o in SOP_OUTPUTS if o in self.outputs)
        if self.wants("asymptote"):
            asr_side = self.wants(*ASR_OUTPUTS) or not self.wants(*SOP_OUTPUTS)
            if asr_side:
                present.add("asym_asr_bits")
            if self.wants(*SOP_OUTPUTS) or (not asr_side and self._hasRate()):
                present.add("asym_sop")
        if self.wants("mc"):
            present.update(("mc_value", "mc_stderr"))
        if self.wants("gaussian_baseline"):
            present.update(("gauss_value", "gauss_stderr"))
        return [c for c in COLUMNS if c in present]

    def _hasRate(self) -> bool:
        return all(g.scenario.target_rate is not None for g in self.groups)


@dataclass(frozen=True)
class ValidationPoint:
    modulation: str
    eve: str
    snr_db: float
    metric: str
    quadrature: float
    mc_value: float
    mc_stderr: float
    z: float


@dataclass(frozen=True)
class ValidationReport:
    points: List[ValidationPoint]
    n_samples: int
    seed: int

    @property
    def max_abs_z(self) -> float:
        return max((abs(p.z) for p in self.points), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= Z_LIMIT

    @property
    def summary(self) -> str:
        return "PASS" if self.passed else "FAIL"


class SweepRunner:
    def __init__(self, debug=False):
        """
        Runs sweeps and validations described by a SweepSpec.

        Params
        --
        - debug [bool] log every evaluated point
        """
        self._debug = debug
        if self._debug:
            d_level = logging.DEBUG
        else:
            d_level = logging.INFO
        LOG_FORMAT = '[%(levelname)s] %(asctime)s [SweepRunner::%(funcName)s] :\t%(message)s'
        logging.basicConfig(format=LOG_FORMAT, level=d_level)
        self._logger = logging.getLogger(self.__class__.__name__)
        self._logger.setLevel(d_level)

        self._analyzer = SecrecyAnalyzer(debug=debug)
        # one shard keeps MC estimates independent of the sweep's thread count
        self._simulator = MonteCarloSimulator(workers=1, debug=debug)

    @property
    def analyzer(self) -> SecrecyAnalyzer:
        return self._analyzer

    def _map(self, fn, items, workers):
        if workers <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map keeps submission order
            return list(pool.map(fn, items))

    def _mcScenario(self, spec: SweepSpec, s: SecrecyScenario) -> SecrecyScenario:
        if spec.mc_target_rate is None:
            return s
        return replace(s, target_rate=spec.mc_target_rate)

    def _mc(self, spec: SweepSpec, s: SecrecyScenario, n_samples: int, seed: int) -> McEstimate:
        s = self._mcScenario(spec, s)
        if spec.mc_metric == "sop":
            return self._simulator.mc_sop(s, n_samples, seed)
        return self._simulator.mc_asr(s, n_samples, seed)

    ##################################################
    #                     Sweep                      #
    ##################################################
    def _row(self, spec: SweepSpec, group: SweepGroup, db: float, asym, n_samples, seed) -> dict:
        avg_snr = toLinear(db)
        s = group.scenario.with_main_snr(avg_snr)
        row = {"modulation": group.modulation, "eve": group.eve, "snr_db": db}
        if spec.wants(*ASR_OUTPUTS):
            r = self._analyzer.asr(s)
            row.update(asr_bits=r.asr, i_lim_bits=r.i_lim, i_con_bits=r.i_lim - r.asr)
        if spec.wants(*SOP_OUTPUTS):
            o = self._analyzer.sop(s)
            row.update(sop=o.sop, limit_sop=o.limit_sop, p_con=o.sop - o.limit_sop)
        a_asr, a_sop = asym
        if a_asr is not None:
            row["asym_asr_bits"] = float(a_asr.predict(avg_snr))
        if a_sop is not None:
            row["asym_sop"] = float(a_sop.predict(avg_snr))
        if spec.wants("mc"):
            e = self._mc(spec, s, n_samples, seed)
            row.update(mc_value=e.value, mc_stderr=e.std_error)
        if spec.wants("gaussian_baseline"):
            g = self._simulator.mc_gaussian_baseline(self._mcScenario(spec, s), spec.mc_metric, n_samples, seed)
            row.update(gauss_value=g.value, gauss_stderr=g.std_error)
        for key, value in row.items():
            if isinstance(value, float) and not math.isfinite(value):
                raise NumericalError("{} is not finite at {} dB ({}, eve {})".format(key, db, group.modulation,
                                                                                     group.eve))
        self._logger.debug("%s", row)
        return row

    def _asymptotes(self, spec: SweepSpec, group: SweepGroup, columns):
        a_asr = self._analyzer.asymptotic_asr(group.scenario) if "asym_asr_bits" in columns else None
        a_sop = self._analyzer.asymptotic_sop(group.scenario) if "asym_sop" in columns else None
        return a_asr, a_sop

    def sweep(self, spec: SweepSpec, n_samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> List[dict]:
        """
        Evaluates every (group, point) pair. Rows follow the group order, then
        the points order, whatever order the threads finish in.
        """
        columns = spec.columns()
        rows = []
        for group in spec.groups:
            asym = self._asymptotes(spec, group, columns)
            rows += self._map(lambda db: self._row(spec, group, db, asym, n_samples, seed),
                              spec.points_db, spec.workers)
            self._logger.info("%s, eve %s: %d point(s) done", group.modulation, group.eve, len(spec.points_db))
        return [{c: row.get(c) for c in columns} for row in rows]

    def run_sweep(self, spec: SweepSpec, out_path, fmt: str = "csv",
                  n_samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> List[dict]:
        rows = self.sweep(spec, n_samples, seed)
        meta = {"seed": seed, "samples": n_samples if spec.wants("mc", "gaussian_baseline") else None}
        write_table(out_path, spec.columns(), rows, spec.header, meta, fmt)
        self._logger.info("Wrote %d row(s) to %s", len(rows), out_path)
        return rows

    def asymptotes(self, spec: SweepSpec) -> List[dict]:
        """
        High-SNR coefficients of every group; they do not depend on the main
        channel's average SNR. Outage columns are left empty without a target rate.
        """
        rows = []
        for group in spec.groups:
            a = self._analyzer.asymptotics(group.scenario)
            rows.append({"modulation": group.modulation, "eve": group.eve, "g_d": a.g_d,
                         "i_lim_bits": a.asr.i_lim, "g_a_asr": a.g_a_asr,
                         "limit_sop": a.sop.limit_sop if a.sop is not None else None,
                         "g_a_sop": a.g_a_sop if a.sop is not None else None,
                         "h_m": a.sop.h_m if a.sop is not None else None})
        return rows

    ##################################################
    #                  Validation                    #
    ##################################################
    def _validatePoint(self, spec: SweepSpec, group: SweepGroup, db: float, n_samples, seed) -> ValidationPoint:
        s = group.scenario.with_main_snr(toLinear(db))
        if spec.mc_metric == "sop":
            quad = self._analyzer.sop(s).sop
        else:
            quad = self._analyzer.asr(s).asr
        e = self._mc(spec, s, n_samples, seed)
        # an estimate without spread is compared at the 1/n resolution
        z = (e.value - quad) / max(e.std_error, 1.0 / e.n_samples)
        point = ValidationPoint(modulation=group.modulation, eve=group.eve, snr_db=db, metric=spec.mc_metric,
                                quadrature=quad, mc_value=e.value, mc_stderr=e.std_error, z=z)
        self._logger.debug("%s", point)
        return point

    def validate(self, spec: SweepSpec, n_samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> ValidationReport:
        """
        Compares the quadrature metric with its Monte Carlo estimate at every
        sweep point. The report passes iff every |z| <= 3.
        """
        if spec.mc_metric == "sop" and any(g.scenario.target_rate is None for g in spec.groups):
            raise ConfigError("SOP validation needs [constellation] target_rate")
        points = []
        for group in spec.groups:
            points += self._map(lambda db: self._validatePoint(spec, group, db, n_samples, seed),
                                spec.points_db, spec.workers)
        report = ValidationReport(points=points, n_samples=n_samples, seed=seed)
        self._logger.info("Validation %s: %d point(s), max |z| = %.3f", report.summary, len(points),
                          report.max_abs_z)
        return report

    def write_report(self, report: ValidationReport, spec: SweepSpec, out_path, fmt: str = "csv"):
        rows = [asdict(p) for p in report.points]
        meta = {"seed": report.seed, "samples": report.n_samples, "result": report.summary,
                "max_abs_z": report.max_abs_z}
        write_table(out_path, REPORT_COLUMNS, rows, spec.header, meta, fmt)


def _csvText(columns, rows, header, meta) -> str:
    buf = io.StringIO()
    buf.write("# config: {}\n".format(json.dumps(header, sort_keys=True)))
    for key, value in meta.items():
        if value is not None:
            buf.write("# {}: {}\n".format(key, formatFloat(value) if isinstance(value, float) else value))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([formatFloat(row[c]) if isinstance(row[c], float) else row[c] for c in columns])
    return buf.getvalue()


def _jsonText(columns, rows, header, meta) -> str:
    doc = {"config": header}
    doc.update({k: v for k, v in meta.items() if v is not None})
    doc["columns"] = list(columns)
    doc["rows"] = [{c: row[c] for c in columns} for row in rows]
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render_table(columns, rows, header, meta, fmt="csv") -> str:
    """
    Rows as CSV, preceded by `#` lines recording the resolved config and the
    run metadata, or as a JSON document with the same content.
    """
    if fmt == "csv":
        return _csvText(columns, rows, header, meta)
    if fmt == "json":
        return _jsonText(columns, rows, header, meta)
    raise ConfigError("Unknown output format '{}', expected csv or json".format(fmt))


def write_table(out_path, columns, rows, header, meta, fmt="csv"):
    """
    Writes the rendered table to out_path, or to stdout when out_path is None
    """
    text = render_table(columns, rows, header, meta, fmt)
    if out_path is None:
        sys.stdout.write(text)
        return
    out_path = Path(out_path)
    if out_path.parent and not out_path.parent.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text)
