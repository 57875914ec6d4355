"""Execute an :class:`ExperimentConfig` and collect a tabular report."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import __version__
from .._kernels import BACKEND
from ..ensembles import EnsembleSpec, dump_matrix_csv, hadamard, masked_normalized, sample, substream
from ..freelimits import MPLaw, mp_moment_closed
from ..masks import density
from ..moments import (LabelModel, covariance_freeness_test, estimate_covariance_moment, estimate_word_moment,
                       freeness_test, tolerance, word_limit)
from ..spectra import PSD_CLAMP, histogram, ks_distance, spectral_sample
from .config import ExperimentConfig
from .verify import run_criteria

log = logging.getLogger("maskfree")

MOMENT_COLUMNS = ["word", "n", "trials", "estimate", "std_error", "limit", "gap", "pass", "mask", "density",
                  "p", "tolerance"]
ESD_COLUMNS = ["p", "n", "y", "density", "ks_distance", "sample", "zero_mass", "pass"]
VERIFY_COLUMNS = ["criterion", "name", "pass", "detail"]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buf.getvalue()


@dataclass
class Table:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def csv(self) -> str:
        return to_csv(self.columns, self.rows)


ESD_NOTE = ("ks_distance is measured on single samples as a convergence proxy; "
            "the limit law describes the expected spectral distribution")


@dataclass
class RunReport:
    scenario: str
    seed: int
    table: Table
    extra: dict[str, Table] = field(default_factory=dict)
    wall_time: float = 0.0
    timestamp: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.get("pass") is not False for row in self.table.rows)

    def to_csv(self) -> str:
        return self.table.csv()

    def to_json(self) -> str:
        doc = {
            "version": __version__,
            "backend": BACKEND,
            "scenario": self.scenario,
            "seed": self.seed,
            "timestamp": self.timestamp,
            "wall_time_seconds": round(self.wall_time, 3),
            "passed": self.passed,
            "columns": self.table.columns,
            "rows": [{c: _json_value(row.get(c)) for c in self.table.columns} for row in self.table.rows],
        }
        if self.notes:
            doc["notes"] = self.notes
        return json.dumps(doc, indent=2) + "\n"

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in [("report.csv", self.to_csv()), ("report.json", self.to_json())] + [
            (f"{name}.csv", table.csv()) for name, table in self.extra.items()
        ]:
            path = out / name
            path.write_text(text)
            written.append(path)
        return written


def _json_value(value):
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


def _moment_row(word: str, est, limit: float, cfg: ExperimentConfig, mask: str, dens: float, p: int) -> dict:
    tol = tolerance(est.std_error, est.n, cfg.sigmas, cfg.bias_constant)
    gap = est.gap(limit)
    return {"word": word, "n": est.n, "trials": est.trials, "estimate": est.mean, "std_error": est.std_error,
            "limit": limit, "gap": gap, "pass": gap <= tol, "mask": mask, "density": dens, "p": p,
            "tolerance": tol}


def _moment_sweep(cfg: ExperimentConfig, threads) -> Table:
    table = Table(MOMENT_COLUMNS)
    for mspec in cfg.masks:
        for n in cfg.sizes:
            D = mspec.build(n, n)
            models = {1: LabelModel(cfg.ensemble.resized(n), D)}
            for word in cfg.words:
                log.info("moment-sweep %s n=%d word=%s", mspec.label(), n, word)
                est = estimate_word_moment(models, word, n, cfg.trials, cfg.seed, threads)
                table.rows.append(_moment_row(str(word), est, word_limit(models, word), cfg, mspec.label(),
                                              density(D), n))
    return table


def _covariance_sweep(cfg: ExperimentConfig, threads) -> Table:
    table = Table(MOMENT_COLUMNS)
    for mspec in cfg.masks:
        for p, n in cfg.sizes:
            D = mspec.build(p, n)
            spec = cfg.ensemble.resized(p, n)
            for k in cfg.powers:
                log.info("covariance-sweep %s p=%d n=%d k=%d", mspec.label(), p, n, k)
                est = estimate_covariance_moment(D, spec, k, cfg.trials, cfg.seed, threads)
                table.rows.append(_moment_row(f"Xbar^{k}", est, mp_moment_closed(k, p / n), cfg, mspec.label(),
                                              density(D), p))
    return table


def _rect(spec: EnsembleSpec, p: int, n: int) -> EnsembleSpec:
    return EnsembleSpec("rect_elliptic", spec.rho, spec.dist, p, n)


def _freeness(cfg: ExperimentConfig, threads) -> Table:
    table = Table(MOMENT_COLUMNS)
    mask_label = ";".join(f"{lab}:{m.label()}" for lab, (_, m) in sorted(cfg.labels.items()))
    for n in cfg.sizes:
        models = {lab: LabelModel(spec.resized(n), m.build(n, n)) for lab, (spec, m) in cfg.labels.items()}
        dens = float(np.mean([density(m.mask) for m in models.values()]))
        log.info("freeness n=%d", n)
        for row in freeness_test(models, cfg.words, n, cfg.trials, cfg.seed, sigmas=cfg.sigmas,
                                 bias_constant=cfg.bias_constant, threads=threads):
            table.rows.append(_moment_row(row.word, row.estimate, row.limit, cfg, mask_label, dens, n))
    for p, n in cfg.covariance_sizes:
        models = {lab: LabelModel(_rect(spec, p, n), m.build(p, n)) for lab, (spec, m) in cfg.labels.items()}
        dens = float(np.mean([density(m.mask) for m in models.values()]))
        log.info("covariance freeness p=%d n=%d", p, n)
        for row in covariance_freeness_test(models, cfg.covariance_words, cfg.trials, cfg.seed,
                                            sigmas=cfg.sigmas, bias_constant=cfg.bias_constant, threads=threads):
            table.rows.append(_moment_row(row.word, row.estimate, row.limit, cfg, mask_label, dens, p))
    return table


def _esd(cfg: ExperimentConfig) -> tuple[Table, dict[str, Table]]:
    table = Table(ESD_COLUMNS)
    eig = Table(["p", "n", "sample", "index", "eigenvalue"])
    hist = Table(["p", "n", "sample", "bin_left", "bin_right", "count", "mp_density_at_mid"])
    summary = Table(["p", "n", "y", "density", "ks_distance"])
    mspec = cfg.masks[0]
    for p, n in cfg.sizes:
        D = mspec.build(p, n)
        law = MPLaw(p / n)
        spec = cfg.ensemble.resized(p, n)
        for s in range(cfg.samples):
            log.info("esd p=%d n=%d sample=%d", p, n, s)
            sp = spectral_sample(D, sample(spec, substream(cfg.seed, s, 1)))
            ks = ks_distance(sp, law)
            zero_mass = float(np.mean(np.abs(sp.eigenvalues) <= PSD_CLAMP))
            passed = None if cfg.ks_max is None else ks <= cfg.ks_max
            table.rows.append({"p": p, "n": n, "y": p / n, "density": density(D), "ks_distance": ks,
                               "sample": s, "zero_mass": zero_mass, "pass": passed})
            summary.rows.append({"p": p, "n": n, "y": p / n, "density": density(D), "ks_distance": ks})
            eig.rows.extend({"p": p, "n": n, "sample": s, "index": i, "eigenvalue": float(v)}
                            for i, v in enumerate(sp.eigenvalues))
            hist.rows.extend({"p": p, "n": n, "sample": s, "bin_left": lo, "bin_right": hi, "count": c,
                              "mp_density_at_mid": f} for lo, hi, c, f in histogram(sp, law, cfg.bins))
    return table, {"eigenvalues": eig, "histogram": hist, "summary": summary}


def _verify(cfg: ExperimentConfig) -> Table:
    table = Table(VERIFY_COLUMNS)
    for res in run_criteria(cfg.criteria):
        log.info("%s", res.line())
        table.rows.append({"criterion": res.number, "name": res.name, "pass": res.passed, "detail": res.detail})
    return table


def dump_first_matrix(cfg: ExperimentConfig, path: str | Path) -> None:
    """Write trial 0, label 1 of the first case, exactly as the estimator sees it."""
    if cfg.scenario == "moment-sweep":
        n = cfg.sizes[0]
        D = cfg.masks[0].build(n, n)
        X = sample(cfg.ensemble.resized(n), substream(cfg.seed, 0, 1))
        dump_matrix_csv(masked_normalized(D, X).values, path)
    elif cfg.scenario == "covariance-sweep":
        p, n = cfg.sizes[0]
        D = cfg.masks[0].build(p, n)
        X = sample(cfg.ensemble.resized(p, n), substream(cfg.seed, 0, 1))
        dump_matrix_csv(hadamard(D, X).values, path)
    else:
        raise ValueError(f"matrix dumps are available for moment and covariance sweeps, not {cfg.scenario}")


def run(cfg: ExperimentConfig, threads: int | None = None) -> RunReport:
    start = time.perf_counter()
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    extra: dict[str, Table] = {}
    if cfg.scenario == "moment-sweep":
        table = _moment_sweep(cfg, threads)
    elif cfg.scenario == "covariance-sweep":
        table = _covariance_sweep(cfg, threads)
    elif cfg.scenario == "freeness":
        table = _freeness(cfg, threads)
    elif cfg.scenario == "esd":
        table, extra = _esd(cfg)
    else:
        table = _verify(cfg)
    notes = [ESD_NOTE] if cfg.scenario == "esd" else []
    return RunReport(cfg.scenario, cfg.seed, table, extra, time.perf_counter() - start, stamp, notes)
