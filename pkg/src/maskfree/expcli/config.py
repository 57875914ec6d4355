"""Strict JSON experiment configs.

Unknown keys are rejected and every error names the line of the offending
key, so a typo in a long config is easy to find.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..ensembles import EnsembleSpec
from ..errors import ConfigurationError, SizeLimitError, WordParseError
from ..freelimits import Word, parse_word
from ..masks import GENERATORS, MAX_DIM, MaskMatrix, make_mask
from ..moments import BIAS_CONSTANT, SIGMAS

SCENARIOS = ("moment-sweep", "covariance-sweep", "freeness", "esd", "verify")
COMMON = {"scenario", "seed", "trials", "tolerance"}
ALLOWED = {
    "moment-sweep": COMMON | {"ensemble", "masks", "sizes", "words"},
    "covariance-sweep": COMMON | {"ensemble", "masks", "sizes", "powers"},
    "freeness": COMMON | {"labels", "sizes", "words", "covariance_sizes", "covariance_words"},
    "esd": {"scenario", "seed", "ensemble", "mask", "sizes", "samples", "bins", "ks_max"},
    "verify": {"scenario", "criteria"},
}
REQUIRED = {
    "moment-sweep": {"ensemble", "masks", "sizes", "words", "trials"},
    "covariance-sweep": {"ensemble", "masks", "sizes", "powers", "trials"},
    "freeness": {"labels", "sizes", "words", "trials"},
    "esd": {"ensemble", "mask", "sizes"},
    "verify": set(),
}
MAX_TRIALS = 100_000


class ConfigError(ConfigurationError):
    """Invalid config; ``line`` is 1-based or ``None`` when unknown."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class MaskSpec:
    generator: str
    params: dict = field(default_factory=dict)

    def build(self, p: int, n: int) -> MaskMatrix:
        return make_mask(self.generator, p, n, **self.params)

    def label(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.generator}({args})" if args else self.generator


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    seed: int = 0
    trials: int = 0
    sigmas: float = SIGMAS
    bias_constant: float = BIAS_CONSTANT
    ensemble: EnsembleSpec | None = None
    masks: tuple[MaskSpec, ...] = ()
    sizes: tuple = ()
    words: tuple[Word, ...] = ()
    powers: tuple[int, ...] = ()
    labels: dict = field(default_factory=dict)
    covariance_sizes: tuple[tuple[int, int], ...] = ()
    covariance_words: tuple[tuple[int, ...], ...] = ()
    samples: int = 1
    bins: int = 60
    ks_max: float | None = None
    criteria: tuple[int, ...] | None = None

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed)


class _Locator:
    """Maps keys to source lines by scanning the raw text."""

    def __init__(self, text: str):
        self.text = text

    def line(self, key: str) -> int | None:
        m = re.search(r'"' + re.escape(key) + r'"\s*:', self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None

    def fail(self, key: str, message: str):
        raise ConfigError(message, self.line(key))


def _int(loc: _Locator, key: str, value, lo: int = 0, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        loc.fail(key, f"{key!r} must be an integer, got {value!r}")
    if value < lo or (hi is not None and value > hi):
        loc.fail(key, f"{key!r} must lie in [{lo}, {hi if hi is not None else 'inf'}], got {value}")
    return value


def _number(loc: _Locator, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        loc.fail(key, f"{key!r} must be a number, got {value!r}")
    return float(value)


def _list(loc: _Locator, key: str, value) -> list:
    if not isinstance(value, list) or not value:
        loc.fail(key, f"{key!r} must be a non-empty list")
    return value


def _check_keys(loc: _Locator, where: str, obj, allowed: set, required: set = frozenset()) -> dict:
    if not isinstance(obj, dict):
        loc.fail(where, f"{where!r} must be an object")
    for key in obj:
        if key not in allowed:
            loc.fail(key, f"unknown key {key!r} in {where}; allowed: {', '.join(sorted(allowed))}")
    for key in sorted(required - set(obj)):
        raise ConfigError(f"missing required key {key!r} in {where}", loc.line(where))
    return obj


def _ensemble(loc: _Locator, key: str, obj) -> EnsembleSpec:
    obj = _check_keys(loc, key, obj, {"kind", "rho", "dist"}, {"kind"})
    rho = _number(loc, "rho", obj.get("rho", 0.0))
    try:
        return EnsembleSpec(obj["kind"], rho, obj.get("dist", "gaussian"))
    except ConfigurationError as exc:
        loc.fail(key, str(exc))


def _mask(loc: _Locator, key: str, obj) -> MaskSpec:
    obj = _check_keys(loc, key, obj, {"generator", "params"}, {"generator"})
    gen = obj["generator"]
    if gen not in GENERATORS:
        loc.fail("generator", f"unknown mask generator {gen!r}; choose from {sorted(GENERATORS)}")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        loc.fail("params", "'params' must be an object")
    return MaskSpec(gen, dict(params))


def _size(loc: _Locator, key: str, value, rect: bool):
    if rect:
        if not (isinstance(value, list) and len(value) == 2):
            loc.fail(key, f"{key!r} entries must be [p, n] pairs, got {value!r}")
        p, n = (_int(loc, key, v, 1) for v in value)
        dims = (p, n)
    else:
        dims = (_int(loc, key, value, 1),) * 2
    if max(dims) > MAX_DIM:
        raise SizeLimitError(f"line {loc.line(key)}: dimension {max(dims)} exceeds {MAX_DIM}")
    return dims if rect else dims[0]


def _word(loc: _Locator, key: str, text) -> Word:
    if not isinstance(text, str):
        loc.fail(key, f"words must be strings like \"1,1*\", got {text!r}")
    try:
        return parse_word(text)
    except WordParseError as exc:
        loc.fail(key, f"word {text!r}: {exc}")


def _probe_masks(loc: _Locator, key: str, masks, dims) -> None:
    # build each mask once so bad parameters fail at load time
    for spec in masks:
        for p, n in dims:
            try:
                spec.build(p, n)
            except SizeLimitError:
                raise
            except ConfigurationError as exc:
                loc.fail(key, f"mask {spec.label()} at p={p}, n={n}: {exc}")


def parse_config(text: str) -> ExperimentConfig:
    loc = _Locator(text)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", 1)
    scenario = raw.get("scenario")
    if scenario not in SCENARIOS:
        loc.fail("scenario", f"'scenario' must be one of {', '.join(SCENARIOS)}, got {scenario!r}")
    _check_keys(loc, "top level", raw, ALLOWED[scenario], REQUIRED[scenario])
    out: dict = {"scenario": scenario, "seed": _int(loc, "seed", raw.get("seed", 0))}
    if "trials" in raw:
        out["trials"] = _int(loc, "trials", raw["trials"], 2, MAX_TRIALS)
    if "tolerance" in raw:
        tol = _check_keys(loc, "tolerance", raw["tolerance"], {"sigmas", "bias_constant"})
        out["sigmas"] = _number(loc, "sigmas", tol.get("sigmas", SIGMAS))
        out["bias_constant"] = _number(loc, "bias_constant", tol.get("bias_constant", BIAS_CONSTANT))
    rect = scenario in ("covariance-sweep", "esd")
    if "sizes" in raw:
        out["sizes"] = tuple(_size(loc, "sizes", v, rect) for v in _list(loc, "sizes", raw["sizes"]))
    dims = [s if rect else (s, s) for s in out.get("sizes", ())]
    if "ensemble" in raw:
        out["ensemble"] = _ensemble(loc, "ensemble", raw["ensemble"])
    if "masks" in raw:
        out["masks"] = tuple(_mask(loc, "masks", m) for m in _list(loc, "masks", raw["masks"]))
        _probe_masks(loc, "masks", out["masks"], dims)
    if "mask" in raw:
        out["masks"] = (_mask(loc, "mask", raw["mask"]),)
        _probe_masks(loc, "mask", out["masks"], dims)
    if "words" in raw:
        out["words"] = tuple(_word(loc, "words", w) for w in _list(loc, "words", raw["words"]))
        if scenario == "moment-sweep" and any(set(w.labels) != {1} for w in out["words"]):
            loc.fail("words", "moment-sweep words use label 1 only; use the freeness scenario for mixed words")
    if "powers" in raw:
        out["powers"] = tuple(_int(loc, "powers", k, 1, 6) for k in _list(loc, "powers", raw["powers"]))
    if scenario == "freeness":
        _freeness(loc, raw, out)
    if "samples" in raw:
        out["samples"] = _int(loc, "samples", raw["samples"], 1, 1000)
    if "bins" in raw:
        out["bins"] = _int(loc, "bins", raw["bins"], 1, 10_000)
    if "ks_max" in raw:
        out["ks_max"] = _number(loc, "ks_max", raw["ks_max"])
    if "criteria" in raw:
        out["criteria"] = tuple(_int(loc, "criteria", c, 1, 10) for c in _list(loc, "criteria", raw["criteria"]))
    if rect and out["ensemble"].kind != "rect_elliptic":
        loc.fail("ensemble", f"{scenario} runs need kind 'rect_elliptic'")
    return ExperimentConfig(**out)


def _freeness(loc: _Locator, raw: dict, out: dict) -> None:
    labels = raw["labels"]
    if not isinstance(labels, dict) or not labels:
        loc.fail("labels", "'labels' must be a non-empty object keyed by label number")
    models = {}
    for key, entry in labels.items():
        if not key.isdigit() or int(key) < 1:
            loc.fail(key, f"label keys must be positive integers, got {key!r}")
        entry = _check_keys(loc, key, entry, {"ensemble", "mask"}, {"ensemble", "mask"})
        models[int(key)] = (_ensemble(loc, key, entry["ensemble"]), _mask(loc, key, entry["mask"]))
    out["labels"] = models
    sq = [(n, n) for n in out.get("sizes", ())]
    for lab, (_, mask) in models.items():
        _probe_masks(loc, str(lab), [mask], sq)
    for word in out.get("words", ()):
        missing = set(word.labels) - set(models)
        if missing:
            loc.fail("words", f"word {word} uses unconfigured labels {sorted(missing)}")
    if "covariance_words" in raw:
        cws = []
        for w in _list(loc, "covariance_words", raw["covariance_words"]):
            if not isinstance(w, list) or not w or not all(isinstance(t, int) and not isinstance(t, bool) for t in w):
                loc.fail("covariance_words", f"covariance words are lists of labels, got {w!r}")
            if set(w) - set(models):
                loc.fail("covariance_words", f"covariance word {w} uses unconfigured labels")
            if len(w) > 6:
                loc.fail("covariance_words", f"covariance words have at most 6 factors, got {len(w)}")
            cws.append(tuple(w))
        out["covariance_words"] = tuple(cws)
        if "covariance_sizes" not in raw:
            loc.fail("covariance_words", "'covariance_words' needs 'covariance_sizes'")
    if "covariance_sizes" in raw:
        out["covariance_sizes"] = tuple(_size(loc, "covariance_sizes", v, True)
                                        for v in _list(loc, "covariance_sizes", raw["covariance_sizes"]))
        for lab, (_, mask) in models.items():
            _probe_masks(loc, str(lab), [mask], out["covariance_sizes"])


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
