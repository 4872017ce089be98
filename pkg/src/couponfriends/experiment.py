"""Experiment configuration, presets, trial scheduling and result files."""
import csv
import io
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__, bounds, kernels
from .rng import GENERATOR, RngStream, check_seed, derive_seed
from .sim import DomainError, PhasePlan, StrategyId, run_trial
from .stats import Z95, SuccessSummary
from .variants import M_RULES, resolve_m_rule

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "trial_index",
    "completed",
    "missing_after_collection",
    "missing_final",
    "collectors_complete",
)
SUMMARY_KEYS = (
    "n", "m", "rc", "re", "strategy", "trials", "successes", "fraction",
    "wilson_low", "wilson_high", "seed", "generator", "version",
)
CHUNK = 1 << 15


class ConfigError(ValueError):
    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class OutputError(OSError):
    pass


# Round-count rules usable as r_c / r_e values in configs and presets.
RULES = {
    "no_exchange_ub": ("ceil(2 n ln mn)", bounds.rc_no_exchange_ub),
    "unlimited_ub": ("ceil(16 (n + n ln n / m))", bounds.rc_unlimited_ub),
    "main_ub": ("ceil(36 (n + n ln n / m))", bounds.rc_main_ub),
    "main_re_ub": ("ceil(6 m ln mn)", bounds.re_main_ub),
    "quarter_nlogn": ("floor(n ln n / 4)", bounds.quarter_nlogn),
    "quarter_nlog2m": ("floor(n log2 m / 4)", bounds.quarter_nlog2m),
}
CONFIG_PRESETS = tuple(RULES)
RULES.update({
    "zero": ("0", lambda n, m: 0),
    "ample_re": ("4 ceil(6 m ln mn)", lambda n, m: 4 * bounds.re_main_ub(n, m)),
    "few_total_samples": ("floor(n ln n / (4 m))", lambda n, m: math.floor(n * math.log(n) / (4 * m))),
    "re_logn_lb": ("floor(m log2 n / 8)", lambda n, m: math.floor(m * math.log2(n) / 8)),
    "re_logm_lb": ("floor(m log2 m / 16)", lambda n, m: math.floor(m * math.log2(m) / 16)),
    "re_thm2_lb": (
        "max(floor(m log2 n / 8), floor(m log2 m / 16))",
        lambda n, m: max(math.floor(m * math.log2(n) / 8), math.floor(m * math.log2(m) / 16)),
    ),
    "m": ("m", lambda n, m: m),
    "m_ln_m": ("ceil(m ln m)", lambda n, m: math.ceil(m * math.log(m))),
    "m_ln_n": ("ceil(m ln n)", lambda n, m: math.ceil(m * math.log(n))),
    "m_ln_mn": ("ceil(m ln mn)", lambda n, m: math.ceil(m * math.log(m * n))),
})


def resolve_rounds(value, n, m, name="r_c", allowed=CONFIG_PRESETS):
    """An explicit non-negative integer, or a rule name evaluated at (n, m)."""
    if isinstance(value, bool):
        raise ConfigError("must be an integer or preset name", name)
    if isinstance(value, (int, np.integer)):
        if value < 0:
            raise ConfigError("must be >= 0", name)
        return int(value)
    if isinstance(value, str):
        if value.isdigit():
            return int(value)
        if value not in allowed:
            raise ConfigError(f"unknown preset {value!r}; expected one of {list(allowed)}", name)
        return int(RULES[value][1](n, m))
    raise ConfigError("must be an integer or preset name", name)


@dataclass(frozen=True)
class Preset:
    name: str
    statement: str
    rc_rule: str
    re_rules: tuple
    strategy: StrategyId
    expected: str
    target_failure: Optional[str] = None

    def plans(self, n, m):
        rc = int(RULES[self.rc_rule][1](n, m))
        return [PhasePlan(rc, int(RULES[r][1](n, m)), self.strategy) for r in self.re_rules]

    def describe(self, n=None, m=None):
        out = {
            "name": self.name,
            "statement": self.statement,
            "r_c": RULES[self.rc_rule][0],
            "r_e": [RULES[r][0] for r in self.re_rules],
            "strategy": self.strategy.value,
            "expected": self.expected,
        }
        if self.target_failure:
            out["target_failure"] = self.target_failure
        if n is not None and m is not None:
            out["resolved"] = [{"r_c": p.r_c, "r_e": p.r_e} for p in self.plans(n, m)]
        return out


S2N = StrategyId.SURPLUS_TO_NEEDY


def preset_regimes():
    return [
        Preset("no-exchange-ub", "no exchanges: r_c = O(n log mn) suffices",
               "no_exchange_ub", ("zero",), StrategyId.NULL,
               "succeeds w.h.p.", "1/(mn)"),
        Preset("no-exchange-lb", "no exchanges: r_c = Omega(n log mn) is necessary",
               "quarter_nlog2m", ("zero",), StrategyId.NULL,
               "fails with constant probability (success <= exp(-sqrt m))"),
        Preset("unlimited-ub", "unlimited exchanges: r_c = O(n + n log n / m) suffices",
               "unlimited_ub", ("ample_re",), S2N,
               "succeeds w.h.p. once exchanges are plentiful", "1/n"),
        Preset("unlimited-lb", "unlimited exchanges: r_c = Omega(n + n log n / m) is necessary",
               "few_total_samples", ("ample_re",), S2N,
               "fails w.h.p. (some coupon never sampled)"),
        Preset("thm1-ub", "r_c >= 36(n + n ln n / m): r_e = O(m log mn) suffices",
               "main_ub", ("main_re_ub",), S2N,
               "succeeds w.h.p.", "1/(mn)"),
        Preset("re-logn-lb", "r_c <= n ln n / 4: r_e = Omega(m log n) is necessary",
               "quarter_nlogn", ("re_logn_lb",), S2N,
               "failure exceeds 1/n"),
        Preset("re-logm-lb", "r_c = n ln n - omega(n): r_e = Omega(m log m) is necessary",
               "quarter_nlogn", ("re_logm_lb",), S2N,
               "fails with constant probability (m >= 8)"),
        Preset("thm2-lb", "r_c <= n ln n / 4: r_e = Omega(m log mn) is necessary",
               "quarter_nlogn", ("re_thm2_lb",), S2N,
               "failure exceeds 1/n"),
        Preset("conjecture-probe", "r_c = O(n + n ln n / m): is r_e = Omega(m log mn) necessary?",
               "main_ub", ("m", "m_ln_m", "m_ln_n", "m_ln_mn"), S2N,
               "exploratory"),
    ]


def get_preset(name):
    for p in preset_regimes():
        if p.name == name:
            return p
    raise ConfigError(f"unknown preset {name!r}", "preset")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    m: int
    r_c: int
    r_e: int
    strategy: StrategyId
    trials: int
    master_seed: int
    rc_source: str = "explicit"
    re_source: str = "explicit"
    trace: bool = False
    out: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    target_failure: Optional[float] = None
    z: float = Z95

    @property
    def plan(self):
        return PhasePlan(self.r_c, self.r_e, self.strategy)


_CONFIG_KEYS = {"n", "m", "r_c", "r_e", "strategy", "trials", "seed", "trace",
                "out", "format", "workers", "target_failure", "z"}


def _int_field(doc, key, minimum, required=True, default=None):
    if key not in doc:
        if required:
            raise ConfigError("missing required field", key)
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"must be an integer, got {v!r}", key)
    if v < minimum:
        raise ConfigError(f"must be >= {minimum}, got {v}", key)
    return v


def build_config(doc):
    """Validates a config mapping and resolves round-count presets."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError("unknown field", sorted(unknown)[0])
    n = _int_field(doc, "n", 1)
    m = _int_field(doc, "m", 1)
    trials = _int_field(doc, "trials", 1)
    seed = _int_field(doc, "seed", 0)
    if seed >= 1 << 64:
        raise ConfigError("must fit in 64 bits", "seed")
    workers = _int_field(doc, "workers", 1, required=False, default=1)
    for key in ("r_c", "r_e"):
        if key not in doc:
            raise ConfigError("missing required field", key)
    r_c = resolve_rounds(doc["r_c"], n, m, "r_c")
    r_e = resolve_rounds(doc["r_e"], n, m, "r_e")
    try:
        strategy = StrategyId.parse(doc.get("strategy", S2N.value))
    except ValueError as exc:
        raise ConfigError(str(exc), "strategy") from None
    if r_e > 0 and m < 2:
        raise ConfigError("r_e > 0 needs m >= 2 collectors", "r_e")
    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"must be 'csv' or 'json', got {fmt!r}", "format")
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("must be a path string", "out")
    trace = doc.get("trace", False)
    if not isinstance(trace, bool):
        raise ConfigError("must be true or false", "trace")
    tf = doc.get("target_failure")
    if tf is not None and (isinstance(tf, bool) or not isinstance(tf, (int, float)) or not 0 <= tf <= 1):
        raise ConfigError("must be a probability", "target_failure")
    z = doc.get("z", Z95)
    if isinstance(z, bool) or not isinstance(z, (int, float)) or z <= 0:
        raise ConfigError("must be a positive number", "z")
    return ExperimentConfig(
        n=n, m=m, r_c=r_c, r_e=r_e, strategy=strategy, trials=trials,
        master_seed=seed,
        rc_source=doc["r_c"] if isinstance(doc["r_c"], str) else "explicit",
        re_source=doc["r_e"] if isinstance(doc["r_e"], str) else "explicit",
        trace=trace, out=out, format=fmt, workers=workers,
        target_failure=tf, z=float(z),
    )


def parse_config(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return build_config(doc)


def atomic_write(path, text):
    """Writes ``text`` to ``path`` via a temp file in the same directory and a rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        tmp = None
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)


def _chunk(args):
    return kernels.run_trials(*args)


def simulate_trials(n, m, plan, trials, seed, workers=1):
    """Runs trials ``0..trials-1`` (trial ``i`` keyed ``(seed, i)``) and returns row arrays.

    Chunk boundaries and worker count never affect the result.
    """
    if plan.r_e > 0 and m < 2:
        raise DomainError("exchange needs m >= 2 collectors")
    seed = check_seed(seed)
    jobs = [
        (seed, lo, min(lo + CHUNK, trials), n, m, plan.r_c, plan.r_e, plan.strategy.code)
        for lo in range(0, trials, CHUNK)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk, jobs))
    else:
        parts = [_chunk(j) for j in jobs]
    names = CSV_COLUMNS[1:]
    rows = {"trial_index": np.arange(trials, dtype=np.int64)}
    for k, name in enumerate(names):
        rows[name] = np.concatenate([p[k] for p in parts]) if parts else np.zeros(0, np.int64)
    return rows


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: dict
    summary: SuccessSummary
    traces: Optional[list] = None

    def metadata(self):
        c = self.config
        meta = {
            "n": c.n,
            "m": c.m,
            "rc": c.r_c,
            "re": c.r_e,
            "rc_source": c.rc_source,
            "re_source": c.re_source,
            "strategy": c.strategy.value,
            "seed": c.master_seed,
            "generator": GENERATOR,
            "version": __version__,
        }
        if c.target_failure is not None:
            meta["target_failure"] = c.target_failure
        return meta

    def summary_dict(self):
        c = self.config
        s = self.summary.as_dict()
        out = {
            "n": c.n, "m": c.m, "rc": c.r_c, "re": c.r_e,
            "strategy": c.strategy.value,
            "trials": s["trials"], "successes": s["successes"], "fraction": s["fraction"],
            "wilson_low": s["wilson_low"], "wilson_high": s["wilson_high"],
            "seed": c.master_seed, "generator": GENERATOR, "version": __version__,
        }
        assert tuple(out) == SUMMARY_KEYS
        return out

    def to_json(self):
        return json.dumps(self.summary_dict(), indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        for k, v in self.metadata().items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        cols = [self.rows[name] for name in CSV_COLUMNS]
        for row in zip(*cols):
            w.writerow([int(x) for x in row])
        return buf.getvalue()

    def traces_jsonl(self):
        lines = []
        for i, trace in enumerate(self.traces or []):
            lines.append(json.dumps({
                "trial_index": i,
                "interactions": [rec.to_json() for rec in trace],
            }, separators=(",", ":")))
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self):
        c = self.config
        if c.out is None:
            return
        atomic_write(c.out, self.to_csv() if c.format == "csv" else self.to_json())
        if c.trace:
            atomic_write(c.out + ".trace.jsonl", self.traces_jsonl())


def run_experiment(config: ExperimentConfig, write=True):
    plan = config.plan
    traces = None
    if config.trace:
        # per-trial path; consumes each stream exactly as the batch kernel does
        traces = []
        cols = {name: np.zeros(config.trials, dtype=np.int64) for name in CSV_COLUMNS}
        for i in range(config.trials):
            o = run_trial(config.n, config.m, plan, RngStream(config.master_seed, i), True)
            cols["trial_index"][i] = i
            cols["completed"][i] = o.all_complete
            cols["missing_after_collection"][i] = o.missing_pairs_after_collection
            cols["missing_final"][i] = o.missing_pairs_final
            cols["collectors_complete"][i] = sum(o.per_collector_complete)
            traces.append(o.trace or [])
        rows = cols
    else:
        rows = simulate_trials(config.n, config.m, plan, config.trials,
                               config.master_seed, config.workers)
    summary = SuccessSummary(config.trials, int(np.sum(rows["completed"])), config.z)
    result = ExperimentResult(config, rows, summary, traces)
    if write:
        result.write()
    return result


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple
    rc: object
    re: object
    trials: int
    master_seed: int
    m_values: tuple = ()
    m_rule: Optional[str] = None
    m_const: int = 1
    rc_multipliers: tuple = (1.0,)
    re_multipliers: tuple = (1.0,)
    strategy: StrategyId = S2N
    workers: int = 1
    z: float = Z95

    def __post_init__(self):
        if not self.n_values:
            raise ConfigError("must be non-empty", "n_values")
        if not self.m_values and self.m_rule is None:
            raise ConfigError("give m_values or m_rule", "m_values")
        if self.m_rule is not None and self.m_rule not in M_RULES:
            raise ConfigError(f"unknown m rule; expected one of {list(M_RULES)}", "m_rule")
        if not self.rc_multipliers or not self.re_multipliers:
            raise ConfigError("multiplier lists must be non-empty", "rc_multipliers")

    def ms_for(self, n):
        if self.m_values:
            return list(self.m_values)
        return [resolve_m_rule(self.m_rule, n, self.m_const)]

    def cells(self):
        """(n, m, r_c, r_e) for every grid cell, in row order.

        Rounds are ``ceil(multiplier * base)`` where the base is an integer
        or a preset evaluated at the cell's (n, m).
        """
        out = []
        for n in self.n_values:
            for m in self.ms_for(n):
                rc0 = resolve_rounds(self.rc, n, m, "rc", allowed=tuple(RULES))
                re0 = resolve_rounds(self.re, n, m, "re", allowed=tuple(RULES))
                for a in self.rc_multipliers:
                    for b in self.re_multipliers:
                        r_c, r_e = math.ceil(a * rc0), math.ceil(b * re0)
                        if r_e > 0 and m < 2:
                            raise ConfigError(f"cell n={n}, m={m} has r_e > 0 with m < 2", "m_values")
                        out.append((n, m, r_c, r_e))
        return out


def parse_sweep(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("sweep spec must be a JSON object")
    known = {"n_values", "m_values", "m_rule", "m_const", "rc", "re", "rc_multipliers",
             "re_multipliers", "strategy", "trials", "seed", "workers", "z"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError("unknown field", sorted(unknown)[0])
    for key in ("n_values", "rc", "re", "trials", "seed"):
        if key not in doc:
            raise ConfigError("missing required field", key)
    try:
        strategy = StrategyId.parse(doc.get("strategy", S2N.value))
    except ValueError as exc:
        raise ConfigError(str(exc), "strategy") from None
    return SweepSpec(
        n_values=tuple(doc["n_values"]),
        m_values=tuple(doc.get("m_values", ())),
        m_rule=doc.get("m_rule"),
        m_const=doc.get("m_const", 1),
        rc=doc["rc"],
        re=doc["re"],
        rc_multipliers=tuple(doc.get("rc_multipliers", (1.0,))),
        re_multipliers=tuple(doc.get("re_multipliers", (1.0,))),
        strategy=strategy,
        trials=_int_field(doc, "trials", 1),
        master_seed=check_seed(_int_field(doc, "seed", 0)),
        workers=_int_field(doc, "workers", 1, required=False, default=1),
        z=doc.get("z", Z95),
    )


def cell_seed(master_seed, n, m, r_c, r_e):
    return derive_seed(master_seed, n, m, r_c, r_e)


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list = field(default_factory=list)
    m_resolved: dict = field(default_factory=dict)

    def metadata(self):
        s = self.spec
        return {
            "rc": s.rc, "re": s.re,
            "rc_multipliers": list(s.rc_multipliers),
            "re_multipliers": list(s.re_multipliers),
            "m_rule": s.m_rule,
            "m_resolved": {str(k): v for k, v in self.m_resolved.items()},
            "strategy": s.strategy.value,
            "master_seed": s.master_seed,
            "generator": GENERATOR,
            "version": __version__,
        }

    def to_json(self):
        return json.dumps({"metadata": self.metadata(), "cells": self.rows}, indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        for k, v in self.metadata().items():
            buf.write(f"# {k}: {json.dumps(v)}\n")
        w = csv.DictWriter(buf, fieldnames=SUMMARY_KEYS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow(row)
        return buf.getvalue()


def run_sweep(spec: SweepSpec, progress=None):
    """One summary row per grid cell; each cell runs as its own experiment
    with seed ``cell_seed(master_seed, n, m, r_c, r_e)``."""
    cells = spec.cells()
    log.info("sweep: %d cells x %d trials", len(cells), spec.trials)
    if progress:
        progress(f"sweep: {len(cells)} cells x {spec.trials} trials")
    result = SweepResult(spec)
    for n in spec.n_values:
        result.m_resolved[n] = spec.ms_for(n)
    for n, m, r_c, r_e in cells:
        cfg = ExperimentConfig(
            n=n, m=m, r_c=r_c, r_e=r_e, strategy=spec.strategy, trials=spec.trials,
            master_seed=cell_seed(spec.master_seed, n, m, r_c, r_e),
            workers=spec.workers, z=spec.z,
        )
        result.rows.append(run_experiment(cfg, write=False).summary_dict())
    return result
