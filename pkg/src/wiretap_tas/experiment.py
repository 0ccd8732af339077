"""Seeded Monte Carlo sweep over the number of RF chains.

Every trial draws one channel realization and runs all enabled methods on it
at every ``l_max`` in the sweep (paired comparison). Trial ``t`` uses the
stream ``SeedSequence(seed, spawn_key=(t, 0))`` for its channels; the random
baseline at a given ``l_max`` uses ``spawn_key=(t, 1, l_max)``.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .model import SystemParams, WiretapError, generate_channels
from .selector import (
    EXHAUSTIVE_LIMIT,
    SelectorConfig,
    run_exhaustive,
    run_random,
    run_stepwise,
    truncate_trace,
)

METHODS = ("stepwise_stc", "stepwise_no_stc", "random", "exhaustive")
CSV_HEADER = ("method", "l_max", "mean_rate_bits", "stderr_bits",
              "mean_selected_l", "mean_power", "trials")
FIG1_SWEEP = (10, 20, 30, 40, 50, 60, 64)

CONFIG_KEYS = ("m", "k", "n", "p_max", "sigma2_main", "sigma2_eve", "trials",
               "seed", "lmax_sweep", "methods", "weights", "out")


class ConfigError(WiretapError):
    """Malformed or inconsistent experiment configuration."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams
    trials: int = 1000
    master_seed: int = 0
    lmax_sweep: tuple = FIG1_SWEEP
    methods: tuple = ("stepwise_stc", "stepwise_no_stc", "random")
    output_path: str = "results.csv"
    selector: SelectorConfig = field(default_factory=SelectorConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials", "must be at least 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("seed", "must be a nonnegative 64-bit integer")
        m = self.params.m_antennas
        for l in self.lmax_sweep:
            if not 1 <= l <= m:
                raise ConfigError("lmax_sweep", f"value {l} outside [1, {m}]")
        for meth in self.methods:
            if meth not in METHODS:
                raise ConfigError("methods", f"unknown method {meth!r}")
        if "exhaustive" in self.methods and self.lmax_sweep:
            total = sum(math.comb(m, s) for s in range(1, max(self.lmax_sweep) + 1))
            if total > EXHAUSTIVE_LIMIT:
                raise ConfigError(
                    "methods", f"exhaustive search needs {total} subsets, "
                               f"limit is {EXHAUSTIVE_LIMIT}")


@dataclass(frozen=True)
class TrialOutcome:
    rate: float
    selected_l: int
    power: float


@dataclass(frozen=True)
class CellStats:
    mean_rate: float
    stderr: float
    mean_selected_l: float
    mean_power: float
    trials: int


@dataclass
class AggregateResult:
    cells: dict
    # per-trial outcomes by (method, l_max), kept only when requested
    per_trial: dict | None = None


def _parse_list(key, text, conv):
    try:
        return tuple(conv(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None


def parse_config(text):
    """Parse ``key = value`` lines (``#`` starts a comment) into a dict."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown key")
        if key in raw:
            raise ConfigError(key, "given twice")
        raw[key] = value
    return raw


def build_config(raw, **overrides):
    """ExperimentConfig from parsed keys; ``overrides`` replace raw values."""
    raw = dict(raw)
    raw.update({k: str(v) for k, v in overrides.items() if v is not None})

    def get(key, conv, default):
        if key not in raw:
            return default
        try:
            return conv(raw[key])
        except ValueError:
            raise ConfigError(key, f"cannot parse {raw[key]!r}") from None

    m = get("m", int, 64)
    k = get("k", int, 4)
    n = get("n", int, 8)
    p_max = get("p_max", float, 1.0)
    s2m = get("sigma2_main", float, 0.1)
    s2e = get("sigma2_eve", float, 0.1)
    for key, value in (("m", m), ("k", k), ("n", n)):
        if value < 1:
            raise ConfigError(key, "must be at least 1")
    for key, value in (("p_max", p_max), ("sigma2_main", s2m), ("sigma2_eve", s2e)):
        if not value > 0:
            raise ConfigError(key, "must be positive")
    sweep = _parse_list("lmax_sweep", raw["lmax_sweep"], int) \
        if "lmax_sweep" in raw else tuple(l for l in FIG1_SWEEP if l <= m)
    weights = raw.get("weights", "uniform").strip()
    if weights == "uniform":
        weights = None
    else:
        weights = _parse_list("weights", weights, float)
        if len(weights) != k or any(not w >= 0 for w in weights):
            raise ConfigError("weights", f"need {k} nonnegative values")
    params = SystemParams(m_antennas=m, k_users=k, n_eve=n, l_max=m, p_max=p_max,
                          sigma2_main=s2m, sigma2_eve=s2e, weights=weights)
    methods = _parse_list("methods", raw["methods"], str) if "methods" in raw \
        else ("stepwise_stc", "stepwise_no_stc", "random")
    return ExperimentConfig(
        params=params,
        trials=get("trials", int, 1000),
        master_seed=get("seed", int, 0),
        lmax_sweep=tuple(sorted(set(sweep))),
        methods=tuple(methods),
        output_path=raw.get("out", "results.csv"),
    )


def load_config(path, **overrides):
    with open(path) as fh:
        return build_config(parse_config(fh.read()), **overrides)


def channel_rng(master_seed, trial):
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(trial, 0)))


def random_rng(master_seed, trial, l_max):
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(trial, 1, l_max)))


def trial_channels(config, trial):
    p = config.params
    return generate_channels(p.m_antennas, p.k_users, p.n_eve,
                             channel_rng(config.master_seed, trial))


def _outcome(trace):
    return TrialOutcome(trace.rate, trace.size, trace.power)


def run_trial(config, trial):
    """Outcomes of every enabled method at every sweep value for one trial."""
    channels = trial_channels(config, trial)
    out = {}
    if not config.lmax_sweep:
        return out
    top = max(config.lmax_sweep)
    params = replace(config.params, l_max=top)
    if {"stepwise_stc", "stepwise_no_stc"} & set(config.methods):
        # one run without STC covers every l_max and both variants
        full = run_stepwise(channels, params, replace(config.selector, enforce_stc=False))
    for l_max in config.lmax_sweep:
        p_l = replace(config.params, l_max=l_max)
        for method in config.methods:
            if method == "stepwise_stc":
                trace = truncate_trace(full, channels, p_l, l_max, enforce_stc=True)
            elif method == "stepwise_no_stc":
                trace = truncate_trace(full, channels, p_l, l_max, enforce_stc=False)
            elif method == "random":
                trace = run_random(channels, p_l, l_max,
                                   random_rng(config.master_seed, trial, l_max),
                                   config.selector)
            else:
                trace = run_exhaustive(channels, p_l, config.selector)
            out[(method, l_max)] = _outcome(trace)
    return out


def _run_chunk(args):
    config, trials = args
    return [run_trial(config, t) for t in trials]


def worker_count():
    env = os.environ.get("WIRETAP_TAS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def aggregate(per_trial_list, keep_trials=False):
    """Reduce per-trial outcome dicts (in trial order) into cell statistics."""
    collected = {}
    for outcomes in per_trial_list:
        for key, o in outcomes.items():
            collected.setdefault(key, []).append(o)
    cells = {}
    for key, outs in collected.items():
        rates = np.array([o.rate for o in outs])
        n = rates.size
        sd = float(np.std(rates, ddof=1)) if n > 1 else 0.0
        cells[key] = CellStats(
            mean_rate=float(rates.mean()),
            stderr=sd / math.sqrt(n),
            mean_selected_l=float(np.mean([o.selected_l for o in outs])),
            mean_power=float(np.mean([o.power for o in outs])),
            trials=n,
        )
    return AggregateResult(cells, collected if keep_trials else None)


def run_experiment(config, keep_trials=False, workers=None):
    """Run every trial and aggregate. Output is independent of ``workers``."""
    workers = workers or worker_count()
    trials = list(range(config.trials))
    if workers <= 1 or config.trials == 1:
        results = [run_trial(config, t) for t in trials]
    else:
        chunks = [trials[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [(config, c) for c in chunks]))
        by_trial = {}
        for chunk, part in zip(chunks, parts):
            by_trial.update(zip(chunk, part))
        results = [by_trial[t] for t in trials]
    return aggregate(results, keep_trials)


def _fmt(x):
    return f"{x:.9g}"


def write_csv(result, path):
    """Write one row per (method, l_max), sorted by method name then l_max."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for (method, l_max) in sorted(result.cells):
            c = result.cells[(method, l_max)]
            writer.writerow([method, l_max, _fmt(c.mean_rate), _fmt(c.stderr),
                             _fmt(c.mean_selected_l), _fmt(c.mean_power), c.trials])


def read_csv(path):
    """Inverse of :func:`write_csv` (to the rendered precision)."""
    cells = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        for row in reader:
            cells[(row[0], int(row[1]))] = CellStats(
                float(row[2]), float(row[3]), float(row[4]), float(row[5]),
                int(row[6]))
    return AggregateResult(cells)
