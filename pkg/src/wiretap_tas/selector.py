"""Joint antenna selection and power control, plus baselines.

``run_stepwise`` is the greedy forward-selection algorithm with per-step
power control. ``run_exhaustive`` enumerates every subset (small instances
only) and ``run_random`` draws a uniformly random subset.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import stepwise
from .metrics import report_for_selection, terms_for_selection, weighted_rate
from .model import DegenerateChannelError, WiretapError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
TIE_ATOL = 1e-12
EXHAUSTIVE_LIMIT = 10 ** 6

STOP_LMAX = "reached L_max"
STOP_STC = "STC triggered"


class CombinatorialGuardError(WiretapError):
    """Exhaustive search refused because the instance is too large."""


@dataclass(frozen=True)
class SelectorConfig:
    enforce_stc: bool = True
    power_grid_points: int = 256
    power_refine_tol: float = 1e-6

    def __post_init__(self):
        if self.power_grid_points < 2:
            raise WiretapError("power_grid_points must be at least 2")
        if not self.power_refine_tol > 0:
            raise WiretapError("power_refine_tol must be positive")


@dataclass(frozen=True)
class StepRecord:
    """One accepted antenna: ``growth`` is None for the initial antenna."""

    step: int
    index: int
    growth: float | None
    power: float
    rate: float


@dataclass
class RunTrace:
    steps: list = field(default_factory=list)
    report: object = None
    stop_reason: str = STOP_LMAX
    # best growth found when the loop stopped on STC
    stop_growth: float | None = None

    @property
    def selection(self):
        return tuple(r.index for r in self.steps)

    @property
    def size(self):
        return len(self.steps)

    @property
    def power(self):
        return self.report.power

    @property
    def rate(self):
        return self.report.weighted_avg


def init_antenna(channels):
    """Antenna with the largest ``||H_i|| / ||G_i||`` row-norm ratio.

    Rows whose eavesdropper norm is zero (and main norm nonzero) rank first,
    ordered by main norm. Remaining ties go to the lowest index.
    """
    h_norm = np.linalg.norm(channels.h_main, axis=1)
    g_norm = np.linalg.norm(channels.g_eve, axis=1)
    if not np.any(h_norm > 0):
        raise DegenerateChannelError("every row of the main channel is zero")
    infinite = (g_norm == 0) & (h_norm > 0)
    if np.any(infinite):
        return int(np.argmax(np.where(infinite, h_norm, -1.0)))
    return int(np.argmax(h_norm / g_norm))


def _golden_max(f, lo, hi, tol):
    """Maximize ``f`` on [lo, hi]; returns the best evaluated (x, f(x))."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    best = max((f1, -x1), (f2, -x2))
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
            best = max(best, (f1, -x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
            best = max(best, (f2, -x2))
    return -best[1], best[0]


def optimize_power(terms, params, config=None):
    """Power in [0, P_max] maximizing the clipped weighted secrecy rate.

    A uniform grid of ``config.power_grid_points`` values locates the best
    bracket (smallest power on ties), which golden-section search then
    refines to ``config.power_refine_tol * P_max``.

    Returns
    -------
    p : float
    rate : float
        Clipped weighted rate at ``p``.
    """
    config = config or SelectorConfig()
    grid = np.linspace(0.0, params.p_max, config.power_grid_points)
    values = weighted_rate(terms, grid, params)
    top = values.max()
    i = int(np.argmax(values >= top - TIE_ATOL))
    p_best, r_best = float(grid[i]), float(values[i])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]

    def f(p):
        return float(weighted_rate(terms, p, params))

    p_ref, r_ref = _golden_max(f, lo, hi, config.power_refine_tol * params.p_max)
    if r_ref > r_best + TIE_ATOL:
        return float(p_ref), float(r_ref)
    return p_best, r_best


def _best_candidate(state, p, params):
    remaining = [i for i in range(state.channels.m_antennas)
                 if i not in state.selection]
    _, _, _, growth = stepwise.eval_candidates(
        state, remaining, p, params.weights, params.sigma2_main, params.sigma2_eve)
    top = growth.max()
    j = int(np.argmax(growth >= top - TIE_ATOL))
    return remaining[j], float(growth[j])


def ranking_power(p, rate, params):
    """Power at which candidates are ranked.

    This is the current power, except when the clipped rate is zero for every
    power in [0, P_max]: then P_max is as much a maximizer as the returned
    smallest one, and ranking at zero power would make every growth vanish.
    """
    if rate <= 0:
        return params.p_max
    return p


def run_stepwise(channels, params, config=None):
    """Greedy antenna selection with per-step power control.

    Candidates are ranked by their growth at the power set in the previous
    step; the power is re-optimized only after an antenna is accepted. With
    ``config.enforce_stc`` the loop stops as soon as the best growth is
    nonpositive.
    """
    config = config or SelectorConfig()
    params.check_channels(channels)
    first = init_antenna(channels)
    state = stepwise.init_state(channels, first, 0.0)
    p, rate = optimize_power(state.sinr_terms, params, config)
    state = stepwise.with_power(state, p)
    trace = RunTrace(steps=[StepRecord(1, first, None, p, rate)])

    while state.size < params.l_max:
        idx, growth = _best_candidate(state, ranking_power(state.power, rate, params),
                                      params)
        if config.enforce_stc and growth <= 0:
            trace.stop_reason = STOP_STC
            trace.stop_growth = growth
            break
        state = stepwise.extend_state(state, idx)
        p, rate = optimize_power(state.sinr_terms, params, config)
        state = stepwise.with_power(state, p)
        trace.steps.append(StepRecord(state.size, idx, growth, p, rate))

    trace.report = report_for_selection(channels, state.selection, state.power, params)
    return trace


def truncate_trace(trace, channels, params, l_max, enforce_stc):
    """Trace that ``run_stepwise`` would return with a smaller ``l_max``.

    ``trace`` must come from a run without STC and with at least ``l_max``
    steps (or stopped only because the array ran out). Because the greedy
    path does not depend on ``l_max``, the shorter run is a prefix of it.
    """
    if trace.stop_reason != STOP_LMAX:
        raise ValueError("truncation needs a trace that ran without STC")
    if l_max > trace.size:
        raise ValueError(f"trace has only {trace.size} steps, need {l_max}")
    steps = [trace.steps[0]]
    out = RunTrace(steps=steps)
    for rec in trace.steps[1:l_max]:
        if enforce_stc and rec.growth <= 0:
            out.stop_reason = STOP_STC
            out.stop_growth = rec.growth
            break
        steps.append(rec)
    last = steps[-1]
    out.report = report_for_selection(channels, out.selection, last.power, params)
    return out


def _trace_for_subset(channels, subset, params, config):
    p, rate = optimize_power(terms_for_selection(channels, subset), params, config)
    trace = RunTrace(steps=[StepRecord(n + 1, i, None, p, rate)
                            for n, i in enumerate(subset)])
    trace.report = report_for_selection(channels, subset, p, params)
    return trace


def run_exhaustive(channels, params, config=None, subset_size=None):
    """Global optimum over subsets of size ``subset_size`` (or all sizes up to L_max).

    Subsets are visited by size, then in lexicographic order; a later subset
    replaces the incumbent only if its rate is larger by more than 1e-12.
    Subsets whose main channel rows are all zero are skipped.
    """
    config = config or SelectorConfig()
    params.check_channels(channels)
    m = channels.m_antennas
    sizes = [subset_size] if subset_size else range(1, params.l_max + 1)
    total = sum(math.comb(m, s) for s in sizes)
    if total > EXHAUSTIVE_LIMIT:
        raise CombinatorialGuardError(
            f"{total} subsets exceed the exhaustive-search limit {EXHAUSTIVE_LIMIT}")
    best = None
    best_rate = -np.inf
    for size in sizes:
        for subset in itertools.combinations(range(m), size):
            if not np.any(channels.h_main[list(subset)]):
                continue
            p, rate = optimize_power(terms_for_selection(channels, subset),
                                     params, config)
            if rate > best_rate + TIE_ATOL:
                best, best_rate = (subset, p), rate
    if best is None:
        raise DegenerateChannelError("every row of the main channel is zero")
    return _trace_for_subset(channels, best[0], params, config)


def run_random(channels, params, subset_size, rng, config=None):
    """Uniformly random subset of ``subset_size`` antennas with optimized power."""
    config = config or SelectorConfig()
    params.check_channels(channels)
    m = channels.m_antennas
    if not 1 <= subset_size <= m:
        raise WiretapError(f"subset size must lie in [1, {m}]")
    subset = tuple(int(i) for i in rng.choice(m, size=subset_size, replace=False))
    if not np.any(channels.h_main[list(subset)]):
        raise DegenerateChannelError("selected main-channel rows are all zero")
    return _trace_for_subset(channels, subset, params, config)
