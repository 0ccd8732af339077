"""Randomized self-checks of the incremental engine and the selector."""

from __future__ import annotations

import numpy as np

from . import stepwise
from .metrics import terms_for_selection, user_log_ratios
from .model import SystemParams, generate_channels
from .selector import SelectorConfig, run_exhaustive, run_random, run_stepwise


def _rel(x, y):
    return float(np.max(np.abs(np.asarray(x) - np.asarray(y)) / np.abs(y)))


def stepwise_identity_errors(instances, rng, max_m=16, max_k=4, max_n=4):
    """Largest relative errors of the three stepwise identities.

    For each random instance a random partial selection is grown and every
    remaining candidate is checked against a from-scratch rebuild.

    Returns
    -------
    dict with keys ``theta_main``, ``theta_eve``, ``rate``.
    """
    worst = {"theta_main": 0.0, "theta_eve": 0.0, "rate": 0.0}
    for _ in range(instances):
        m = int(rng.integers(4, max_m + 1))
        k = int(rng.integers(1, max_k + 1))
        n = int(rng.integers(1, max_n + 1))
        p = float(rng.uniform(1e-3, 1.0))
        s2m, s2e = 0.1, 0.1
        w = rng.dirichlet(np.ones(k))
        ch = generate_channels(m, k, n, rng)
        order = [int(i) for i in rng.permutation(m)]
        size = int(rng.integers(1, m))
        state = stepwise.init_state(ch, order[0], p)
        for i in order[1:size]:
            state = stepwise.extend_state(state, i)
        before = user_log_ratios(state.sinr_terms, p, s2m, s2e)
        old_m = (1 + p / s2m * (state.sinr_terms.t_main + state.sinr_terms.u_main)) \
            / (1 + p / s2m * state.sinr_terms.u_main)
        old_e = 1 + p / s2e * state.sinr_terms.t_eve
        for cand in order[size:]:
            ev = stepwise.eval_candidate(state, cand, p, w, s2m, s2e)
            t = terms_for_selection(ch, state.selection + (cand,))
            new_m = (1 + p / s2m * (t.t_main + t.u_main)) / (1 + p / s2m * t.u_main)
            new_e = 1 + p / s2e * t.t_eve
            worst["theta_main"] = max(worst["theta_main"],
                                      _rel(ev.theta_main * old_m, new_m))
            worst["theta_eve"] = max(worst["theta_eve"],
                                     _rel(ev.theta_eve * old_e, new_e))
            after = float(user_log_ratios(t, p, s2m, s2e) @ w)
            predicted = float(before @ w) + ev.growth
            worst["rate"] = max(worst["rate"],
                                abs(predicted - after) / max(abs(after), 1.0))
    return worst


def oracle_dominance(instances, rng, m=8, k=2, n=2, l_max=3, random_draws=100):
    """Per-instance (exhaustive, stepwise, mean random) clipped rates."""
    params = SystemParams(m, k, n, l_max)
    config = SelectorConfig()
    rows = []
    for _ in range(instances):
        ch = generate_channels(m, k, n, rng)
        ex = run_exhaustive(ch, params, config).rate
        sw = run_stepwise(ch, params, config).rate
        rnd = np.mean([run_random(ch, params, l_max, rng, config).rate
                       for _ in range(random_draws)])
        rows.append((ex, sw, float(rnd)))
    return np.array(rows)
