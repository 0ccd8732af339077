"""Incremental forward-selection machinery for MRT precoding.

Adding antenna ``i`` with main row ``h`` (length K) and eavesdropper row ``g``
(length N) to a selection with normalizer ``beta`` gives

    W' = alpha * [W; beta * conj(h)],    alpha = 1 / sqrt(1 + beta^2 ||h||^2)

so the cross-products ``A = H^T W`` and ``B = G^T W`` update as

    A' = alpha * (A + beta * h h^H),     B' = alpha * (B + beta * g h^H).

All per-user SINR terms are read off ``A`` and ``B``; a candidate therefore
costs O(K^2 + K N) regardless of how many antennas are already selected.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .metrics import SinrTerms, terms_from_cross, user_log_ratios
from .model import (
    DegenerateChannelError,
    InvalidSelectionError,
    Precoder,
    WiretapError,
    check_selection,
    mrt_precoder,
    select_rows,
)

# Caches are rebuilt from scratch after this many incremental extensions.
REFRESH_INTERVAL = 32

# When true, every extension is checked against a from-scratch rebuild.
VALIDATE = os.environ.get("WIRETAP_TAS_VALIDATE", "") not in ("", "0")

CACHE_RTOL = 1e-9


class CacheDriftError(RuntimeError):
    """Incremental caches disagree with a from-scratch rebuild."""


@dataclass(frozen=True)
class SelectionState:
    """Selected antennas plus cached precoder and SINR terms.

    ``cross_main`` is ``H_sel^T W`` (K x K) and ``cross_eve`` is
    ``G_sel^T W`` (N x K). ``sinr_terms`` is derived from them.
    """

    channels: object
    selection: tuple
    h_eff: np.ndarray
    g_eff: np.ndarray
    precoder: Precoder
    cross_main: np.ndarray
    cross_eve: np.ndarray
    sinr_terms: SinrTerms
    power: float
    steps_since_refresh: int = 0

    @property
    def size(self):
        return len(self.selection)

    @property
    def beta(self):
        return self.precoder.beta

    def unclipped_rate(self, p, weights, sigma2_main, sigma2_eve):
        r = user_log_ratios(self.sinr_terms, p, sigma2_main, sigma2_eve)
        return float(r @ weights)


@dataclass(frozen=True)
class GrowthEval:
    """Growth of the unclipped weighted rate when adding ``candidate``."""

    candidate: int
    alpha2: float
    theta_main: np.ndarray
    theta_eve: np.ndarray
    growth: float


def _state_from_scratch(channels, selection, power):
    h_eff = select_rows(channels.h_main, selection)
    g_eff = select_rows(channels.g_eve, selection)
    precoder = mrt_precoder(h_eff)
    a = h_eff.T @ precoder.w_matrix
    b = g_eff.T @ precoder.w_matrix
    terms = SinrTerms(*terms_from_cross(a, b))
    return SelectionState(channels, tuple(selection), h_eff, g_eff, precoder,
                          a, b, terms, float(power))


def rebuild(state):
    """Recompute every cache of ``state`` from its selection."""
    return _state_from_scratch(state.channels, state.selection, state.power)


def init_state(channels, first_index, p):
    """Single-antenna state for ``first_index`` at power ``p``."""
    (i,) = check_selection([first_index], channels.m_antennas)
    if not np.any(channels.h_main[i]):
        raise DegenerateChannelError(f"row {i} of the main channel is zero")
    return _state_from_scratch(channels, (i,), p)


def alpha_factor(beta_prev, h_row):
    """Ratio ``beta_new / beta_prev`` after appending ``h_row``."""
    h_row = np.asarray(h_row)
    norm2 = float(np.sum(np.abs(h_row) ** 2))
    return 1.0 / np.sqrt(1.0 + beta_prev ** 2 * norm2)


def _extended_cross(state, h_rows, g_rows):
    """Batched cross-products after appending each row of ``h_rows``/``g_rows``."""
    beta = state.beta
    norm2 = (h_rows.real ** 2 + h_rows.imag ** 2).sum(axis=-1)
    alpha = 1.0 / np.sqrt(1.0 + beta ** 2 * norm2)
    hc = np.conj(h_rows)
    a = state.cross_main + beta * h_rows[..., :, None] * hc[..., None, :]
    b = state.cross_eve + beta * g_rows[..., :, None] * hc[..., None, :]
    a *= alpha[..., None, None]
    b *= alpha[..., None, None]
    return alpha, a, b


def _one_plus_gammas(t_main, u_main, t_eve, p, sigma2_main, sigma2_eve):
    rho_m = p / sigma2_main
    rho_e = p / sigma2_eve
    main = (1.0 + rho_m * (t_main + u_main)) / (1.0 + rho_m * u_main)
    eve = 1.0 + rho_e * t_eve
    return main, eve


def _check_candidate(state, candidate):
    i = int(candidate)
    if not 0 <= i < state.channels.m_antennas:
        raise InvalidSelectionError(f"candidate {i} out of range")
    if i in state.selection:
        raise InvalidSelectionError(f"candidate {i} is already selected")
    return i


def eval_candidates(state, candidates, p, weights, sigma2_main, sigma2_eve):
    """Vectorized growth evaluation over several candidate antennas.

    Returns
    -------
    alpha2, theta_main, theta_eve, growth : ndarray
        Shapes (C,), (C, K), (C, K), (C,).
    """
    idx = np.asarray(candidates, dtype=int)
    h_rows = state.channels.h_main[idx]
    g_rows = state.channels.g_eve[idx]
    alpha, a, b = _extended_cross(state, h_rows, g_rows)
    new_main, new_eve = _one_plus_gammas(*terms_from_cross(a, b), p,
                                         sigma2_main, sigma2_eve)
    t = state.sinr_terms
    old_main, old_eve = _one_plus_gammas(t.t_main, t.u_main, t.t_eve, p,
                                         sigma2_main, sigma2_eve)
    theta_main = new_main / old_main
    theta_eve = new_eve / old_eve
    growth = (np.log2(theta_main) - np.log2(theta_eve)) @ weights
    return alpha ** 2, theta_main, theta_eve, growth


def eval_candidate(state, candidate, p, weights, sigma2_main, sigma2_eve):
    """Growth quantities for adding one antenna at power ``p``.

    ``growth`` is the exact change of the unclipped weighted rate
    ``sum_k w_k log2((1+gamma_m)/(1+gamma_e))``.
    """
    i = _check_candidate(state, candidate)
    if not p > 0:
        raise WiretapError("power must be positive")
    alpha2, tm, te, growth = eval_candidates(
        state, [i], p, np.asarray(weights, dtype=float), sigma2_main, sigma2_eve)
    return GrowthEval(i, float(alpha2[0]), tm[0], te[0], float(growth[0]))


def growth_terms(state, candidate, p, sigma2_main, sigma2_eve):
    """Closed-form ``(epsilon_main, psi_main, epsilon_eve)`` for one candidate.

    These satisfy ``theta_main = (alpha^2 + eps_m) / (alpha^2 + psi_m)`` and
    ``theta_eve = alpha^2 + eps_e``. They are written directly in terms of
    the current cross-products and are independent of the batched path in
    :func:`eval_candidates`.
    """
    i = _check_candidate(state, candidate)
    h = state.channels.h_main[i]
    g = state.channels.g_eve[i]
    beta = state.beta
    a2 = 1.0 / (1.0 + beta ** 2 * float(np.vdot(h, h).real))
    rho_m = p / sigma2_main
    rho_e = p / sigma2_eve
    t = state.sinr_terms
    k_users = h.shape[0]
    eps_m = np.empty(k_users)
    psi_m = np.empty(k_users)
    eps_e = np.empty(k_users)
    g_norm2 = float(np.vdot(g, g).real)
    for k in range(k_users):
        pair = h[k] * np.conj(h)  # h_k h_j^*
        # |A_kj + beta h_k h_j^*|^2 - |A_kj|^2 = beta (beta |.|^2 + 2 Re(A_kj conj(h_k h_j^*)))
        inc = beta * (beta * np.abs(pair) ** 2
                      + 2.0 * (state.cross_main[k] * np.conj(pair)).real)
        inc_all = inc.sum()
        inc_int = inc_all - inc[k]
        eps_m[k] = (1.0 + rho_m * a2 * inc_all - a2) / (
            1.0 + rho_m * (t.t_main[k] + t.u_main[k]))
        psi_m[k] = (1.0 + rho_m * a2 * inc_int - a2) / (1.0 + rho_m * t.u_main[k])
        leak = beta * (beta * abs(h[k]) ** 2 * g_norm2
                       + 2.0 * (h[k] * np.vdot(g, state.cross_eve[:, k])).real)
        eps_e[k] = (1.0 + rho_e * a2 * leak - a2) / (1.0 + rho_e * t.t_eve[k])
    return eps_m, psi_m, eps_e


def _close(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    scale = max(float(np.max(np.abs(y), initial=0.0)), 1e-300)
    return float(np.max(np.abs(x - y), initial=0.0)) <= CACHE_RTOL * scale


def check_cache(state):
    """Raise CacheDriftError if cached values drifted from a rebuild."""
    fresh = rebuild(state)
    pairs = [
        ("precoder", state.precoder.w_matrix, fresh.precoder.w_matrix),
        ("beta", state.beta, fresh.beta),
        ("t_main", state.sinr_terms.t_main, fresh.sinr_terms.t_main),
        ("u_main", state.sinr_terms.u_main, fresh.sinr_terms.u_main),
        ("t_eve", state.sinr_terms.t_eve, fresh.sinr_terms.t_eve),
    ]
    for name, cached, exact in pairs:
        if not _close(cached, exact):
            raise CacheDriftError(f"cached {name} drifted from rebuild")


def extend_state(state, candidate, validate=None):
    """Append one antenna, updating the precoder and caches incrementally.

    Every ``REFRESH_INTERVAL`` extensions the caches are rebuilt from
    scratch. With ``validate`` (default: the module flag ``VALIDATE``) each
    incremental result is compared with a rebuild.
    """
    i = _check_candidate(state, candidate)
    h = state.channels.h_main[i]
    g = state.channels.g_eve[i]
    selection = state.selection + (i,)
    steps = state.steps_since_refresh + 1
    if steps >= REFRESH_INTERVAL:
        return _state_from_scratch(state.channels, selection, state.power)
    alpha, a, b = _extended_cross(state, h, g)
    alpha = float(alpha)
    beta = state.beta
    w = alpha * np.vstack([state.precoder.w_matrix, beta * np.conj(h)])
    new = SelectionState(
        channels=state.channels,
        selection=selection,
        h_eff=np.vstack([state.h_eff, h]),
        g_eff=np.vstack([state.g_eff, g]),
        precoder=Precoder(w, alpha * beta),
        cross_main=a,
        cross_eve=b,
        sinr_terms=SinrTerms(*terms_from_cross(a, b)),
        power=state.power,
        steps_since_refresh=steps,
    )
    if VALIDATE if validate is None else validate:
        check_cache(new)
    return new


def with_power(state, p):
    return replace(state, power=float(p))
