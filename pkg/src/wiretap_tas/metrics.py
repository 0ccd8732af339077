"""Exact secrecy-rate metrics for a fixed selection and power level.

Everything here is computed from scratch. The stepwise engine is checked
against these functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ShapeError, mrt_precoder, select_rows


@dataclass(frozen=True)
class SinrTerms:
    """Per-user power-free SINR ingredients.

    Attributes
    ----------
    t_main : ndarray, shape (K,)
        Desired signal gain ``|h_k^T w_k|^2``.
    u_main : ndarray, shape (K,)
        Interference gain ``sum_{j != k} |h_k^T w_j|^2``.
    t_eve : ndarray, shape (K,)
        Eavesdropper gain ``||G^T w_k||^2`` for user k's stream.
    """

    t_main: np.ndarray
    u_main: np.ndarray
    t_eve: np.ndarray

    @property
    def k_users(self):
        return self.t_main.shape[0]


@dataclass(frozen=True)
class SecrecyReport:
    """Rates in bits per channel use for one (power, selection) pair."""

    per_user_rate_main: np.ndarray
    per_user_rate_eve: np.ndarray
    per_user_unclipped: np.ndarray
    per_user_secrecy: np.ndarray
    weighted_avg: float
    weighted_unclipped: float
    power: float
    selection: tuple


def terms_from_cross(cross_main, cross_eve):
    """Build SinrTerms from ``A = H^T W`` (K x K) and ``B = G^T W`` (N x K)."""
    a2 = cross_main.real ** 2 + cross_main.imag ** 2
    t_main = np.diagonal(a2, axis1=-2, axis2=-1).copy()
    u_main = a2.sum(axis=-1) - t_main
    np.maximum(u_main, 0.0, out=u_main)
    t_eve = (cross_eve.real ** 2 + cross_eve.imag ** 2).sum(axis=-2)
    return t_main, u_main, t_eve


def sinr_terms(h_eff, g_eff, precoder):
    """Signal, interference and leakage gains for effective channels.

    Parameters
    ----------
    h_eff : array_like, shape (L, K)
    g_eff : array_like, shape (L, N)
    precoder : Precoder
        ``w_matrix`` of shape (L, K).
    """
    h_eff = np.atleast_2d(np.asarray(h_eff, dtype=np.complex128))
    g_eff = np.atleast_2d(np.asarray(g_eff, dtype=np.complex128))
    w = np.atleast_2d(precoder.w_matrix)
    if h_eff.shape != w.shape or g_eff.shape[0] != w.shape[0]:
        raise ShapeError(
            f"inconsistent shapes: h_eff {h_eff.shape}, g_eff {g_eff.shape}, "
            f"W {w.shape}")
    t_main, u_main, t_eve = terms_from_cross(h_eff.T @ w, g_eff.T @ w)
    return SinrTerms(t_main, u_main, t_eve)


def sinr_main(terms, p, sigma2_main, k):
    """SINR at user ``k``: ``rho t_k / (1 + rho u_k)`` with ``rho = p/sigma2``."""
    if p == 0:
        return 0.0
    rho = p / sigma2_main
    return float(rho * terms.t_main[k] / (1.0 + rho * terms.u_main[k]))


def sinr_eve(terms, p, sigma2_eve, k):
    """Worst-case eavesdropper SINR on user ``k``'s stream."""
    if p == 0:
        return 0.0
    return float(p / sigma2_eve * terms.t_eve[k])


def user_log_ratios(terms, p, sigma2_main, sigma2_eve):
    """Unclipped per-user ``log2((1+gamma_m)/(1+gamma_e))``, vectorized over ``p``.

    ``p`` may be a scalar or a 1-D array; the result has shape
    ``p.shape + (K,)``.
    """
    p = np.asarray(p, dtype=float)[..., None]
    rho_m = p / sigma2_main
    rho_e = p / sigma2_eve
    num = (1.0 + rho_m * (terms.t_main + terms.u_main)) / (1.0 + rho_m * terms.u_main)
    den = 1.0 + rho_e * terms.t_eve
    return np.log2(num) - np.log2(den)


def weighted_rate(terms, p, params, clip=True):
    """Weighted average secrecy rate for power ``p`` (scalar or array)."""
    r = user_log_ratios(terms, p, params.sigma2_main, params.sigma2_eve)
    if clip:
        r = np.maximum(r, 0.0)
    return r @ params.weights


def secrecy_rate(h_eff, g_eff, precoder, p, params, selection=()):
    """Full secrecy report for effective channels at power ``p``."""
    terms = sinr_terms(h_eff, g_eff, precoder)
    return report_from_terms(terms, p, params, selection)


def report_from_terms(terms, p, params, selection=()):
    k_users = terms.k_users
    if params.weights.shape[0] != k_users:
        raise ShapeError("weights length does not match number of users")
    gm = np.array([sinr_main(terms, p, params.sigma2_main, k) for k in range(k_users)])
    ge = np.array([sinr_eve(terms, p, params.sigma2_eve, k) for k in range(k_users)])
    r_main = np.log2(1.0 + gm)
    r_eve = np.log2(1.0 + ge)
    diff = r_main - r_eve
    secrecy = np.maximum(diff, 0.0)
    return SecrecyReport(
        per_user_rate_main=r_main,
        per_user_rate_eve=r_eve,
        per_user_unclipped=diff,
        per_user_secrecy=secrecy,
        weighted_avg=float(secrecy @ params.weights),
        weighted_unclipped=float(diff @ params.weights),
        power=float(p),
        selection=tuple(selection),
    )


def terms_for_selection(channels, selection):
    """SinrTerms of an MRT precoder built from scratch on ``selection``."""
    h_eff = select_rows(channels.h_main, selection)
    g_eff = select_rows(channels.g_eve, selection)
    return sinr_terms(h_eff, g_eff, mrt_precoder(h_eff))


def report_for_selection(channels, selection, p, params):
    """From-scratch secrecy report for a selection of antenna rows."""
    return report_from_terms(terms_for_selection(channels, selection), p, params,
                             selection)
