"""Channel model for the multiuser MIMO wiretap setting.

Channels are plain ``numpy`` complex arrays. ``H`` is ``M x K`` (base station
antennas by legitimate users) and ``G`` is ``M x N`` (antennas by eavesdropper
receive antennas). Antenna indices are zero-based throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# trace(W W^H) must equal 1 to this tolerance for every precoder
POWER_RTOL = 1e-12


class WiretapError(ValueError):
    """Base class for all validation errors raised by this package."""


class InvalidSelectionError(WiretapError):
    """Selection index out of range or repeated."""


class DegenerateChannelError(WiretapError):
    """The channel is all zeros where a nonzero channel is required."""


class ShapeError(WiretapError):
    """Array dimensions are inconsistent."""


def _as_matrix(mat, name="matrix"):
    arr = np.array(mat, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise WiretapError(f"{name} contains NaN or Inf entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChannelPair:
    """Main channel ``h_main`` (M x K) and eavesdropper channel ``g_eve`` (M x N)."""

    h_main: np.ndarray
    g_eve: np.ndarray

    def __post_init__(self):
        h = _as_matrix(self.h_main, "h_main")
        g = _as_matrix(self.g_eve, "g_eve")
        if h.shape[0] != g.shape[0]:
            raise ShapeError(
                f"h_main has {h.shape[0]} rows but g_eve has {g.shape[0]}")
        object.__setattr__(self, "h_main", h)
        object.__setattr__(self, "g_eve", g)

    @property
    def m_antennas(self):
        return self.h_main.shape[0]

    @property
    def k_users(self):
        return self.h_main.shape[1]

    @property
    def n_eve(self):
        return self.g_eve.shape[1]


@dataclass(frozen=True)
class SystemParams:
    """Dimensions, power budget, noise levels and user weights.

    ``weights`` defaults to the uniform vector ``1/K``. Weights are used as
    given and never renormalized.
    """

    m_antennas: int
    k_users: int
    n_eve: int
    l_max: int
    p_max: float = 1.0
    sigma2_main: float = 0.1
    sigma2_eve: float = 0.1
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("m_antennas", "k_users", "n_eve"):
            if int(getattr(self, name)) < 1:
                raise WiretapError(f"{name} must be at least 1")
        if not 1 <= self.l_max <= self.m_antennas:
            raise WiretapError(
                f"l_max must lie in [1, {self.m_antennas}], got {self.l_max}")
        if not self.p_max > 0:
            raise WiretapError("p_max must be positive")
        if not (self.sigma2_main > 0 and self.sigma2_eve > 0):
            raise WiretapError("noise variances must be positive")
        if self.weights is None:
            w = np.full(self.k_users, 1.0 / self.k_users)
        else:
            w = np.array(self.weights, dtype=float).reshape(-1)
        if w.shape != (self.k_users,):
            raise ShapeError(f"weights must have length {self.k_users}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise WiretapError("weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def paper_setting(cls, l_max=64):
        """M=64, K=4, N=8, sigma^2=0.1 on both sides, P_max=1, uniform weights."""
        return cls(m_antennas=64, k_users=4, n_eve=8, l_max=l_max,
                   p_max=1.0, sigma2_main=0.1, sigma2_eve=0.1)

    def check_channels(self, channels):
        shape = (channels.m_antennas, channels.k_users, channels.n_eve)
        if shape != (self.m_antennas, self.k_users, self.n_eve):
            raise ShapeError(
                f"channels have (M, K, N) = {shape}, params expect "
                f"{(self.m_antennas, self.k_users, self.n_eve)}")


@dataclass(frozen=True)
class Precoder:
    """MRT signal shaping matrix ``w_matrix`` (L x K) and its normalizer ``beta``."""

    w_matrix: np.ndarray
    beta: float

    def __post_init__(self):
        if abs(self.power - 1.0) > POWER_RTOL:
            raise WiretapError(
                f"precoder is not unit-power: trace(W W^H) = {self.power!r}")

    @property
    def power(self):
        """Frobenius norm squared, i.e. trace(W W^H)."""
        return float(np.sum(np.abs(self.w_matrix) ** 2))


def generate_rayleigh(rows, cols, rng):
    """Draw an i.i.d. CN(0, 1) matrix.

    The real and imaginary parts come from one call
    ``rng.standard_normal((rows, cols, 2))``, scaled by ``1/sqrt(2)``; the
    last axis holds (real, imag). This seed-to-output mapping is part of the
    reproducibility contract and must not change.

    Parameters
    ----------
    rows, cols : int
        Matrix dimensions, both at least 1.
    rng : numpy.random.Generator
        Seeded random stream.
    """
    if rows < 1 or cols < 1:
        raise ShapeError(f"dimensions must be positive, got ({rows}, {cols})")
    parts = rng.standard_normal((rows, cols, 2)) * np.sqrt(0.5)
    return parts[..., 0] + 1j * parts[..., 1]


def generate_channels(m_antennas, k_users, n_eve, rng):
    """Draw ``H`` then ``G`` from the same stream and pack them."""
    h = generate_rayleigh(m_antennas, k_users, rng)
    g = generate_rayleigh(m_antennas, n_eve, rng)
    return ChannelPair(h, g)


def check_selection(indices, n_rows):
    """Validate a selection and return it as a tuple of ints."""
    sel = tuple(int(i) for i in indices)
    for i in sel:
        if not 0 <= i < n_rows:
            raise InvalidSelectionError(
                f"index {i} out of range for {n_rows} rows")
    if len(set(sel)) != len(sel):
        raise InvalidSelectionError(f"duplicate indices in selection {sel}")
    return sel


def select_rows(mat, indices):
    """Rows of ``mat`` in the order given by ``indices``."""
    mat = np.asarray(mat)
    sel = check_selection(indices, mat.shape[0])
    return mat[list(sel), :]


def mrt_precoder(h_eff):
    """MRT precoder ``W = beta * conj(h_eff)`` with ``beta = 1/||h_eff||_F``.

    Raises
    ------
    DegenerateChannelError
        If ``h_eff`` is all zeros.
    """
    h_eff = np.asarray(h_eff, dtype=np.complex128)
    if h_eff.ndim == 1:
        h_eff = h_eff.reshape(1, -1)
    fro2 = float(np.sum(h_eff.real ** 2 + h_eff.imag ** 2))
    if fro2 == 0.0:
        raise DegenerateChannelError("MRT precoder undefined for a zero channel")
    beta = 1.0 / np.sqrt(fro2)
    return Precoder(beta * np.conj(h_eff), float(beta))
