"""Chain model, basis conventions, and matrix-free operator application.

Basis convention used everywhere in the package: the computational-basis
index encodes the spin configuration z = [z_1, ..., z_L] with site 1 in
the least significant bit, and bit value 0 meaning z = +1, bit value 1
meaning z = -1.  The chain is open (L - 1 bonds), and all energies are
expressed in units of the coupling J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import StateError


@dataclass(frozen=True)
class ModelParams:
    """Static chain parameters: site count, coupling, drive, disorder width.

    The drive period T = 2*pi/omega is derived, never stored.
    """

    L: int
    W: float
    J: float = 1.0
    F: float = 2.5
    omega: float = 8.0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.J <= 0:
            raise ValueError(f"J must be > 0, got {self.J}")
        if self.F < 0:
            raise ValueError(f"F must be >= 0, got {self.F}")
        if self.W < 0:
            raise ValueError(f"W must be >= 0, got {self.W}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def dim(self) -> int:
        return 1 << self.L


class Envelope(str, Enum):
    """Drive envelope f(t) multiplying the transverse field."""

    SINUSOIDAL = "sinusoidal"      # f(t) = [1 - cos(omega t)] / 2
    CONSTANT_HALF = "constant-half"  # f(t) = 0.5, modulation removed
    ZERO = "zero"                  # undriven

    def amplitude(self, omega: float, t):
        t = np.asarray(t, dtype=float)
        if self is Envelope.SINUSOIDAL:
            return 0.5 * (1.0 - np.cos(omega * t))
        if self is Envelope.CONSTANT_HALF:
            return np.full_like(t, 0.5)
        return np.zeros_like(t)


def draw_disorder(params: ModelParams, rng: np.random.Generator) -> np.ndarray:
    """One disorder realization: L on-site fields uniform on [0, W]."""
    return rng.uniform(0.0, params.W, params.L)


def validate_disorder(h, params: ModelParams) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (params.L,):
        raise ValueError(f"disorder must have shape ({params.L},), got {h.shape}")
    if np.any(h < 0.0) or np.any(h > params.W):
        raise ValueError("disorder fields must lie in [0, W]")
    return h


def basis_spin(index: int, site: int, L: int) -> int:
    """Spin value z_site in {+1, -1} of a basis state.

    Site 1 is the least significant bit; bit 0 maps to z = +1.
    """
    if not 1 <= site <= L:
        raise ValueError(f"site must be in 1..{L}, got {site}")
    if not 0 <= index < (1 << L):
        raise ValueError(f"index must be in 0..{(1 << L) - 1}, got {index}")
    return 1 - 2 * ((index >> (site - 1)) & 1)


@lru_cache(maxsize=32)
def spin_table(L: int) -> np.ndarray:
    """(2^L, L) table of spin values z_i for every basis index (read-only)."""
    idx = np.arange(1 << L)
    z = 1 - 2 * ((idx[:, None] >> np.arange(L)[None, :]) & 1)
    z = z.astype(np.int8)
    z.setflags(write=False)
    return z


def diagonal_energy(index: int, params: ModelParams, disorder) -> float:
    """Classical energy sum(h_i z_i) + J sum(z_i z_{i+1}) of one basis state."""
    h = validate_disorder(disorder, params)
    if not 0 <= index < params.dim:
        raise ValueError(f"index must be in 0..{params.dim - 1}, got {index}")
    z = spin_table(params.L)[index].astype(float)
    bonds = float(z[:-1] @ z[1:]) if params.L > 1 else 0.0
    return float(h @ z) + params.J * bonds


def diagonal_energies(params: ModelParams, disorder) -> np.ndarray:
    """Diagonal energies for all 2^L basis states; disorder may be batched.

    disorder of shape (L,) gives a (2^L,) vector; shape (B, L) gives (B, 2^L).
    """
    h = np.asarray(disorder, dtype=float)
    if h.shape[-1] != params.L:
        raise ValueError(f"disorder last axis must be {params.L}, got {h.shape}")
    z = spin_table(params.L).astype(float)
    field = h @ z.T
    bonds = (z[:, :-1] * z[:, 1:]).sum(axis=1) if params.L > 1 else np.zeros(params.dim)
    return field + params.J * bonds


def initial_state(L: int) -> np.ndarray:
    """Product state with every spin along +z (amplitude 1 at index 0)."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    state = np.zeros(1 << L, dtype=np.complex128)
    state[0] = 1.0
    return state


def apply_transverse(state, coefficient: float) -> np.ndarray:
    """Apply coefficient * sum_i X_i matrix-free (bit-flip gather).

    The result is an unnormalized intermediate vector.
    """
    if not np.isfinite(coefficient):
        raise ValueError("coefficient must be finite")
    state = np.asarray(state)
    N = state.shape[0]
    L = N.bit_length() - 1
    if N != 1 << L:
        raise ValueError(f"state length must be a power of two, got {N}")
    out = np.zeros_like(state, dtype=np.complex128)
    for site in range(L):
        v = state.reshape(-1, 2, 1 << site)
        o = out.reshape(-1, 2, 1 << site)
        o[:, 0, :] += v[:, 1, :]
        o[:, 1, :] += v[:, 0, :]
    out *= coefficient
    return out


def norm_error(state) -> float:
    """Absolute deviation of sum |c_i|^2 from 1."""
    state = np.asarray(state)
    return abs(float(np.vdot(state, state).real) - 1.0)


def output_probs(state, tol: float = 1e-8) -> np.ndarray:
    """Measurement probabilities p(z) = |c_z|^2 of a normalized state."""
    state = np.asarray(state)
    if norm_error(state) > tol:
        raise StateError(f"state norm deviates from 1 by {norm_error(state):.3e}")
    p = np.abs(state) ** 2
    return p / p.sum()
