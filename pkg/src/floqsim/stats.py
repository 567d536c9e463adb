"""Distributional machinery: Porter-Thomas comparisons, KL divergences,
level-spacing ratios, analytic ensembles, and entropies.

Probabilities are compared on the scaled variable x = N*p, where the
Porter-Thomas density is exp(-x).  All logarithms are natural, so every
divergence and entropy here is in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError


@dataclass(frozen=True)
class Binning:
    """Uniform binning of x = N*p; the default window holds 1 - e^-12 of the
    Porter-Thomas mass."""

    bins: int = 48
    x_max: float = 12.0

    def __post_init__(self):
        if self.bins < 2 or self.x_max <= 0:
            raise ValueError("need bins >= 2 and x_max > 0")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.bins + 1)


@dataclass(frozen=True)
class BinnedDistribution:
    """Histogram masses on ascending edges; masses sum to the captured
    fraction of the samples (<= 1)."""

    edges: np.ndarray
    masses: np.ndarray


@dataclass(frozen=True)
class ProbSampleSet:
    """Basis-state probabilities pooled over realizations, one row each."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.size == 0:
            raise ValueError("probs must be a non-empty (D, N) array")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        sums = p.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-8):
            raise ValueError("each realization's probabilities must sum to 1")
        object.__setattr__(self, "probs", p)

    @property
    def N(self) -> int:
        return self.probs.shape[1]

    @property
    def D(self) -> int:
        return self.probs.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self.probs.reshape(-1)


@dataclass(frozen=True)
class KLEstimate:
    """KL value plus an undersampling flag (fewer than 10 samples per bin)."""

    value: float
    undersampled: bool = False

    def __float__(self) -> float:
        return self.value


def pt_density(x):
    """Porter-Thomas density exp(-x) of the scaled probability x = N*p."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    return np.exp(-x)


def kl_discrete(p, q) -> float:
    """sum p_i log(p_i / q_i) in nats; terms with p_i = 0 contribute 0."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    if abs(p.sum() - 1.0) > 1e-6:
        raise ValueError(f"P must sum to 1, got {p.sum():.8f}")
    mask = p > 0
    if np.any(q[mask] <= 0):
        raise DivergenceError("P has support where Q vanishes; smooth Q first")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def bin_scaled_probs(samples: ProbSampleSet, binning: Binning = Binning()) -> BinnedDistribution:
    """Histogram of x = N*p; masses are fractions of all samples."""
    x = samples.N * samples.values
    counts, edges = np.histogram(x, bins=binning.bins, range=(0.0, binning.x_max))
    return BinnedDistribution(edges=edges, masses=counts / x.size)


def pt_bin_masses(binning: Binning = Binning()) -> np.ndarray:
    """Porter-Thomas mass per bin, integral of exp(-x) over each bin."""
    edges = binning.edges
    return np.exp(-edges[:-1]) - np.exp(-edges[1:])


def kl_to_pt(samples: ProbSampleSet, binning: Binning = Binning()) -> KLEstimate:
    """Binned KL divergence of pooled scaled probabilities from Porter-Thomas.

    Both the empirical histogram and the reference masses are renormalized to
    the binning window, so the estimate compares shapes and ignores tail mass
    beyond x_max.  The result is flagged when fewer than 10*bins samples went
    in.
    """
    binned = bin_scaled_probs(samples, binning)
    captured = binned.masses.sum()
    if captured <= 0:
        raise ValueError("no samples fall inside the binning window")
    p = binned.masses / captured
    q = pt_bin_masses(binning)
    q = q / q.sum()
    total = samples.values.size
    return KLEstimate(value=kl_discrete(p, q), undersampled=total < 10 * binning.bins)


def spacing_ratios(spectrum) -> np.ndarray:
    """Consecutive-gap ratios min/max of a circular phase spectrum.

    Accepts a FloquetSpectrum or a plain array of phases in [0, 2*pi).  The
    spectrum is treated as circular: the wrap-around gap 2*pi - theta_max +
    theta_min is included, giving as many ratios as phases.  A pair of zero
    gaps gives ratio 1; a zero gap next to a finite one gives 0.
    """
    phases = np.sort(np.asarray(getattr(spectrum, "phases", spectrum), dtype=float))
    n = phases.size
    if n < 3:
        raise ValueError(f"need at least 3 phases, got {n}")
    gaps = np.empty(n)
    gaps[:-1] = np.diff(phases)
    gaps[-1] = 2.0 * np.pi - phases[-1] + phases[0]
    lo = np.minimum(gaps, np.roll(gaps, -1))
    hi = np.maximum(gaps, np.roll(gaps, -1))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 1.0)
    return r


_COE_SLOPE = (2.0 / 3.0) * (4.0 * np.pi**2 / 3.0 - 2.0)  # d P_COE / dr at r = 0


def ensemble_density(kind: str, r):
    """Analytic gap-ratio densities of the COE, POI, and GOE ensembles."""
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if kind == "POI":
        out = 2.0 / (1.0 + r) ** 2
    elif kind == "GOE":
        out = (27.0 / 4.0) * (r + r**2) / (1.0 + r + r**2) ** 2.5
    elif kind == "COE":
        out = _coe_density(r)
    else:
        raise ValueError(f"kind must be one of COE, POI, GOE, got {kind!r}")
    return float(out[0]) if scalar else out


def _coe_density(r: np.ndarray) -> np.ndarray:
    # 1/r terms cancel as r -> 0; switch to the linear limit below r = 1e-6
    out = np.empty_like(r)
    small = r < 1e-6
    out[small] = _COE_SLOPE * r[small]
    rs = r[~small]
    u = 2.0 * np.pi * rs / (rs + 1.0)
    v = 2.0 * np.pi / (rs + 1.0)
    out[~small] = (2.0 / 3.0) * (
        np.sin(u) / (2.0 * np.pi * rs**2)
        + 1.0 / (rs + 1.0) ** 2
        + np.sin(v) / (2.0 * np.pi)
        - np.cos(v) / (rs + 1.0)
        - np.cos(u) / (rs * (rs + 1.0))
    )
    return out


def shannon_entropy(p) -> float:
    """-sum p log p in nats, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    if abs(p.sum() - 1.0) > 1e-6:
        raise ValueError(f"probabilities must sum to 1, got {p.sum():.8f}")
    pos = p[p > 0]
    return float(-np.sum(pos * np.log(pos)))


def pt_entropy(L: int) -> float:
    """Mean output entropy of Porter-Thomas states: L ln 2 - 1 + gamma.

    Large-N asymptotic; accurate against Haar sampling for L >= 7.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    return L * np.log(2.0) - 1.0 + np.euler_gamma


def haar_state(N: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform pure state: normalized i.i.d. complex Gaussian amplitudes."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    return v / np.linalg.norm(v)
