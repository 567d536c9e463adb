"""Boltzmann-machine targets and the quenched-disorder training protocol.

Synthetic datasets come from an all-to-all classical Ising energy with Gibbs
weights, sampled exactly by enumerating all 2^L outcomes.  Training steers an
unconditionally quenched chain: every cycle, a batch of candidate disorder
realizations propagates the committed state one period each, the candidate
with the lowest KL cost against the smoothed data histogram is committed, and
the rest are discarded.  Binary vectors z use the same bit convention as the
chain basis (site 1 = LSB, bit 0 -> z = +1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import Envelope, ModelParams, initial_state, output_probs, spin_table
from .errors import ResourceLimitError
from .evolution import IntegratorConfig, propagate_cycle, propagate_cycle_batch
from .stats import kl_discrete, shannon_entropy

EXACT_ENUMERATION_LIMIT = 20


@dataclass(frozen=True)
class BoltzmannModel:
    """All-to-all classical Ising energy coefficients and a temperature.

    a holds the L biases; b is strictly upper triangular with b[i, j] the
    coupling of the (0-based) site pair i < j; temperature is k_B T.
    """

    a: np.ndarray
    b: np.ndarray
    temperature: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        L = a.shape[0]
        if a.ndim != 1 or b.shape != (L, L):
            raise ValueError(f"need a of shape (L,) and b of shape (L, L), got {a.shape} and {b.shape}")
        if np.any(np.tril(b) != 0.0):
            raise ValueError("b must be strictly upper triangular")
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def L(self) -> int:
        return self.a.shape[0]


def draw_model(L: int, rng: np.random.Generator, J: float = 1.0, temperature: float = 1.0) -> BoltzmannModel:
    """Random model with biases and couplings uniform on [-J/2, J/2]."""
    a = rng.uniform(-J / 2, J / 2, L)
    b = np.triu(rng.uniform(-J / 2, J / 2, (L, L)), k=1)
    return BoltzmannModel(a=a, b=b, temperature=temperature)


def boltzmann_energy(z, model: BoltzmannModel):
    """E(z) = sum_i a_i z_i + sum_{i<j} b_ij z_i z_j for z in {+1, -1}^L."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != model.L:
        raise ValueError(f"z must have last axis {model.L}, got {z.shape}")
    pair = np.einsum("...i,ij,...j->...", z, model.b, z)
    out = z @ model.a + pair
    return float(out) if out.ndim == 0 else out


def exact_boltzmann(model: BoltzmannModel) -> np.ndarray:
    """Gibbs probabilities over all 2^L outcomes, q(z) = exp(-E/kT)/Z."""
    if model.L > EXACT_ENUMERATION_LIMIT:
        raise ResourceLimitError(
            f"L={model.L} exceeds the enumeration limit {EXACT_ENUMERATION_LIMIT}"
        )
    E = boltzmann_energy(spin_table(model.L).astype(float), model)
    w = np.exp(-(E - E.min()) / model.temperature)
    return w / w.sum()


@dataclass(frozen=True)
class Dataset:
    """Binary samples (rows of +-1) and their normalized outcome histogram."""

    samples: np.ndarray
    empirical_hist: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.samples)
        if z.ndim != 2 or not np.all(np.abs(z) == 1):
            raise ValueError("samples must be a (n, L) array of +-1 entries")
        hist = np.asarray(self.empirical_hist, dtype=float)
        if hist.shape != (1 << z.shape[1],):
            raise ValueError("empirical_hist must cover all 2^L outcomes")
        counts = np.bincount(encode_spins(z), minlength=hist.size)
        if not np.allclose(hist, counts / z.shape[0], atol=1e-12):
            raise ValueError("empirical_hist must equal sample counts / sample total")
        object.__setattr__(self, "empirical_hist", hist)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def L(self) -> int:
        return self.samples.shape[1]


def encode_spins(z) -> np.ndarray:
    """Basis indices of spin rows, inverse of spin_table."""
    z = np.asarray(z)
    bits = ((1 - z) // 2).astype(np.int64)
    return bits @ (1 << np.arange(z.shape[-1], dtype=np.int64))


def sample_dataset(model: BoltzmannModel, n_samples: int, rng: np.random.Generator) -> Dataset:
    """Exact i.i.d. draws from the Gibbs distribution by inverse CDF."""
    q = exact_boltzmann(model)
    cdf = np.cumsum(q)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(n_samples), side="right")
    samples = spin_table(model.L)[idx].copy()
    hist = np.bincount(idx, minlength=q.size) / n_samples
    return Dataset(samples=samples, empirical_hist=hist)


def smoothed_hist(dataset: Dataset, smoothing: float | None = None) -> np.ndarray:
    """Pseudo-count smoothing (q + eps)/(1 + eps*2^L); default eps = 1/(2n)."""
    if smoothing is None:
        smoothing = 1.0 / (2.0 * dataset.n_samples)
    q = dataset.empirical_hist
    return (q + smoothing) / (1.0 + smoothing * q.size)


def training_cost(state: np.ndarray, dataset: Dataset, smoothing: float | None = None) -> float:
    """KL of the full output distribution against the smoothed data histogram."""
    p = output_probs(state)
    return kl_discrete(p, smoothed_hist(dataset, smoothing))


@dataclass(frozen=True)
class TrainingTrace:
    """Per-cycle records of the greedy quenched-disorder search.

    costs/entropies have one row per cycle and one column per candidate;
    chosen_disorder stacks the committed field realizations, which determine
    the committed cycle unitaries.
    """

    chosen_index: np.ndarray
    chosen_cost: np.ndarray
    costs: np.ndarray
    entropies: np.ndarray
    chosen_disorder: np.ndarray
    final_state: np.ndarray

    @property
    def cycles(self) -> int:
        return self.chosen_cost.shape[0]


def _kl_rows(p: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Row-wise KL(p_row || target); zero entries of p contribute 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), 0.0)
    return np.sum(p * (logp - np.log(target)[None, :]), axis=1)


def train(
    params: ModelParams,
    envelope: Envelope,
    dataset: Dataset,
    n_candidates: int,
    m_max: int,
    rng: np.random.Generator,
    integrator: IntegratorConfig = IntegratorConfig(),
    smoothing: float | None = None,
    shots: int = 0,
) -> TrainingTrace:
    """Greedy per-cycle selection among quenched disorder candidates.

    Starting from the all-up product state, each cycle draws n_candidates
    fresh disorder realizations, propagates the committed state one period
    under each, and commits the one with the lowest cost (ties broken by the
    lowest candidate index).  Committed states are never revisited.

    With shots = 0 the cost uses the exact simulated output distribution;
    shots > 0 replaces it by a multinomial resample with that many draws.
    """
    if n_candidates < 1:
        raise ValueError(f"n_candidates must be >= 1, got {n_candidates}")
    if dataset.L != params.L:
        raise ValueError(f"dataset is for L={dataset.L}, params have L={params.L}")
    target = smoothed_hist(dataset, smoothing)
    psi = initial_state(params.L)
    D = n_candidates
    chosen_index = np.empty(m_max, dtype=np.int64)
    chosen_cost = np.empty(m_max)
    costs = np.empty((m_max, D))
    entropies = np.empty((m_max, D))
    chosen_disorder = np.empty((m_max, params.L))
    for m in range(m_max):
        draws = rng.uniform(0.0, params.W, (D, params.L))
        cand = propagate_cycle_batch(
            np.broadcast_to(psi, (D, psi.size)), params, draws, envelope, integrator
        )
        p = np.abs(cand) ** 2
        p /= p.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), 0.0)
        if shots > 0:
            measured = rng.multinomial(shots, p) / shots
            costs[m] = _kl_rows(measured, target)
        else:
            costs[m] = np.sum(p * (logp - np.log(target)[None, :]), axis=1)
        entropies[m] = -np.sum(p * logp, axis=1)
        j = int(np.argmin(costs[m]))
        chosen_index[m] = j
        chosen_cost[m] = costs[m, j]
        chosen_disorder[m] = draws[j]
        psi = cand[j]
    return TrainingTrace(
        chosen_index=chosen_index,
        chosen_cost=chosen_cost,
        costs=costs,
        entropies=entropies,
        chosen_disorder=chosen_disorder,
        final_state=psi,
    )


def memory_divergence(
    params: ModelParams,
    envelope: Envelope,
    m_ref_window: tuple[int, int],
    dm_max: int,
    rng: np.random.Generator,
    integrator: IntegratorConfig = IntegratorConfig(),
    smoothing: float = 1e-12,
    return_final_probs: bool = False,
):
    """KL(p_{m+dm} || p_m) of one unconditional quenched run, vs dm.

    The divergence is averaged over reference cycles m in the inclusive
    window; both distributions get pseudo-count smoothing before the KL.
    Entry dm = 0 is identically zero.  With return_final_probs, also return
    the raw output distribution at the last simulated cycle.
    """
    lo, hi = m_ref_window
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got {m_ref_window}")
    if dm_max < 0:
        raise ValueError(f"dm_max must be >= 0, got {dm_max}")
    N = params.dim
    psi = initial_state(params.L)
    probs: dict[int, np.ndarray] = {}
    final_probs = None
    for m in range(1, hi + dm_max + 1):
        psi = propagate_cycle(
            psi, params, rng.uniform(0.0, params.W, params.L), envelope, integrator
        )
        if m >= lo:
            p = output_probs(psi)
            probs[m] = (p + smoothing) / (1.0 + smoothing * N)
            if m == hi + dm_max:
                final_probs = p
    curve = np.zeros(dm_max + 1)
    refs = range(lo, hi + 1)
    for dm in range(1, dm_max + 1):
        curve[dm] = float(np.mean([kl_discrete(probs[m + dm], probs[m]) for m in refs]))
    if return_final_probs:
        return curve, final_probs
    return curve
