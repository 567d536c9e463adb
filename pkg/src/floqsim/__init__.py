"""Exact simulation of driven, disordered quantum Ising chains.

Covers drive-cycle propagation and Floquet eigenphases, Porter-Thomas
sampling statistics, random-circuit baselines, high-frequency expansion
diagnostics, level-statistics probes of the localization transition, and a
quenched-disorder generative-modeling training protocol.
"""

from ._version import __version__
from .chain import (
    Envelope,
    ModelParams,
    apply_transverse,
    basis_spin,
    diagonal_energies,
    diagonal_energy,
    draw_disorder,
    initial_state,
    output_probs,
)
from .circuits import CircuitLayer, Gate, build_circuit, simulate_circuit
from .errors import (
    ConfigError,
    DivergenceError,
    NumericError,
    ResourceLimitError,
    StateError,
)
from .evolution import (
    FloquetSpectrum,
    IntegratorConfig,
    accepted_substeps,
    convergence_deficit,
    eigenphases,
    evolve_quenched,
    floquet_unitary,
    propagate_cycle,
    propagate_cycle_batch,
)
from .genmodel import (
    BoltzmannModel,
    Dataset,
    TrainingTrace,
    boltzmann_energy,
    draw_model,
    exact_boltzmann,
    memory_divergence,
    sample_dataset,
    train,
    training_cost,
)
from .harness import (
    ExperimentConfig,
    default_config,
    realization_rng,
    run_experiment,
)
from .magnus import fidelity, hf0, hf1, hf2, truncated_evolve
from .stats import (
    Binning,
    KLEstimate,
    ProbSampleSet,
    ensemble_density,
    haar_state,
    kl_discrete,
    kl_to_pt,
    pt_density,
    pt_entropy,
    shannon_entropy,
    spacing_ratios,
)

__all__ = [name for name in dir() if not name.startswith("_")]
