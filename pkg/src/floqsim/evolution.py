"""Time-ordered propagation over drive cycles and Floquet eigenphases.

One cycle is integrated with symmetric (Strang) splitting: the diagonal part
is a pure phase in the computational basis, and the transverse part at the
substep midpoint factorizes into independent single-site X rotations, so one
substep costs O(2^L) with no dense matrices.  The dense one-cycle unitary is
built column-by-column from basis-state propagation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .chain import Envelope, ModelParams, diagonal_energies, norm_error, validate_disorder
from .errors import ConfigError, NumericError, ResourceLimitError, StateError

DENSE_LIMIT = 12


@dataclass(frozen=True)
class IntegratorConfig:
    """Substep count per cycle and the self-convergence target.

    A substep count K is accepted when the fidelity deficit between the K and
    2K results of one cycle is below convergence_tol (see accepted_substeps).
    """

    substeps_per_cycle: int = 256
    convergence_tol: float = 1e-9

    def __post_init__(self):
        k = self.substeps_per_cycle
        if k < 8 or k % 2 != 0:
            raise ConfigError(f"substeps_per_cycle must be even and >= 8, got {k}")
        if not self.convergence_tol > 0:
            raise ConfigError("convergence_tol must be > 0")

    def doubled(self) -> "IntegratorConfig":
        return IntegratorConfig(2 * self.substeps_per_cycle, self.convergence_tol)


@dataclass(frozen=True)
class FloquetSpectrum:
    """Eigenphases of a one-cycle unitary, sorted ascending in [0, 2*pi)."""

    phases: np.ndarray
    moduli_error: float

    def __post_init__(self):
        if self.moduli_error >= 1e-8:
            raise NumericError(
                f"eigenvalue moduli deviate from 1 by {self.moduli_error:.3e}"
            )


@numba.njit(cache=True)
def _strang_cycle(psi, ph_half, ph_full, cos_phi, sin_phi, L):
    """In-place splitting cycle on a batch of states.

    psi: (B, N) complex rows; ph_half/ph_full: (M, N) diagonal phase factors
    with M == B (per-row disorder) or M == 1 (shared); cos_phi/sin_phi: (K,)
    rotation angles at the substep midpoints.  Adjacent diagonal half-steps
    are fused into full steps between rotations.
    """
    B, N = psi.shape
    K = cos_phi.shape[0]
    shared = ph_half.shape[0] == 1
    for b in range(B):
        row = psi[b]
        half = ph_half[0] if shared else ph_half[b]
        full = ph_full[0] if shared else ph_full[b]
        for n in range(N):
            row[n] *= half[n]
        for k in range(K):
            ck = cos_phi[k]
            msk = -1j * sin_phi[k]
            if sin_phi[k] != 0.0:
                for site in range(L):
                    stride = 1 << site
                    base = 0
                    while base < N:
                        for off in range(stride):
                            i0 = base + off
                            i1 = i0 + stride
                            a = row[i0]
                            c = row[i1]
                            row[i0] = ck * a + msk * c
                            row[i1] = msk * a + ck * c
                        base += 2 * stride
            ph = half if k == K - 1 else full
            for n in range(N):
                row[n] *= ph[n]
    return psi


def _cycle_tables(params: ModelParams, envelope: Envelope, integrator: IntegratorConfig):
    """Rotation angles at substep midpoints and the substep length."""
    K = integrator.substeps_per_cycle
    dt = params.period / K
    t_mid = (np.arange(K) + 0.5) * dt
    phi = params.F * envelope.amplitude(params.omega, t_mid) * dt
    return np.cos(phi), np.sin(phi), dt


def _diag_phases(params: ModelParams, disorders: np.ndarray, dt: float):
    energies = diagonal_energies(params, disorders)
    energies = np.atleast_2d(energies)
    ph_half = np.exp(-0.5j * energies * dt)
    return ph_half, ph_half * ph_half


def propagate_cycle_batch(
    states: np.ndarray,
    params: ModelParams,
    disorders: np.ndarray,
    envelope: Envelope = Envelope.SINUSOIDAL,
    integrator: IntegratorConfig = IntegratorConfig(),
) -> np.ndarray:
    """Propagate a batch of row states through one cycle.

    disorders of shape (L,) applies the same realization to every row;
    shape (B, L) gives each row its own realization.
    """
    states = np.ascontiguousarray(states, dtype=np.complex128)
    disorders = np.asarray(disorders, dtype=float)
    if disorders.ndim == 2 and disorders.shape[0] != states.shape[0]:
        raise ValueError("row counts of states and disorders differ")
    cos_phi, sin_phi, dt = _cycle_tables(params, envelope, integrator)
    ph_half, ph_full = _diag_phases(params, disorders, dt)
    return _strang_cycle(states.copy(), ph_half, ph_full, cos_phi, sin_phi, params.L)


def propagate_cycle(
    state: np.ndarray,
    params: ModelParams,
    disorder,
    envelope: Envelope = Envelope.SINUSOIDAL,
    integrator: IntegratorConfig = IntegratorConfig(),
    norm_tol: float = 1e-8,
) -> np.ndarray:
    """Evolve a normalized state through one full drive period.

    Parameters
    ----------
    state : (2^L,) complex array, normalized to norm_tol.
    params, disorder, envelope : chain model, one disorder draw, drive shape.
    integrator : substep configuration; norm is preserved to 1e-10.

    Returns
    -------
    (2^L,) complex array, the state after one period.
    """
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (params.dim,):
        raise ValueError(f"state must have shape ({params.dim},), got {state.shape}")
    if norm_error(state) > norm_tol:
        raise StateError(f"state norm deviates from 1 by {norm_error(state):.3e}")
    h = validate_disorder(disorder, params)
    return propagate_cycle_batch(state[None, :], params, h, envelope, integrator)[0]


def floquet_unitary(
    params: ModelParams,
    disorder,
    envelope: Envelope = Envelope.SINUSOIDAL,
    integrator: IntegratorConfig = IntegratorConfig(),
    dense_limit: int = DENSE_LIMIT,
    check_unitarity: bool = True,
) -> np.ndarray:
    """Dense one-cycle unitary; column j is propagate_cycle of basis state j."""
    if params.L > dense_limit:
        raise ResourceLimitError(
            f"L={params.L} exceeds the dense limit {dense_limit}"
        )
    h = validate_disorder(disorder, params)
    basis = np.eye(params.dim, dtype=np.complex128)
    rows = propagate_cycle_batch(basis, params, h, envelope, integrator)
    U = np.ascontiguousarray(rows.T)
    if check_unitarity:
        resid = unitarity_residual(U)
        if resid >= 1e-8:
            raise NumericError(f"unitarity residual {resid:.3e} >= 1e-8")
    return U


def unitarity_residual(U: np.ndarray) -> float:
    """Max-entry deviation of U†U from the identity."""
    N = U.shape[0]
    return float(np.abs(U.conj().T @ U - np.eye(N)).max())


def eigenphases(U: np.ndarray, unitarity_tol: float = 1e-8) -> FloquetSpectrum:
    """Eigenphases arg(eigenvalues) of a unitary, mapped to [0, 2*pi), sorted."""
    resid = unitarity_residual(U)
    if resid >= unitarity_tol:
        raise NumericError(f"input is not unitary: residual {resid:.3e}")
    lam = np.linalg.eigvals(U)
    moduli_error = float(np.abs(np.abs(lam) - 1.0).max())
    phases = np.sort(np.mod(np.angle(lam), 2.0 * np.pi))
    return FloquetSpectrum(phases=phases, moduli_error=moduli_error)


def evolve_quenched(
    state0: np.ndarray,
    params: ModelParams,
    realizations,
    envelope: Envelope = Envelope.SINUSOIDAL,
    integrator: IntegratorConfig = IntegratorConfig(),
) -> list[np.ndarray]:
    """Apply one cycle per disorder realization, redrawing the fields each time.

    Returns the state after each cycle, m = 1..len(realizations).
    """
    states = []
    psi = np.asarray(state0, dtype=np.complex128)
    for h in realizations:
        psi = propagate_cycle(psi, params, h, envelope, integrator, norm_tol=1e-7)
        states.append(psi)
    return states


def convergence_deficit(
    state: np.ndarray,
    params: ModelParams,
    disorder,
    envelope: Envelope,
    integrator: IntegratorConfig,
) -> float:
    """Fidelity deficit of one cycle between K and 2K substeps (clipped >= 0)."""
    a = propagate_cycle(state, params, disorder, envelope, integrator)
    b = propagate_cycle(state, params, disorder, envelope, integrator.doubled())
    return max(0.0, 1.0 - abs(np.vdot(a, b)) ** 2)


def accepted_substeps(
    params: ModelParams,
    envelope: Envelope,
    integrator: IntegratorConfig,
    rng: np.random.Generator,
    probes: int = 3,
    max_substeps: int = 1 << 16,
) -> IntegratorConfig:
    """Double the substep count until probe states pass the convergence target.

    Probes one random disorder draw per probe state; the first probe state is
    the all-up initial state, the rest are random unit vectors.
    """
    N = params.dim
    states = [np.eye(1, N, dtype=np.complex128)[0]]
    for _ in range(max(0, probes - 1)):
        v = rng.normal(size=N) + 1j * rng.normal(size=N)
        states.append(v / np.linalg.norm(v))
    disorders = [rng.uniform(0.0, params.W, params.L) for _ in states]
    cfg = integrator
    while True:
        worst = max(
            convergence_deficit(s, params, h, envelope, cfg)
            for s, h in zip(states, disorders)
        )
        if worst < cfg.convergence_tol:
            return cfg
        if 2 * cfg.substeps_per_cycle > max_substeps:
            raise ConfigError(
                f"no substep count <= {max_substeps} meets "
                f"convergence_tol={cfg.convergence_tol}"
            )
        cfg = cfg.doubled()
