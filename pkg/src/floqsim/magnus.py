"""Closed-form high-frequency (Magnus) expansion terms and truncated evolution.

Only orders 0-2 have closed forms here; the order-1 term vanishes for the
sinusoidal envelope when the cycle reference time is t0 = 0, which is what
truncated_evolve assumes.  All operators are dense and hermitian, so these
routines are restricted to small chains.
"""

from __future__ import annotations

import numpy as np

from .chain import ModelParams, diagonal_energies, validate_disorder
from .errors import ResourceLimitError
from .evolution import DENSE_LIMIT

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def embed(ops: dict[int, np.ndarray], L: int) -> np.ndarray:
    """Dense operator with 2x2 factors on the given sites (1-based, site 1 = LSB)."""
    eye = np.eye(2, dtype=np.complex128)
    M = np.eye(1, dtype=np.complex128)
    for site in range(L, 0, -1):
        M = np.kron(M, ops.get(site, eye))
    return M


def transverse_sum(L: int) -> np.ndarray:
    """Dense sum_i X_i assembled from bit flips."""
    N = 1 << L
    M = np.zeros((N, N), dtype=np.complex128)
    rows = np.arange(N)
    for site in range(L):
        M[rows ^ (1 << site), rows] += 1.0
    return M


def _check_dense(params: ModelParams):
    if params.L > DENSE_LIMIT:
        raise ResourceLimitError(f"L={params.L} exceeds the dense limit {DENSE_LIMIT}")


def hf0(params: ModelParams, disorder) -> np.ndarray:
    """Order-0 term: the time average H_0 + 0.5 * H_d."""
    _check_dense(params)
    h = validate_disorder(disorder, params)
    M = np.diag(diagonal_energies(params, h)).astype(np.complex128)
    M += 0.5 * params.F * transverse_sum(params.L)
    return M


def hf1(params: ModelParams, disorder, t0: float) -> np.ndarray:
    """Order-1 term for a general cycle reference time t0.

    (F sin(omega t0) / omega) * [sum_j h_j Y_j
        + J sum_j (Y_j Z_{j+1} + Z_j Y_{j+1})]; identically zero at t0 = 0.
    """
    _check_dense(params)
    h = validate_disorder(disorder, params)
    L, J = params.L, params.J
    pref = params.F * np.sin(params.omega * t0) / params.omega
    M = np.zeros((params.dim, params.dim), dtype=np.complex128)
    for j in range(1, L + 1):
        M += h[j - 1] * embed({j: PAULI_Y}, L)
    for j in range(1, L):
        M += J * (embed({j: PAULI_Y, j + 1: PAULI_Z}, L)
                  + embed({j: PAULI_Z, j + 1: PAULI_Y}, L))
    return pref * M


def hf2(params: ModelParams, disorder) -> np.ndarray:
    """Order-2 term at t0 = 0, including the three-site Z X Z interactions.

    (2F/omega^2) [sum_j h_j^2 X_j
        + 2J sum_j (h_j X_j Z_{j+1} + h_{j+1} Z_j X_{j+1})
        + J^2 sum_j (X_j + X_{j+1})
        + 2J^2 sum_j Z_j X_{j+1} Z_{j+2}]
    - (5F^2/(4 omega^2)) [sum_j h_j Z_j + 2J sum_j (Z_j Z_{j+1} - Y_j Y_{j+1})]

    with bond sums over j = 1..L-1 and triple sums over j = 1..L-2.
    """
    _check_dense(params)
    h = validate_disorder(disorder, params)
    L, J, F, omega = params.L, params.J, params.F, params.omega
    X, Y, Z = PAULI_X, PAULI_Y, PAULI_Z
    A = np.zeros((params.dim, params.dim), dtype=np.complex128)
    for j in range(1, L + 1):
        A += h[j - 1] ** 2 * embed({j: X}, L)
    for j in range(1, L):
        A += 2 * J * (h[j - 1] * embed({j: X, j + 1: Z}, L)
                      + h[j] * embed({j: Z, j + 1: X}, L))
        A += J**2 * (embed({j: X}, L) + embed({j + 1: X}, L))
    for j in range(1, L - 1):
        A += 2 * J**2 * embed({j: Z, j + 1: X, j + 2: Z}, L)
    B = np.zeros_like(A)
    for j in range(1, L + 1):
        B += h[j - 1] * embed({j: Z}, L)
    for j in range(1, L):
        B += 2 * J * (embed({j: Z, j + 1: Z}, L) - embed({j: Y, j + 1: Y}, L))
    return (2 * F / omega**2) * A - (5 * F**2 / (4 * omega**2)) * B


def hermiticity_error(M: np.ndarray) -> float:
    return float(np.abs(M - M.conj().T).max())


def truncated_evolve(state0: np.ndarray, params: ModelParams, disorder, order: int) -> np.ndarray:
    """Evolve one period under the series truncated at the given order (0 or 2).

    The reference time is fixed to t0 = 0, so the order-1 term is absent.
    """
    if order not in (0, 2):
        raise ValueError(f"order must be 0 or 2, got {order}")
    _check_dense(params)
    H = hf0(params, disorder)
    if order == 2:
        H += hf2(params, disorder)
    vals, vecs = np.linalg.eigh(H)
    state0 = np.asarray(state0, dtype=np.complex128)
    phases = np.exp(-1j * vals * params.period)
    return vecs @ (phases * (vecs.conj().T @ state0))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2 for two normalized states of equal dimension."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)
