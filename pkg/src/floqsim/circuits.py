"""Random quantum circuits on a line: the digital baseline for sampling runs.

A circuit is m layers; each layer applies one sub-layer of single-qubit gates
followed by one sub-layer of controlled-Z gates on nearest-neighbor bonds.
Layer 1 is all Hadamards; later single-qubit gates are drawn uniformly from
{sqrt(X), sqrt(Y), T}.  CZ bonds form a brickwork: qubit pairs (0,1), (2,3),
... on odd layers and (1,2), (3,4), ... on even layers (0-based qubits; qubit
q is chain site q+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Gate(str, Enum):
    H = "H"
    SQRT_X = "SQRT_X"
    SQRT_Y = "SQRT_Y"
    T = "T"


GATE_MATRICES = {
    Gate.H: np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0),
    Gate.SQRT_X: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=np.complex128),
    Gate.SQRT_Y: 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]], dtype=np.complex128),
    Gate.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
}

_RANDOM_SET = (Gate.SQRT_X, Gate.SQRT_Y, Gate.T)


@dataclass(frozen=True)
class CircuitLayer:
    gates: tuple[Gate, ...]
    cz_bonds: tuple[tuple[int, int], ...]


def brickwork_bonds(L: int, layer_index: int) -> tuple[tuple[int, int], ...]:
    """Disjoint nearest-neighbor CZ pairs, alternating with layer parity."""
    start = layer_index % 2
    return tuple((q, q + 1) for q in range(start, L - 1, 2))


def build_circuit(
    L: int,
    m: int,
    rng: np.random.Generator,
    forbid_repeat: bool = False,
    final_hadamard: bool = False,
) -> list[CircuitLayer]:
    """Draw a random m-layer circuit on L qubits.

    forbid_repeat redraws any gate equal to the same qubit's previous gate;
    final_hadamard appends an all-H layer without a CZ sub-layer.  Both are
    off by default.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    layers = [CircuitLayer(gates=(Gate.H,) * L, cz_bonds=brickwork_bonds(L, 0))]
    prev = layers[0].gates
    for layer_index in range(1, m):
        draws = rng.integers(0, 3, size=L)
        gates = []
        for q in range(L):
            gate = _RANDOM_SET[draws[q]]
            if forbid_repeat and gate == prev[q]:
                others = [g for g in _RANDOM_SET if g != prev[q]]
                gate = others[int(rng.integers(0, 2))]
            gates.append(gate)
        layer = CircuitLayer(gates=tuple(gates), cz_bonds=brickwork_bonds(L, layer_index))
        layers.append(layer)
        prev = layer.gates
    if final_hadamard:
        layers.append(CircuitLayer(gates=(Gate.H,) * L, cz_bonds=()))
    return layers


def _apply_single_qubit(psi: np.ndarray, gate: np.ndarray, qubit: int) -> None:
    v = psi.reshape(-1, 2, 1 << qubit)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = gate[0, 0] * a + gate[0, 1] * b
    v[:, 1, :] = gate[1, 0] * a + gate[1, 1] * b


def _apply_cz(psi: np.ndarray, q0: int, q1: int) -> None:
    # adjacent bond (q, q+1): flip the sign where both bits are set
    v = psi.reshape(-1, 2, 2, 1 << q0)
    v[:, 1, 1, :] *= -1.0


def simulate_circuit(circuit: list[CircuitLayer], L: int, state=None) -> np.ndarray:
    """Run the circuit on |0...0> (or a given start state) and return the result."""
    if state is None:
        psi = np.zeros(1 << L, dtype=np.complex128)
        psi[0] = 1.0
    else:
        psi = np.array(state, dtype=np.complex128)
    for layer in circuit:
        if len(layer.gates) != L:
            raise ValueError("layer width does not match L")
        for q, tag in enumerate(layer.gates):
            _apply_single_qubit(psi, GATE_MATRICES[tag], q)
        for q0, q1 in layer.cz_bonds:
            if q1 != q0 + 1:
                raise ValueError(f"CZ bonds must be nearest-neighbor, got {(q0, q1)}")
            _apply_cz(psi, q0, q1)
    return psi
