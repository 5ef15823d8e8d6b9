"""Dense statevector with in-place strided gate kernels.

Basis indexing is little-endian: qubit ``k`` is bit ``k`` of the amplitude
index. Two-qubit matrices are indexed ``2 * bit(first) + bit(second)`` over
the operands in call order.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

_S2 = 1 / math.sqrt(2)

FIXED_GATES: dict[str, np.ndarray] = {
    "id": np.eye(2, dtype=complex),
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t: float) -> np.ndarray:
    return np.array([[cmath.exp(-0.5j * t), 0], [0, cmath.exp(0.5j * t)]], dtype=complex)


PARAM_GATES = {
    "rx": (1, _rx),
    "ry": (1, _ry),
    "rz": (1, _rz),
    "u1": (1, lambda lam: np.array([[1, 0], [0, cmath.exp(1j * lam)]], dtype=complex)),
    "u2": (2, lambda phi, lam: u3_matrix(math.pi / 2, phi, lam)),
    "u3": (3, u3_matrix),
}

# name -> (parameter count, qubit count); mz and reset are non-unitary.
SUPPORTED_GATES: dict[str, tuple[int, int]] = {
    **{name: (0, int(math.log2(m.shape[0]))) for name, m in FIXED_GATES.items()},
    **{name: (n, 1) for name, (n, _) in PARAM_GATES.items()},
    "mz": (0, 1),
    "reset": (0, 1),
}


def gate_matrix(name: str, params=()) -> np.ndarray:
    if name in FIXED_GATES:
        return FIXED_GATES[name]
    _, make = PARAM_GATES[name]
    return make(*params)


class StateVector:
    def __init__(self, num_qubits: int = 0):
        self.num_qubits = num_qubits
        self.amplitudes = np.zeros(1 << num_qubits, dtype=complex)
        self.amplitudes[0] = 1.0

    def allocate(self, count: int) -> None:
        """Tensor ``count`` fresh |0> qubits onto the high end of the register."""
        grown = np.zeros(len(self.amplitudes) << count, dtype=complex)
        grown[: len(self.amplitudes)] = self.amplitudes
        self.amplitudes = grown
        self.num_qubits += count

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def _pairs(self, qubit: int) -> np.ndarray:
        # view[:, b, :] addresses every amplitude whose bit `qubit` equals b
        return self.amplitudes.reshape(-1, 2, 1 << qubit)

    def apply_1q(self, matrix: np.ndarray, qubit: int) -> None:
        v = self._pairs(qubit)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :].copy()
        v[:, 0, :] = matrix[0, 0] * a0 + matrix[0, 1] * a1
        v[:, 1, :] = matrix[1, 0] * a0 + matrix[1, 1] * a1

    def apply_2q(self, matrix: np.ndarray, first: int, second: int) -> None:
        n = self.num_qubits
        t = self.amplitudes.reshape((2,) * n)

        def block(b0: int, b1: int):
            idx = [slice(None)] * n
            idx[n - 1 - first] = b0
            idx[n - 1 - second] = b1
            return tuple(idx)

        keys = [block(r >> 1, r & 1) for r in range(4)]
        old = [t[k].copy() for k in keys]
        for r, key in enumerate(keys):
            acc = None
            for c in range(4):
                coeff = matrix[r, c]
                if coeff != 0:
                    term = coeff * old[c]
                    acc = term if acc is None else acc + term
            t[key] = 0 if acc is None else acc

    def apply(self, name: str, params, qubits) -> None:
        matrix = gate_matrix(name, params)
        if len(qubits) == 1:
            self.apply_1q(matrix, qubits[0])
        else:
            self.apply_2q(matrix, qubits[0], qubits[1])

    def probability_one(self, qubit: int) -> float:
        ones = self._pairs(qubit)[:, 1, :]
        return float(np.vdot(ones, ones).real)

    def measure(self, qubit: int, rng: np.random.Generator) -> int:
        """Sample ``qubit`` in the computational basis, collapsing the state."""
        p1 = min(max(self.probability_one(qubit), 0.0), 1.0)
        bit = 1 if rng.random() < p1 else 0
        v = self._pairs(qubit)
        v[:, 1 - bit, :] = 0
        prob = p1 if bit else 1.0 - p1
        self.amplitudes /= math.sqrt(prob)
        return bit

    def reset(self, qubit: int, rng: np.random.Generator) -> None:
        if self.measure(qubit, rng):
            self.apply_1q(FIXED_GATES["x"], qubit)
