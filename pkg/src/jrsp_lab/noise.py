"""Single-qubit noise channels and the noisy six-qubit resource state."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import I2, X, Y, Z, apply, embed, projector
from .protocol import build_channel


class NoiseKind(enum.Enum):
    BitFlip = "B"
    PhaseFlip = "P"
    AmplitudeDamping = "A"
    Depolarizing = "D"

    @classmethod
    def parse(cls, value) -> "NoiseKind":
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for kind in cls:
            if text.upper() == kind.value or text.lower() == kind.name.lower():
                return kind
        raise ValueError(f"unknown noise kind {value!r}; expected one of B, P, A, D")

    def __str__(self) -> str:
        return self.value


def _sqrt(x: float) -> float:
    if x < -1e-14:
        raise ValueError(f"negative argument {x} under square root")
    return math.sqrt(max(x, 0.0))


def _check_strength(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise strength {p} outside [0, 1]")
    return p


@dataclass(frozen=True)
class KrausSet:
    kind: NoiseKind
    p: float
    operators: tuple[np.ndarray, ...]

    def completeness_defect(self) -> float:
        """max |sum K^dagger K - I|; zero for a trace-preserving set."""
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - I2)))


def kraus_set(kind, p: float) -> KrausSet:
    kind = NoiseKind.parse(kind)
    p = _check_strength(p)
    if kind is NoiseKind.BitFlip:
        ops = (_sqrt(1 - p) * I2, _sqrt(p) * X)
    elif kind is NoiseKind.PhaseFlip:
        ops = (_sqrt(1 - p) * I2, _sqrt(p) * Z)
    elif kind is NoiseKind.AmplitudeDamping:
        ops = (
            np.array([[1, 0], [0, _sqrt(1 - p)]], dtype=complex),
            np.array([[0, _sqrt(p)], [0, 0]], dtype=complex),
        )
    else:
        q = _sqrt(p / 4)
        ops = (_sqrt(1 - 3 * p / 4) * I2, q * X, q * Y, q * Z)
    return KrausSet(kind, p, tuple(np.asarray(o, dtype=complex) for o in ops))


def apply_channel(rho: np.ndarray, qubit: int, ks: KrausSet) -> np.ndarray:
    """Apply a single-qubit Kraus map to ``qubit`` of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    n = int(rho.shape[0]).bit_length() - 1
    out = np.zeros_like(rho)
    for k in ks.operators:
        out += apply(embed(k, [qubit], n), rho)
    return out


@dataclass(frozen=True)
class NoiseScenario:
    """Noise on Alice's route (qubits 1, 2) and Charlie's route (qubits 5, 6).

    ``pre_x`` means every qubit bound for a bit-flip route is hit with X
    before it leaves; it has no effect on routes of other kinds.
    """

    alpha: NoiseKind
    p_a: float
    gamma: NoiseKind
    p_c: float
    pre_x: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", NoiseKind.parse(self.alpha))
        object.__setattr__(self, "gamma", NoiseKind.parse(self.gamma))
        object.__setattr__(self, "p_a", _check_strength(self.p_a))
        object.__setattr__(self, "p_c", _check_strength(self.p_c))

    @classmethod
    def noiseless(cls) -> "NoiseScenario":
        return cls(NoiseKind.BitFlip, 0.0, NoiseKind.BitFlip, 0.0)

    @property
    def pre_x_qubits(self) -> tuple[int, ...]:
        if not self.pre_x:
            return ()
        qubits: tuple[int, ...] = ()
        if self.alpha is NoiseKind.BitFlip:
            qubits += (1, 2)
        if self.gamma is NoiseKind.BitFlip:
            qubits += (5, 6)
        return qubits

    @property
    def pre_x_effective(self) -> bool:
        return bool(self.pre_x_qubits)

    def per_qubit(self) -> list[tuple[NoiseKind, float]]:
        """Six per-qubit assignments, qubits 3 and 4 noiseless."""
        a = (self.alpha, self.p_a)
        c = (self.gamma, self.p_c)
        quiet = (NoiseKind.BitFlip, 0.0)
        return [a, a, quiet, quiet, c, c]


def general_noisy_state(
    theta: float,
    per_qubit: Sequence[tuple[NoiseKind, float]],
    pre_x: Sequence[int] = (),
) -> np.ndarray:
    """Resource state after independent noise on each of the six qubits."""
    if len(per_qubit) != 6:
        raise ValueError("need exactly six (kind, p) assignments")
    rho = projector(build_channel(theta))
    for q in pre_x:
        rho = apply(embed(X, [q], 6), rho)
    for q in (1, 2, 3, 4, 5, 6):
        kind, p = per_qubit[q - 1]
        if p == 0.0:
            continue
        rho = apply_channel(rho, q, kraus_set(kind, p))
    return rho


def noisy_channel_state(theta: float, scenario: NoiseScenario) -> np.ndarray:
    return general_noisy_state(theta, scenario.per_qubit(), scenario.pre_x_qubits)
