"""Three-step joint preparation of a two-qubit state over a six-qubit channel.

Alice (qubits 1, 2) knows the amplitudes and measures first, Bob (qubits
3, 4) knows the phases and measures in a basis conditioned on Alice's
outcome ``k``, and Charlie (qubits 5, 6) applies a Pauli correction
depending on ``(k, m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    X,
    Y,
    Z,
    ZeroProbabilityBranch,
    apply,
    fidelity_pure,
    measure_project,
    permute_qubits,
    tensor,
)

# Channel is built in factor order (1,3,5)(2,4,6); entry j gives the
# position in that order of canonical qubit j + 1.
_BUILD_ORDER = (1, 3, 5, 2, 4, 6)
_TO_CANONICAL = tuple(_BUILD_ORDER.index(q) + 1 for q in range(1, 7))


@dataclass(frozen=True)
class TargetState:
    """The state to prepare, in hyperspherical angles plus relative phases."""

    eta: tuple[float, float, float]
    phi: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.eta) != 3 or len(self.phi) != 3:
            raise ValueError("eta and phi must each have three entries")
        for e in self.eta:
            if not -1e-12 <= e <= math.pi / 2 + 1e-12:
                raise ValueError(f"eta angle {e} outside [0, pi/2]")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "TargetState":
        """Draw from the uniform (unitarily invariant) ensemble."""
        u = rng.random(3)
        eta = tuple(float(np.arcsin(u[i] ** (1.0 / (2 * (i + 1))))) for i in range(3))
        phi = tuple(float(x) for x in rng.uniform(0.0, 2 * math.pi, 3))
        return cls(eta, phi)


@dataclass(frozen=True)
class ControlParams:
    theta: float = math.pi / 4
    xi: float = math.pi / 4

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.xi)):
            raise ValueError("control parameters must be finite")


@dataclass(frozen=True)
class BranchResult:
    k: int
    m: int
    p_k: float
    p_km: float
    fidelity: float

    @property
    def weight(self) -> float:
        return self.p_k * self.p_km


def amplitudes(target: TargetState) -> np.ndarray:
    e1, e2, e3 = target.eta
    return np.array(
        [
            math.cos(e3),
            math.sin(e3) * math.cos(e2),
            math.sin(e3) * math.sin(e2) * math.cos(e1),
            math.sin(e3) * math.sin(e2) * math.sin(e1),
        ]
    )


def target_vector(target: TargetState) -> np.ndarray:
    lam = amplitudes(target)
    phases = np.exp(1j * np.array([0.0, *target.phi]))
    return lam * phases


def build_channel(theta: float) -> np.ndarray:
    """GHZ state on qubits 1,3,5 times cos(theta)|000> + sin(theta)|111> on 2,4,6."""
    ghz = (tensor([1, 0], [1, 0], [1, 0]) + tensor([0, 1], [0, 1], [0, 1])) / math.sqrt(2)
    ghz_like = np.zeros(8, dtype=complex)
    ghz_like[0] = math.cos(theta)
    ghz_like[7] = math.sin(theta)
    return permute_qubits(np.kron(ghz, ghz_like), _TO_CANONICAL)


def alice_matrix(lambdas) -> np.ndarray:
    l0, l1, l2, l3 = lambdas
    return np.array(
        [
            [l0, -l1, -l2, -l3],
            [l1, l0, l3, -l2],
            [l2, -l3, l0, l1],
            [l3, l2, -l1, l0],
        ],
        dtype=complex,
    )


def alice_basis(lambdas) -> list[np.ndarray]:
    """Alice's measurement vectors; vector k is column k of the amplitude matrix.

    Reading the matrix row-wise breaks the noiseless protocol, so basis
    vectors are taken as columns: |omega_k> = sum_l A[l, k] |l>.
    """
    return list(alice_matrix(lambdas).T)


def bob_phase_matrix(phis, xi: float) -> np.ndarray:
    """Bob's xi-rotated phase matrix before the k-dependent Pauli factor."""
    c, s = math.cos(xi), math.sin(xi)
    e1, e2, e3 = (np.exp(-1j * p) for p in phis)
    return np.array(
        [
            [c, c, s, s],
            [e1 * c, -e1 * c, e1 * s, -e1 * s],
            [e2 * s, e2 * s, -e2 * c, -e2 * c],
            [e3 * s, -e3 * s, -e3 * c, e3 * c],
        ]
    ) / math.sqrt(2)


def _check_index(name: str, value: int) -> int:
    if value not in (0, 1, 2, 3):
        raise ValueError(f"{name} must be in 0..3, got {value!r}")
    return value


def pauli_frame(k: int) -> np.ndarray:
    """Bob's k-dependent prefactor (-iY)^[k/2] (x) Z^[k/2] (-iY)^(k mod 2)."""
    _check_index("k", k)
    minus_iy = -1j * Y
    hi, lo = k // 2, k % 2
    left = np.linalg.matrix_power(minus_iy, hi)
    right = np.linalg.matrix_power(Z, hi) @ np.linalg.matrix_power(minus_iy, lo)
    return tensor(left, right)


def bob_matrix(phis, k: int, xi: float) -> np.ndarray:
    return pauli_frame(k) @ bob_phase_matrix(phis, xi)


def bob_basis(phis, k: int, xi: float) -> list[np.ndarray]:
    """Bob's vectors for Alice's outcome ``k``: columns of T(k) @ B(phi, xi)."""
    return list(bob_matrix(phis, k, xi).T)


def correction(k: int, m: int) -> np.ndarray:
    """Charlie's unitary Z^[m/2] X^[k/2] (x) Z^(m mod 2) X^(k mod 2)."""
    _check_index("k", k)
    _check_index("m", m)
    mp = np.linalg.matrix_power
    return tensor(mp(Z, m // 2) @ mp(X, k // 2), mp(Z, m % 2) @ mp(X, k % 2))


def run_protocol(channel: np.ndarray, target: TargetState, xi: float) -> list[BranchResult]:
    """Enumerate all 16 measurement branches, ``k`` outer and ``m`` inner.

    A branch whose probability falls below the zero threshold is reported
    with fidelity 0 and contributes no weight.
    """
    channel = np.asarray(channel, dtype=complex)
    if channel.shape == (64,):
        channel = np.outer(channel, channel.conj())
    if channel.shape != (64, 64):
        raise ValueError(f"expected a six-qubit density matrix, got {channel.shape}")
    psi = target_vector(target)
    omegas = alice_basis(amplitudes(target))
    results = []
    for k in range(4):
        try:
            rho_bc, p_k = measure_project(channel, omegas[k], (1, 2))
        except ZeroProbabilityBranch:
            results.extend(BranchResult(k, m, 0.0, 0.0, 0.0) for m in range(4))
            continue
        sigmas = bob_basis(target.phi, k, xi)
        for m in range(4):
            try:
                rho_c, p_km = measure_project(rho_bc, sigmas[m], (1, 2))
            except ZeroProbabilityBranch:
                results.append(BranchResult(k, m, p_k, 0.0, 0.0))
                continue
            fixed = apply(correction(k, m), rho_c)
            results.append(BranchResult(k, m, p_k, p_km, fidelity_pure(fixed, psi)))
    return results


def outcome_averaged_fidelity(branches) -> float:
    """Probability-weighted mean of the branch fidelities."""
    return float(sum(b.p_k * b.p_km * b.fidelity for b in branches))


__all__ = [
    "BranchResult",
    "ControlParams",
    "TargetState",
    "alice_basis",
    "alice_matrix",
    "amplitudes",
    "bob_basis",
    "bob_matrix",
    "bob_phase_matrix",
    "build_channel",
    "correction",
    "outcome_averaged_fidelity",
    "pauli_frame",
    "run_protocol",
    "target_vector",
]
