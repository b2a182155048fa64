"""Dense linear algebra on small multi-qubit Hilbert spaces.

Operators and states are plain complex numpy arrays. Qubits are labelled
1..n, qubit 1 being the most significant tensor factor.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

MAX_QUBITS = 6
ZERO_PROBABILITY = 1e-14

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


class ZeroProbabilityBranch(ValueError):
    """Raised when a projective outcome has probability below the threshold."""

    def __init__(self, probability: float):
        super().__init__(f"measurement branch has probability {probability:.3e}")
        self.probability = probability


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def dagger(op: np.ndarray) -> np.ndarray:
    return np.conjugate(np.asarray(op)).T


def ket(bits: str) -> np.ndarray:
    """Computational basis vector, e.g. ``ket("101")``."""
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int(bits, 2)] = 1.0
    return vec


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


def _check_targets(targets: Sequence[int], n_qubits: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubit in {targets}")
    for t in targets:
        if not 1 <= t <= n_qubits:
            raise ValueError(f"qubit {t} outside 1..{n_qubits}")
    return targets


def permute_qubits(op: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a state vector or square operator.

    ``order[j]`` is the (1-based) current position of the qubit that should
    end up at position ``j + 1``.
    """
    op = np.asarray(op, dtype=complex)
    n = n_qubits_of(op.shape[0])
    axes = [q - 1 for q in _check_targets(order, n)]
    if len(axes) != n:
        raise ValueError("order must list every qubit exactly once")
    if op.ndim == 1:
        return op.reshape((2,) * n).transpose(axes).reshape(2**n)
    t = op.reshape((2,) * (2 * n))
    t = t.transpose(axes + [a + n for a in axes])
    return t.reshape(2**n, 2**n)


def embed(op: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Operator acting as ``op`` on ``targets`` and as identity elsewhere.

    ``targets`` is ordered: the first target is the most significant factor
    of ``op``.
    """
    op = np.asarray(op, dtype=complex)
    targets = _check_targets(targets, n_qubits)
    if op.shape != (2 ** len(targets),) * 2:
        raise ValueError(
            f"operator of shape {op.shape} cannot act on {len(targets)} qubit(s)"
        )
    rest = [q for q in range(1, n_qubits + 1) if q not in targets]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    # full acts on factor order targets + rest; move each qubit back home
    current = targets + rest
    order = [current.index(q) + 1 for q in range(1, n_qubits + 1)]
    return permute_qubits(full, order)


def apply(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Conjugation ``op @ rho @ op†``."""
    return op @ rho @ dagger(op)


def measure_project(
    rho: np.ndarray, bra: np.ndarray, subset: Sequence[int]
) -> tuple[np.ndarray, float]:
    """Project ``subset`` of ``rho`` onto the pure state ``bra``.

    Returns the normalised state of the remaining qubits (in their original
    relative order) and the outcome probability. Raises
    :class:`ZeroProbabilityBranch` when the probability is at most 1e-14.
    """
    reduced = project_unnormalized(rho, bra, subset)
    prob = float(np.trace(reduced).real)
    if prob <= ZERO_PROBABILITY:
        raise ZeroProbabilityBranch(prob)
    return reduced / prob, prob


def project_unnormalized(
    rho: np.ndarray, bra: np.ndarray, subset: Sequence[int]
) -> np.ndarray:
    """``<bra| rho |bra>`` as an operator on the complement of ``subset``."""
    rho = np.asarray(rho, dtype=complex)
    bra = np.asarray(bra, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    subset = _check_targets(subset, n)
    if bra.shape != (2 ** len(subset),):
        raise ValueError(f"state of length {bra.shape[0]} does not match {subset}")
    if not abs(np.vdot(bra, bra).real - 1.0) < 1e-10:
        raise ValueError("projection state is not normalised")
    rest = [q for q in range(1, n + 1) if q not in subset]
    moved = permute_qubits(rho, subset + rest)
    ds, dr = 2 ** len(subset), 2 ** len(rest)
    t = moved.reshape(ds, dr, ds, dr)
    return np.einsum("a,arbs,b->rs", bra.conj(), t, bra)


def fidelity_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    """Overlap ``<psi| rho |psi>`` of a density matrix with a pure state."""
    rho = np.asarray(rho, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError(f"shape mismatch: {rho.shape} vs {psi.shape}")
    value = np.vdot(psi, rho @ psi)
    if abs(value.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {value.imag:.3e}")
    return float(value.real)


def is_unitary(op: np.ndarray, atol: float = 1e-12) -> bool:
    op = np.asarray(op)
    return np.allclose(op @ dagger(op), np.eye(op.shape[0]), rtol=0, atol=atol)


def density_defects(rho: np.ndarray) -> dict[str, float]:
    """Deviations from the density-matrix axioms.

    Keys: ``hermitian`` (max |rho - rho†|), ``trace`` (|Tr rho - 1|) and
    ``min_eigenvalue``.
    """
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - dagger(rho))))
    tr = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.linalg.eigvalsh((rho + dagger(rho)) / 2).min())
    return {"hermitian": herm, "trace": tr, "min_eigenvalue": min_eig}


def is_density_matrix(rho: np.ndarray) -> bool:
    d = density_defects(rho)
    return d["hermitian"] <= 1e-12 and d["trace"] <= 1e-12 and d["min_eigenvalue"] >= -1e-10
