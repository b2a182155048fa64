import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrsp_lab.core import (
    I2,
    X,
    Z,
    ZeroProbabilityBranch,
    dagger,
    density_defects,
    embed,
    fidelity_pure,
    is_density_matrix,
    is_unitary,
    ket,
    measure_project,
    n_qubits_of,
    permute_qubits,
    projector,
    tensor,
)


def bit_oracle_diag(n, signs):
    """Diagonal operator from a per-basis-state sign function, built bit by bit."""
    d = np.zeros(2**n, dtype=complex)
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        d[idx] = signs(bits)
    return np.diag(d)


def test_tensor_examples():
    np.testing.assert_array_equal(tensor(I2, I2), np.eye(4))
    expected = np.zeros((4, 4))
    expected[0, 2], expected[1, 3], expected[2, 0], expected[3, 1] = 1, -1, 1, -1
    np.testing.assert_array_equal(tensor(X, Z), expected)
    p0, p1 = projector(ket("0")), projector(ket("1"))
    np.testing.assert_array_equal(tensor(p0, p1), np.diag([0, 1, 0, 0]))


def test_embed_examples():
    np.testing.assert_array_equal(embed(X, [1], 2), np.kron(X, I2))
    np.testing.assert_array_equal(embed(X, [2], 2), np.kron(I2, X))
    zz = embed(np.kron(Z, Z), [1, 3], 3)
    oracle = bit_oracle_diag(3, lambda b: (-1) ** (b[0] + b[2]))
    np.testing.assert_allclose(zz, oracle, atol=0)
    np.testing.assert_allclose(zz @ ket("101"), ket("101"))


def test_embed_reversed_targets_swaps_factors():
    op = np.kron(X, Z)
    # targets (2, 1): X acts on qubit 2, Z on qubit 1
    np.testing.assert_allclose(embed(op, [2, 1], 2), np.kron(Z, X))


@pytest.mark.parametrize("targets", [[1, 1], [0], [4]])
def test_embed_rejects_bad_targets(targets):
    with pytest.raises(ValueError):
        embed(np.eye(2 ** len(targets)), targets, 3)


def test_embed_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        embed(np.eye(4), [1], 3)


def test_permute_qubits_matches_index_oracle():
    vec = np.arange(8, dtype=complex)
    order = (3, 1, 2)
    out = permute_qubits(vec, order)
    for idx in range(8):
        new_bits = [(idx >> (2 - q)) & 1 for q in range(3)]
        old_bits = [0, 0, 0]
        for j, src in enumerate(order):
            old_bits[src - 1] = new_bits[j]
        old = int("".join(map(str, old_bits)), 2)
        assert out[idx] == vec[old]


@settings(max_examples=30, deadline=None)
@given(st.permutations([1, 2, 3, 4]), st.integers(0, 2**32 - 1))
def test_permute_round_trip_and_conjugation(order, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    inverse = [order.index(q) + 1 for q in range(1, 5)]
    np.testing.assert_allclose(permute_qubits(permute_qubits(m, order), inverse), m)
    v = rng.normal(size=16) + 0j
    np.testing.assert_allclose(
        permute_qubits(m, order) @ permute_qubits(v, order), permute_qubits(m @ v, order), atol=1e-12
    )


def test_measure_project_examples():
    rho = projector(ket("00"))
    red, p = measure_project(rho, ket("0"), [1])
    assert p == pytest.approx(1.0)
    np.testing.assert_allclose(red, projector(ket("0")))

    bell = (ket("00") + ket("11")) / math.sqrt(2)
    red, p = measure_project(projector(bell), ket("1"), [1])
    assert p == pytest.approx(0.5)
    np.testing.assert_allclose(red, projector(ket("1")), atol=1e-15)


def test_measure_project_ghz_against_contraction():
    ghz = (ket("000") + ket("111")) / math.sqrt(2)
    bra = (ket("00") + ket("11")) / math.sqrt(2)
    red, p = measure_project(projector(ghz), bra, [1, 2])
    # brute force: P = |bra><bra| (x) I, then trace out qubits 1,2 element-wise
    full = np.kron(projector(bra), I2)
    post = full @ projector(ghz) @ full
    oracle = np.zeros((2, 2), dtype=complex)
    for a, b in itertools.product(range(2), repeat=2):
        for s in range(4):
            oracle[a, b] += post[2 * s + a, 2 * s + b]
    assert p == pytest.approx(0.5)
    np.testing.assert_allclose(red * p, oracle, atol=1e-15)
    plus = (ket("0") + ket("1")) / math.sqrt(2)
    np.testing.assert_allclose(red, projector(plus), atol=1e-15)


def test_measure_project_keeps_relative_order():
    rho = projector(ket("011"))
    red, _ = measure_project(rho, ket("1"), [2])
    np.testing.assert_allclose(red, projector(ket("01")))


def test_zero_probability_branch():
    with pytest.raises(ZeroProbabilityBranch):
        measure_project(projector(ket("00")), ket("1"), [2])


def test_measure_project_rejects_unnormalised_bra():
    with pytest.raises(ValueError):
        measure_project(projector(ket("00")), np.array([1.0, 1.0]), [1])


def test_fidelity_examples():
    psi = (ket("01") - 1j * ket("10")) / math.sqrt(2)
    assert fidelity_pure(projector(psi), psi) == pytest.approx(1.0)
    assert fidelity_pure(np.eye(4) / 4, psi) == pytest.approx(0.25)
    rho = 0.7 * projector(ket("00")) + 0.3 * projector(ket("11"))
    assert fidelity_pure(rho, ket("00")) == pytest.approx(0.7)


def test_fidelity_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        fidelity_pure(np.eye(4) / 4, ket("0"))


def test_density_checks():
    assert is_density_matrix(np.eye(8) / 8)
    bad = np.diag([1.2, -0.2])
    assert not is_density_matrix(bad)
    assert density_defects(bad)["min_eigenvalue"] == pytest.approx(-0.2)
    assert is_unitary(np.kron(X, Z))
    assert not is_unitary(np.diag([1.0, 2.0]))
    np.testing.assert_array_equal(dagger(np.array([[1, 1j], [0, 2]])), np.array([[1, 0], [-1j, 2]]))


def test_n_qubits_limits():
    assert n_qubits_of(64) == 6
    with pytest.raises(ValueError):
        n_qubits_of(128)
    with pytest.raises(ValueError):
        n_qubits_of(12)
