"""Fidelity averaged over the uniform ensemble of two-qubit target states.

For a fixed channel ``rho`` the branch-weighted fidelity of one target is
``sum_km w_km^dagger rho w_km`` with ``w_km = omega_k (x) sigma_km (x)
R_km^dagger psi``.  Averaging over targets is therefore ``Re Tr(rho M)``
where the 64x64 matrix ``M`` depends only on Bob's angle and the
quadrature rule.  ``M`` is assembled from fourth moments of the amplitudes
(eta nodes) and from second moments of the phase factors (phi nodes); the
result is the same tensor-product sum as visiting all 10^6 nodes one by
one, which :func:`averaged_fidelity_bruteforce` does literally.

Both the channel and ``M`` are affine in (cos 2x, sin 2x) of their angle,
so a whole scenario collapses to a 3x3 table (see :class:`FidelitySurface`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .noise import NoiseScenario, noisy_channel_state
from .protocol import (
    ControlParams,
    TargetState,
    alice_matrix,
    amplitudes,
    bob_matrix,
    correction,
    outcome_averaged_fidelity,
    run_protocol,
)

# 3!/pi^3 times the (2 pi)^3 phase volume
_MEASURE_NORM = 48.0
RNG_NAME = "numpy.random.Philox"


@dataclass(frozen=True)
class QuadratureSpec:
    """Points per dimension for the eta and phi rules.

    ``eta_rule="adapted"`` integrates each cos^A sin^B factor of the
    amplitude moments with an n-point Gauss rule in whichever variable makes
    it a polynomial, which is exact once n >= 6. ``"legendre"`` is plain
    Gauss-Legendre on [0, pi/2] in eta itself; it converges geometrically
    but is not exact (about 4e-9 moment error at n = 10).
    """

    n_eta: int = 10
    n_phi: int = 10
    eta_rule: str = "adapted"

    def __post_init__(self):
        if self.n_eta < 2 or self.n_phi < 2:
            raise ValueError("quadrature orders must be at least 2")
        if self.eta_rule not in ("adapted", "legendre"):
            raise ValueError(f"unknown eta rule {self.eta_rule!r}")


@dataclass(frozen=True)
class McSpec:
    n_samples: int = 20000
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def state_measure_weight(target: TargetState) -> float:
    """Density of the uniform ensemble in (eta, phi) coordinates."""
    w = 6.0 / math.pi**3
    for i, e in enumerate(target.eta, start=1):
        w *= math.cos(e) * math.sin(e) ** (2 * i - 1)
    return max(w, 0.0)


def _eta_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    half = math.pi / 4
    return half * (x + 1.0), half * w


def _phi_rule(n: int) -> np.ndarray:
    return 2 * math.pi * np.arange(n) / n


def eta_nodes(n_eta: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product eta nodes, shape (n^3, 3), with measure weights.

    Weights include the phase volume, so they sum to one when paired with
    a phase average.
    """
    x, w = _eta_rule(n_eta)
    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    wgrid = np.stack(np.meshgrid(w, w, w, indexing="ij"), axis=-1).reshape(-1, 3)
    dens = np.ones(len(grid))
    for i in range(3):
        dens *= np.cos(grid[:, i]) * np.sin(grid[:, i]) ** (2 * i + 1)
    return grid, _MEASURE_NORM * np.prod(wgrid, axis=1) * dens


def phi_nodes(n_phi: int) -> np.ndarray:
    x = _phi_rule(n_phi)
    return np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)


def amplitudes_batch(eta: np.ndarray) -> np.ndarray:
    e1, e2, e3 = eta[:, 0], eta[:, 1], eta[:, 2]
    return np.stack(
        [
            np.cos(e3),
            np.sin(e3) * np.cos(e2),
            np.sin(e3) * np.sin(e2) * np.cos(e1),
            np.sin(e3) * np.sin(e2) * np.sin(e1),
        ],
        axis=1,
    )


def trig_moment(cos_power: int, sin_power: int, n: int) -> float:
    """n-point rule for the integral of cos^A sin^B over [0, pi/2].

    A odd: substitute t = sin(eta), leaving a polynomial in t.
    A even, B odd: substitute s = cos(eta) likewise.
    Both even: the integrand has period pi and is a trigonometric
    polynomial of degree (A + B) / 2 in 2 eta, so a uniform rule on
    [0, pi) is exact for n > (A + B) / 2.
    """
    a, b = cos_power, sin_power
    if a % 2 == 1:
        x, w = _unit_legendre(n)
        return float(np.sum(w * x**b * (1 - x**2) ** ((a - 1) // 2)))
    if b % 2 == 1:
        x, w = _unit_legendre(n)
        return float(np.sum(w * x**a * (1 - x**2) ** ((b - 1) // 2)))
    eta = math.pi * np.arange(n) / n
    return float(np.sum(np.cos(eta) ** a * np.sin(eta) ** b) * (math.pi / 2) / n)


def _unit_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2, w / 2


# (cos, sin) exponent contributed by each amplitude to (eta1, eta2, eta3)
_AMPLITUDE_POWERS = np.array(
    [
        [(0, 0), (0, 0), (1, 0)],
        [(0, 0), (1, 0), (0, 1)],
        [(1, 0), (0, 1), (0, 1)],
        [(0, 1), (0, 1), (0, 1)],
    ]
)


@functools.lru_cache(maxsize=8)
def amplitude_moments(n_eta: int, eta_rule: str = "adapted") -> np.ndarray:
    """E[lam_i lam_j lam_a lam_b] over the ensemble, shape (4, 4, 4, 4)."""
    if eta_rule == "legendre":
        eta, w = eta_nodes(n_eta)
        lam = amplitudes_batch(eta)
        return np.einsum("n,ni,nj,na,nb->ijab", w, lam, lam, lam, lam)
    out = np.empty((4, 4, 4, 4))
    for idx in np.ndindex(4, 4, 4, 4):
        powers = _AMPLITUDE_POWERS[list(idx)].sum(axis=0)  # (3 dims, 2)
        value = _MEASURE_NORM
        for d in range(3):
            value *= trig_moment(1 + powers[d, 0], 2 * d + 1 + powers[d, 1], n_eta)
        out[idx] = value
    return out


# alice_matrix is linear in lambda: A[l, k] = sum_i _ALICE[l, k, i] lam_i
_ALICE = np.stack([alice_matrix(np.eye(4)[i]).real for i in range(4)], axis=-1)


def fidelity_operator(xi: float, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """The 64x64 matrix ``M`` with ensemble-averaged fidelity ``Re Tr(rho M)``."""
    m0, mc, ms = _operator_basis(spec)
    return m0 + math.cos(2 * xi) * mc + math.sin(2 * xi) * ms


@functools.lru_cache(maxsize=16)
def _operator_basis(spec: QuadratureSpec):
    return _affine_basis(lambda x: assemble_operator(x, spec))


def assemble_operator(xi: float, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """Direct assembly of ``M`` at one angle (no affine interpolation)."""
    moments = amplitude_moments(spec.n_eta, spec.eta_rule)
    phis = phi_nodes(spec.n_phi)
    u = np.exp(1j * np.concatenate([np.zeros((len(phis), 1)), phis], axis=1))
    total = np.zeros((4, 4, 4, 4, 4, 4), dtype=complex)
    for k in range(4):
        # Bob's vector m for each phi node, shape (n_phi^3, 4)
        sig = np.stack([bob_matrix(p, k, xi) for p in phis])  # (N, n, m)
        # omega_k[l] = sum_i C[l, i] lam_i
        c = _ALICE[:, k, :]
        alice_mom = np.einsum("li,pj,ijab->lpab", c, c, moments)
        for m in range(4):
            s = sig[:, :, m]
            # phase average of sigma sigma^dagger (x) u u^dagger
            phase = np.einsum("nb,nd,na,ne->bade", s, s.conj(), u, u.conj()) / len(phis)
            # corrections are real, so (R^dagger)[c, a] = R[a, c]
            r = correction(k, m).real
            block = np.einsum("lpae,ac,bade,ef->lbcpdf", alice_mom, r, phase, r)
            total += block
    return total.reshape(64, 64)


def channel_average(rho: np.ndarray, xi: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Ensemble-averaged fidelity of an arbitrary six-qubit channel state."""
    m = fidelity_operator(float(xi), spec)
    return float(np.real(np.sum(np.asarray(rho).T * m)))


def _affine_basis(fn):
    """Decompose ``fn(x) = C0 + cos(2x) Cc + sin(2x) Cs`` from three samples."""
    at0 = fn(0.0)
    at90 = fn(math.pi / 2)
    at45 = fn(math.pi / 4)
    c0 = (at0 + at90) / 2
    return c0, (at0 - at90) / 2, at45 - c0


@dataclass
class FidelitySurface:
    """Averaged fidelity as an explicit function of (theta, xi).

    ``table[i, j]`` multiplies ``u_i(theta) * v_j(xi)`` where
    ``u = (1, cos 2 theta, sin 2 theta)`` and likewise for ``v``.
    """

    scenario: NoiseScenario
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rhos = _affine_basis(lambda t: noisy_channel_state(t, self.scenario))
        ms = _operator_basis(self.spec)
        self.table = np.array(
            [[float(np.real(np.sum(r.T * mm))) for mm in ms] for r in rhos]
        )

    def __call__(self, theta, xi):
        theta = np.asarray(theta, dtype=float)
        xi = np.asarray(xi, dtype=float)
        u = np.stack([np.ones_like(theta), np.cos(2 * theta), np.sin(2 * theta)])
        v = np.stack([np.ones_like(xi), np.cos(2 * xi), np.sin(2 * xi)])
        out = np.einsum("i...,ij,j...->...", u, self.table, v)
        return float(out) if out.ndim == 0 else out


@functools.lru_cache(maxsize=256)
def fidelity_surface(scenario: NoiseScenario, spec: QuadratureSpec = QuadratureSpec()) -> FidelitySurface:
    return FidelitySurface(scenario, spec)


def averaged_fidelity_quadrature(
    scenario: NoiseScenario,
    controls: ControlParams = ControlParams(),
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    rho = noisy_channel_state(controls.theta, scenario)
    return channel_average(rho, controls.xi, spec)


def averaged_fidelity_bruteforce(
    rho: np.ndarray, xi: float, spec: QuadratureSpec
) -> float:
    """Visit every tensor-product node and run the full protocol there.

    Slow (16 projections per node); intended for small orders in tests.
    Only the node-based Gauss-Legendre eta rule has nodes to visit.
    """
    if spec.eta_rule != "legendre":
        raise ValueError("brute-force evaluation needs eta_rule='legendre'")
    eta, w_eta = eta_nodes(spec.n_eta)
    phis = phi_nodes(spec.n_phi)
    total = 0.0
    for e, w in zip(eta, w_eta):
        if w == 0.0:
            continue
        acc = 0.0
        for p in phis:
            target = TargetState(tuple(e), tuple(p))
            acc += outcome_averaged_fidelity(run_protocol(rho, target, xi))
        total += w * acc / len(phis)
    return float(total)


def branch_vectors(eta: np.ndarray, phi: np.ndarray, xi: float) -> np.ndarray:
    """Vectors w_km for a batch of targets, shape (N, 16, 64)."""
    lam = amplitudes_batch(eta)
    psi = lam * np.exp(1j * np.concatenate([np.zeros((len(phi), 1)), phi], axis=1))
    omega = np.einsum("lki,ni->nkl", _ALICE, lam)  # (N, k, l)
    out = np.empty((len(eta), 16, 64), dtype=complex)
    for k in range(4):
        sig = np.stack([bob_matrix(p, k, xi) for p in phi])  # (N, n, m)
        for m in range(4):
            fixed = psi @ correction(k, m)  # R^dagger psi with R real symmetric
            v = np.einsum("na,nb,nc->nabc", omega[:, k], sig[:, :, m], fixed)
            out[:, 4 * k + m] = v.reshape(len(eta), 64)
    return out


def fidelity_batch(rho: np.ndarray, eta: np.ndarray, phi: np.ndarray, xi: float) -> np.ndarray:
    """Outcome-averaged fidelity for each target in a batch."""
    w = branch_vectors(np.atleast_2d(eta), np.atleast_2d(phi), xi)
    return np.einsum("nri,ij,nrj->n", w.conj(), rho, w).real


def sample_targets(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Exact draws from the ensemble; eta_i has CDF sin(eta)^(2i)."""
    u = rng.random((n, 3))
    powers = np.array([2.0, 4.0, 6.0])
    eta = np.arcsin(u ** (1.0 / powers))
    phi = rng.uniform(0.0, 2 * math.pi, (n, 3))
    return eta, phi


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def averaged_fidelity_mc(
    scenario: NoiseScenario,
    controls: ControlParams = ControlParams(),
    spec: McSpec = McSpec(),
    batch: int = 4096,
) -> tuple[float, float]:
    """Monte Carlo estimate and its standard error.

    Draws are taken ``batch`` targets at a time, so the estimate is
    reproducible for a fixed (seed, batch) pair.
    """
    rho = noisy_channel_state(controls.theta, scenario)
    rng = make_rng(spec.seed)
    values = []
    remaining = spec.n_samples
    while remaining > 0:
        n = min(batch, remaining)
        eta, phi = sample_targets(n, rng)
        values.append(fidelity_batch(rho, eta, phi, controls.xi))
        remaining -= n
    f = np.concatenate(values)
    mean = float(np.sum(f) / len(f))
    if len(f) < 2:
        return mean, 0.0
    return mean, float(np.std(f, ddof=1) / math.sqrt(len(f)))
