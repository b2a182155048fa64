"""Cross-check suite behind ``jrsp-lab verify``.

Every check reduces to a non-negative deviation compared against a
tolerance, so the report reads the same for every module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analytic, averaging, core, noise, optimize, protocol
from .analytic import ALL_PAIRS, NoisePair
from .noise import NoiseKind, NoiseScenario

KINDS = tuple(NoiseKind)


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and self.deviation <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = f" ({self.error})" if self.error else ""
        return f"{status} {self.name}: deviation {self.deviation:.3e} <= tol {self.tolerance:.1e}{detail}"


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    fn: Callable[[np.random.Generator], float]

    def run(self, rng: np.random.Generator) -> CheckResult:
        try:
            dev = float(self.fn(rng))
        except Exception as exc:  # a crashing check is a failing check
            return CheckResult(self.name, math.inf, self.tolerance, f"{type(exc).__name__}: {exc}")
        if math.isnan(dev):
            return CheckResult(self.name, math.inf, self.tolerance, "nan deviation")
        return CheckResult(self.name, dev, self.tolerance)


def _random_target(rng) -> protocol.TargetState:
    eta, phi = averaging.sample_targets(1, rng)
    return protocol.TargetState(tuple(eta[0]), tuple(phi[0]))


# --- individual checks ---------------------------------------------------------


def _kraus(kind):
    def fn(rng):
        return max(noise.kraus_set(kind, p).completeness_defect() for p in rng.random(10))
    return fn


def _density(kind):
    def fn(rng):
        worst = 0.0
        for _ in range(3):
            scen = NoiseScenario(kind, rng.random(), kind, rng.random())
            rho = noise.noisy_channel_state(rng.uniform(-math.pi / 2, math.pi / 2), scen)
            d = core.density_defects(rho)
            worst = max(worst, d["hermitian"], d["trace"], max(0.0, -d["min_eigenvalue"]))
        return worst
    return fn


def _channel_norm(rng):
    return max(abs(np.linalg.norm(protocol.build_channel(t)) - 1) for t in rng.uniform(-2, 2, 5))


def _corrections_unitary(rng):
    return max(
        np.max(np.abs(protocol.correction(k, m).conj().T @ protocol.correction(k, m) - np.eye(4)))
        for k in range(4)
        for m in range(4)
    )


def _alice_orthonormal(rng):
    a = protocol.alice_matrix(averaging.amplitudes_batch(averaging.sample_targets(1, rng)[0])[0])
    return np.max(np.abs(a.conj().T @ a - np.eye(4)))


def _bob_orthonormal(rng):
    phis = rng.uniform(0, 2 * math.pi, 3)
    xi = rng.uniform(-math.pi / 2, math.pi / 2)
    return max(
        np.max(np.abs(b.conj().T @ b - np.eye(4)))
        for b in (protocol.bob_matrix(phis, k, xi) for k in range(4))
    )


def _perfect_protocol(rng):
    channel = protocol.build_channel(math.pi / 4)
    worst = 0.0
    for _ in range(5):
        branches = protocol.run_protocol(channel, _random_target(rng), math.pi / 4)
        worst = max(worst, max(abs(b.fidelity - 1) for b in branches))
    return worst


def _branch_normalization(rng):
    kind = KINDS[rng.integers(4)]
    scen = NoiseScenario(kind, rng.random(), KINDS[rng.integers(4)], rng.random())
    rho = noise.noisy_channel_state(rng.uniform(-1.5, 1.5), scen)
    branches = protocol.run_protocol(rho, _random_target(rng), rng.uniform(-1.5, 1.5))
    p_k = {b.k: b.p_k for b in branches}
    dev = abs(sum(p_k.values()) - 1)
    for k in range(4):
        if p_k[k] > 0:
            dev = max(dev, abs(sum(b.p_km for b in branches if b.k == k) - 1))
    return dev


def _noiseless_average(rng):
    return abs(averaging.averaged_fidelity_quadrature(NoiseScenario.noiseless()) - 1)


def _mixed_average(rng):
    return abs(averaging.channel_average(np.eye(64) / 64, rng.uniform(-1.5, 1.5)) - 0.25)


def _bruteforce(rng):
    spec = averaging.QuadratureSpec(3, 3, eta_rule="legendre")
    scen = NoiseScenario(KINDS[rng.integers(4)], rng.random(), KINDS[rng.integers(4)], rng.random())
    theta, xi = rng.uniform(-1.5, 1.5, 2)
    rho = noise.noisy_channel_state(theta, scen)
    return abs(averaging.averaged_fidelity_bruteforce(rho, xi, spec) - averaging.channel_average(rho, xi, spec))


def _plateau(rng):
    scen = NoiseScenario(KINDS[rng.integers(4)], rng.random(), KINDS[rng.integers(4)], rng.random())
    theta, xi = rng.uniform(-1.5, 1.5, 2)
    rho = noise.noisy_channel_state(theta, scen)
    lo = averaging.channel_average(rho, xi, averaging.QuadratureSpec(10, 10))
    hi = averaging.channel_average(rho, xi, averaging.QuadratureSpec(14, 14))
    return abs(lo - hi)


def _monte_carlo(rng):
    # deviation in units of standard error; tolerance 5 sigma
    scen = NoiseScenario(NoiseKind.Depolarizing, 0.3, NoiseKind.AmplitudeDamping, 0.4)
    controls = protocol.ControlParams(0.5, -0.3)
    mean, se = averaging.averaged_fidelity_mc(scen, controls, averaging.McSpec(4000, seed=int(rng.integers(2**31))))
    return abs(mean - averaging.averaged_fidelity_quadrature(scen, controls)) / se


def _b_row(gamma):
    def fn(rng):
        worst = 0.0
        for _ in range(3):
            a, c = rng.random(2)
            theta, xi = rng.uniform(-math.pi / 2, math.pi / 2, 2)
            scen = NoiseScenario(NoiseKind.BitFlip, a, gamma, c)
            surf = averaging.fidelity_surface(scen)
            worst = max(worst, abs(surf(theta, xi) - analytic.general_fidelity_B_row(gamma, a, c, theta, xi)))
        return worst
    return fn


def _oracle(pair: NoisePair):
    def fn(rng):
        worst = 0.0
        points = [(0.0, 0.0), (1.0, 1.0)] + [tuple(rng.random(2)) for _ in range(2)]
        for a, c in points:
            res = optimize.numeric_optimize(NoiseScenario(pair.alpha, a, pair.gamma, c))
            worst = max(worst, abs(res.fidelity - analytic.optimal_fidelity(pair, a, c)))
            params = analytic.optimal_params(pair, a, c)
            surf = averaging.fidelity_surface(NoiseScenario(pair.alpha, a, pair.gamma, c))
            worst = max(worst, abs(surf(params.theta_opt, params.xi_opt) - res.fidelity))
        return worst
    return fn


def _bp_symmetry(rng):
    bp = NoisePair.parse("BP")
    worst = 0.0
    for _ in range(10):
        a, d = rng.random(), rng.uniform(0, 0.5)
        worst = max(worst, abs(analytic.optimal_fidelity(bp, a, 0.5 - d) - analytic.optimal_fidelity(bp, a, 0.5 + d)))
    return worst


def _pp_domain(rng):
    # distance below 2/5 anywhere, plus gap from 2/5 exactly on the zero set
    pp = NoisePair.parse("PP")
    ps = optimize.lattice(21)
    worst = 0.0
    for a in ps:
        for c in ps:
            f = analytic.optimal_fidelity(pp, a, c)
            worst = max(worst, analytic.CLASSICAL_LIMIT - f)
            if (2 * a - 1) * (2 * c - 1) == 0:
                worst = max(worst, abs(f - analytic.CLASSICAL_LIMIT))
            elif f <= analytic.CLASSICAL_LIMIT:
                worst = math.inf
    return worst


def _pre_x_endpoints(rng):
    devs = [abs(optimize.sweep_cell(NoisePair.parse("BB"), 1.0, 1.0, pre_x=True, engine="both").f_opt - 1)]
    for g in "PAD":
        cell = optimize.sweep_cell(NoisePair.parse("B" + g), 1.0, 0.0, pre_x=True, engine="both")
        devs += [abs(cell.f_opt_analytic - 1), abs(cell.f_opt_numeric - 1)]
    return max(devs)


def _pre_x_equivalence(rng):
    bb = NoisePair.parse("BB")
    a, c = rng.random(2)
    with_x = optimize.numeric_optimize(NoiseScenario("B", a, "B", c, pre_x=True)).fidelity
    flipped = optimize.numeric_optimize(NoiseScenario("B", 1 - a, "B", 1 - c)).fidelity
    return max(abs(with_x - flipped), abs(with_x - analytic.optimal_fidelity(bb, 1 - a, 1 - c)))


def _fig5(rng):
    # violations of the curve ordering; inf when no crossing is found
    curves = optimize.fig5_curves(21)
    if curves.crossing is None or not 0 < curves.crossing < 1:
        return math.inf
    above = curves.p > curves.crossing
    return max(
        0.0,
        float(np.max(curves.f_aa_fixed - curves.f_aa_opt)),
        float(np.max(analytic.CLASSICAL_LIMIT - curves.f_aa_opt)),
        float(np.max((curves.f_a0_opt - curves.f_aa_opt)[above])),
    )


def all_checks() -> list[Check]:
    checks = [Check(f"kraus-complete-{k}", 1e-12, _kraus(k)) for k in KINDS]
    checks += [Check(f"noisy-density-{k}", 1e-10, _density(k)) for k in KINDS]
    checks += [
        Check("channel-normalized", 1e-12, _channel_norm),
        Check("corrections-unitary", 1e-12, _corrections_unitary),
        Check("alice-basis-orthonormal", 1e-12, _alice_orthonormal),
        Check("bob-basis-orthonormal", 1e-12, _bob_orthonormal),
        Check("perfect-protocol", 1e-9, _perfect_protocol),
        Check("branch-normalization", 1e-10, _branch_normalization),
        Check("average-noiseless", 1e-9, _noiseless_average),
        Check("average-maximally-mixed", 1e-9, _mixed_average),
        Check("average-bruteforce", 1e-12, _bruteforce),
        Check("quadrature-plateau", 1e-9, _plateau),
        Check("monte-carlo-sigma", 5.0, _monte_carlo),
    ]
    checks += [Check(f"general-formula-B{g}", 1e-6, _b_row(g)) for g in KINDS]
    checks += [Check(f"oracle-optimal-{p}", 1e-6, _oracle(p)) for p in ALL_PAIRS]
    checks += [
        Check("symmetry-BP", 1e-12, _bp_symmetry),
        Check("quantum-domain-PP", 1e-12, _pp_domain),
        Check("pre-x-endpoints", 1e-9, _pre_x_endpoints),
        Check("pre-x-equivalence", 1e-9, _pre_x_equivalence),
        Check("fig5-crossing", 0.0, _fig5),
    ]
    return checks


def run_checks(seed: int = 0, checks: list[Check] | None = None) -> list[CheckResult]:
    rng = averaging.make_rng(seed)
    return [c.run(rng) for c in (checks if checks is not None else all_checks())]
