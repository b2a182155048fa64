"""Acceptance criteria 1-9, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line (also under captured output);
``python3 tests/test_acceptance.py`` prints the same lines without pytest.
"""

import math
import sys
import time

import numpy as np
import pytest

from jrsp_lab import analytic, averaging, core, noise, optimize, protocol
from jrsp_lab.analytic import ALL_PAIRS, NoisePair, effective_strengths, optimal_fidelity, optimal_params
from jrsp_lab.averaging import QuadratureSpec, fidelity_surface
from jrsp_lab.noise import NoiseKind, NoiseScenario
from jrsp_lab.protocol import ControlParams, TargetState

KINDS = list(NoiseKind)
HALF_PI = math.pi / 2


def report(number, title, ok, detail, capsys=None):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} {title}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def random_scenario(rng, pre_x=False):
    return NoiseScenario(KINDS[rng.integers(4)], rng.random(), KINDS[rng.integers(4)], rng.random(), pre_x)


# --- criteria --------------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    channel = protocol.build_channel(math.pi / 4)
    worst_branch = worst_avg = 0.0
    for _ in range(100):
        branches = protocol.run_protocol(channel, TargetState.random(rng), math.pi / 4)
        worst_branch = max(worst_branch, max(abs(b.fidelity - 1) for b in branches))
        worst_avg = max(worst_avg, abs(protocol.outcome_averaged_fidelity(branches) - 1))
    elapsed = time.perf_counter() - start
    ok = worst_branch <= 1e-9 and worst_avg <= 1e-9 and elapsed < 10
    return ok, f"max|F_km-1|={worst_branch:.2e}, max|<F>-1|={worst_avg:.2e}, {elapsed:.2f}s"


def criterion_2():
    rng = np.random.default_rng(1002)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        gamma = KINDS[rng.integers(4)]
        a, c = rng.random(2)
        theta, xi = rng.uniform(-HALF_PI, HALF_PI, 2)
        quad = averaging.averaged_fidelity_quadrature(NoiseScenario("B", a, gamma, c), ControlParams(theta, xi))
        worst = max(worst, abs(quad - analytic.general_fidelity_B_row(gamma, a, c, theta, xi)))
    elapsed = time.perf_counter() - start
    return worst <= 1e-6 and elapsed < 300, f"max deviation {worst:.2e} <= 1e-6, {elapsed:.1f}s"


def criterion_3():
    rng = np.random.default_rng(1003)
    worst_opt = worst_general = 0.0
    for pair in ALL_PAIRS:
        for a, c in rng.random((20, 2)):
            res = optimize.numeric_optimize(NoiseScenario(pair.alpha, a, pair.gamma, c))
            exact = optimal_fidelity(pair, a, c)
            worst_opt = max(worst_opt, abs(res.fidelity - exact))
            if pair.alpha is NoiseKind.BitFlip:
                p = optimal_params(pair, a, c)
                general = analytic.general_fidelity_B_row(pair.gamma, a, c, p.theta_opt, p.xi_opt)
                worst_general = max(worst_general, abs(general - exact))
    ok = worst_opt <= 1e-4 and worst_general <= 1e-6
    return ok, f"numeric vs closed form {worst_opt:.2e} <= 1e-4, B-row at optimum {worst_general:.2e} <= 1e-6"


def criterion_4():
    rng = np.random.default_rng(1004)
    bp = NoisePair.parse("BP")
    worst = 0.0
    for a, d in zip(rng.random(20), rng.uniform(0, 0.5, 20)):
        worst = max(worst, abs(optimal_fidelity(bp, a, 0.5 - d) - optimal_fidelity(bp, a, 0.5 + d)))
    return worst <= 1e-12, f"max asymmetry {worst:.2e} <= 1e-12"


def criterion_5():
    pp = NoisePair.parse("PP")
    grid = optimize.sweep(pp, n=101)
    ps = grid.lattice()
    values = grid.values()
    x = np.outer(2 * ps - 1, 2 * ps - 1)
    on_lines = x == 0
    above = values - 0.4
    ok_floor = bool(np.all(above >= -1e-15))
    ok_equality = bool(np.all(np.abs(above[on_lines]) <= 1e-15)) and bool(np.all(above[~on_lines] > 1e-15))
    corners = [values[0, 0], values[0, -1], values[-1, 0], values[-1, -1]]
    ok_corners = all(abs(v - 1) <= 1e-12 for v in corners)
    # the simulator agrees on a sub-lattice
    sub = ps[::20]
    sim = max(
        abs(optimize.numeric_optimize(NoiseScenario("P", a, "P", c)).fidelity - optimal_fidelity(pp, a, c))
        for a in sub
        for c in sub
    )
    ok = ok_floor and ok_equality and ok_corners and sim <= 1e-6
    return ok, (
        f"min {values.min():.12f}, equality exactly on (2pa-1)(2pc-1)=0: {ok_equality}, "
        f"corners {min(corners):.12f}, simulator {sim:.1e}"
    )


def criterion_6():
    worst = 0.0
    targets = [("B", 1.0, 1.0)] + [(g, 1.0, 0.0) for g in "PAD"]
    for gamma, a, c in targets:
        pair = NoisePair.parse("B" + gamma)
        ea, ec = effective_strengths(pair, a, c, True)
        closed = optimal_fidelity(pair, ea, ec)
        simulated = optimize.numeric_optimize(NoiseScenario("B", a, gamma, c, pre_x=True)).fidelity
        worst = max(worst, abs(closed - 1), abs(simulated - 1))
    return worst <= 1e-9, f"max |F_opt - 1| {worst:.2e} <= 1e-9 over BB(1,1), BP/BA/BD(1,0)"


def criterion_7():
    curves = optimize.fig5_curves(101)
    fixed_ok = bool(np.all(curves.f_aa_fixed <= curves.f_aa_opt + 1e-12))
    floor_ok = bool(np.all(curves.f_aa_opt >= 0.4 - 1e-12))
    p_star = curves.crossing
    cross_ok = p_star is not None and 0 < p_star < 1
    local_ok = beyond_ok = False
    if cross_ok:
        diff = lambda p: optimize.f_aa_opt(p) - optimize.f_a0_opt(p)
        local_ok = diff(p_star - 1e-4) <= 0 < diff(p_star + 1e-4)
        beyond = np.linspace(p_star, 1.0, 401)[1:]
        beyond_ok = all(diff(p) > 0 for p in beyond)
    ok = fixed_ok and floor_ok and cross_ok and local_ok and beyond_ok
    star = f"{p_star:.6f}" if p_star is not None else "none"
    return ok, (
        f"f_AA_fixed <= f_AA_opt: {fixed_ok}, f_AA_opt >= 2/5: {floor_ok}, pA* = {star}, "
        f"sign change at pA*: {local_ok}, f_AA_opt > f_A0_opt beyond: {beyond_ok}"
    )


def criterion_8():
    rng = np.random.default_rng(1008)
    kraus = max(noise.kraus_set(kind, p).completeness_defect() for kind in KINDS for p in rng.random(20))
    dens = branch = 0.0
    for _ in range(100):
        scen = random_scenario(rng, pre_x=bool(rng.integers(2)))
        rho = noise.noisy_channel_state(rng.uniform(-HALF_PI, HALF_PI), scen)
        d = core.density_defects(rho)
        dens = max(dens, d["hermitian"], d["trace"], max(0.0, -d["min_eigenvalue"]))
        branches = protocol.run_protocol(rho, TargetState.random(rng), rng.uniform(-HALF_PI, HALF_PI))
        p_k = {b.k: b.p_k for b in branches}
        branch = max(branch, abs(sum(p_k.values()) - 1))
        for k, pk in p_k.items():
            if pk > 0:
                branch = max(branch, abs(sum(b.p_km for b in branches if b.k == k) - 1))
    ok = kraus <= 1e-12 and dens <= 1e-12 and branch <= 1e-10
    return ok, f"Kraus {kraus:.1e} <= 1e-12, density {dens:.1e}, branch sums {branch:.1e} <= 1e-10"


def criterion_9():
    rng = np.random.default_rng(1009)
    worst = 0.0
    for _ in range(5):
        rho = noise.noisy_channel_state(rng.uniform(-HALF_PI, HALF_PI), random_scenario(rng))
        xi = rng.uniform(-HALF_PI, HALF_PI)
        lo = averaging.channel_average(rho, xi, QuadratureSpec(10, 10))
        hi = averaging.channel_average(rho, xi, QuadratureSpec(14, 14))
        worst = max(worst, abs(lo - hi))
    return worst < 1e-9, f"max |F(10,10) - F(14,14)| {worst:.2e} < 1e-9"


CRITERIA = [
    (1, "perfect protocol", criterion_1),
    (2, "B-row formula vs quadrature", criterion_2),
    (3, "optimal formulas vs numeric maximisation", criterion_3),
    (4, "BP symmetry about pc = 1/2", criterion_4),
    (5, "PP quantum over the full range", criterion_5),
    (6, "pre-X endpoints", criterion_6),
    (7, "damping comparison crossing", criterion_7),
    (8, "channel sanity", criterion_8),
    (9, "quadrature plateau", criterion_9),
]


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, detail = fn()
    assert report(number, title, ok, detail, capsys), detail


if __name__ == "__main__":
    results = [report(n, title, *fn()) for n, title, fn in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
