import math

import numpy as np
import pytest

from jrsp_lab import analytic
from jrsp_lab.analytic import ALL_PAIRS, NoisePair, optimal_fidelity
from jrsp_lab.noise import NoiseScenario
from jrsp_lab.optimize import (
    OptimizerConfig,
    fig5_curves,
    find_crossing,
    golden_section_max,
    lattice,
    numeric_optimize,
    sweep,
    sweep_cell,
)

Q = math.pi / 4


def test_golden_section_on_parabola():
    x, fx = golden_section_max(lambda t: -(t - 0.3) ** 2, -1.0, 2.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8)
    assert fx == pytest.approx(0.0, abs=1e-15)
    # maximum on the boundary
    x, _ = golden_section_max(lambda t: t, 0.0, 1.0)
    assert x == 1.0


def test_zero_noise_optimum():
    res = numeric_optimize(NoiseScenario.noiseless())
    assert res.fidelity == pytest.approx(1.0, abs=1e-6)
    assert res.theta == pytest.approx(Q, abs=1e-6)
    assert res.xi == pytest.approx(Q, abs=1e-6)


def test_bp_example():
    res = numeric_optimize(NoiseScenario("B", 0.1, "P", 0.8))
    assert res.theta == pytest.approx(-Q, abs=1e-4)
    assert res.xi == pytest.approx(-Q, abs=1e-4)
    assert res.fidelity == pytest.approx(optimal_fidelity(NoisePair.parse("BP"), 0.1, 0.8), abs=1e-5)


def test_aa_example():
    res = numeric_optimize(NoiseScenario("A", 0.5, "A", 0.5))
    aa = NoisePair.parse("AA")
    assert res.fidelity == pytest.approx(optimal_fidelity(aa, 0.5, 0.5), abs=1e-5)
    expected = 0.5 * math.atan2(analytic.m_aa(0.5, 0.5), analytic.n_aa(0.5, 0.5))
    assert res.theta == pytest.approx(expected, abs=1e-4)


def test_tie_break_prefers_largest_angles():
    # the fully depolarised channel is flat in (theta, xi)
    res = numeric_optimize(NoiseScenario("D", 1.0, "D", 1.0))
    assert res.theta == pytest.approx(math.pi / 2)
    assert res.xi == pytest.approx(math.pi / 2)


def test_numeric_never_below_analytic():
    rng = np.random.default_rng(31)
    for pair in ALL_PAIRS:
        a, c = rng.random(2)
        res = numeric_optimize(NoiseScenario(pair.alpha, a, pair.gamma, c))
        assert res.fidelity >= optimal_fidelity(pair, a, c) - 1e-6


def test_all_pairs_small_lattice_agree():
    for pair in ALL_PAIRS:
        grid = sweep(pair, n=6, engine="both", config=OptimizerConfig(grid=15))
        for cell in grid.cells:
            assert abs(cell.f_opt_numeric - cell.f_opt_analytic) <= 1e-4


def test_lattice():
    np.testing.assert_array_equal(lattice(5), [0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        lattice(1)


def test_sweep_order_and_quantum_flag():
    grid = sweep(NoisePair.parse("PP"), n=3)
    assert [(c.pa, c.pc) for c in grid.cells] == [(a, c) for a in (0, 0.5, 1) for c in (0, 0.5, 1)]
    for c in grid.cells:
        assert c.quantum == (max(v for v in (c.f_opt_analytic, c.f_opt_numeric) if v is not None) > 0.4)
        if c.pa == 0.5 or c.pc == 0.5:
            assert c.f_opt == 0.4 and not c.quantum
        else:
            assert c.f_opt == pytest.approx(1.0) and c.quantum
    assert grid.cell(2, 1) is grid.cells[7]


def test_sweep_rejects_unknown_engine():
    with pytest.raises(ValueError):
        sweep_cell(NoisePair.parse("BB"), 0.1, 0.1, engine="exact")


def test_pre_x_endpoints():
    assert sweep_cell(NoisePair.parse("BB"), 1.0, 1.0, pre_x=True).f_opt == pytest.approx(1.0, abs=1e-9)
    for g in "PAD":
        cell = sweep_cell(NoisePair.parse("B" + g), 1.0, 0.0, pre_x=True, engine="both")
        assert cell.f_opt_analytic == pytest.approx(1.0, abs=1e-9)
        assert cell.f_opt_numeric == pytest.approx(1.0, abs=1e-9)


def test_pre_x_equivalence():
    bb = NoisePair.parse("BB")
    with_x = sweep(bb, pre_x=True, n=5, engine="both", config=OptimizerConfig(grid=11))
    without = sweep(bb, pre_x=False, n=5, engine="both", config=OptimizerConfig(grid=11))
    for i in range(5):
        for j in range(5):
            a, b = with_x.cell(i, j), without.cell(4 - i, 4 - j)
            assert a.f_opt_analytic == pytest.approx(b.f_opt_analytic, abs=1e-9)
            assert a.f_opt_numeric == pytest.approx(b.f_opt_numeric, abs=1e-9)


def test_bb_quantum_region_down_left_closed():
    grid = sweep(NoisePair.parse("BB"), n=21)
    q = np.array([c.quantum for c in grid.cells]).reshape(21, 21)
    assert q.any() and not q.all()
    for i in range(21):
        for j in range(21):
            if q[i, j]:
                assert q[: i + 1, : j + 1].all()


def test_sweep_deterministic():
    a = sweep(NoisePair.parse("AD"), n=4, engine="numeric", config=OptimizerConfig(grid=9))
    b = sweep(NoisePair.parse("AD"), n=4, engine="numeric", config=OptimizerConfig(grid=9))
    assert [(c.f_opt, c.theta_opt, c.xi_opt) for c in a.cells] == [(c.f_opt, c.theta_opt, c.xi_opt) for c in b.cells]


def test_fig5_curves():
    curves = fig5_curves(21)
    for series in (curves.f_a0_opt, curves.f_aa_opt, curves.f_aa_fixed):
        assert series[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(curves.f_aa_fixed <= curves.f_aa_opt + 1e-12)
    assert np.all(curves.f_aa_opt >= 0.4 - 1e-12)
    p_star = curves.crossing
    assert p_star is not None and 0 < p_star < 1
    above = curves.p > p_star
    assert np.all(curves.f_aa_opt[above] > curves.f_a0_opt[above])
    with pytest.raises(ValueError):
        fig5_curves(1)


def test_crossing_is_a_sign_change():
    p = find_crossing()
    f_a0 = lambda x: optimal_fidelity(NoisePair.parse("AA"), x, 0.0)
    f_aa = lambda x: optimal_fidelity(NoisePair.parse("AA"), x, x)
    assert abs(f_aa(p) - f_a0(p)) < 1e-12
    assert f_aa(p - 1e-3) < f_a0(p - 1e-3)
    assert f_aa(p + 1e-3) > f_a0(p + 1e-3)


def test_curve_one_is_route_independent():
    # with nothing on Charlie's route every gamma gives the same optimum
    for p in (0.2, 0.6, 0.9):
        values = [optimal_fidelity(NoisePair.parse("A" + g), p, 0.0) for g in "BPAD"]
        assert max(values) - min(values) < 1e-12
