"""Numerical maximisation over (theta, xi), phase-diagram sweeps and damping comparison curves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import analytic
from .analytic import CLASSICAL_LIMIT, NoisePair
from .averaging import QuadratureSpec, fidelity_surface
from .noise import NoiseKind, NoiseScenario

HALF_PI = math.pi / 2
INV_PHI = (math.sqrt(5) - 1) / 2
TIE_TOL = 1e-9
IMPROVE_TOL = 1e-15
# numeric optima resolve 2/5 only to roundoff
NUMERIC_QUANTUM_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    grid: int = 25
    tol: float = 1e-6
    max_sweeps: int = 200


@dataclass(frozen=True)
class OptimizeResult:
    theta: float
    xi: float
    fidelity: float
    sweeps: int


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-9) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2
    best = max(((x, f(x)), (lo, f(lo)), (hi, f(hi))), key=lambda t: t[1])
    return best


def _refine(surface, theta, xi, step, config):
    """Coordinate ascent with golden-section line searches in a shrinking box."""
    f = surface(theta, xi)
    h = step
    for sweep in range(1, config.max_sweeps + 1):
        t_lo, t_hi = max(-HALF_PI, theta - h), min(HALF_PI, theta + h)
        new_t, _ = golden_section_max(lambda t: surface(t, xi), t_lo, t_hi, config.tol * 1e-3)
        x_lo, x_hi = max(-HALF_PI, xi - h), min(HALF_PI, xi + h)
        new_x, new_f = golden_section_max(lambda x: surface(new_t, x), x_lo, x_hi, config.tol * 1e-3)
        if new_f <= f + IMPROVE_TOL:
            # flat directions: stay put so tie-breaking sees the grid point
            break
        moved = max(abs(new_t - theta), abs(new_x - xi))
        theta, xi, f = new_t, new_x, new_f
        if moved < config.tol:
            break
        h = max(2 * moved, config.tol)
    return theta, xi, f, sweep


def _pick(candidates):
    """Best fidelity; near-ties go to the largest theta, then largest xi."""
    top = max(c[2] for c in candidates)
    close = [c for c in candidates if c[2] >= top - TIE_TOL]
    return max(close, key=lambda c: (round(c[0], 6), round(c[1], 6)))


def numeric_optimize(
    scenario: NoiseScenario,
    config: OptimizerConfig = OptimizerConfig(),
    spec: QuadratureSpec = QuadratureSpec(),
) -> OptimizeResult:
    """Grid search over [-pi/2, pi/2]^2, then local refinement of every grid peak."""
    surface = fidelity_surface(scenario, spec)
    axis = np.linspace(-HALF_PI, HALF_PI, config.grid)
    step = axis[1] - axis[0]
    tt, xx = np.meshgrid(axis, axis, indexing="ij")
    values = surface(tt, xx)

    # local maxima of the grid (8-neighbourhood, edges included)
    padded = np.pad(values, 1, constant_values=-np.inf)
    neighbours = np.stack(
        [
            padded[1 + di : 1 + di + config.grid, 1 + dj : 1 + dj + config.grid]
            for di in (-1, 0, 1)
            for dj in (-1, 0, 1)
            if di or dj
        ]
    )
    peaks = np.argwhere(values >= neighbours.max(axis=0) - 1e-15)
    # the surface is a product of first harmonics, so peaks are few; near-ties
    # with the best grid value go first, largest theta then largest xi
    top = values.max()

    def rank(ij):
        v = values[ij[0], ij[1]]
        return (v < top - TIE_TOL, -ij[0], -ij[1]) if v >= top - TIE_TOL else (True, -v, 0)

    order = sorted(peaks.tolist(), key=rank)[:8]

    candidates = []
    total_sweeps = 0
    for i, j in order:
        t, x, f, n = _refine(surface, float(axis[i]), float(axis[j]), step, config)
        total_sweeps += n
        candidates.append((t, x, f))
    theta, xi, f = _pick(candidates)
    return OptimizeResult(float(theta), float(xi), float(f), total_sweeps)


# --- sweeps -------------------------------------------------------------------


@dataclass
class Cell:
    pa: float
    pc: float
    f_opt_analytic: Optional[float] = None
    f_opt_numeric: Optional[float] = None
    theta_opt: float = math.nan
    xi_opt: float = math.nan
    quantum: bool = False

    @property
    def f_opt(self) -> float:
        values = [v for v in (self.f_opt_analytic, self.f_opt_numeric) if v is not None]
        return max(values)


@dataclass
class SweepGrid:
    pair: NoisePair
    pre_x: bool
    n: int
    engine: str
    cells: list[Cell] = field(default_factory=list)

    def cell(self, i: int, j: int) -> Cell:
        """Cell at pa index ``i`` and pc index ``j``."""
        return self.cells[i * self.n + j]

    def lattice(self) -> np.ndarray:
        return lattice(self.n)

    def values(self) -> np.ndarray:
        return np.array([c.f_opt for c in self.cells]).reshape(self.n, self.n)


def lattice(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("sweep resolution must be at least 2")
    return np.array([i / (n - 1) for i in range(n)])


ENGINES = ("analytic", "numeric", "both")


def sweep_cell(
    pair: NoisePair,
    pa: float,
    pc: float,
    pre_x: bool = False,
    engine: str = "analytic",
    config: OptimizerConfig = OptimizerConfig(),
    spec: QuadratureSpec = QuadratureSpec(),
) -> Cell:
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    cell = Cell(pa, pc)
    if engine in ("analytic", "both"):
        ea, ec = analytic.effective_strengths(pair, pa, pc, pre_x)
        cell.f_opt_analytic = analytic.optimal_fidelity(pair, ea, ec)
        params = analytic.optimal_params(pair, ea, ec)
        cell.theta_opt, cell.xi_opt = params.theta_opt, params.xi_opt
    if engine in ("numeric", "both"):
        scenario = NoiseScenario(pair.alpha, pa, pair.gamma, pc, pre_x)
        res = numeric_optimize(scenario, config, spec)
        cell.f_opt_numeric = res.fidelity
        if engine == "numeric":
            cell.theta_opt, cell.xi_opt = res.theta, res.xi
    tol = 0.0 if engine == "analytic" else NUMERIC_QUANTUM_TOL
    cell.quantum = cell.f_opt > CLASSICAL_LIMIT + tol
    return cell


def sweep(
    pair: NoisePair,
    pre_x: bool = False,
    n: int = 21,
    engine: str = "analytic",
    config: OptimizerConfig = OptimizerConfig(),
    spec: QuadratureSpec = QuadratureSpec(),
) -> SweepGrid:
    """Fill the (pa, pc) lattice; cells are stored pa-major."""
    ps = lattice(n)
    grid = SweepGrid(pair, pre_x, n, engine)
    for pa in ps:
        for pc in ps:
            grid.cells.append(sweep_cell(pair, float(pa), float(pc), pre_x, engine, config, spec))
    return grid


# --- amplitude-damping comparison curves ----------------------------------------

_AA = NoisePair(NoiseKind.AmplitudeDamping, NoiseKind.AmplitudeDamping)


def f_a0_opt(p: float) -> float:
    """Optimal fidelity with damping on Alice's route only."""
    return analytic.optimal_fidelity(_AA, p, 0.0)


def f_aa_opt(p: float) -> float:
    """Optimal fidelity with equal damping on both routes."""
    return analytic.optimal_fidelity(_AA, p, p)


def f_aa_fixed(p: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Equal damping on both routes at theta = xi = pi/4 (simulated)."""
    scenario = NoiseScenario(NoiseKind.AmplitudeDamping, p, NoiseKind.AmplitudeDamping, p)
    return fidelity_surface(scenario, spec)(math.pi / 4, math.pi / 4)


@dataclass
class Fig5Curves:
    p: np.ndarray
    f_a0_opt: np.ndarray
    f_aa_opt: np.ndarray
    f_aa_fixed: np.ndarray
    crossing: Optional[float]


def find_crossing(n_scan: int = 2001) -> Optional[float]:
    """Largest-p sign change of f_aa_opt - f_a0_opt from <= 0 to > 0.

    Beyond the returned point equal damping on both routes beats damping on
    Alice's route alone.
    """
    ps = np.linspace(0.0, 1.0, n_scan)
    diff = np.array([f_aa_opt(p) - f_a0_opt(p) for p in ps])
    idx = [i for i in range(1, n_scan) if diff[i - 1] <= 0 < diff[i]]
    if not idx:
        return None
    i = idx[-1]
    if diff[i - 1] == 0.0:
        return float(ps[i - 1])
    return float(brentq(lambda p: f_aa_opt(p) - f_a0_opt(p), ps[i - 1], ps[i], xtol=1e-14))


def fig5_curves(n_points: int = 101, spec: QuadratureSpec = QuadratureSpec()) -> Fig5Curves:
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    ps = lattice(n_points)
    return Fig5Curves(
        p=ps,
        f_a0_opt=np.array([f_a0_opt(p) for p in ps]),
        f_aa_opt=np.array([f_aa_opt(p) for p in ps]),
        f_aa_fixed=np.array([f_aa_fixed(p, spec) for p in ps]),
        crossing=find_crossing(),
    )
