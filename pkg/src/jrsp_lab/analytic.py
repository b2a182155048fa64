"""Closed-form averaged fidelities and optimal control angles.

``a`` is the noise strength on Alice's route and ``c`` on Charlie's route
throughout. Expressions are kept in their published arrangement, with no
symbolic simplification, so each can be compared term by term.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .noise import NoiseKind

PI2 = math.pi**2
QUARTER = math.pi / 4
CLASSICAL_LIMIT = 2.0 / 5.0

B, P, A, D = (
    NoiseKind.BitFlip,
    NoiseKind.PhaseFlip,
    NoiseKind.AmplitudeDamping,
    NoiseKind.Depolarizing,
)


def classical_limit() -> float:
    return CLASSICAL_LIMIT


def is_quantum(fidelity: float) -> bool:
    """Strictly above the best entanglement-free average."""
    return fidelity > CLASSICAL_LIMIT


@dataclass(frozen=True)
class NoisePair:
    alpha: NoiseKind
    gamma: NoiseKind

    def __post_init__(self):
        object.__setattr__(self, "alpha", NoiseKind.parse(self.alpha))
        object.__setattr__(self, "gamma", NoiseKind.parse(self.gamma))

    @classmethod
    def parse(cls, text: str) -> "NoisePair":
        text = text.strip()
        if len(text) != 2:
            raise ValueError(f"noise pair must be two letters like 'BA', got {text!r}")
        return cls(NoiseKind.parse(text[0]), NoiseKind.parse(text[1]))

    def __str__(self) -> str:
        return f"{self.alpha.value}{self.gamma.value}"


ALL_PAIRS = tuple(NoisePair(x, y) for x in NoiseKind for y in NoiseKind)


class Branch(enum.Enum):
    CONSTANT = "constant"
    POSITIVE = "positive"  # the +pi/4 side of a sign rule
    NEGATIVE = "negative"  # the -pi/4 side
    BOUNDARY = "boundary"  # sign rule undecided, +pi/4 chosen
    ARCTAN = "arctan"
    ARCTAN_BOUNDARY = "arctan_boundary"  # denominator zero or excluded edge
    DEGENERATE = "degenerate"  # numerator and denominator both zero


@dataclass(frozen=True)
class OptimalParams:
    theta_opt: float
    xi_opt: float
    branch_note: Branch


def _sqrt(x: float) -> float:
    if x < -1e-14:
        raise ValueError(f"negative argument {x} under square root")
    return math.sqrt(max(x, 0.0))


def _check(*ps: float) -> None:
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"noise strength {p} outside [0, 1]")


# --- general (theta, xi) expressions for a bit-flip Alice route -------------


def _bit_flip_weights(a: float) -> tuple[float, float]:
    """The two recurring a-dependent factors of the bit-flip row."""
    k1 = (PI2 - 16) * a + 16
    k2 = 8 - (16 - PI2) * (a - a**2)
    return k1, k2


def fidelity_BB(a, c, theta, xi):
    k1, k2 = _bit_flip_weights(a)
    s2t, s2x = math.sin(2 * theta), math.sin(2 * xi)
    q = a * (2 * c - 1) - c
    return (
        2 / 5
        + q * (q + 2) / 5
        + k1 * (c - 1) ** 2 * (s2x + s2t) / 80
        + k2 * (c - 1) ** 2 * s2x * s2t / 40
    )


def fidelity_BP(a, c, theta, xi):
    k1, k2 = _bit_flip_weights(a)
    s2t, s2x = math.sin(2 * theta), math.sin(2 * xi)
    return (
        2 / 5
        + (a - 2) * a / 5
        + k1 * (1 - 2 * c) * (s2x + s2t) / 80
        + k2 * (2 * c - 1) ** 2 * s2x * s2t / 40
    )


def fidelity_BA(a, c, theta, xi):
    k1, k2 = _bit_flip_weights(a)
    s2t, s2x, c2t = math.sin(2 * theta), math.sin(2 * xi), math.cos(2 * theta)
    q = 2 * a * (c - 1) - c
    r = _sqrt(1 - c)
    return (
        2 / 5
        + q * (q + 4) / 20
        + (1 - 2 * a) * c * (q + 2) * c2t / 20
        + k1 * r * (2 - c) * (s2x + s2t) / 160
        + k1 * r * c * s2x * c2t / 160
        + k2 * (1 - c) * s2x * s2t / 40
    )


def fidelity_BD(a, c, theta, xi):
    k1, k2 = _bit_flip_weights(a)
    s2t, s2x = math.sin(2 * theta), math.sin(2 * xi)
    q = 2 * a * (c - 1) - c
    return (
        2 / 5
        + q * (q + 4) / 20
        + k1 * (c - 2) * (c - 1) * (s2x + s2t) / 160
        + k2 * (1 - c) ** 2 * s2x * s2t / 40
    )


_GENERAL_B_ROW = {B: fidelity_BB, P: fidelity_BP, A: fidelity_BA, D: fidelity_BD}


def general_fidelity_B_row(gamma, p_a: float, p_c: float, theta: float, xi: float) -> float:
    """Averaged fidelity at arbitrary (theta, xi) when Alice's route is bit-flip."""
    _check(p_a, p_c)
    return float(_GENERAL_B_ROW[NoiseKind.parse(gamma)](p_a, p_c, theta, xi))


# --- optimal angles ---------------------------------------------------------


def _sign_rule(x: float) -> tuple[float, Branch]:
    """+pi/4 when x > 0, -pi/4 when x < 0, +pi/4 flagged at x == 0."""
    if x > 0:
        return QUARTER, Branch.POSITIVE
    if x < 0:
        return -QUARTER, Branch.NEGATIVE
    return QUARTER, Branch.BOUNDARY


def _half_atan2(num: float, den: float) -> tuple[float, Branch]:
    if num == 0.0 and den == 0.0:
        return 0.0, Branch.DEGENERATE
    note = Branch.ARCTAN_BOUNDARY if den == 0.0 or num == 0.0 else Branch.ARCTAN
    return 0.5 * math.atan2(num, den), note


def _theta_BA(a, c):
    r = _sqrt(1 - c)
    num = 4 * (8 - (16 - PI2) * (1 - a) * a) * (1 - c) + (16 - (16 - PI2) * a) * r * (2 - c)
    den = ((PI2 - 16) * a + 16) * r * c + 8 * (1 - 2 * a) * c * (-2 * a * (1 - c) - c + 2)
    return num, den


def _theta_PA(a, c):
    return 2 * (1 - 2 * a) * _sqrt(1 - c), c


def _theta_AB(a, c):
    r = _sqrt(1 - a)
    num = (1 - c) ** 2 * (r * ((PI2 - 16) * a + 32) + 32 * (1 - a))
    den = a * ((16 - PI2) * r * (1 - c) ** 2 - 8 * (2 * c - 1) * (2 * (a - 1) * c - a + 2))
    return num, den


def m_aa(a, c):
    r = _sqrt((a - 1) * (c - 1))
    return (32 * (a - 1) * (c - 1) + r * (32 - (PI2 - 16) * a * (c - 1) - 16 * c)) / 160


def n_aa(a, c):
    r = _sqrt((a - 1) * (c - 1))
    return (
        r * ((PI2 - 16) * a * (c - 1) + 16 * c)
        + 8 * (a * (1 - 2 * c) + c) * (a * (2 * c - 1) + 2 - c)
    ) / 160


def _theta_AD(a, c):
    r = _sqrt(1 - a)
    num = r * ((PI2 - 16) * a + 32) * (2 - c) + 64 * (a - 1) * (c - 1)
    den = a * (((16 - PI2) * r + 16) * (2 - c) + 16 * a * (c - 1))
    return num, den


def _theta_AP(a, c):
    # (2c - 1) inside the braces only maximises for c < 1/2; -|1 - 2c| is
    # identical there and stays optimal for c > 1/2.
    r = _sqrt(1 - a)
    s = abs(1 - 2 * c)
    num = (1 - 2 * c) * (32 * (1 - a) * s + r * ((PI2 - 16) * a + 32))
    den = a * (-(PI2 - 16) * r * s - 8 * a + 16)
    return num, den


def _theta_DA(a, c):
    r = _sqrt(1 - c)
    k = (PI2 - 16) * a + 32
    num = k * r * (2 - c) + 64 * (a - 1) * (c - 1)
    den = c * (k * r + 16 * (a * (c - 1) - c + 2))
    return num, den


def optimal_params(pair: NoisePair, p_a: float, p_c: float) -> OptimalParams:
    """Closed-form maximiser of the averaged fidelity over (theta, xi)."""
    _check(p_a, p_c)
    a, c = p_a, p_c
    al, ga = pair.alpha, pair.gamma

    def both(angle_note):
        angle, note = angle_note
        return OptimalParams(angle, angle, note)

    def xi_quarter(num_den):
        theta, note = _half_atan2(*num_den)
        return OptimalParams(theta, QUARTER, note)

    if al is B:
        if ga in (B, D):
            return OptimalParams(QUARTER, QUARTER, Branch.CONSTANT)
        if ga is P:
            return both(_sign_rule(1 - 2 * c))
        return xi_quarter(_theta_BA(a, c))
    if al is P:
        if ga is P:
            return both(_sign_rule((1 - 2 * a) * (1 - 2 * c)))
        if ga in (B, D):
            return both(_sign_rule(1 - 2 * a))
        xi, xi_note = _sign_rule(1 - 2 * a)
        theta, note = _half_atan2(*_theta_PA(a, c))
        return OptimalParams(theta, xi, xi_note if xi_note is Branch.BOUNDARY else note)
    if al is A:
        if ga is B:
            return xi_quarter(_theta_AB(a, c))
        if ga is A:
            return xi_quarter((m_aa(a, c), n_aa(a, c)))
        if ga is D:
            opt = xi_quarter(_theta_AD(a, c))
            if a == 0.0 or c == 1.0:
                return OptimalParams(opt.theta_opt, opt.xi_opt, Branch.ARCTAN_BOUNDARY)
            return opt
        xi, xi_note = _sign_rule(1 - 2 * c)
        theta, note = _half_atan2(*_theta_AP(a, c))
        return OptimalParams(theta, xi, xi_note if xi_note is Branch.BOUNDARY else note)
    # depolarizing Alice route
    if ga in (B, D):
        return OptimalParams(QUARTER, QUARTER, Branch.CONSTANT)
    if ga is P:
        return both(_sign_rule(1 - 2 * c))
    opt = xi_quarter(_theta_DA(a, c))
    if a == 1.0 or c == 0.0:
        return OptimalParams(opt.theta_opt, opt.xi_opt, Branch.ARCTAN_BOUNDARY)
    return opt


# --- optimal averaged fidelities ---------------------------------------------


def opt_BB(a, c):
    return 2 / 5 + (
        2 * a * (c - 1) * ((PI2 - 32) * c - PI2 + 24)
        + 8 * (4 * c**2 - 8 * c + 3)
        + a**2 * ((48 - PI2) * c**2 - 2 * (32 - PI2) * c + 24 - PI2)
    ) / 40


def opt_BP(a, c):
    return 2 / 5 + (
        ((PI2 - 16) * a + 16) * abs(1 - 2 * c)
        - ((PI2 - 16) * (a - 1) * a - 8) * (1 - 2 * c) ** 2
        + 8 * a**2
        - 16 * a
    ) / 40


def opt_BD(a, c):
    return 2 / 5 + (
        48
        - 2 * (PI2 - 24) * a**2 * (c - 1) ** 2
        + 12 * c * (3 * c - 8)
        + a * (c - 1) * ((3 * PI2 - 64) * c - 4 * PI2 + 96)
    ) / 80


def opt_BA(a, c):
    r = _sqrt(1 - c)
    q = 2 * a * (c - 1) - c
    first = ((16 - PI2) * a - 16) * r * (c - 2) + 8 * q * (q + 4)
    u = 4 * (8 - (16 - PI2) * (1 - a) * a) * (1 - c) + (16 - (16 - PI2) * a) * r * (2 - c)
    v = (16 - (16 - PI2) * a) * r * c + 8 * (1 - 2 * a) * c * (2 * a * (c - 1) - c + 2)
    return 2 / 5 + first / 160 + math.hypot(u, v) / 160


def opt_PB(a, c):
    return (
        2 / 5
        + (c - 2) * c / 5
        + (2 * a - 1) ** 2 * (c - 1) ** 2 / 5
        + 2 / 5 * (c - 1) ** 2 * abs(1 - 2 * a)
    )


def opt_PP(a, c):
    x = (2 * a - 1) * (2 * c - 1)
    return 2 / 5 + x**2 / 5 + 2 / 5 * abs(x)


def opt_PA(a, c):
    r = _sqrt(1 - c)
    s = abs(1 - 2 * a)
    u = 2 * (1 - 2 * a) * (2 * (1 - c) * s + r * (2 - c))
    v = c * (2 * r * s + 2 - c)
    return 2 / 5 + (c - 4) * c / 20 + r * (2 - c) * s / 10 + math.hypot(u, v) / 20


def opt_PD(a, c):
    s = abs(1 - 2 * a)
    return (
        2 / 5
        + (c - 4) * c / 20
        + (2 * a - 1) ** 2 * (c - 1) ** 2 / 5
        + (c - 2) * (c - 1) * s / 5
    )


def opt_AB(a, c):
    r = _sqrt(1 - a)
    q = 2 * (a - 1) * c - a
    first = r * ((PI2 - 16) * a + 32) * (c - 1) ** 2 + 8 * q * (q + 4)
    u2 = (c - 1) ** 4 * (32 - 32 * a + r * (PI2 * a - 16 * a + 32)) ** 2
    v2 = a**2 * ((16 - PI2) * r * (c - 1) ** 2 - 8 * (2 * c - 1) * (2 * (a - 1) * c - a + 2)) ** 2
    return 2 / 5 + first / 160 + math.sqrt(u2 + v2) / 160


def opt_AP(a, c):
    # the last brace sits under a square root, like its AB and AD siblings
    r = _sqrt(1 - a)
    s = abs(1 - 2 * c)
    k = (PI2 - 16) * a + 32
    u2 = (1 - 2 * c) ** 2 * (r * k + 32 * (1 - a) * s) ** 2
    v2 = a**2 * ((16 - PI2) * r * s + 8 * (2 - a)) ** 2
    return 2 / 5 + (a - 4) * a / 20 + r * k * s / 160 + math.sqrt(u2 + v2) / 160


def opt_AA(a, c):
    r = _sqrt((a - 1) * (c - 1))
    q = a * (2 * c - 1) - c
    first = r * (32 - (PI2 - 16) * a * (c - 1) - 16 * c) + 8 * q * (q + 4)
    return 2 / 5 + first / 160 + math.hypot(m_aa(a, c), n_aa(a, c))


def opt_AD(a, c):
    r = _sqrt(1 - a)
    k = (PI2 - 16) * a + 32
    q = a * (c - 1) - c
    first = 16 * q * (q + 4) + r * k * (c - 2) * (c - 1)
    u = (1 - c) * (r * k * (2 - c) + 64 * (a - 1) * (c - 1))
    v = a * (1 - c) * (((16 - PI2) * r + 16) * (2 - c) + 16 * a * (c - 1))
    return 2 / 5 + first / 320 + math.hypot(u, v) / 320


def opt_DB(a, c):
    inner = (
        a**2 * (4 * c * (3 * c - 5) + 9)
        - 4 * a * (c - 1) * (7 * c - 6)
        + 4 * (4 * (c - 2) * c + 3)
    )
    return 2 / 5 + (4 * inner + PI2 * (1 - a) * a * (c - 1) ** 2) / 80


def opt_DP(a, c):
    return 2 / 5 + (
        (1 - a) * ((PI2 - 16) * a + 32) * abs(1 - 2 * c)
        + 16 * (a - 1) ** 2 * (1 - 2 * c) ** 2
        + 4 * a**2
        - 16 * a
    ) / 80


def opt_DA(a, c):
    r = _sqrt(1 - c)
    k = (PI2 - 16) * a + 32
    q = a * (c - 1) - c
    first = (1 - a) * k * r * (2 - c) + 16 * q * (q + 4)
    u = (1 - a) * (64 * (1 - a) * (1 - c) + k * r * (2 - c))
    v = (1 - a) * c * (k * r + 16 * (a * (c - 1) - c + 2))
    return 2 / 5 + first / 320 + math.hypot(u, v) / 320


def opt_DD(a, c):
    inner = (
        a**2 * (c - 1) * (7 * c - 9)
        - 8 * a * (c - 1) * (2 * c - 3)
        + 3 * (c - 2) * (3 * c - 2)
    )
    return 2 / 5 + (8 * inner + PI2 * (1 - a) * a * (2 - c) * (1 - c)) / 160


OPTIMAL_FIDELITY = {
    (B, B): opt_BB,
    (B, P): opt_BP,
    (B, A): opt_BA,
    (B, D): opt_BD,
    (P, B): opt_PB,
    (P, P): opt_PP,
    (P, A): opt_PA,
    (P, D): opt_PD,
    (A, B): opt_AB,
    (A, P): opt_AP,
    (A, A): opt_AA,
    (A, D): opt_AD,
    (D, B): opt_DB,
    (D, P): opt_DP,
    (D, A): opt_DA,
    (D, D): opt_DD,
}


def optimal_fidelity(pair: NoisePair, p_a: float, p_c: float) -> float:
    """Maximum over (theta, xi) of the ensemble-averaged fidelity."""
    _check(p_a, p_c)
    return float(OPTIMAL_FIDELITY[(pair.alpha, pair.gamma)](p_a, p_c))


def effective_strengths(pair: NoisePair, p_a: float, p_c: float, pre_x: bool) -> tuple[float, float]:
    """Strengths seen by the closed forms once X pre-application is folded in.

    X before a bit-flip channel acts like a bit flip of probability 1 - p
    (the X itself is absorbed into the flip).
    """
    if pre_x and pair.alpha is B:
        p_a = 1.0 - p_a
    if pre_x and pair.gamma is B:
        p_c = 1.0 - p_c
    return p_a, p_c
