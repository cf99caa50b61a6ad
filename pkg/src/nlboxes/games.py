"""Distributed AND game evaluated exactly.

Alice holds bits (x1, x2), Bob holds (y1, y2), and they win when the XOR
of their output bits equals (x1 XOR y1) AND (x2 XOR y2). Expanding the
target over GF(2) splits it into the local products x1*x2 and y1*y2 plus
the cross terms x1*y2 and x2*y1, so two box uses, one per cross term,
turn any CHSH violation into a win-rate advantage: Alice plays box 1 with
x1 and box 2 with x2, Bob plays box 1 with y2 and box 2 with y1, and each
party XORs its local product with its two box outputs.

For a resource with CHSH functional S = X00 + X01 + X10 - X11 the win
probability is q**2 + (1-q)**2 with q = (4 + S) / 8; the enumeration here
is the authority and the closed form is checked against it in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .boxes import DEFAULT_TOL, Box, correlators, nl, require_non_signaling
from .wiring import compose_xor


@dataclass(frozen=True)
class AndGameStrategy:
    """Resource box plus an optional XOR pre-distillation depth."""

    resource: Box
    m: int = 1

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")


def _played_box(strategy: AndGameStrategy, tol: float) -> Box:
    if strategy.m == 1:
        require_non_signaling(strategy.resource, tol)
        return strategy.resource
    return compose_xor(strategy.resource, strategy.m, tol)


def and_game_success(strategy: AndGameStrategy, tol: float = DEFAULT_TOL) -> float:
    """Exact win probability under uniform inputs, by full enumeration."""
    box = _played_box(strategy, tol)
    m = box.matrix
    total = 0.0
    for x1, x2, y1, y2 in product((0, 1), repeat=4):
        target = (x1 ^ y1) & (x2 ^ y2)
        for a1, b1, a2, b2 in product((0, 1), repeat=4):
            p = m[2 * x1 + y2, 2 * a1 + b1] * m[2 * x2 + y1, 2 * a2 + b2]
            a = (x1 & x2) ^ a1 ^ a2
            b = (y1 & y2) ^ b1 ^ b2
            if (a ^ b) == target:
                total += p
    return total / 16.0


def and_game_success_closed(strategy: AndGameStrategy, tol: float = DEFAULT_TOL) -> float:
    """Closed form q**2 + (1-q)**2 with q = (4 + S)/8 of the played box."""
    c = correlators(_played_box(strategy, tol), tol)
    s = c.x00 + c.x01 + c.x10 - c.x11
    q = (4.0 + s) / 8.0
    return q * q + (1.0 - q) * (1.0 - q)


@lru_cache(maxsize=1)
def classical_and_optimum() -> float:
    """Best deterministic win rate, by exhausting all 16 x 16 strategy pairs.

    Each party's strategy is a truth table over its two input bits. Shared
    randomness mixes deterministic pairs and the win rate is linear in the
    mixture, so the deterministic maximum is the classical optimum.
    """
    best = 0.0
    for fa in range(16):
        for fb in range(16):
            wins = 0
            for x1, x2, y1, y2 in product((0, 1), repeat=4):
                a = (fa >> (2 * x1 + x2)) & 1
                b = (fb >> (2 * y1 + y2)) & 1
                if (a ^ b) == ((x1 ^ y1) & (x2 ^ y2)):
                    wins += 1
            best = max(best, wins / 16.0)
    return best


@dataclass(frozen=True)
class GameResult:
    resource_nl: float
    m: int
    s_value: float
    success: float
    classical_baseline: float

    @property
    def margin(self) -> float:
        return self.success - self.classical_baseline

    def to_json_dict(self) -> dict:
        return {
            "resource_nl": self.resource_nl,
            "m": self.m,
            "s_value": self.s_value,
            "success": self.success,
            "classical_baseline": self.classical_baseline,
            "margin": self.margin,
        }


def play_and_game(resource: Box, m: int = 1, tol: float = DEFAULT_TOL) -> GameResult:
    """Evaluate the fixed cross-term strategy and report it against the classical bar."""
    strategy = AndGameStrategy(resource, m)
    played = _played_box(strategy, tol)
    c = correlators(played, tol)
    return GameResult(
        resource_nl=nl(resource, tol),
        m=m,
        s_value=c.x00 + c.x01 + c.x10 - c.x11,
        success=and_game_success(strategy, tol),
        classical_baseline=classical_and_optimum(),
    )
