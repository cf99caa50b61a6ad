"""Local composition of independent box copies.

Two kinds of protocol are implemented. ``compose_xor`` feeds the party
inputs to n copies in parallel and XORs the outputs, for any n up to 16.
``compose_wiring2`` runs an arbitrary deterministic adaptive strategy per
party over two copies: each party picks which copy to query first, chooses
its inputs adaptively, and computes a final bit from everything it saw.

Both return the exact output distribution. Because the copies are
independent and non-signaling, the joint probability of a full outcome
tuple factorizes into a product over copies no matter how the two parties
interleave their queries, so no global schedule is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .boxes import (
    DEFAULT_TOL,
    Box,
    Correlators,
    _clean,
    correlators,
    is_non_signaling,
    require_non_signaling,
)

MAX_XOR_COPIES = 16


def compose_xor(box: Box, n: int, tol: float = DEFAULT_TOL) -> Box:
    """Distribution of the XOR of the outputs of n parallel copies.

    Exact: for each input pair, the row of the result is the n-fold
    convolution of the copy's outcome distribution over XOR of output
    pairs, which sums the same products as enumerating all 4**n outcome
    tuples. Requires 1 <= n <= 16.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if not 1 <= n <= MAX_XOR_COPIES:
        raise ValueError(f"n must be in 1..{MAX_XOR_COPIES}, got {n}")
    require_non_signaling(box, tol)
    rows = []
    for r in range(4):
        row = box.matrix[r]
        acc = row.copy()
        for _ in range(n - 1):
            # Outcome pairs (a, b) are indexed by 2a+b, so XOR of pairs is
            # XOR of indices.
            acc = np.array([sum(acc[i] * row[i ^ j] for i in range(4)) for j in range(4)])
        rows.append(acc)
    return Box(_clean(np.array(rows), tol))


def xor_correlator_law(box: Box, n: int, tol: float = DEFAULT_TOL) -> Correlators:
    """Closed form for ``compose_xor``: each correlator is raised to the n-th power.

    The XOR of independent +-1 variables multiplies their expectations, so
    this must agree with the brute-force composition entrywise.
    """
    if not 1 <= n <= MAX_XOR_COPIES:
        raise ValueError(f"n must be in 1..{MAX_XOR_COPIES}, got {n}")
    c = correlators(box, tol)
    return Correlators(c.x00**n, c.x01**n, c.x10**n, c.x11**n)


@dataclass(frozen=True)
class XorProtocol:
    """Parallel XOR protocol over a fixed number of copies."""

    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_XOR_COPIES:
            raise ValueError(f"n must be in 1..{MAX_XOR_COPIES}, got {self.n}")

    def apply(self, box: Box, tol: float = DEFAULT_TOL) -> Box:
        return compose_xor(box, self.n, tol)


def _bit(value: int, name: str) -> int:
    value = int(value)
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value}")
    return value


@dataclass(frozen=True)
class AdaptiveStrategy:
    """One party's deterministic plan over its two box ends.

    ``order`` names the physical copy queried first. ``first_input`` maps
    the party input to the first query bit, ``second_input`` maps (party
    input, first outcome) to the second query bit, and ``output`` maps
    (party input, first outcome, second outcome) to the final bit, with
    outcomes listed in query order. There are 2*4*16*256 = 32768 such
    strategies.
    """

    order: int
    first_input: tuple[int, int]
    second_input: tuple[tuple[int, int], tuple[int, int]]
    output: tuple[tuple[tuple[int, int], tuple[int, int]], tuple[tuple[int, int], tuple[int, int]]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", _bit(self.order, "order"))
        fi = tuple(_bit(v, "first_input") for v in self.first_input)
        si = tuple(tuple(_bit(v, "second_input") for v in row) for row in self.second_input)
        out = tuple(
            tuple(tuple(_bit(v, "output") for v in inner) for inner in mid) for mid in self.output
        )
        if len(fi) != 2 or len(si) != 2 or len(out) != 2:
            raise ValueError("strategy maps must be indexed by one input bit")
        if any(len(row) != 2 for row in si) or any(len(mid) != 2 or any(len(i) != 2 for i in mid) for mid in out):
            raise ValueError("strategy maps must be total on their binary domains")
        object.__setattr__(self, "first_input", fi)
        object.__setattr__(self, "second_input", si)
        object.__setattr__(self, "output", out)

    def trace(self, x: int, outcomes: tuple[int, int]) -> tuple[tuple[int, int], int]:
        """Inputs fed to the physical copies and the final bit.

        ``outcomes`` lists the bits the physical copies would return,
        indexed by physical copy (not query order).
        """
        first = self.order
        o_first = outcomes[first]
        o_second = outcomes[1 - first]
        i_first = self.first_input[x]
        i_second = self.second_input[x][o_first]
        final = self.output[x][o_first][o_second]
        inputs = (i_first, i_second) if first == 0 else (i_second, i_first)
        return inputs, final

    def encode(self) -> int:
        """Pack the maps into a 15-bit integer; lexicographic on the maps."""
        code = self.order << 14
        code |= self.first_input[0] << 13 | self.first_input[1] << 12
        for x in (0, 1):
            for o in (0, 1):
                code |= self.second_input[x][o] << (11 - 2 * x - o)
        for x in (0, 1):
            for o1 in (0, 1):
                for o2 in (0, 1):
                    code |= self.output[x][o1][o2] << (7 - 4 * x - 2 * o1 - o2)
        return code

    @classmethod
    def decode(cls, code: int) -> "AdaptiveStrategy":
        if not 0 <= code < 1 << 15:
            raise ValueError(f"strategy code out of range: {code}")
        first_input = ((code >> 13) & 1, (code >> 12) & 1)
        second_input = tuple(
            tuple((code >> (11 - 2 * x - o)) & 1 for o in (0, 1)) for x in (0, 1)
        )
        output = tuple(
            tuple(tuple((code >> (7 - 4 * x - 2 * o1 - o2)) & 1 for o2 in (0, 1)) for o1 in (0, 1))
            for x in (0, 1)
        )
        return cls((code >> 14) & 1, first_input, second_input, output)

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "first_input": list(self.first_input),
            "second_input": [list(row) for row in self.second_input],
            "output": [[list(inner) for inner in mid] for mid in self.output],
        }


def xor_strategy() -> AdaptiveStrategy:
    """Both copies queried with the party input, final bit is the XOR."""
    return AdaptiveStrategy(
        order=0,
        first_input=(0, 1),
        second_input=((0, 0), (1, 1)),
        output=(((0, 1), (1, 0)), ((0, 1), (1, 0))),
    )


def first_box_strategy() -> AdaptiveStrategy:
    """Query both copies with the party input but output the first outcome."""
    return AdaptiveStrategy(
        order=0,
        first_input=(0, 1),
        second_input=((0, 0), (1, 1)),
        output=(((0, 0), (1, 1)), ((0, 0), (1, 1))),
    )


@dataclass(frozen=True)
class Wiring2:
    """A pair of adaptive strategies, one per party, over two shared copies."""

    alice: AdaptiveStrategy
    bob: AdaptiveStrategy

    def to_json_dict(self) -> dict:
        return {"alice": self.alice.to_json_dict(), "bob": self.bob.to_json_dict()}


def compose_wiring2(box: Box, wiring: Wiring2, tol: float = DEFAULT_TOL) -> Box:
    """Exact box simulated by running a two-copy wiring on ``box``.

    Enumerates the 16 physical outcome tuples per input pair; each tuple
    fixes both parties' adaptive paths, hence the inputs every copy saw,
    and contributes the product of the two copy probabilities.
    """
    require_non_signaling(box, tol)
    m = box.matrix
    out = np.zeros((4, 4))
    for x, y in product((0, 1), repeat=2):
        for a1, a2, b1, b2 in product((0, 1), repeat=4):
            (xa1, xa2), a = wiring.alice.trace(x, (a1, a2))
            (yb1, yb2), b = wiring.bob.trace(y, (b1, b2))
            p = m[2 * xa1 + yb1, 2 * a1 + b1] * m[2 * xa2 + yb2, 2 * a2 + b2]
            out[2 * x + y, 2 * a + b] += p
    result = Box(_clean(out, tol))
    check = is_non_signaling(result, tol)
    if not check.ok:
        raise AssertionError(
            f"wiring produced a signaling box (residual {check.residual:.3g}); "
            "this cannot happen for a non-signaling resource"
        )
    return result
