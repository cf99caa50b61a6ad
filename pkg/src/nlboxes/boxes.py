"""Binary bipartite boxes and their CHSH analysis.

A box is the conditional distribution P(ab|xy) of a two-party device where
each party feeds in one bit and reads one bit back. It is stored as a 4x4
row-stochastic matrix: the row index is the input pair xy in the fixed
order 00, 01, 10, 11, the column index is the output pair ab in the same
order. Every module in this package consumes and produces this one
representation, and all file I/O uses this ordering.

All comparisons share a single absolute tolerance (default 1e-9). The
quantities computed here are low-degree polynomials of the table entries,
so double precision keeps rounding error orders of magnitude below it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_TOL = 1e-9

XY_LABELS = ("00", "01", "10", "11")
AB_LABELS = ("00", "01", "10", "11")

CHSH_LABELS = (
    "chsh00",
    "chsh01",
    "chsh10",
    "chsh11",
    "chsh00_neg",
    "chsh01_neg",
    "chsh10_neg",
    "chsh11_neg",
)


class InvalidBoxError(ValueError):
    """A box failed row-stochasticity validation."""


class SignalingBoxError(ValueError):
    """An operation that assumes non-signaling received a signaling box."""


def _as_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (4, 4):
        raise ValueError(f"box matrix must be 4x4, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Box:
    """Conditional distribution P(ab|xy) as a read-only 4x4 matrix.

    Construction does not check probability constraints; use ``validate``
    to obtain a report, so that broken tables can still be inspected.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _as_matrix(self.matrix))

    def prob(self, a: int, b: int, x: int, y: int) -> float:
        return float(self.matrix[2 * x + y, 2 * a + b])

    def marginal_a(self, a: int, x: int, y: int) -> float:
        """P(a|xy), summed over Bob's output."""
        row = self.matrix[2 * x + y]
        return float(row[2 * a] + row[2 * a + 1])

    def marginal_b(self, b: int, x: int, y: int) -> float:
        """P(b|xy), summed over Alice's output."""
        row = self.matrix[2 * x + y]
        return float(row[b] + row[2 + b])

    def to_json_dict(self) -> dict:
        return {"matrix": [[float(v) for v in row] for row in self.matrix]}

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Box":
        if not isinstance(obj, dict) or "matrix" not in obj:
            raise ValueError('box JSON must be an object with a "matrix" key')
        return cls(obj["matrix"])

    @classmethod
    def from_json(cls, text: str) -> "Box":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class Correlators:
    """The four correlation functions of a box, one per input pair xy."""

    x00: float
    x01: float
    x10: float
    x11: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x00, self.x01, self.x10, self.x11)


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of the two-parameter resource family ``p_eps_delta``."""

    eps: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must be in (0, 1], got {self.eps}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")


@dataclass(frozen=True)
class Violation:
    where: str
    constraint: str
    residual: float

    def __str__(self) -> str:
        return f"{self.where}: {self.constraint} (residual {self.residual:.3g})"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


class NonSignalingCheck(NamedTuple):
    ok: bool
    residual: float


def validate(box: Box, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check that every row of the box is a probability distribution.

    Returns a report listing each violated constraint with its residual;
    an empty report means the box is valid within ``tol``.
    """
    violations: list[Violation] = []
    for r in range(4):
        row = box.matrix[r]
        for c in range(4):
            v = row[c]
            if v < -tol:
                violations.append(
                    Violation(f"row xy={XY_LABELS[r]} col ab={AB_LABELS[c]}", "negative entry", float(-v))
                )
            elif v > 1.0 + tol:
                violations.append(
                    Violation(f"row xy={XY_LABELS[r]} col ab={AB_LABELS[c]}", "entry exceeds 1", float(v - 1.0))
                )
        s = float(row.sum())
        if abs(s - 1.0) > tol:
            violations.append(Violation(f"row xy={XY_LABELS[r]}", "row sum != 1", abs(s - 1.0)))
    return ValidationReport(tuple(violations))


def require_valid(box: Box, tol: float = DEFAULT_TOL) -> None:
    report = validate(box, tol)
    if not report.ok:
        raise InvalidBoxError(f"invalid box: {report.describe()}")


def is_non_signaling(box: Box, tol: float = DEFAULT_TOL) -> NonSignalingCheck:
    """Check that each party's output marginals ignore the other's input.

    Returns the verdict together with the worst marginal discrepancy.
    Raises ``InvalidBoxError`` if the box is not row-stochastic.
    """
    require_valid(box, tol)
    m = box.matrix
    worst = 0.0
    for x in (0, 1):
        for a in (0, 1):
            p0 = m[2 * x, 2 * a] + m[2 * x, 2 * a + 1]
            p1 = m[2 * x + 1, 2 * a] + m[2 * x + 1, 2 * a + 1]
            worst = max(worst, abs(float(p0 - p1)))
    for y in (0, 1):
        for b in (0, 1):
            p0 = m[y, b] + m[y, 2 + b]
            p1 = m[2 + y, b] + m[2 + y, 2 + b]
            worst = max(worst, abs(float(p0 - p1)))
    return NonSignalingCheck(worst <= tol, worst)


def require_non_signaling(box: Box, tol: float = DEFAULT_TOL) -> None:
    check = is_non_signaling(box, tol)
    if not check.ok:
        raise SignalingBoxError(f"box is signaling: worst marginal discrepancy {check.residual:.3g}")


_CORR_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])


def correlators(box: Box, tol: float = DEFAULT_TOL) -> Correlators:
    """The four signed sums P(00|xy) + P(11|xy) - P(01|xy) - P(10|xy)."""
    require_valid(box, tol)
    vals = box.matrix @ _CORR_SIGNS
    return Correlators(float(vals[0]), float(vals[1]), float(vals[2]), float(vals[3]))


def chsh_values(c: Correlators) -> tuple[float, ...]:
    """The eight signed CHSH expressions of a correlator tuple.

    For each input pair the expression adds the three correlators sharing
    an input bit with it and subtracts the fourth (both bits flipped).
    The order is (chsh00, chsh01, chsh10, chsh11) followed by their
    negations, matching ``CHSH_LABELS``.
    """
    grid = ((c.x00, c.x01), (c.x10, c.x11))
    vals = []
    for x in (0, 1):
        for y in (0, 1):
            s = grid[x][y] + grid[x][1 - y] + grid[1 - x][y] - grid[1 - x][1 - y]
            vals.append(s)
    return tuple(vals) + tuple(-v for v in vals)


def nl_correlators(c: Correlators) -> float:
    """Maximum CHSH value of a correlator tuple (always >= 0)."""
    return max(chsh_values(c))


def nl(box: Box, tol: float = DEFAULT_TOL) -> float:
    """CHSH non-locality: the largest absolute CHSH expression of the box.

    Values above 2 certify non-locality; the algebraic maximum is 4.
    """
    return nl_correlators(correlators(box, tol))


def is_local(box: Box, tol: float = DEFAULT_TOL) -> bool:
    """True iff the box violates no CHSH inequality.

    Only meaningful inside the non-signaling set, where the eight CHSH
    inequalities are a complete description of locality; a signaling box
    raises ``SignalingBoxError``.
    """
    require_non_signaling(box, tol)
    return nl(box, tol) <= 2.0 + tol


def _clean(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    # Zero out negative floating-point dust produced by mixing/averaging.
    out = np.array(matrix, dtype=float)
    out[(out < 0.0) & (out >= -tol)] = 0.0
    return out


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def pr() -> Box:
    """The extremal box with a XOR b = x AND y and uniform outputs."""
    correlated = (0.5, 0.0, 0.0, 0.5)
    anti = (0.0, 0.5, 0.5, 0.0)
    return Box((correlated, correlated, correlated, anti))


def noise() -> Box:
    """Uniform output noise, the center of the non-signaling set."""
    return Box(np.full((4, 4), 0.25))


def p_eps(eps: float) -> Box:
    """Perfectly correlated outputs except on input pair 11.

    On the 11 row the outputs anticorrelate with probability ``eps``, so the
    box behaves like a PR box with probability ``eps`` and like shared
    correlated randomness otherwise. Requires 0 < eps <= 1.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    correlated = (0.5, 0.0, 0.0, 0.5)
    last = (0.5 - eps / 2.0, eps / 2.0, eps / 2.0, 0.5 - eps / 2.0)
    return Box((correlated, correlated, correlated, last))


def p_eps_delta(eps: float, delta: float = 0.0) -> Box:
    """Two-parameter generalization of ``p_eps`` with noisy top rows.

    The first three input pairs anticorrelate with probability ``delta``,
    the 11 pair with probability ``eps``. ``delta = 0`` recovers ``p_eps``.
    """
    params = FamilyParams(eps, delta)
    top = (0.5 - params.delta / 2.0, params.delta / 2.0, params.delta / 2.0, 0.5 - params.delta / 2.0)
    last = (0.5 - params.eps / 2.0, params.eps / 2.0, params.eps / 2.0, 0.5 - params.eps / 2.0)
    return Box((top, top, top, last))


def isotropic(eta: float) -> Box:
    """Mixture eta * PR + (1 - eta) * noise; correlators (eta, eta, eta, -eta)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    return mix(pr(), noise(), eta)


def deterministic(fa: Sequence[int], fb: Sequence[int]) -> Box:
    """Local deterministic box a = fa[x], b = fb[y].

    ``fa`` and ``fb`` are length-2 truth tables indexed by the input bit.
    """
    fa = tuple(int(v) for v in fa)
    fb = tuple(int(v) for v in fb)
    if len(fa) != 2 or len(fb) != 2 or any(v not in (0, 1) for v in fa + fb):
        raise ValueError("fa and fb must each be two bits")
    m = np.zeros((4, 4))
    for x in (0, 1):
        for y in (0, 1):
            m[2 * x + y, 2 * fa[x] + fb[y]] = 1.0
    return Box(m)


def mix(box1: Box, box2: Box, lam: float, tol: float = DEFAULT_TOL) -> Box:
    """Convex mixture lam * box1 + (1 - lam) * box2."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must be in [0, 1], got {lam}")
    return Box(_clean(lam * box1.matrix + (1.0 - lam) * box2.matrix, tol))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def format_17g(value: float) -> str:
    """Render a float with 17 significant digits (round-trips bit-exactly)."""
    return format(float(value), ".17g")


def load_box(path: str) -> Box:
    with open(path, "r", encoding="utf-8") as fh:
        return Box.from_json(fh.read())


def chsh_csv(box: Box, tol: float = DEFAULT_TOL) -> str:
    """CSV with the four correlators and the eight CHSH values."""
    c = correlators(box, tol)
    vals = c.as_tuple() + chsh_values(c)
    header = ",".join(("x00", "x01", "x10", "x11") + CHSH_LABELS)
    return header + "\n" + ",".join(format_17g(v) for v in vals) + "\n"
