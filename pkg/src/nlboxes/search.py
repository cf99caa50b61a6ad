"""Exhaustive search over deterministic adaptive two-copy wirings.

There are 32768 raw strategies per party. Many are interchangeable: they
induce the same composite box for every non-signaling resource. The dedup
here is exact, not heuristic. Writing a non-signaling box as
4*P(ab|xy) = 1 + (-1)^a m_x + (-1)^b w_y + (-1)^(a+b) X_xy turns each
composite entry into a quadratic polynomial in the eight coordinates
(m_0, m_1, w_0, w_1, X_00, X_01, X_10, X_11). For each party input, final
output, and combination of partner-side box outcomes and inputs, we record
the integer coefficient matrix of that polynomial; strategies with equal
coefficient tables are behaviorally identical and collapse to the one with
the smallest encoding. This also removes strategies that ignore a box end
(the ignored end's marginal is input independent) and order swaps of
non-adaptive plans.

The pair scan is a tensor contraction: a strategy enters the composite
only through a 0/1 tensor over (party input, final bit) x (box outcomes,
box inputs), so CHSH values of all strategy pairs reduce to one matrix
product per chunk. The reported best pair is re-verified through the
reference composer.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .boxes import DEFAULT_TOL, Box, nl, require_non_signaling
from .wiring import AdaptiveStrategy, Wiring2, compose_wiring2

RAW_STRATEGY_COUNT = 1 << 15


def _strategy_tables(codes: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized decode of strategy codes into map tables."""
    order = (codes >> 14) & 1
    f1 = np.stack([(codes >> (13 - x)) & 1 for x in (0, 1)], axis=1)
    f2 = np.stack(
        [
            np.stack([(codes >> (11 - 2 * x - o)) & 1 for o in (0, 1)], axis=1)
            for x in (0, 1)
        ],
        axis=1,
    )
    out = np.stack(
        [
            np.stack(
                [
                    np.stack([(codes >> (7 - 4 * x - 2 * o1 - o2)) & 1 for o2 in (0, 1)], axis=1)
                    for o1 in (0, 1)
                ],
                axis=1,
            )
            for x in (0, 1)
        ],
        axis=1,
    )
    return order, f1, f2, out


def _branches(tables, x: int, a1: int, a2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Box inputs and final bit on party input x when the copies return (a1, a2)."""
    order, f1, f2, out = tables
    idx = np.arange(len(order))
    a_first = np.where(order == 0, a1, a2)
    a_second = np.where(order == 0, a2, a1)
    x_first = f1[:, x]
    x_second = f2[idx, x, a_first]
    x1 = np.where(order == 0, x_first, x_second)
    x2 = np.where(order == 0, x_second, x_first)
    a_out = out[idx, x, a_first, a_second]
    return x1, x2, a_out


@lru_cache(maxsize=1)
def _affine_table() -> np.ndarray:
    """Coefficients of 4*P(ab|xy) over (1, m_0, m_1, w_0, w_1, X_00..X_11)."""
    aff = np.zeros((2, 2, 2, 2, 9), dtype=np.int8)
    for a, b, x, y in product(range(2), repeat=4):
        vec = aff[a, b, x, y]
        vec[0] = 1
        vec[1 + x] = 1 if a == 0 else -1
        vec[3 + y] = 1 if b == 0 else -1
        vec[5 + 2 * x + y] = 1 if a == b else -1
    return aff


def _signatures(codes: np.ndarray) -> np.ndarray:
    """Exact behavioral signature rows, one per strategy code."""
    n = len(codes)
    tables = _strategy_tables(codes)
    aff = _affine_table()
    idx = np.arange(n)
    sig = np.zeros((n, 2, 2, 16, 9, 9), dtype=np.int8)
    for x in (0, 1):
        for a1 in (0, 1):
            for a2 in (0, 1):
                x1, x2, a_out = _branches(tables, x, a1, a2)
                f1 = np.moveaxis(aff[a1][:, x1, :, :], 1, 0)
                f2 = np.moveaxis(aff[a2][:, x2, :, :], 1, 0)
                outer = np.einsum("nbyi,nczj->nbyczij", f1, f2).reshape(n, 16, 9, 9)
                for val in (0, 1):
                    mask = a_out == val
                    sig[mask, x, val] += outer[mask]
    # Same polynomial iff same symmetrized coefficient matrix.
    for i in range(9):
        sig[..., i, i] *= 2
    for i in range(9):
        for j in range(i + 1, 9):
            s = sig[..., i, j] + sig[..., j, i]
            sig[..., i, j] = s
            sig[..., j, i] = s
    return sig.reshape(n, -1)


@dataclass(frozen=True)
class _Dedup:
    rep_codes: np.ndarray  # sorted representative encodings
    class_of_code: np.ndarray  # raw code -> class id
    min_code_of_class: np.ndarray  # class id -> smallest encoding


@lru_cache(maxsize=1)
def _dedup() -> _Dedup:
    codes = np.arange(RAW_STRATEGY_COUNT)
    sig = np.ascontiguousarray(_signatures(codes))
    class_ids: dict[bytes, int] = {}
    class_of_code = np.empty(RAW_STRATEGY_COUNT, dtype=np.int32)
    first_codes: list[int] = []
    # Codes scan in ascending order, so the first occurrence of a class is
    # its smallest encoding; bytes equality is exact row equality.
    for code in range(RAW_STRATEGY_COUNT):
        key = sig[code].tobytes()
        cid = class_ids.get(key)
        if cid is None:
            cid = len(first_codes)
            class_ids[key] = cid
            first_codes.append(code)
        class_of_code[code] = cid
    first_idx = np.array(first_codes, dtype=np.int32)
    return _Dedup(
        rep_codes=first_idx.copy(),
        class_of_code=class_of_code,
        min_code_of_class=first_idx,
    )


def behavior_key(strategy: AdaptiveStrategy) -> int:
    """Stable id of the strategy's behavior class."""
    dedup = _dedup()
    return int(dedup.class_of_code[strategy.encode()])


def canonical_strategy(strategy: AdaptiveStrategy) -> AdaptiveStrategy:
    """Smallest-encoding strategy with identical observable behavior."""
    dedup = _dedup()
    return AdaptiveStrategy.decode(int(dedup.min_code_of_class[dedup.class_of_code[strategy.encode()]]))


def enumerate_strategies() -> list[AdaptiveStrategy]:
    """Deduplicated strategies, sorted by encoding."""
    return [AdaptiveStrategy.decode(int(c)) for c in _dedup().rep_codes]


def behavior_class_count() -> int:
    return len(_dedup().rep_codes)


@lru_cache(maxsize=1)
def _rep_u_matrix() -> np.ndarray:
    """0/1 tensor of each representative: (class, party input x final, outcomes x inputs)."""
    codes = _dedup().rep_codes.astype(np.int64)
    tables = _strategy_tables(codes)
    n = len(codes)
    u = np.zeros((n, 4, 16))
    idx = np.arange(n)
    for x in (0, 1):
        for a1 in (0, 1):
            for a2 in (0, 1):
                x1, x2, a_out = _branches(tables, x, a1, a2)
                u[idx, 2 * x + a_out, (a1 * 2 + a2) * 4 + x1 * 2 + x2] = 1.0
    return u


def _box_kernel(matrix: np.ndarray) -> np.ndarray:
    """Product probabilities of the two copies over all outcome/input combos."""
    t4 = np.asarray(matrix).reshape(2, 2, 2, 2)  # [x, y, a, b]
    k8 = np.einsum("xyab,XYAB->aAxXbByY", t4, t4)
    return k8.reshape(16, 16)


@lru_cache(maxsize=1)
def _chsh_weights() -> np.ndarray:
    """Eight CHSH functionals on composite tables laid out as (xa, yb)."""
    w = np.zeros((8, 4, 4))
    for k, (x0, y0) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        for x, y, a, b in product(range(2), repeat=4):
            sign = -1.0 if (x, y) == (1 - x0, 1 - y0) else 1.0
            w[k, 2 * x + a, 2 * y + b] = sign * (1.0 if a == b else -1.0)
    w[4:] = -w[:4]
    return w


@dataclass(frozen=True)
class SearchResult:
    box: Box
    nl_in: float
    nl_out: float
    wiring: Wiring2
    strategies_raw: int
    strategies_deduped: int
    wall_time_s: float

    @property
    def distilled(self) -> bool:
        return self.nl_out > self.nl_in + 1e-12

    def to_json_dict(self) -> dict:
        return {
            "box": self.box.to_json_dict(),
            "nl_in": self.nl_in,
            "nl_out": self.nl_out,
            "wiring": self.wiring.to_json_dict(),
            "strategies_raw": self.strategies_raw,
            "strategies_deduped": self.strategies_deduped,
            "wall_time_s": self.wall_time_s,
        }


def pair_nl_values(box: Box, alice: AdaptiveStrategy, tol: float = DEFAULT_TOL) -> np.ndarray:
    """CHSH non-locality of (alice, tau) over every deduplicated tau.

    Fast path used by tests to cross-check chunks of the scan against the
    reference composer.
    """
    require_non_signaling(box, tol)
    u = _rep_u_matrix()
    k = _box_kernel(box.matrix)
    tables = _strategy_tables(np.array([alice.encode()]))
    ua = np.zeros((4, 16))
    for x in (0, 1):
        for a1 in (0, 1):
            for a2 in (0, 1):
                x1, x2, a_out = _branches(tables, x, a1, a2)
                ua[2 * x + int(a_out[0]), (a1 * 2 + a2) * 4 + int(x1[0]) * 2 + int(x2[0])] = 1.0
    t = ua @ k  # (4, 16)
    g = np.einsum("kab,am->kbm", _chsh_weights(), t).reshape(8, 64)
    return (u.reshape(len(u), 64) @ g.T).max(axis=1)


def search_2copy(
    box: Box,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
    chunk: int = 64,
) -> SearchResult:
    """Best two-copy wiring of ``box`` over all deduplicated strategy pairs.

    Deterministic strategies suffice: the CHSH value of a mixture of
    wirings never exceeds the best component, so shared randomness cannot
    beat the maximum found here. Ties resolve to the smallest strategy
    encodings, so results are identical run to run and do not depend on
    ``jobs``.
    """
    started = time.perf_counter()
    require_non_signaling(box, tol)
    nl_in = nl(box, tol)

    u = _rep_u_matrix()
    n_reps = len(u)
    k = _box_kernel(box.matrix)
    t = np.einsum("cam,mn->can", u, k)
    g = np.einsum("kab,cam->ckbm", _chsh_weights(), t).reshape(n_reps, 8, 64)
    flat_u = u.reshape(n_reps, 64)

    def eval_chunk(start: int) -> tuple[float, int, int]:
        stop = min(start + chunk, n_reps)
        vals = (g[start:stop].reshape(-1, 64) @ flat_u.T).reshape(stop - start, 8, n_reps).max(axis=1)
        flat = int(np.argmax(vals))
        si, ti = divmod(flat, n_reps)
        return float(vals[si, ti]), start + si, ti

    starts = range(0, n_reps, chunk)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(eval_chunk, starts))
    else:
        outcomes = [eval_chunk(s) for s in starts]

    best_val, best_si, best_ti = -np.inf, -1, -1
    for val, si, ti in outcomes:  # chunk order fixes the tie-break
        if val > best_val:
            best_val, best_si, best_ti = val, si, ti

    rep_codes = _dedup().rep_codes
    wiring = Wiring2(
        AdaptiveStrategy.decode(int(rep_codes[best_si])),
        AdaptiveStrategy.decode(int(rep_codes[best_ti])),
    )
    nl_out = nl(compose_wiring2(box, wiring, tol), tol)
    if abs(nl_out - best_val) > 1e-9:
        raise AssertionError(
            f"scan value {best_val!r} disagrees with reference composition {nl_out!r}"
        )
    return SearchResult(
        box=box,
        nl_in=nl_in,
        nl_out=nl_out,
        wiring=wiring,
        strategies_raw=RAW_STRATEGY_COUNT,
        strategies_deduped=n_reps,
        wall_time_s=time.perf_counter() - started,
    )
