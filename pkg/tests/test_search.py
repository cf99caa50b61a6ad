"""Strategy enumeration, exact dedup, and the two-copy search."""

from __future__ import annotations

from itertools import product

import numpy as np
import pytest

import nlboxes as nb
from nlboxes.search import pair_nl_values
from conftest import random_ns_box

TOL = 1e-9


def test_raw_strategy_count():
    assert nb.RAW_STRATEGY_COUNT == 2 * 4 * 16 * 256 == 32768


def test_dedup_shrinks_and_keeps_reps_sorted():
    strategies = nb.enumerate_strategies()
    count = nb.behavior_class_count()
    assert len(strategies) == count
    assert count < nb.RAW_STRATEGY_COUNT / 4  # dedup must pull real weight
    codes = [s.encode() for s in strategies]
    assert codes == sorted(codes)
    assert len(set(codes)) == count


def test_xor_strategy_is_represented():
    strategies = nb.enumerate_strategies()
    rep = nb.canonical_strategy(nb.xor_strategy())
    assert rep in strategies
    assert nb.behavior_key(rep) == nb.behavior_key(nb.xor_strategy())


def test_constant_output_strategies_collapse_to_two_classes():
    keys = {0: set(), 1: set()}
    for order in (0, 1):
        for f1 in product((0, 1), repeat=2):
            for f2_bits in product((0, 1), repeat=4):
                f2 = ((f2_bits[0], f2_bits[1]), (f2_bits[2], f2_bits[3]))
                for const in (0, 1):
                    row = ((const, const), (const, const))
                    strat = nb.AdaptiveStrategy(order, f1, f2, (row, row))
                    keys[const].add(nb.behavior_key(strat))
    assert len(keys[0]) == 1
    assert len(keys[1]) == 1
    assert keys[0] != keys[1]


def test_dedup_is_sound_on_sampled_classes(rng):
    # Strategies that collapsed together must compose identically on any
    # non-signaling resource.
    box = random_ns_box(rng)
    by_class: dict[int, list[nb.AdaptiveStrategy]] = {}
    for _ in range(400):
        strat = nb.AdaptiveStrategy.decode(int(rng.integers(0, nb.RAW_STRATEGY_COUNT)))
        by_class.setdefault(nb.behavior_key(strat), []).append(strat)
    partner = nb.xor_strategy()
    checked = 0
    for members in by_class.values():
        if len(members) < 2 or checked >= 10:
            continue
        a, b = members[0], members[1]
        left = nb.compose_wiring2(box, nb.Wiring2(a, partner))
        right = nb.compose_wiring2(box, nb.Wiring2(b, partner))
        assert np.max(np.abs(np.asarray(left.matrix) - np.asarray(right.matrix))) <= 1e-12
        checked += 1
    assert checked >= 3


def test_fast_path_matches_reference_composer(rng):
    box = random_ns_box(rng)
    strategies = nb.enumerate_strategies()
    alice = nb.canonical_strategy(nb.xor_strategy())
    vals = pair_nl_values(box, alice)
    assert len(vals) == nb.behavior_class_count()
    for ti in rng.choice(len(vals), size=25, replace=False):
        wiring = nb.Wiring2(alice, strategies[int(ti)])
        reference = nb.nl(nb.compose_wiring2(box, wiring))
        assert vals[int(ti)] == pytest.approx(reference, abs=1e-9)


def test_search_rediscovers_xor_protocol_value():
    result = nb.search_2copy(nb.p_eps(0.1))
    assert result.nl_in == pytest.approx(2.2, abs=1e-9)
    assert result.nl_out >= 2.36 - 1e-9
    assert result.strategies_raw == nb.RAW_STRATEGY_COUNT
    assert result.strategies_deduped == nb.behavior_class_count()
    assert result.distilled


def test_search_never_below_xor_baseline(rng):
    for _ in range(3):
        box = random_ns_box(rng)
        baseline = nb.nl(nb.compose_xor(box, 2))
        result = nb.search_2copy(box)
        assert result.nl_out >= baseline - TOL
        assert result.nl_out >= result.nl_in - TOL  # identity-like wirings exist


def test_search_noise_stays_local():
    result = nb.search_2copy(nb.noise())
    assert result.nl_out <= 2.0 + TOL


def test_search_isotropic_no_gain():
    result = nb.search_2copy(nb.isotropic(0.6))
    assert result.nl_out == pytest.approx(result.nl_in, abs=1e-9)
    assert result.nl_in == pytest.approx(2.4, abs=1e-9)
    assert not result.distilled


def test_search_results_are_deterministic():
    a = nb.search_2copy(nb.isotropic(0.55))
    b = nb.search_2copy(nb.isotropic(0.55))
    assert a.wiring == b.wiring
    assert a.nl_out == b.nl_out


def test_search_jobs_do_not_change_result():
    a = nb.search_2copy(nb.p_eps(0.2), jobs=1)
    b = nb.search_2copy(nb.p_eps(0.2), jobs=2)
    assert a.wiring == b.wiring
    assert a.nl_out == b.nl_out


def test_search_composites_non_signaling(rng):
    strategies = nb.enumerate_strategies()
    box = random_ns_box(rng)
    for _ in range(50):
        wiring = nb.Wiring2(
            strategies[int(rng.integers(0, len(strategies)))],
            strategies[int(rng.integers(0, len(strategies)))],
        )
        assert nb.is_non_signaling(nb.compose_wiring2(box, wiring)).ok


def test_search_result_json_shape():
    result = nb.search_2copy(nb.isotropic(0.55))
    payload = result.to_json_dict()
    assert set(payload) == {
        "box",
        "nl_in",
        "nl_out",
        "wiring",
        "strategies_raw",
        "strategies_deduped",
        "wall_time_s",
    }
    assert set(payload["wiring"]) == {"alice", "bob"}
    assert set(payload["wiring"]["alice"]) == {"order", "first_input", "second_input", "output"}


def test_search_rejects_signaling_box():
    box = nb.Box(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.25, 0.25, 0.25, 0.25],
            [0.25, 0.25, 0.25, 0.25],
        ]
    )
    with pytest.raises(nb.SignalingBoxError):
        nb.search_2copy(box)
