import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dynamo_lab import dynamics
from dynamo_lab.constructions import build_large_r_monotone
from dynamo_lab.dynamics import (
    Rule,
    bp_closure,
    default_max_rounds,
    find_cycle,
    is_dynamo,
    is_monotone_dynamo,
    is_stable_set,
    run,
    simulate_batch,
    step,
)
from dynamo_lab.torus import VertexSet, build_h, make_torus, parity_class, union_d_r

RULES_2D = [Rule.bp(r) for r in range(1, 5)] + [Rule.reversible(r) for r in range(1, 5)] \
    + [Rule.majority()]


def at(shape, *cs):
    return VertexSet.from_coords(shape, cs)


def configs(n, d):
    size = n ** d
    return st.lists(st.booleans(), min_size=size, max_size=size)


class TestRule:
    def test_validation(self):
        with pytest.raises(ValueError):
            Rule("xx", 1)
        with pytest.raises(ValueError):
            Rule.bp(0)
        with pytest.raises(ValueError):
            Rule("maj", 2)
        with pytest.raises(ValueError):
            Rule.reversible(5).validate(make_torus(5, 2))


class TestStep:
    def test_reversible_vacates_centre(self):
        s = make_torus(5, 1)
        assert step(s, at(s, (3,)), Rule.reversible(1)) == at(s, (2,), (4,))

    def test_bp_keeps_active(self):
        s = make_torus(5, 1)
        assert step(s, at(s, (3,)), Rule.bp(1)) == at(s, (2,), (3,), (4,))

    def test_majority_checkerboard_flips(self):
        # members of A_0 see no active neighbour, members of A_1 see four
        s = make_torus(4, 2)
        a0, a1 = parity_class(s, 0), parity_class(s, 1)
        assert oracles.step(4, 2, set(a0.to_coords()), "maj") == set(a1.to_coords())
        assert step(s, a0, Rule.majority()) == a1

    def test_majority_stripes_fixed(self):
        # every vertex sees exactly d active neighbours, so ties keep the state
        s = make_torus(4, 2)
        stripes = VertexSet(s, s.coords[:, 1] % 2 == 0)
        assert oracles.step(4, 2, set(stripes.to_coords()), "maj") == set(stripes.to_coords())
        assert step(s, stripes, Rule.majority()) == stripes

    @pytest.mark.parametrize("rule", RULES_2D, ids=str)
    @given(bits=configs(4, 2))
    @settings(max_examples=30, deadline=None)
    def test_matches_loop_oracle(self, rule, bits):
        s = make_torus(4, 2)
        config = VertexSet(s, bits)
        expect = oracles.step(4, 2, set(config.to_coords()), rule.kind, rule.r)
        assert set(step(s, config, rule).to_coords()) == expect

    @given(bits=configs(5, 2))
    @settings(max_examples=40, deadline=None)
    def test_bp_grows(self, bits):
        s = make_torus(5, 2)
        c = VertexSet(s, bits)
        for r in range(1, 5):
            assert step(s, c, Rule.bp(r)) >= c

    @given(a=configs(4, 2), b=configs(4, 2))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_input(self, a, b):
        s = make_torus(4, 2)
        lo = VertexSet(s, a) & VertexSet(s, b)
        hi = VertexSet(s, a)
        for rule in RULES_2D:
            assert step(s, lo, rule) <= step(s, hi, rule)

    def test_deterministic(self):
        s = make_torus(6, 2)
        c = VertexSet(s, np.random.default_rng(3).random(36) < 0.4)
        for rule in RULES_2D:
            assert step(s, c, rule) == step(s, c, rule)


class TestRun:
    def test_odd_cycle_single_vertex(self):
        s = make_torus(5, 1)
        out = run(s, at(s, (1,)), Rule.reversible(1))
        assert out.percolated and not out.monotone

    def test_checkerboard_blinks(self):
        s = make_torus(4, 2)
        out = run(s, parity_class(s, 0), Rule.reversible(2), record=True)
        assert out.verdict == "cycle" and out.period == 2 and out.round == 0
        assert np.array_equal(out.frames[1], parity_class(s, 1).bits)
        assert np.array_equal(out.frames[2], parity_class(s, 0).bits)

    @pytest.mark.parametrize("rule", RULES_2D, ids=str)
    def test_all_active(self, rule):
        s = make_torus(5, 2)
        out = run(s, VertexSet.full(s), rule)
        assert out.percolated and out.round == 0 and out.monotone

    def test_percolated_state_is_fixed_point(self):
        s = make_torus(7, 2)
        for rule in RULES_2D:
            full = VertexSet.full(s)
            assert step(s, full, rule) == full

    def test_budget(self):
        s = make_torus(9, 1)
        out = run(s, at(s, (1,)), Rule.bp(1), max_rounds=2)
        assert out.verdict == "budget" and out.is_dynamo is None

    def test_fixed_point_cycle(self):
        s = make_torus(5, 2)
        out = run(s, VertexSet.empty(s), Rule.bp(1))
        assert out.verdict == "cycle" and out.period == 1

    def test_default_budget(self):
        assert default_max_rounds(make_torus(10, 3)) == 4 * 3 * 10 + 16

    def test_rejects_zero_budget(self):
        s = make_torus(5, 1)
        with pytest.raises(ValueError):
            run(s, VertexSet.empty(s), Rule.bp(1), max_rounds=0)

    @pytest.mark.parametrize("n,d", [(4, 2), (5, 2), (3, 3)])
    def test_debug_detector_agrees(self, n, d):
        # the hash-set detector never sees a period other than 1 or 2
        s = make_torus(n, d)
        rng = np.random.default_rng(n * 10 + d)
        rules = [Rule.bp(r) for r in range(1, 2 * d + 1)] + \
                [Rule.reversible(r) for r in range(1, 2 * d + 1)] + [Rule.majority()]
        for _ in range(40):
            c = VertexSet(s, rng.random(s.vertex_count) < rng.random())
            for rule in rules:
                out = run(s, c, rule, debug=True)
                cyc = find_cycle(s, c, rule)
                assert cyc is not None
                entry, period = cyc
                assert period in (1, 2)
                if out.verdict == "cycle":
                    assert (entry, period) == (out.round, out.period)
                else:
                    assert out.percolated and period == 1 and entry == out.round


class TestIsDynamo:
    def test_a0_odd(self):
        s = make_torus(5, 2)
        ok, _ = is_dynamo(s, parity_class(s, 0), Rule.reversible(2))
        assert ok is True

    def test_even_cycle_single_vertex(self):
        s = make_torus(4, 1)
        assert is_dynamo(s, at(s, (1,)), Rule.reversible(1))[0] is False

    def test_empty(self):
        s = make_torus(5, 2)
        assert is_dynamo(s, VertexSet.empty(s), Rule.bp(1))[0] is False

    def test_indeterminate(self):
        s = make_torus(9, 1)
        assert is_dynamo(s, at(s, (1,)), Rule.bp(1), max_rounds=1)[0] is None

    @pytest.mark.parametrize("n,d", [(4, 1), (5, 1), (3, 2)])
    def test_agrees_with_oracle_exhaustively(self, n, d):
        s = make_torus(n, d)
        rules = [Rule.bp(r) for r in range(1, 2 * d + 1)] + \
                [Rule.reversible(r) for r in range(1, 2 * d + 1)] + [Rule.majority()]
        for mask in range(2 ** s.vertex_count):
            bits = [(mask >> v) & 1 for v in range(s.vertex_count)]
            c = VertexSet(s, bits)
            active = oracles.coord_set(n, d, bits)
            for rule in rules:
                assert is_dynamo(s, c, rule)[0] == oracles.is_dynamo(n, d, active, rule.kind,
                                                                      rule.r)


class TestMonotone:
    def test_h_union_s(self):
        s = make_torus(10, 2)
        config = build_large_r_monotone(s, 3).config
        assert is_monotone_dynamo(s, config, Rule.reversible(3)) is True

    def test_odd_cycle_not_monotone(self):
        s = make_torus(5, 1)
        assert is_dynamo(s, at(s, (1,)), Rule.reversible(1))[0] is True
        assert is_monotone_dynamo(s, at(s, (1,)), Rule.reversible(1)) is False

    def test_all_active(self):
        s = make_torus(5, 2)
        assert is_monotone_dynamo(s, VertexSet.full(s), Rule.reversible(4)) is True


class TestStable:
    def test_h(self):
        s = make_torus(10, 2)
        assert is_stable_set(s, build_h(s), Rule.reversible(3))

    def test_single_vertex(self):
        s = make_torus(5, 2)
        assert not is_stable_set(s, at(s, (1, 1)), Rule.reversible(1))

    def test_d_r(self):
        s = make_torus(5, 2)
        assert is_stable_set(s, union_d_r(s, 2), Rule.reversible(2))

    def test_bp_always(self):
        s = make_torus(5, 2)
        assert is_stable_set(s, at(s, (1, 1)), Rule.bp(4))

    def test_majority_needs_d(self):
        s = make_torus(5, 2)
        line = VertexSet(s, s.coords[:, 1] == 1)
        assert is_stable_set(s, line, Rule.majority())
        assert not is_stable_set(s, at(s, (1, 1), (2, 1)), Rule.majority())

    @given(bits=configs(5, 2), r=st.integers(1, 4), maj=st.booleans())
    @settings(max_examples=80, deadline=None)
    def test_stability_propagates(self, bits, r, maj):
        s = make_torus(5, 2)
        rule = Rule.majority() if maj else Rule.reversible(r)
        c = VertexSet(s, bits)
        if not is_stable_set(s, c, rule):
            return
        nxt = step(s, c, rule)
        assert nxt >= c
        assert is_stable_set(s, nxt, rule)


class TestBipartiteDecoupling:
    @pytest.mark.parametrize("n,d", [(4, 2), (6, 2), (4, 3)])
    def test_even_rounds_depend_only_on_own_class(self, n, d):
        s = make_torus(n, d)
        a0 = parity_class(s, 0)
        rng = np.random.default_rng(n + d)
        for r in range(1, 2 * d + 1):
            rule = Rule.reversible(r)
            for _ in range(5):
                c = VertexSet(s, rng.random(s.vertex_count) < 0.5)
                zeroed = c & a0
                x, y = c.bits, zeroed.bits
                for t in range(1, 9):
                    x = dynamics.step_bits(s, x, rule)
                    y = dynamics.step_bits(s, y, rule)
                    if t % 2 == 0:
                        assert np.array_equal(x & a0.bits, y & a0.bits)


class TestClosure:
    def test_all_active(self):
        s = make_torus(5, 2)
        assert bp_closure(s, VertexSet.full(s), 2).is_full()

    def test_row_and_column(self):
        s = make_torus(5, 2)
        assert bp_closure(s, union_d_r(s, 2), 2).is_full()

    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_matches_iterated_step(self, r):
        s = make_torus(6, 2)
        rng = np.random.default_rng(100 + r)
        rule = Rule.bp(r)
        for _ in range(1000):
            c = VertexSet(s, rng.random(36) < rng.random())
            out = run(s, c, rule, record=True)
            assert np.array_equal(bp_closure(s, c, r).bits, out.frames[-1])


class TestBatch:
    def test_matches_single_runs(self):
        s = make_torus(4, 2)
        rng = np.random.default_rng(9)
        bits = rng.random((200, 16)) < rng.random((200, 1))
        for rule in RULES_2D:
            out = simulate_batch(s, bits, rule)
            assert out.decided.all()
            for row, dyn, mono in zip(bits, out.dynamo, out.monotone):
                single = run(s, VertexSet(s, row), rule)
                assert dyn == single.percolated
                if dyn:
                    assert mono == single.monotone

    def test_shape_check(self):
        with pytest.raises(ValueError):
            simulate_batch(make_torus(4, 2), np.zeros((3, 15), bool), Rule.bp(1))
