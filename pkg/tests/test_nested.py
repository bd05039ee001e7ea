import math

import numpy as np
import pytest

import oracles
from skorohod.cadlag import Interval, constant, make_step, timechange_devnorm
from skorohod.errors import DomainError, ValidationError
from skorohod.metric import Matching, d_j1_0, enumerate_matchings
from skorohod.nested import (
    Grid,
    NestedPath,
    assemble,
    d_D,
    d_D0,
    disc_set,
    discretize,
    eval_t,
    eval_ts,
    left_limit_t,
    max_jump,
    modulus_w_D,
    oracle_d_D,
    pointwise_sum,
    rho_D,
    super_norm,
    w_D,
    w_D_prime,
    w_D_second,
    w_u_second,
    witness_inner_sup,
)
from skorohod.sampling import random_nested

A, B, C = constant(0.0), constant(1.0), constant(3.0)
ZERO = NestedPath.zero()
DELTAS = (0.02, 0.05, 0.1, 0.2)


def switch(at, before, after):
    return NestedPath((at,), (before, after))


def piece_matrix(X):
    segs = X.segments
    n = len(segs)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = d_j1_0(segs[i], segs[j]).value
    return D


def brute_force_d_D(X, Y, objective):
    """Minimum over every outer matching, each scored by sampling t directly."""
    fake_x = make_step(X.t_breakpoints, range(len(X.segments)))
    fake_y = make_step(Y.t_breakpoints, range(len(Y.segments)))
    best = math.inf
    for m in enumerate_matchings(fake_x, fake_y):
        lam = m.timechange(X.t_breakpoints, Y.t_breakpoints)
        knots = sorted({0.0, 1.0, *X.t_breakpoints, *(lam.inverse_at(c) for c in Y.t_breakpoints)})
        ts = set(knots) | {(a + b) / 2 for a, b in zip(knots, knots[1:])}
        inner = 0.0
        for t in ts:
            # knots map exactly; the image of an interior point never lands on a switch
            ut = lam(t)
            inner = max(inner, d_j1_0(eval_t(X, t), eval_t(Y, ut)).value)
        if objective == "j1":
            norm = timechange_devnorm(lam)
        else:
            norm = max(abs(math.log(s)) for s in lam.slopes())
        best = min(best, max(norm, inner))
    return best


class TestEvaluation:
    def test_switch_conventions(self):
        X = switch(0.5, A, B)
        assert eval_t(X, 0.5) == B
        assert left_limit_t(X, 0.5) == A
        assert eval_t(X, 0.49) == A
        assert eval_ts(X, 1.0, 0.3) == 1.0

    def test_constant_in_t(self):
        x = make_step([0.4], [1, -2])
        X = NestedPath.constant(x)
        assert all(eval_t(X, t) == x for t in (0.0, 0.3, 1.0))

    def test_zero(self):
        assert eval_ts(ZERO, 0.7, 0.2) == 0.0
        assert super_norm(ZERO) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            eval_t(ZERO, 1.5)
        with pytest.raises(DomainError):
            left_limit_t(ZERO, 0.0)

    def test_validation(self):
        with pytest.raises(ValidationError):
            NestedPath((0.5,), (A,))
        with pytest.raises(ValidationError):
            NestedPath((0.6, 0.5), (A, B, C))
        with pytest.raises(ValidationError):
            NestedPath((0.5,), (A, 1.0))

    def test_canonical_merge(self):
        X = NestedPath((0.3, 0.6), (A, A, B))
        assert X.t_breakpoints == (0.6,)

    def test_json_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            X = random_nested(rng)
            assert NestedPath.from_json(X.to_json()) == X

    def test_super_norm(self):
        X = NestedPath((0.5,), (B, make_step([0.2], [0, -3])))
        assert super_norm(X) == 3.0


class TestDistances:
    def test_rho_examples(self):
        x, y = make_step([0.3], [0, 1]), make_step([0.4], [0, 1])
        assert rho_D(NestedPath.constant(x), NestedPath.constant(y)) == d_j1_0(x, y).value
        X = switch(0.4, A, C)
        assert rho_D(X, X) == 0.0
        assert rho_D(X, ZERO) == super_norm(X)

    def test_d_D_examples(self):
        X = switch(0.4, make_step([0.2], [1, 2]), C)
        assert d_D(X, X).value == 0.0
        assert d_D(X, ZERO).value == super_norm(X)
        assert d_D0(X, ZERO).value == super_norm(X)

    def test_shifted_switch(self):
        X, Y = switch(0.5, A, B), switch(0.6, A, B)
        r = d_D(X, Y)
        assert r.value == pytest.approx(0.1, abs=1e-12)
        assert r.matching == Matching(((0, 0),))
        assert d_D0(X, Y).value == pytest.approx(abs(math.log(0.8)), abs=1e-12)
        assert oracle_d_D(X, Y, "j1", 10_000, 3) == pytest.approx(0.1, abs=1e-3)

    def test_shift_not_worth_it(self):
        # moving the switch by 0.6 beats leaving it unmatched
        X, Y = switch(0.2, A, B), switch(0.8, A, make_step([0.5], [1, 1.01]))
        assert d_D(X, Y).value == pytest.approx(min(0.6, 1.0), abs=1e-12)

    def test_against_matching_enumeration(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            X = random_nested(rng, max_switches=3, max_jumps=2, grid=20)
            Y = random_nested(rng, max_switches=3, max_jumps=2, grid=20)
            for obj, fn in (("j1", d_D), ("j1_0", d_D0)):
                assert fn(X, Y).value == pytest.approx(brute_force_d_D(X, Y, obj), abs=1e-12)

    def test_oracle_never_below(self):
        rng = np.random.default_rng(6)
        for k in range(30):
            X = random_nested(rng, max_switches=3, max_jumps=2)
            Y = random_nested(rng, max_switches=3, max_jumps=2)
            for obj in ("j1", "j1_0"):
                v = d_D(X, Y).value if obj == "j1" else d_D0(X, Y).value
                assert v <= oracle_d_D(X, Y, obj, 1000, k) + 1e-9

    def test_witness_splits_into_both_terms(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            X, Y = random_nested(rng), random_nested(rng)
            r = d_D(X, Y)
            inner = witness_inner_sup(X, Y, r)
            dev = timechange_devnorm(r.timechange)
            assert max(inner, dev) == r.value

    def test_json(self):
        from skorohod.metric import DistanceResult

        r = d_D(switch(0.5, A, B), switch(0.6, A, B))
        assert DistanceResult.from_json(r.to_json()) == r


class TestNestedInequalities:
    def test_zero_distances_equal_norm(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            X = random_nested(rng)
            n = super_norm(X)
            assert d_D(X, ZERO).value == rho_D(X, ZERO) == n

    def test_uniform_chain(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            X, Y = random_nested(rng), random_nested(rng)
            d, rho = d_D(X, Y).value, rho_D(X, Y)
            assert d <= rho + 1e-9
            assert rho <= super_norm(X - Y) + 1e-9
            assert d <= math.exp(d_D0(X, Y).value) - 1 + 1e-9

    def test_sum_bound_on_two_sided_modulus(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            X, Y = random_nested(rng), random_nested(rng)
            for delta in DELTAS:
                assert (w_D_second(X + Y, delta)
                        <= w_D_second(X, delta) + 2 * super_norm(Y) + 1e-9)

    def test_pointwise_sum(self):
        X, Y = switch(0.3, A, B), switch(0.6, B, C)
        S = pointwise_sum(X, Y)
        assert S.t_breakpoints == (0.3, 0.6)
        assert [s.values for s in S.segments] == [(1.0,), (2.0,), (4.0,)]
        assert (X - X) == ZERO


class TestModuli:
    def test_examples(self):
        two = NestedPath((0.3, 0.31), (A, B, C))
        assert w_D_prime(switch(0.5, A, B), 0.1) == 0.0
        assert w_D_prime(two, 0.05) == 1.0
        assert w_D_prime(NestedPath((0.3, 0.31), (A, B, constant(2.0))), 0.05) == 1.0
        assert w_D_second(two, 0.05) == 1.0
        assert w_u_second(two, 0.05) == 1.0
        assert w_D_second(switch(0.5, A, B), 0.3) == 0.0
        assert w_D_prime(ZERO, 0.3) == w_D_second(ZERO, 0.3) == 0.0

    def test_w_D_and_jumps(self):
        X = switch(0.5, A, C)
        assert w_D(X, Interval(0.0, 0.4)) == 0.0
        assert w_D(X, Interval(0.0, 0.5, closed=False)) == 0.0
        assert w_D(X, Interval(0.0, 0.5)) == 3.0
        assert max_jump(X) == d_j1_0(A, C).value
        assert disc_set(X) == (0.5,)
        assert max_jump(ZERO) == 0.0 and disc_set(ZERO) == ()

    def test_delta_checked(self):
        for fn in (w_D_prime, w_D_second, w_u_second):
            with pytest.raises(DomainError):
                fn(ZERO, 1.0)

    def test_against_oracles(self):
        rng = np.random.default_rng(11)
        for _ in range(120):
            X = random_nested(rng, max_switches=5, grid=100)
            D = piece_matrix(X)
            bps = X.t_breakpoints
            for delta in DELTAS:
                assert w_D_prime(X, delta) == oracles.nested_wprime_exhaustive(bps, D, delta)
                assert w_D_second(X, delta) == oracles.nested_wsecond_grid(bps, D, delta, 200)
                assert modulus_w_D(X, delta) == oracles.nested_window_grid(bps, D, delta, 200)

    def test_relations(self):
        rng = np.random.default_rng(12)
        for _ in range(150):
            X = random_nested(rng)
            j = max_jump(X)
            for delta in DELTAS:
                wp, ws = w_D_prime(X, delta), w_D_second(X, delta)
                assert ws <= wp + 1e-9
                assert ws <= w_u_second(X, delta) + 1e-9
                assert wp <= modulus_w_D(X, 2 * delta) + 1e-9
                assert modulus_w_D(X, delta) <= 2 * wp + j + 1e-9
                left = d_j1_0(eval_t(X, delta), eval_t(X, 0.0)).value
                right = d_j1_0(left_limit_t(X, 1.0), eval_t(X, 1.0 - delta)).value
                assert max(ws, left, right) <= w_D_prime(X, 2 * delta) + 1e-9
                assert w_D_prime(X, delta / 2) <= 12 * (ws + left + right) + 1e-9

    def test_vanishes_below_min_gap(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            X = random_nested(rng)
            pts = sorted({0.0, 1.0, *X.t_breakpoints})
            gap = min(b - a for a, b in zip(pts, pts[1:]))
            assert w_D_prime(X, gap * 0.99) == 0.0

    def test_monotone_in_delta(self):
        rng = np.random.default_rng(14)
        grid = (0.01, 0.02, 0.05, 0.1, 0.2, 0.4)
        for _ in range(100):
            X = random_nested(rng)
            for fn in (w_D_prime, w_D_second, modulus_w_D):
                vals = [fn(X, d) for d in grid]
                assert all(a <= b for a, b in zip(vals, vals[1:]))


class TestDiscretization:
    def test_definition(self):
        X = switch(0.55, A, B)
        got = discretize(X, Grid((0.0, 0.5, 1.0)))
        assert got == NestedPath((0.5, 1.0), (A, A, B))

    def test_idempotent_on_grid(self):
        sigma = Grid((0.0, 0.25, 0.5, 1.0))
        X = NestedPath((0.25, 0.5), (A, B, C))
        assert discretize(X, sigma) == X
        assert discretize(NestedPath.constant(B), sigma) == NestedPath.constant(B)

    def test_assemble(self):
        sigma = Grid((0.0, 1.0))
        assert assemble([A, B], sigma) == NestedPath((1.0,), (A, B))
        assert assemble([B, B, B], Grid.uniform(2)) == NestedPath.constant(B)
        with pytest.raises(ValidationError):
            assemble([A], sigma)

    def test_grid_validation(self):
        with pytest.raises(ValidationError):
            Grid((0.0, 0.5))
        with pytest.raises(ValidationError):
            Grid((0.0, 0.5, 0.5, 1.0))
        assert Grid.uniform(4).mesh == 0.25

    def test_bound(self):
        rng = np.random.default_rng(15)
        for _ in range(150):
            X = random_nested(rng)
            delta = float(rng.choice(DELTAS))
            v = int(math.ceil(1.0 / delta)) + int(rng.integers(0, 4))
            extra = rng.uniform(0, 1, int(rng.integers(0, 5))).tolist()
            sigma = Grid(tuple(sorted(set(Grid.uniform(v).points) | set(extra))))
            assert sigma.mesh <= delta + 1e-12
            lhs = d_D(discretize(X, sigma), X).value
            assert lhs <= max(delta, w_D_prime(X, delta)) + 1e-9
