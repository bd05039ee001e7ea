import csv
import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skorohod.cadlag import constant, indicator, make_step, modulus_wprime, modulus_wsecond
from skorohod.diagnostics import (
    LazyDistances,
    PathEnsemble,
    compactness_profile,
    discrete_max_M,
    L_max,
    m_rst,
    tightness_report,
)
from skorohod.errors import DomainError, SizeError, ValidationError
from skorohod.metric import d_j1_0
from skorohod.nested import (
    NestedPath,
    eval_t,
    left_limit_t,
    super_norm,
    w_D_prime,
    w_D_second,
    w_u_second,
)
from skorohod.sampling import random_nested, random_step
from skorohod.simulate import SimConfig, make_ensemble

A, B, C = constant(0.0), constant(1.0), constant(3.0)
DELTAS = [0.02, 0.05, 0.1, 0.2]


def brute_M(increments):
    sums = [constant(0.0)]
    for x in increments:
        sums.append(sums[-1] + x)
    n = len(increments)
    best = 0.0
    for i, j, k in itertools.combinations_with_replacement(range(n + 1), 3):
        best = max(best, min((sums[j] - sums[i]).sup_norm(), (sums[k] - sums[j]).sup_norm()))
    return best


def refinement_times(*paths):
    return sorted({0.0, 1.0, *(b for X in paths for b in X.t_breakpoints)})


class TestCompactness:
    def test_constant_path(self):
        x = make_step([0.4], [1, -2])
        for variant in ("wprime", "wsecond"):
            rep = compactness_profile([NestedPath.constant(x)], DELTAS, variant)
            assert rep.sup_super_norm == 2.0
            for name in ("wD_prime", "wD_second", "left_edge", "right_edge"):
                if name in rep.profiles:
                    assert rep.profiles[name] == [0.0] * len(DELTAS), name

    def test_well_separated_switches(self):
        paths = [NestedPath((0.3,), (A, B)), NestedPath((0.6,), (B, C))]
        rep = compactness_profile(paths, DELTAS, "wprime")
        assert rep.profiles["wD_prime"] == [0.0] * 4

    def test_two_switch_family(self):
        two = NestedPath((0.3, 0.31), (A, B, C))
        rep = compactness_profile([two], DELTAS, "wprime")
        assert rep.profiles["wD_prime"][1] == 1.0
        rep = compactness_profile([two], DELTAS, "wsecond")
        assert rep.profiles["wD_second"][1] == 1.0

    def test_matches_direct_maxima(self):
        rng = np.random.default_rng(1)
        paths = [random_nested(rng) for _ in range(8)]
        p = compactness_profile(paths, DELTAS, "wprime").profiles
        s = compactness_profile(paths, DELTAS, "wsecond").profiles
        for k, d in enumerate(DELTAS):
            assert p["wD_prime"][k] == max(w_D_prime(X, d) for X in paths)
            assert s["wD_second"][k] == max(w_D_second(X, d) for X in paths)
            segs = [x for X in paths for x in X.segments]
            assert p["wprime_inner"][k] == max(modulus_wprime(x, d) for x in segs)
            assert s["wsecond_inner"][k] == max(modulus_wsecond(x, d) for x in segs)
            left = max(d_j1_0(eval_t(X, d), eval_t(X, 0.0)).value for X in paths)
            assert s["left_edge"][k] == left

    def test_moduli_profiles_monotone(self):
        rng = np.random.default_rng(2)
        paths = [random_nested(rng) for _ in range(10)]
        for variant, names in (("wprime", ("wprime_inner", "wD_prime")),
                               ("wsecond", ("wsecond_inner", "wD_second"))):
            rep = compactness_profile(paths, DELTAS, variant)
            for name in names:
                vals = rep.profiles[name]
                assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_errors(self):
        with pytest.raises(ValidationError):
            compactness_profile([], DELTAS)
        with pytest.raises(ValidationError):
            compactness_profile([NestedPath.zero()], [1.0])
        with pytest.raises(ValidationError):
            compactness_profile([NestedPath.zero()], DELTAS, "wthird")

    def test_serialization(self):
        rep = compactness_profile([NestedPath((0.3, 0.31), (A, B, C))], DELTAS, "wsecond")
        rows = list(csv.reader(io.StringIO(rep.to_csv())))
        assert rows[0] == ["quantity", "delta", "value"]
        assert len(rows) == 2 + len(DELTAS) * len(rep.profiles)
        assert rep.to_json()["variant"] == "wsecond"


class TestTightness:
    def test_zero_ensemble(self):
        ens = PathEnsemble([NestedPath.zero()] * 3, n=5)
        rep = tightness_report([ens], [0.5], DELTAS, [0.1])
        assert all(r["frequency"] == 0 for r in rep.rows)

    def test_norm_condition(self):
        paths = [NestedPath.constant(constant(v)) for v in (2.0, -3.0)]
        rep = tightness_report([PathEnsemble(paths, n=1)], [1.5, 2.5], [0.1], [0.5])
        assert rep.frequency("super_norm", 1, a=1.5) == 1.0
        assert rep.frequency("super_norm", 1, a=2.5) == 0.5
        assert rep.frequency("point_norm@1.0", 1, a=1.5) == 1.0

    def test_decisions_match_exact_values(self):
        rng = np.random.default_rng(3)
        paths = [random_nested(rng) for _ in range(40)]
        eps_grid = [0.05, 0.3, 1.0]
        rep = tightness_report([PathEnsemble(paths, n=7)], [1.0], DELTAS, eps_grid, [0.5, 1.0])
        for d in DELTAS:
            wp = [w_D_prime(X, d) for X in paths]
            ws = [w_D_second(X, d) for X in paths]
            inner = [max(modulus_wprime(x, d) for x in X.segments) for X in paths]
            left = [d_j1_0(eval_t(X, d), eval_t(X, 0.0)).value for X in paths]
            right = [d_j1_0(eval_t(X, 1 - d), left_limit_t(X, 1.0)).value for X in paths]
            for e in eps_grid:
                def freq(vals):
                    return sum(v >= e for v in vals) / len(paths)

                assert rep.frequency("wD_prime", 7, delta=d, epsilon=e) == freq(wp)
                assert rep.frequency("wD_second", 7, delta=d, epsilon=e) == freq(ws)
                assert rep.frequency("inner_wprime", 7, delta=d, epsilon=e) == freq(inner)
                assert rep.frequency("left_edge", 7, delta=d, epsilon=e) == freq(left)
                assert rep.frequency("right_edge", 7, delta=d, epsilon=e) == freq(right)

    def test_lazy_distances(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            X = random_nested(rng)
            lz = LazyDistances(X)
            for i in range(lz.n):
                for j in range(lz.n):
                    exact = d_j1_0(X.segments[min(i, j)], X.segments[max(i, j)]).value
                    assert lz.lb[i, j] <= exact + 1e-12 <= lz.ub[i, j] + 2e-12
                    for e in (0.1, 0.5, exact):
                        if e > 0:
                            assert lz.at_least(i, j, e) == (exact >= e)

    def test_simulated_monotone(self):
        for seed in (1, 2):
            ens = make_ensemble(SimConfig(1.5, 20, m=15, seed=seed))
            rep = tightness_report([ens], [1.0], DELTAS, [0.25, 0.5, 1.0])
            for e in (0.25, 0.5, 1.0):
                f = [rep.frequency("wD_prime", 20, delta=d, epsilon=e) for d in DELTAS]
                assert all(a <= b for a, b in zip(f, f[1:]))
            for d in DELTAS:
                f = [rep.frequency("wD_prime", 20, delta=d, epsilon=e) for e in (0.25, 0.5, 1.0)]
                assert all(a >= b for a, b in zip(f, f[1:]))

    def test_deterministic(self):
        ens = make_ensemble(SimConfig(1.2, 10, m=5, seed=9))
        a = tightness_report([ens], [1.0], DELTAS, [0.5]).to_csv()
        b = tightness_report([ens], [1.0], DELTAS, [0.5]).to_csv()
        assert a == b

    def test_csv_columns(self):
        rep = tightness_report([PathEnsemble([NestedPath.zero()], n=1)], [1.0], [0.1], [0.5])
        header = rep.to_csv().splitlines()[0]
        assert header == "n,a,delta,epsilon,condition,count,total,frequency"
        assert all(0 <= r["frequency"] <= 1 for r in rep.rows)

    def test_validation(self):
        ens = PathEnsemble([NestedPath.zero()], n=1)
        with pytest.raises(ValidationError):
            tightness_report([ens], [1.0], [0.1], [0.5], t_subset=[0.5])
        with pytest.raises(ValidationError):
            tightness_report([ens], [], [0.1], [0.5])
        with pytest.raises(ValidationError):
            tightness_report([ens], [1.0], [0.1], [-0.5])
        with pytest.raises(ValidationError):
            tightness_report([], [1.0], [0.1], [0.5])
        with pytest.raises(ValidationError):
            PathEnsemble([], n=1)


class TestComparisonInequalities:
    def test_perturbed_paths(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            X0 = random_nested(rng)
            X = X0 + scaled(rng)
            gap = super_norm(X - X0)
            for t in refinement_times(X, X0):
                xt, x0 = eval_t(X, t), eval_t(X0, t)
                for d in DELTAS:
                    assert modulus_wsecond(xt, d) <= modulus_wsecond(x0, d) + 2 * gap + 1e-9
                    assert abs(xt(d) - xt(0.0)) <= abs(x0(d) - x0(0.0)) + 2 * gap + 1e-9
                    assert (abs(xt.left_limit(1.0) - xt(1 - d))
                            <= abs(x0.left_limit(1.0) - x0(1 - d)) + 2 * gap + 1e-9)


def scaled(rng):
    Y = random_nested(rng, max_jumps=2)
    c = float(rng.choice([0.01, 0.1, 1.0]))
    return NestedPath(Y.t_breakpoints, [c * s for s in Y.segments])


class TestMaximalFunctionals:
    def test_m_rst_examples(self):
        X = NestedPath((0.4,), (A, C))
        assert m_rst(X, 0.2, 0.2, 0.9) == 0.0
        assert m_rst(X, 0.2, 0.9, 0.9) == 0.0
        assert m_rst(X, 0.1, 0.5, 0.9) == 0.0
        Y = NestedPath((0.4, 0.6), (A, C, B))
        assert m_rst(Y, 0.1, 0.5, 0.9) == min(3.0, 2.0)
        with pytest.raises(DomainError):
            m_rst(X, 0.5, 0.2, 0.9)
        with pytest.raises(ValidationError):
            m_rst(X, 0.1, 0.2, 0.3, "m1")

    def test_uniform_dominates(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            X = random_nested(rng)
            r, s, t = sorted(rng.uniform(0, 1, 3))
            assert m_rst(X, r, s, t, "uniform") >= m_rst(X, r, s, t, "j1") - 1e-12

    def test_L_max_equals_two_sided_modulus(self):
        rng = np.random.default_rng(7)
        for _ in range(150):
            X = random_nested(rng)
            for d in DELTAS:
                assert L_max(X, d, "j1") == w_D_second(X, d)
                assert L_max(X, d, "uniform") == w_u_second(X, d)
            assert L_max(X, 1.0, "j1") == w_D_second(X, 1 - 1e-12)

    def test_L_max_examples(self):
        assert L_max(NestedPath.zero(), 0.5) == 0.0
        assert L_max(NestedPath((0.3, 0.31), (A, B, C)), 0.05) == 1.0

    def test_M_examples(self):
        u = indicator(0.5)
        assert discrete_max_M([]) == 0.0
        assert discrete_max_M([u]) == 0.0
        assert discrete_max_M([constant(0.0)] * 4) == 0.0
        assert discrete_max_M([u, -1.0 * u]) == 1.0

    def test_M_brute_force(self):
        rng = np.random.default_rng(8)
        for _ in range(40):
            n = int(rng.integers(0, 20))
            incs = [random_step(rng, 2) for _ in range(n)]
            assert discrete_max_M(incs) == brute_M(incs)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 9), st.integers(-3, 3)), max_size=8))
    def test_M_brute_force_grid(self, raw):
        incs = [make_step([a / 10], [0, v]) if v else constant(0.0) for a, v in raw]
        assert discrete_max_M(incs) == brute_M(incs)

    def test_M_cap(self):
        with pytest.raises(SizeError):
            discrete_max_M([constant(0.0)] * 513)
