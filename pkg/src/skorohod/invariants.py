"""Property suites run by ``skorohod verify`` over a corpus of fixtures.

Each suite takes the loaded corpus and returns ``(passed, total)``.  A
check is one property evaluated on one fixture (or pair, or triple).
"""

from __future__ import annotations

import itertools
import math

from .cadlag import (
    StepFunction,
    TimeChange,
    compose,
    constant,
    max_jump_size,
    modulus_w,
    modulus_wprime,
    modulus_wsecond,
    timechange_devnorm,
    timechange_lognorm,
)
from .diagnostics import PathEnsemble, L_max, discrete_max_M, m_rst, tightness_report
from .metric import d_j1, d_j1_0, matching_cost
from .nested import (
    Grid,
    NestedPath,
    d_D,
    d_D0,
    discretize,
    eval_t,
    eval_ts,
    left_limit_t,
    max_jump,
    modulus_w_D,
    rho_D,
    super_norm,
    w_D_prime,
    w_D_second,
    w_u_second,
    witness_inner_sup,
)
from .simulate import SimConfig, make_ensemble, terminal_values

TOL = 1e-9
DELTAS = (0.02, 0.05, 0.1, 0.2)


class Tally:
    def __init__(self):
        self.passed = 0
        self.total = 0

    def check(self, ok):
        self.total += 1
        self.passed += bool(ok)

    @property
    def result(self):
        return self.passed, self.total


def _pairs(items, limit):
    return list(itertools.islice(zip(items, items[1:] + items[:1]), limit))


def suite_cadlag(corpus):
    t = Tally()
    for x in corpus["steps"]:
        for b in x.breakpoints:
            if b < 1.0:
                t.check(x(b) == x(min(1.0, b + 1e-9)) == x(min(1.0, b + 1e-6)))
        for d in (0.01, 0.05, 0.2):
            wp, ws = modulus_wprime(x, d), modulus_wsecond(x, d)
            t.check(ws <= wp + TOL)
            t.check(wp <= modulus_w(x, 2 * d) + TOL)
            t.check(modulus_w(x, d) <= 2 * wp + max_jump_size(x) + TOL)
        ladder = [modulus_wprime(x, d) for d in (0.01, 0.05, 0.1, 0.3)]
        t.check(all(a <= b for a, b in zip(ladder, ladder[1:])))
    for lam in corpus["timechanges"]:
        t.check(timechange_devnorm(lam) <= math.exp(timechange_lognorm(lam)) - 1 + TOL)
        x = corpus["steps"][0]
        y = compose(x, lam)
        t.check(all(y(s) == x(lam(s)) for s in (0.0, 0.25, 0.5, 0.75, 1.0)))
    return t.result


def suite_metric(corpus):
    t = Tally()
    steps = corpus["steps"]
    zero = constant(0.0)
    for x, y in _pairs(steps, 40):
        d0, d = d_j1_0(x, y), d_j1(x, y)
        t.check(abs(d0.value - d_j1_0(y, x).value) <= TOL)
        t.check(d0.value <= (x - y).sup_norm())
        t.check(d.value <= math.exp(d0.value) - 1 + TOL)
        t.check(matching_cost(x, y, d0.matching, "j1_0") == d0.value)
        t.check(matching_cost(x, y, d.matching, "j1") == d.value)
    for x in steps:
        t.check(d_j1_0(x, x).value == 0.0)
        t.check(d_j1(x, zero).value == d_j1_0(x, zero).value == x.sup_norm())
    for x, y, z in itertools.islice(zip(steps, steps[1:], steps[2:]), 30):
        t.check(d_j1_0(x, z).value <= d_j1_0(x, y).value + d_j1_0(y, z).value + TOL)
    return t.result


def suite_nested(corpus):
    t = Tally()
    paths = corpus["nested"]
    zero = NestedPath.zero()
    for X in paths:
        n = super_norm(X)
        t.check(d_D(X, zero).value == rho_D(X, zero) == n)
        j = max_jump(X)
        for d in DELTAS:
            wp, ws = w_D_prime(X, d), w_D_second(X, d)
            left = d_j1_0(eval_t(X, d), eval_t(X, 0.0)).value
            right = d_j1_0(left_limit_t(X, 1.0), eval_t(X, 1.0 - d)).value
            t.check(ws <= wp + TOL)
            t.check(ws <= w_u_second(X, d) + TOL)
            t.check(wp <= modulus_w_D(X, 2 * d) + TOL)
            t.check(modulus_w_D(X, d) <= 2 * wp + j + TOL)
            t.check(max(ws, left, right) <= w_D_prime(X, 2 * d) + TOL)
            t.check(w_D_prime(X, d / 2) <= 12 * (ws + left + right) + TOL)
            sigma = Grid.uniform(int(math.ceil(1.0 / d)) + 1)
            t.check(d_D(discretize(X, sigma), X).value <= max(d, wp) + TOL)
        pts = sorted({0.0, 1.0, *X.t_breakpoints})
        gap = min(b - a for a, b in zip(pts, pts[1:]))
        t.check(w_D_prime(X, 0.99 * gap) == 0.0)
    for X, Y in _pairs(paths, 30):
        r = d_D(X, Y)
        rho = rho_D(X, Y)
        t.check(r.value <= rho + TOL)
        t.check(rho <= super_norm(X - Y) + TOL)
        t.check(r.value <= math.exp(d_D0(X, Y).value) - 1 + TOL)
        t.check(max(timechange_devnorm(r.timechange), witness_inner_sup(X, Y, r)) == r.value)
        for d in DELTAS:
            t.check(w_D_second(X + Y, d) <= w_D_second(X, d) + 2 * super_norm(Y) + TOL)
    return t.result


def _brute_M(increments):
    sums = [constant(0.0)]
    for x in increments:
        sums.append(sums[-1] + x)
    best = 0.0
    for i, j, k in itertools.combinations_with_replacement(range(len(sums)), 3):
        best = max(best, min((sums[j] - sums[i]).sup_norm(), (sums[k] - sums[j]).sup_norm()))
    return best


def suite_diagnostics(corpus):
    t = Tally()
    paths = corpus["nested"]
    for X in paths:
        for d in DELTAS:
            t.check(L_max(X, d, "j1") == w_D_second(X, d))
        t.check(L_max(X, 1.0, "j1") == w_D_second(X, 1 - 1e-12))
        for r, s, u in ((0.1, 0.4, 0.7), (0.0, 0.5, 1.0), (0.2, 0.2, 0.9)):
            t.check(m_rst(X, r, s, u, "uniform") >= m_rst(X, r, s, u, "j1"))
    for X, X0 in _pairs(paths, 20):
        gap = super_norm(X - X0)
        for tt in sorted({0.0, 1.0, *X.t_breakpoints, *X0.t_breakpoints}):
            x, x0 = eval_t(X, tt), eval_t(X0, tt)
            for d in DELTAS:
                t.check(modulus_wsecond(x, d) <= modulus_wsecond(x0, d) + 2 * gap + TOL)
                t.check(abs(x(d) - x(0.0)) <= abs(x0(d) - x0(0.0)) + 2 * gap + TOL)
                t.check(abs(x.left_limit(1.0) - x(1 - d))
                        <= abs(x0.left_limit(1.0) - x0(1 - d)) + 2 * gap + TOL)
    for seq in corpus["increments"]:
        t.check(discrete_max_M(seq) == _brute_M(seq))
    ens = corpus["ensemble"]
    rep = tightness_report([ens], [1.0], list(DELTAS), [0.25, 0.5])
    for e in (0.25, 0.5):
        f = [rep.frequency("wD_prime", ens.n, delta=d, epsilon=e) for d in DELTAS]
        t.check(all(a <= b for a, b in zip(f, f[1:])))
    t.check(rep.to_csv() == tightness_report([ens], [1.0], list(DELTAS), [0.25, 0.5]).to_csv())
    return t.result


def suite_simulate(corpus):
    t = Tally()
    cfg = corpus["config"]
    ens = make_ensemble(cfg)
    t.check(ens == corpus["ensemble"])
    tv = terminal_values(cfg)
    for S, v in zip(ens.paths, tv):
        t.check(eval_ts(S, 1.0, 1.0) == v)
        t.check(eval_t(S, 0.0).sup_norm() == 0.0)
    return t.result


def suite_round_trip(corpus):
    t = Tally()
    for x in corpus["steps"]:
        t.check(StepFunction.from_json(x.to_json()) == x)
    for lam in corpus["timechanges"]:
        t.check(TimeChange.from_json(lam.to_json()) == lam)
    for X in corpus["nested"]:
        t.check(NestedPath.from_json(X.to_json()) == X)
    t.check(PathEnsemble.from_json(corpus["ensemble"].to_json()) == corpus["ensemble"])
    t.check(SimConfig.from_json(corpus["config"].to_json()) == corpus["config"])
    return t.result


SUITES = {
    "cadlag": suite_cadlag,
    "metric": suite_metric,
    "nested": suite_nested,
    "diagnostics": suite_diagnostics,
    "simulate": suite_simulate,
    "round_trip": suite_round_trip,
}


def run_all(corpus):
    return {name: fn(corpus) for name, fn in SUITES.items()}
