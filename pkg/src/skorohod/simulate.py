"""Heavy-tailed step-function increments and their partial-sum paths."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .cadlag import StepFunction
from .errors import ValidationError
from .diagnostics import PathEnsemble
from .nested import NestedPath

__all__ = [
    "SimConfig",
    "replicate_stream",
    "sample_increment",
    "partial_sum_path",
    "make_ensemble",
    "terminal_values",
    "hill_estimate",
    "ks_two_sample",
]


@dataclass(frozen=True)
class SimConfig:
    alpha: float
    n: int
    m: int = 1
    seed: int = 0
    sign_balance: float = 0.5

    def __post_init__(self):
        if not 0.0 < float(self.alpha) < 2.0:
            raise ValidationError(f"alpha must lie in (0, 2), got {self.alpha!r}")
        if int(self.n) < 1 or int(self.m) < 1:
            raise ValidationError("n and m must be positive")
        if not 0.0 <= float(self.sign_balance) <= 1.0:
            raise ValidationError("sign_balance must lie in [0, 1]")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "sign_balance", float(self.sign_balance))

    @property
    def a_n(self):
        return self.n ** (1.0 / self.alpha)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, data):
        try:
            return cls(data["alpha"], data["n"], data.get("m", 1), data.get("seed", 0),
                       data.get("sign_balance", 0.5))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed simulation config: {exc!r}") from None


def replicate_stream(seed, j):
    """Independent generator for replicate ``j``; identical in serial or parallel runs."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(j),)))


def _draw(rng, alpha, count, sign_balance):
    # signed Pareto sizes and jump locations, drawn in that order
    xi = (1.0 - rng.random(count)) ** (-1.0 / alpha)
    sign = np.where(rng.random(count) < sign_balance, 1.0, -1.0)
    u = rng.random(count)
    while (u == 0.0).any():
        u[u == 0.0] = rng.random(int((u == 0.0).sum()))
    return sign * xi, u


def sample_increment(cfg, stream):
    """One increment ``sign * xi * 1_{[U, 1]}``."""
    size, u = _draw(stream, cfg.alpha, 1, cfg.sign_balance)
    return StepFunction((float(u[0]),), (0.0, float(size[0])))


def _path_from_draws(sizes, locs, n, a_n):
    order = np.argsort(locs, kind="stable")
    segments = [StepFunction((), (0.0,))]
    for k in range(1, n + 1):
        # S_k: jumps of the first k increments at their locations, in s order
        idx = order[order < k]
        bps = locs[idx]
        vals = np.concatenate(([0.0], np.cumsum(sizes[idx]))) / a_n
        segments.append(StepFunction._trusted(bps.tolist(), vals.tolist()))
    t_bps = [k / n for k in range(1, n + 1)]
    return NestedPath._trusted(t_bps, segments)


def partial_sum_path(cfg, stream):
    """``S_n(t) = a_n^{-1} sum_{i <= [nt]} X_i`` as a nested step path."""
    sizes, locs = _draw(stream, cfg.alpha, cfg.n, cfg.sign_balance)
    return _path_from_draws(sizes, locs, cfg.n, cfg.a_n)


def make_ensemble(cfg):
    paths = tuple(partial_sum_path(cfg, replicate_stream(cfg.seed, j)) for j in range(cfg.m))
    return PathEnsemble(paths, cfg.n, cfg.seed)


def terminal_values(cfg):
    """``S_n(1, 1)`` for every replicate without building the paths."""
    out = np.empty(cfg.m)
    for j in range(cfg.m):
        sizes, locs = _draw(replicate_stream(cfg.seed, j), cfg.alpha, cfg.n, cfg.sign_balance)
        # summed in s order so the value equals the path's value at (1, 1)
        out[j] = np.cumsum(sizes[np.argsort(locs, kind="stable")])[-1] / cfg.a_n
    return out


def hill_estimate(sample, k):
    """Hill estimator of the tail index from the ``k`` largest observations."""
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValidationError("need a one-dimensional sample with at least two values")
    if not (x > 0).all():
        raise ValidationError("Hill estimation needs positive values")
    k = int(k)
    if not 1 <= k < x.size:
        raise ValidationError(f"k must satisfy 1 <= k < {x.size}, got {k}")
    top = np.sort(x)[::-1][:k + 1]
    mean_log = float(np.mean(np.log(top[:k] / top[k])))
    return math.inf if mean_log == 0.0 else 1.0 / mean_log


def ks_two_sample(a, b):
    """Largest gap between the two empirical distribution functions."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValidationError("both samples must be non-empty")
    # only the statistic is used; the p-value can divide by zero on equal samples
    with np.errstate(divide="ignore"):
        return float(stats.ks_2samp(a, b, method="asymp").statistic)
