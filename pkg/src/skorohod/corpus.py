"""Fixture corpus for ``skorohod verify``: generation, writing and loading."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .cadlag import StepFunction, TimeChange
from .diagnostics import PathEnsemble
from .errors import ValidationError
from .fileio import dumps, read_json
from .nested import NestedPath
from .sampling import random_nested, random_step, random_timechange
from .simulate import SimConfig, make_ensemble

SHIPPED = Path(__file__).with_name("corpus")

FILES = ("steps", "timechanges", "nested", "increments", "config", "ensemble")


def generate(seed=0):
    """Corpus documents keyed by file stem; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    steps = []
    for k in range(60):
        if k % 2:
            steps.append(random_step(rng, 6, grid=40, integer_values=True, allow_one=True))
        else:
            steps.append(random_step(rng, 6))
    lams = [random_timechange(rng, 4) for _ in range(30)]
    nested = [random_nested(rng, grid=100 if k % 2 else None) for k in range(30)]
    increments = [[random_step(rng, 2) for _ in range(int(rng.integers(0, 9)))]
                  for _ in range(10)]
    cfg = SimConfig(1.5, 8, m=6, seed=seed)
    return {
        "steps": {"steps": [x.to_json() for x in steps]},
        "timechanges": {"timechanges": [lam.to_json() for lam in lams]},
        "nested": {"nested": [X.to_json() for X in nested]},
        "increments": {"sequences": [[x.to_json() for x in seq] for seq in increments]},
        "config": cfg.to_json(),
        "ensemble": make_ensemble(cfg).to_json(),
    }


def write(directory, seed=0):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, doc in generate(seed).items():
        (directory / f"{name}.json").write_text(dumps(doc))


def load(directory=None):
    """Parse every corpus file; any missing or malformed file raises ValidationError."""
    directory = SHIPPED if directory is None else Path(directory)
    raw = {name: read_json(directory / f"{name}.json") for name in FILES}
    try:
        return {
            "steps": [StepFunction.from_json(x) for x in raw["steps"]["steps"]],
            "timechanges": [TimeChange.from_json(x) for x in raw["timechanges"]["timechanges"]],
            "nested": [NestedPath.from_json(x) for x in raw["nested"]["nested"]],
            "increments": [[StepFunction.from_json(x) for x in seq]
                           for seq in raw["increments"]["sequences"]],
            "config": SimConfig.from_json(raw["config"]),
            "ensemble": PathEnsemble.from_json(raw["ensemble"]),
        }
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed corpus in {directory}: {exc!r}") from None
