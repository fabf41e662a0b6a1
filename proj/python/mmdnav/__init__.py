"""Reactive collision avoidance by matching the VO violation distribution to a point mass (MMD)."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np

from . import _core
from ._core import ConfigError, PlanningError, rbf, violation, vo_constraint

__all__ = [
    "ConfigError",
    "PlanningError",
    "bias_sweep_model",
    "cli",
    "gaussianize",
    "load_config",
    "load_scenario",
    "mmd_cost",
    "monte_carlo",
    "plan",
    "rbf",
    "run_episode",
    "sample_mixture",
    "violation",
    "vo_constraint",
]

JsonLike = Union[str, os.PathLike, Mapping[str, Any]]


def _text(obj: JsonLike | None) -> str | None:
    # dicts are serialized; strings and paths name a JSON file
    if obj is None:
        return None
    if isinstance(obj, Mapping):
        return json.dumps(obj)
    return Path(obj).read_text()


def load_scenario(obj: JsonLike) -> dict:
    """Validated scenario with every default filled in."""
    return json.loads(_core.normalize_scenario(_text(obj)))


def load_config(obj: JsonLike | None = None) -> dict:
    return json.loads(_core.normalize_config(_text(obj) or "{}"))


def mmd_cost(h: Sequence[float], weights: Sequence[float] | None = None, gamma: float = 0.1,
             method: str = "matrix") -> float:
    return _core.mmd_cost(list(map(float, h)), None if weights is None else list(map(float, weights)), gamma, method)


def bias_sweep_model(k: int) -> dict:
    return json.loads(_core.bias_sweep_model(k))


def sample_mixture(model: Mapping[str, Any], n: int, seed: int) -> np.ndarray:
    return _core.sample_mixture(json.dumps(model), n, seed)


def gaussianize(model: Mapping[str, Any], seed: int) -> dict:
    return json.loads(_core.gaussianize(json.dumps(model), seed))


def run_episode(scenario: JsonLike, config: JsonLike | None = None, mode: str = "exact", threads: int = 1) -> dict:
    out = _core.run_episode(_text(scenario), _text(config), mode, threads)
    out["metrics"] = json.loads(out["metrics"])
    return out


def monte_carlo(scenario: JsonLike, config: JsonLike | None = None, runs: int = 100, base_seed: int | None = None,
                mode: str = "exact", threads: int = 1) -> dict:
    return json.loads(_core.monte_carlo(_text(scenario), _text(config), runs, base_seed, mode, threads))


def plan(robot_samples, control_noise, obstacle_samples, position, heading, goal, radius, dt, seed=0,
         config: JsonLike | None = None, threads: int = 1):
    """One planning call. Returns (v, omega, index, costs)."""
    as2d = lambda a: np.ascontiguousarray(a, dtype=float)  # noqa: E731
    return _core.plan(as2d(robot_samples), as2d(control_noise), [as2d(o) for o in obstacle_samples],
                      np.asarray(position, dtype=float), float(heading), np.asarray(goal, dtype=float),
                      float(radius), float(dt), int(seed), _text(config), threads)


def cli(*args: str) -> tuple[int, str, str]:
    return _core.cli([str(a) for a in args])
