"""Experiment settings as frozen dataclasses, loadable from JSON files."""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import TypeVar

from . import generators as gen
from .mdp import Mdp

C = TypeVar("C")


@dataclass(frozen=True)
class AxiomSuiteConfig:
    seed: int = 42
    n_cases: int = 500
    axioms: tuple[str, ...] = ("A1", "A2", "A3")
    orderings: tuple[str, ...] = ("blackwell", "avg-overtaking")
    p_stat: float = 0.3          # share of stationary streams among generated cases


@dataclass(frozen=True)
class CorpusConfig:
    seed: int = 2024
    n_mdps: int = 200
    max_states: int = 4
    max_actions: int = 3

    def models(self) -> list[Mdp]:
        rng = random.Random(f"{self.seed}:corpus")
        return [gen.mdp(rng, self.max_states, self.max_actions) for _ in range(self.n_mdps)]


@dataclass(frozen=True)
class OracleConfig:
    betas: tuple[float, ...] = (0.999, 0.9999)
    threshold: float = 1e-8      # oracle values this close to zero are not sign-checked


def load_config(cls: type[C], path: str | Path | None = None, **overrides) -> C:
    """Build ``cls`` from an optional JSON object, then apply keyword overrides."""
    values = {}
    if path is not None:
        values = json.loads(Path(path).read_text(encoding="utf-8"))
    values.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(values) - set(names)
    if unknown:
        raise ValueError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    for k, v in values.items():
        if isinstance(v, list):
            values[k] = tuple(v)
    return cls(**values)
