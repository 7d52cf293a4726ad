"""QAOA encodings for MaxCut and satellite mission planning, plus instance sampling.

Circuits are built with symbolic angles so the same structure serves both the
anticipated (predictive) encoding and a concrete instance. Symbols:

* MaxCut: ``gamma_i`` (cost, RZZ coefficient 1) and ``beta_i`` (mixer, RX coefficient 2).
* Satellite: ``w{v}_{i}`` = theta_v * alpha_i and ``g_{i}`` = gamma * alpha_i, both
  with coefficient 2, and ``beta_i`` as for MaxCut. Instance weights and the cost
  factor are folded into these products at binding time.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .ir import Circuit, Gate, Symbolic, canonical_edge, h, rx, rz, rzz


class Problem(str, enum.Enum):
    MAXCUT = "maxcut"
    SATELLITE = "satellite"


class AnticipationMode(str, enum.Enum):
    ALL = "all"
    SUCCESSOR = "1"

    @classmethod
    def parse(cls, value) -> "AnticipationMode":
        if isinstance(value, cls):
            return value
        value = str(value).lower()
        aliases = {"all": cls.ALL, "allpairs": cls.ALL, "1": cls.SUCCESSOR, "successor": cls.SUCCESSOR}
        try:
            return aliases[value]
        except KeyError:
            raise ValueError(f"unknown anticipation mode {value!r}") from None


Edge = tuple[int, int]

DEFAULT_WEIGHT_RANGE = (0.1, 1.0)


def anticipate(n: int, mode: AnticipationMode | str) -> tuple[Edge, ...]:
    """Anticipated edge set in canonical (lexicographic) order."""
    if n < 2:
        raise ValueError("need at least two nodes")
    mode = AnticipationMode.parse(mode)
    if mode is AnticipationMode.ALL:
        return tuple(combinations(range(n), 2))
    return tuple((i, i + 1) for i in range(n - 1))


@dataclass(frozen=True)
class ParameterSet:
    """Per-repetition cost angles (gamma for MaxCut, alpha for satellite) and mixer angles beta."""

    cost: tuple[float, ...]
    mixer: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.cost) != len(self.mixer):
            raise ValueError("cost and mixer parameter lists differ in length")
        if not self.cost:
            raise ValueError("need at least one repetition")

    @property
    def reps(self) -> int:
        return len(self.cost)

    @classmethod
    def random(cls, reps: int, seed=None) -> "ParameterSet":
        rng = np.random.default_rng(seed)
        return cls(tuple(rng.uniform(0, np.pi, reps).tolist()), tuple(rng.uniform(0, np.pi, reps).tolist()))

    def to_json(self) -> dict:
        return {"cost": list(self.cost), "mixer": list(self.mixer)}

    @classmethod
    def from_json(cls, data: dict) -> "ParameterSet":
        return cls(tuple(map(float, data["cost"])), tuple(map(float, data["mixer"])))


@dataclass(frozen=True)
class ProblemInstance:
    problem: Problem
    n: int
    edges: frozenset[Edge]
    weights: tuple[float, ...] | None = None
    gamma: float | None = None
    mode: AnticipationMode | None = None
    seed: int | None = None
    _sorted: tuple[Edge, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "problem", Problem(self.problem))
        edges = frozenset(canonical_edge(a, b) for a, b in self.edges)
        for a, b in edges:
            if b >= self.n:
                raise ValueError(f"edge ({a},{b}) exceeds node count {self.n}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_sorted", tuple(sorted(edges)))
        if self.mode is not None:
            object.__setattr__(self, "mode", AnticipationMode.parse(self.mode))
        if self.problem is Problem.MAXCUT:
            if self.weights is not None or self.gamma is not None:
                raise ValueError("MaxCut instances carry no weights or cost factor")
        else:
            if self.weights is None or len(self.weights) != self.n:
                raise ValueError(f"satellite instance needs {self.n} weights")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            object.__setattr__(self, "gamma", 1.0 if self.gamma is None else float(self.gamma))

    @property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return self._sorted

    def to_json(self) -> dict:
        return {
            "class": self.problem.value,
            "n": self.n,
            "mode": None if self.mode is None else self.mode.value,
            "edges": [list(e) for e in self._sorted],
            "weights": None if self.weights is None else list(self.weights),
            "gamma": self.gamma,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ProblemInstance":
        return cls(
            problem=Problem(data["class"]),
            n=int(data["n"]),
            edges=frozenset(tuple(e) for e in data.get("edges", [])),
            weights=None if data.get("weights") is None else tuple(data["weights"]),
            gamma=data.get("gamma"),
            mode=data.get("mode"),
            seed=data.get("seed"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ProblemInstance":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _state_prep(n: int) -> list[Gate]:
    return [h(q) for q in range(n)]


def _mixer(n: int, i: int) -> list[Gate]:
    beta = Symbolic.param(f"beta_{i}", 2.0)
    return [rx(beta, q) for q in range(n)]


def _cost_layer(edges, angle) -> list[Gate]:
    return [rzz(angle, a, b, tag=(a, b)) for a, b in sorted(canonical_edge(*e) for e in edges)]


def encode_maxcut(edges, n: int, reps: int) -> Circuit:
    """H on every qubit, then per repetition a tagged RZZ per edge and an RX mixer."""
    gates = _state_prep(n)
    for i in range(reps):
        gates += _cost_layer(edges, Symbolic.param(f"gamma_{i}"))
        gates += _mixer(n, i)
    return Circuit(n, tuple(gates))


def encode_satellite(edges, n: int, reps: int) -> Circuit:
    """Like MaxCut with an untagged per-qubit RZ weight layer ahead of each cost layer."""
    gates = _state_prep(n)
    for i in range(reps):
        gates += [rz(Symbolic.param(f"w{v}_{i}", 2.0), v) for v in range(n)]
        gates += _cost_layer(edges, Symbolic.param(f"g_{i}", 2.0))
        gates += _mixer(n, i)
    return Circuit(n, tuple(gates))


def encode(problem: Problem | str, edges, n: int, reps: int) -> Circuit:
    if Problem(problem) is Problem.MAXCUT:
        return encode_maxcut(edges, n, reps)
    return encode_satellite(edges, n, reps)


def encode_instance(instance: ProblemInstance, reps: int) -> Circuit:
    return encode(instance.problem, instance.sorted_edges, instance.n, reps)


def parameter_values(instance: ProblemInstance, params: ParameterSet) -> dict[str, float]:
    """Concrete values for every symbol the encoders emit."""
    values = {f"beta_{i}": b for i, b in enumerate(params.mixer)}
    if instance.problem is Problem.MAXCUT:
        values.update({f"gamma_{i}": g for i, g in enumerate(params.cost)})
        return values
    for i, alpha in enumerate(params.cost):
        values[f"g_{i}"] = instance.gamma * alpha
        for v, theta in enumerate(instance.weights):
            values[f"w{v}_{i}"] = theta * alpha
    return values


def sample_instance(problem: Problem | str, n: int, mode: AnticipationMode | str, p: float,
                    seed: int | None = None, gamma: float = 1.0,
                    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE,
                    anticipated=None) -> ProblemInstance:
    """Keep each anticipated edge independently with probability ``p``.

    Satellite weights are uniform on ``weight_range``; they are drawn after the
    edges from the same generator.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    problem = Problem(problem)
    mode = AnticipationMode.parse(mode)
    if anticipated is None:
        anticipated = anticipate(n, mode)
    rng = np.random.default_rng(seed)
    keep = rng.random(len(anticipated)) < p
    edges = frozenset(e for e, k in zip(anticipated, keep) if k)
    weights = None
    if problem is Problem.SATELLITE:
        weights = tuple(rng.uniform(*weight_range, n).tolist())
    return ProblemInstance(problem, n, edges, weights, gamma if problem is Problem.SATELLITE else None,
                           mode, seed)
