"""Experiment configuration: dataclasses with JSON round-trip and the
published benchmark protocols baked in as defaults."""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from .benchmarks import GAS_TEST_IC, ROD_TEST_PARAMS, GasParams, RodParams

METHOD_CHOICES = ("SP", "EH", "G")


@dataclass(frozen=True)
class TrainingConfig:
    num_trajectories: int = 25
    horizon: float = 8.0
    sample_dt: float = 0.02
    mu: float = 1.0
    nu: float = 1.0


@dataclass(frozen=True)
class EvaluationConfig:
    horizons: Tuple[float, ...]
    n_values: Tuple[int, ...]
    test_ic: Optional[Tuple[float, ...]] = None       # gas: full state
    test_params: Optional[Tuple[float, ...]] = None   # rod: (mu1, mu2, S0)


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-12
    atol: float = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: str
    seed: int = 12345
    gas: GasParams = field(default_factory=GasParams)
    rod: RodParams = field(default_factory=RodParams)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    evaluation: EvaluationConfig = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    methods: Tuple[str, ...] = METHOD_CHOICES
    output_dir: str = "out"

    def validate(self) -> "ExperimentConfig":
        if self.benchmark not in ("gas", "rod"):
            raise ValueError(f"unknown benchmark {self.benchmark!r}")
        if self.evaluation is None:
            raise ValueError("config lacks an evaluation block; start from default_config")
        bad = [m for m in self.methods if m not in METHOD_CHOICES]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHOD_CHOICES}")
        if self.training.horizon <= 0 or self.training.sample_dt <= 0:
            raise ValueError("training horizon and sample_dt must be positive")
        if any(n < 1 for n in self.evaluation.n_values):
            raise ValueError("reduced dimensions must be >= 1")
        for T in (*self.evaluation.horizons, self.training.horizon):
            if T <= 0:
                raise ValueError("horizons must be positive")
            k = round(T / self.training.sample_dt)
            if abs(T - k * self.training.sample_dt) > 1e-12 * max(1.0, T):
                raise ValueError(
                    f"sample_dt={self.training.sample_dt} does not divide horizon {T}"
                )
        if self.benchmark == "gas" and self.evaluation.test_ic is None:
            raise ValueError("gas evaluation requires test_ic")
        if self.benchmark == "rod" and self.evaluation.test_params is None:
            raise ValueError("rod evaluation requires test_params")
        return self


def default_config(benchmark: str) -> ExperimentConfig:
    """The published protocol for each benchmark, ready to run."""
    if benchmark == "gas":
        evaluation = EvaluationConfig(horizons=(8.0, 32.0), n_values=(2, 3, 4),
                                      test_ic=GAS_TEST_IC)
    elif benchmark == "rod":
        evaluation = EvaluationConfig(horizons=(8.0, 16.0, 48.0, 96.0),
                                      n_values=(10, 20, 40),
                                      test_params=ROD_TEST_PARAMS)
    else:
        raise ValueError(f"unknown benchmark {benchmark!r}")
    return ExperimentConfig(benchmark=benchmark, evaluation=evaluation).validate()


def _replace_fields(instance, data: dict, caster=None):
    names = {f.name for f in dataclasses.fields(instance)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)} for {type(instance).__name__}")
    cast = {k: (caster[k](v) if caster and k in caster and v is not None else v)
            for k, v in data.items()}
    return dataclasses.replace(instance, **cast)


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a JSON-style dict, starting at the benchmark's
    defaults so partial documents stay valid."""
    data = dict(data)
    benchmark = data.pop("benchmark", None)
    if benchmark is None:
        raise ValueError("config document must name a benchmark")
    cfg = default_config(benchmark)
    nested = {
        "gas": (cfg.gas, None),
        "rod": (cfg.rod, None),
        "training": (cfg.training, None),
        "integrator": (cfg.integrator, None),
        "evaluation": (cfg.evaluation, {"horizons": tuple, "n_values": tuple,
                                        "test_ic": tuple, "test_params": tuple}),
    }
    updates = {}
    for key, (instance, caster) in nested.items():
        if key in data:
            updates[key] = _replace_fields(instance, data.pop(key), caster)
    if "methods" in data:
        updates["methods"] = tuple(data.pop("methods"))
    cfg = _replace_fields(cfg, data)
    return dataclasses.replace(cfg, **updates).validate()


def load_config(path) -> ExperimentConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def dump_config(config: ExperimentConfig) -> str:
    return json.dumps(dataclasses.asdict(config), indent=2) + "\n"
