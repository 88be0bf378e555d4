import argparse
import hashlib
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .classifier import ClassifierOptions
from .experiments import FIG5_LAMBDAS, FIG7_PENALTIES, TheoremCounts
from .solvers import SolverConfig
from .utils import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = ("fig2", "fig3", "fig4", "fig5", "fig7", "figcac", "verify-theorems", "bench")
Command = Literal["fig2", "fig3", "fig4", "fig5", "fig7", "figcac", "verify-theorems", "bench"]

DEFAULT_PRESETS: dict[str, tuple[str, ...]] = {
    "fig2": ("fig2-left", "fig2-center", "fig2-right"),
    "fig3": ("fig3",),
    "fig4": ("fig3",),
    "fig5": ("fig3",),
    "fig7": ("fig2-left",),
    "figcac": ("fig3",),
    "bench": ("fig3",),
    "verify-theorems": (),
}

# Fields that never change a result and stay out of the hash.
_UNHASHED = {"out", "verbose"}

FIG5_DEFAULT_SEEDS = (0, 1, 2, 3, 4)


class InstanceCounts(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lemma1: int = Field(20, ge=1)
    lemma2: int = Field(20, ge=1)
    theorem_b: int = Field(10, ge=1)
    theorem_c: int = Field(10, ge=1)
    theorem_d: int = Field(10, ge=1)


class RunConfig(BaseModel):
    """
    Fully resolved settings of one CLI run.

    Defaults follow the tabular experiments: γ = 0.95, critic and actor step
    sizes of 1e-2 and the per-preset update budgets.
    """

    model_config = ConfigDict(extra="forbid")

    command: Command
    preset: str | None = None
    seeds: list[int] | None = None
    out: Path = Path("runs")
    verbose: bool = False
    discount: float = 0.95

    tolerance: float = Field(1e-8, gt=0)
    max_iters: int = Field(100_000, ge=1)
    temperature: float = Field(1.0, gt=0)
    cql_lambda: float = Field(10.0, ge=0)
    onestep_lambda: float = Field(10.0, gt=0)
    tie_tolerance: float = Field(1e-6, ge=0)

    lr: float = Field(1e-2, gt=0)
    actor_lr: float = Field(1e-2, gt=0)
    critic_mode: Literal["newton", "gradient"] = "newton"
    inner_steps: int = Field(1, ge=1)
    eval_tolerance: float = Field(1e-10, gt=0)
    ema_rate: float = Field(0.05, gt=0, le=1)
    actor_steps: int = Field(1, ge=1)
    updates: int | None = Field(None, ge=1)

    num_mdps: int = Field(100, ge=1)
    fig5_lambdas: list[float] = list(FIG5_LAMBDAS)
    fig7_penalties: list[float] = list(FIG7_PENALTIES)
    instances: InstanceCounts = InstanceCounts()
    bench_repeats: int = Field(3, ge=1)

    @field_validator("discount")
    @classmethod
    def _discount_in_range(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("discount must lie in (0,1)")
        return value

    @field_validator("seeds")
    @classmethod
    def _seeds_not_empty(cls, value: list[int] | None) -> list[int] | None:
        if value is not None and not value:
            raise ValueError("at least one seed is required")
        return value

    @field_validator("fig5_lambdas")
    @classmethod
    def _lambdas_positive(cls, value: list[float]) -> list[float]:
        if not value or any(v <= 0 for v in value):
            raise ValueError("the CQL lambda grid must be non-empty and positive")
        return value

    @field_validator("fig7_penalties")
    @classmethod
    def _penalties_in_unit_interval(cls, value: list[float]) -> list[float]:
        if not value or any(not 0.0 <= v <= 1.0 for v in value):
            raise ValueError("critic penalties must be a non-empty subset of [0,1]")
        return value

    def config_hash(self) -> str:
        """First 12 hex digits of the SHA-256 of the canonical JSON dump."""
        canonical = self.model_dump_json(exclude=_UNHASHED)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]

    @property
    def run_dir(self) -> Path:
        return self.out / f"{self.command}-{self.config_hash()}"

    @property
    def seed_list(self) -> list[int]:
        """Seeds of the run; Fig. 5 defaults to five so each point pairs 5 × 5 runs."""
        if self.seeds is not None:
            return self.seeds
        return list(FIG5_DEFAULT_SEEDS) if self.command == "fig5" else [0]

    @property
    def presets(self) -> tuple[str, ...]:
        return (self.preset,) if self.preset else DEFAULT_PRESETS[self.command]

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            tolerance=self.tolerance,
            max_iters=self.max_iters,
            temperature=self.temperature,
            cql_lambda=self.cql_lambda,
            onestep_lambda=self.onestep_lambda,
            tie_tolerance=self.tie_tolerance,
        )

    def classifier_options(self) -> ClassifierOptions:
        return ClassifierOptions(
            lr=self.lr,
            actor_lr=self.actor_lr,
            critic_mode=self.critic_mode,
            inner_steps=self.inner_steps,
            eval_tolerance=self.eval_tolerance,
            max_iters=self.max_iters,
            ema_rate=self.ema_rate,
            actor_steps=self.actor_steps,
            seed=self.seed_list[0],
            tie_tolerance=self.tie_tolerance,
        )

    def theorem_counts(self) -> TheoremCounts:
        return TheoremCounts(**self.instances.model_dump())


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as e:
        raise ConfigError(f"seeds: expected comma-separated integers, got {text!r}") from e


def _apply_override(data: dict[str, Any], assignment: str) -> None:
    """Applies one ``key=value`` override; dotted keys address nested settings."""
    if "=" not in assignment:
        raise ConfigError(f"--set: expected key=value, got {assignment!r}")
    key, raw = assignment.split("=", 1)
    parts = key.strip().split(".")
    target = data
    for part in parts[:-1]:
        target = target.setdefault(part, {})
        if not isinstance(target, dict):
            raise ConfigError(f"{key}: {part} is not a nested setting")
    target[parts[-1]] = yaml.safe_load(raw)


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        key = ".".join(str(p) for p in item["loc"]) or "<root>"
        message = item["msg"].removeprefix("Value error, ")
        parts.append(f"{key}: {message}")
    return "; ".join(parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabreg", description="Tabular offline RL experiments and theorem checks."
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="YAML file with run settings")
    parser.add_argument("--preset", help="preset name or YAML path")
    parser.add_argument("--seeds", help="comma-separated seeds, e.g. 0,1,2")
    parser.add_argument("--out", type=Path, help="parent directory of the run directory")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any setting; repeatable",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    """
    Resolves a RunConfig from defaults, ``--config``, flags and ``--set``.

    Later sources win. Raises ConfigError naming the offending key path.
    """
    args = build_parser().parse_args(argv)
    data: dict[str, Any] = {}
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError(f"config: file {args.config} does not exist")
        loaded = yaml.safe_load(args.config.read_text()) or {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"config: {args.config} must hold a mapping")
        data.update(loaded)
    data["command"] = args.command
    if args.preset is not None:
        data["preset"] = args.preset
    if args.seeds is not None:
        data["seeds"] = _parse_seeds(args.seeds)
    if args.out is not None:
        data["out"] = args.out
    if args.verbose:
        data["verbose"] = True
    for assignment in args.overrides:
        _apply_override(data, assignment)
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_validation_error(e)) from e
    logger.debug("Resolved config %s: %s", config.config_hash(), config)
    return config
