import logging
from functools import lru_cache
from importlib import resources
from os import PathLike
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..utils import ConfigError
from .dataset import TransitionDataset, fixed_dataset, sample_trajectories
from .mdp import Cell, GridworldSpec, TabularMdp, TabularPolicy, build_gridworld

logger = logging.getLogger(__name__)

PRESET_NAMES = ("fig2-left", "fig2-center", "fig2-right", "fig3")


class RewardCell(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cell: Cell
    value: float


class DatasetSettings(BaseModel):
    """How a preset's offline dataset is produced."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["uniform", "path"] = "uniform"
    num_traj: int = Field(20, ge=1)
    horizon: int = Field(50, ge=1)
    path: list[Cell] | None = None


class Preset(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    description: str = ""
    width: int = Field(5, ge=1)
    height: int = Field(5, ge=1)
    discount: float = 0.95
    start_cell: Cell = (0, 0)
    goal_cells: list[Cell] = []
    default_reward: float = 0.0
    rewards: list[RewardCell] = []
    high_cell: Cell | None = None
    low_cell: Cell | None = None
    blue_box: list[Cell] = []
    updates: int = Field(20_000, ge=1)
    dataset: DatasetSettings = DatasetSettings()

    @field_validator("discount")
    @classmethod
    def _discount_in_range(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("discount must lie in (0,1)")
        return value

    def gridworld_spec(self) -> GridworldSpec:
        return GridworldSpec(
            width=self.width,
            height=self.height,
            rewards={tuple(r.cell): r.value for r in self.rewards},
            start_cell=tuple(self.start_cell),
            goal_cells=frozenset(tuple(c) for c in self.goal_cells),
            default_reward=self.default_reward,
        )

    def build_mdp(self, discount: float | None = None) -> TabularMdp:
        return build_gridworld(self.gridworld_spec(), discount or self.discount)

    def make_dataset(self, seed: int) -> TransitionDataset:
        spec = self.gridworld_spec()
        if self.dataset.kind == "path":
            if not self.dataset.path:
                raise ConfigError(f"{self.name}: dataset.path: required for path datasets")
            return fixed_dataset(self.dataset.path, spec)
        mdp = self.build_mdp()
        behavior = TabularPolicy.uniform(mdp.num_states, mdp.num_actions)
        return sample_trajectories(
            mdp, behavior, self.dataset.num_traj, self.dataset.horizon, seed
        )


def _format_validation_error(source: str, error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        key = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{key}: {item['msg']}")
    return f"{source}: " + "; ".join(parts)


def parse_preset(data: dict, source: str = "<preset>") -> Preset:
    try:
        return Preset.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_validation_error(source, e)) from e


@lru_cache
def _builtin_preset(name: str) -> Preset:
    text = resources.files("tabreg.tabular").joinpath("data", f"{name}.yaml").read_text()
    return parse_preset(yaml.safe_load(text), source=name)


def load_preset(name_or_path: str | PathLike) -> Preset:
    """Loads a registered preset by name, or any preset YAML file by path."""
    if str(name_or_path) in PRESET_NAMES:
        return _builtin_preset(str(name_or_path))
    path = Path(name_or_path)
    if not path.is_file():
        raise ConfigError(
            f"preset: unknown preset {str(name_or_path)!r}; expected one of "
            f"{', '.join(PRESET_NAMES)} or a YAML file"
        )
    logger.debug("Loading preset from %s", path)
    return parse_preset(yaml.safe_load(path.read_text()), source=str(path))
