from .dataset import (
    EmpiricalModel,
    TransitionDataset,
    estimate_empirical_model,
    fixed_dataset,
    load_dataset_csv,
    positive_reward_offset,
    sample_trajectories,
    save_dataset_csv,
)
from .mdp import (
    ACTION_DELTAS,
    ACTIONS,
    NOTHING,
    Cell,
    GridworldSpec,
    TabularMdp,
    TabularPolicy,
    build_gridworld,
    random_policy,
    random_tabular_mdp,
)
from .presets import PRESET_NAMES, Preset, load_preset, parse_preset

__all__ = [
    "ACTION_DELTAS",
    "ACTIONS",
    "NOTHING",
    "Cell",
    "EmpiricalModel",
    "GridworldSpec",
    "PRESET_NAMES",
    "Preset",
    "TabularMdp",
    "TabularPolicy",
    "TransitionDataset",
    "build_gridworld",
    "estimate_empirical_model",
    "fixed_dataset",
    "load_dataset_csv",
    "load_preset",
    "parse_preset",
    "positive_reward_offset",
    "random_policy",
    "random_tabular_mdp",
    "sample_trajectories",
    "save_dataset_csv",
]
