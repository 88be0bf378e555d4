import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from os import PathLike

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Rectangle
from numpy.typing import NDArray

from .tabular import ACTION_DELTAS, NOTHING, Cell, TabularMdp, TabularPolicy
from .utils import PreconditionError, greedy_actions

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "tabreg"
ARROW_LENGTH = 0.32


@dataclass
class PolicyAnnotations:
    """Decorations of a policy map.

    Attributes:
      title: Axes title.
      blue_box: Cells outlined in blue.
      cell_colors: Fill colors keyed by cell, e.g. the reward cells.
      config_hash: Written into the SVG metadata.
    """

    title: str = ""
    blue_box: Sequence[Cell] = ()
    cell_colors: dict[Cell, str] = field(default_factory=dict)
    config_hash: str = ""


def _save_svg(fig: Figure, path: str | PathLike, config_hash: str) -> None:
    metadata = {"Date": None}
    if config_hash:
        metadata["Description"] = f"config_hash={config_hash}"
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        fig.savefig(path, format="svg", metadata=metadata, bbox_inches="tight")


def policy_arrows(
    policy: TabularPolicy | NDArray, mdp: TabularMdp, atol: float = 1e-6
) -> list[tuple[Cell, int]]:
    """(cell, action) of every arrow a policy map draws; "nothing" draws none."""
    if mdp.grid is None:
        raise PreconditionError("policy maps need an MDP built from a gridworld")
    if isinstance(policy, TabularPolicy):
        actions = greedy_actions(policy.probs, atol)
    else:
        actions = np.asarray(policy, dtype=np.int64)
    if actions.shape != (mdp.num_states,):
        raise PreconditionError("one action per state is required")
    return [
        (mdp.grid.cell_of(s), int(a)) for s, a in enumerate(actions) if int(a) != NOTHING
    ]


def emit_policy_svg(
    policy: TabularPolicy | NDArray,
    mdp: TabularMdp,
    path: str | PathLike,
    annotations: PolicyAnnotations | None = None,
) -> None:
    """
    Draws the argmax action of every state as an arrow on the grid.

    Parameters
    ----------
    policy : TabularPolicy or NDArray
        A policy (its argmax is drawn, lowest index on ties) or one action per state.
    mdp : TabularMdp
        Must carry its gridworld layout.
    path : str or PathLike
        Destination of the SVG. Identical inputs give byte-identical files.
    annotations : PolicyAnnotations, optional
        Title, outlined cells, fills and provenance.
    """
    annotations = annotations or PolicyAnnotations()
    arrows = policy_arrows(policy, mdp)
    grid = mdp.grid
    fig = Figure(figsize=(0.8 * grid.width + 0.6, 0.8 * grid.height + 0.6))
    ax = fig.add_subplot()
    for cell, color in sorted(annotations.cell_colors.items()):
        row, col = cell
        ax.add_patch(Rectangle((col - 0.5, row - 0.5), 1, 1, facecolor=color, alpha=0.5))
    for cell, action in arrows:
        row, col = cell
        d_row, d_col = ACTION_DELTAS[action]
        ax.arrow(
            col - 0.5 * ARROW_LENGTH * d_col,
            row - 0.5 * ARROW_LENGTH * d_row,
            ARROW_LENGTH * d_col,
            ARROW_LENGTH * d_row,
            width=0.03,
            head_width=0.18,
            head_length=0.12,
            length_includes_head=True,
            color="black",
        )
    for row, col in sorted(tuple(c) for c in annotations.blue_box):
        ax.add_patch(
            Rectangle((col - 0.5, row - 0.5), 1, 1, fill=False, edgecolor="tab:blue", linewidth=3)
        )
    ax.set_xlim(-0.5, grid.width - 0.5)
    ax.set_ylim(grid.height - 0.5, -0.5)
    ax.set_xticks(np.arange(grid.width))
    ax.set_yticks(np.arange(grid.height))
    ax.set_xticks(np.arange(grid.width + 1) - 0.5, minor=True)
    ax.set_yticks(np.arange(grid.height + 1) - 0.5, minor=True)
    ax.grid(which="minor", color="0.7", linewidth=0.8)
    ax.tick_params(which="minor", length=0)
    ax.set_aspect("equal")
    if annotations.title:
        ax.set_title(annotations.title)
    _save_svg(fig, path, annotations.config_hash)
    logger.debug("Wrote policy map with %s arrows to %s", len(arrows), path)


def emit_histogram_svg(
    scores: Iterable[float],
    path: str | PathLike,
    chance_level: float | None = None,
    bins: int = 10,
    title: str = "",
    config_hash: str = "",
) -> None:
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    ax.hist(list(scores), bins=np.linspace(0.0, 1.0, bins + 1), color="tab:blue", edgecolor="white")
    if chance_level is not None:
        ax.axvline(chance_level, color="tab:red", linestyle="--", label="chance")
        ax.legend()
    ax.set_xlabel("argmax similarity")
    ax.set_ylabel("number of MDPs")
    if title:
        ax.set_title(title)
    ax.grid(True, linestyle="--", alpha=0.7)
    _save_svg(fig, path, config_hash)


def emit_curve_svg(
    x: Sequence[float],
    mean: Sequence[float],
    path: str | PathLike,
    std: Sequence[float] | None = None,
    xlabel: str = "",
    ylabel: str = "argmax similarity",
    log_x: bool = False,
    title: str = "",
    config_hash: str = "",
) -> None:
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    ax.errorbar(x, mean, yerr=std, fmt="o-", capsize=4, color="tab:blue")
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_ylim(-0.05, 1.05)
    if title:
        ax.set_title(title)
    ax.grid(True, linestyle="--", alpha=0.7)
    _save_svg(fig, path, config_hash)


def emit_scatter_svg(
    x: NDArray,
    y: NDArray,
    path: str | PathLike,
    xlabel: str = "",
    ylabel: str = "",
    title: str = "",
    config_hash: str = "",
) -> None:
    """Scatter of paired action probabilities with the identity line."""
    fig = Figure(figsize=(4.5, 4.5))
    ax = fig.add_subplot()
    ax.plot([0, 1], [0, 1], color="0.6", linestyle="--", linewidth=1)
    ax.scatter(np.ravel(x), np.ravel(y), s=12, color="tab:blue")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    _save_svg(fig, path, config_hash)
