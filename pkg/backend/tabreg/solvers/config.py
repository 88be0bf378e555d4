import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from os import PathLike

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ..utils import (
    BETA_FLOOR,
    ConvergenceError,
    PreconditionError,
    SolverDivergenceError,
)

logger = logging.getLogger(__name__)

_RELATIVE_FLOOR = 1e-6


@dataclass
class SolverConfig:
    """Fixed-point solver options.

    Attributes:
      tolerance: Sup-norm change between successive iterates that counts as converged.
      max_iters: Iteration budget of every fixed-point loop.
      temperature: Temperature τ of soft backups and softmax policies.
      cql_lambda: Penalty coefficient λ of CQL soft value iteration.
      onestep_lambda: KL temperature λ of the one-step improvement step.
      beta_floor: Floor ε applied to β̂ inside the CQL ratio μ/β̂.
      tie_tolerance: Values within this distance of a row maximum tie for argmax.
    """

    tolerance: float = 1e-8
    max_iters: int = 100_000
    temperature: float = 1.0
    cql_lambda: float = 10.0
    onestep_lambda: float = 10.0
    beta_floor: float = BETA_FLOOR
    tie_tolerance: float = 1e-6

    def __post_init__(self):
        if self.tolerance <= 0:
            raise PreconditionError("tolerance must be positive")
        if self.temperature <= 0:
            raise PreconditionError("temperature must be positive")
        if self.max_iters < 1:
            raise PreconditionError("max_iters must be at least 1")
        if self.cql_lambda < 0:
            raise PreconditionError("cql_lambda must be non-negative")


@dataclass
class SolverTrace:
    """Residual history of a fixed-point loop."""

    name: str = "solver"
    iterations: list[int] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)

    def record(self, iteration: int, residual: float) -> None:
        self.iterations.append(iteration)
        self.residuals.append(residual)

    def __len__(self) -> int:
        return len(self.iterations)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"iteration": self.iterations, "residual": self.residuals})

    def to_csv(self, path: str | PathLike) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.10g")


def iterate_to_fixed_point(
    update: Callable[[NDArray], NDArray],
    initial: NDArray,
    tolerance: float,
    max_iters: int,
    name: str,
    trace: SolverTrace | None = None,
    bound: float | None = None,
    relative: bool = False,
) -> tuple[NDArray, int]:
    """
    Iterates ``x <- update(x)`` until the sup-norm change drops below ``tolerance``.

    Parameters
    ----------
    update : Callable
        The fixed-point map. Infinite entries are compared only for equality.
    initial : NDArray
        Starting iterate.
    tolerance, max_iters : float, int
        Stopping rule.
    name : str
        Used in log lines and error messages.
    trace : SolverTrace, optional
        Receives (iteration, residual) pairs.
    bound : float, optional
        Finite entries exceeding this magnitude raise SolverDivergenceError.
    relative : bool
        Measure each change relative to the larger of the two iterates, floored
        at a millionth of the largest entry. Entries that stay zero count as
        converged.

    Returns
    -------
    tuple[NDArray, int]
        The fixed point and the number of iterations taken.
    """
    current = np.asarray(initial, dtype=np.float64)
    residual = np.inf
    for it in range(1, max_iters + 1):
        nxt = update(current)
        finite = np.isfinite(nxt) & np.isfinite(current)
        change = np.abs(nxt[finite] - current[finite])
        if relative:
            scale = np.maximum(np.abs(nxt[finite]), np.abs(current[finite]))
            if scale.size:
                scale = np.maximum(scale, _RELATIVE_FLOOR * scale.max())
            change = np.divide(change, scale, out=np.zeros_like(change), where=scale > 0)
        residual = float(change.max()) if change.size else 0.0
        if trace is not None:
            trace.record(it, residual)
        if bound is not None:
            magnitude = np.abs(nxt[np.isfinite(nxt)])
            if magnitude.size and magnitude.max() > bound:
                raise SolverDivergenceError(
                    f"{name} diverged: |Q| exceeded the analytic bound {bound:.3e}",
                    iterations=it,
                    residual=residual,
                )
        current = nxt
        if residual < tolerance:
            logger.debug("%s converged after %s iterations (residual %s)", name, it, residual)
            return current, it
    raise ConvergenceError(
        f"{name} did not converge within {max_iters} iterations",
        iterations=max_iters,
        residual=residual,
    )
