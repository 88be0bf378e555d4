import functools
import logging
import traceback
from collections.abc import Sequence
from typing import Callable, TypeVar

import click
import numpy as np
from numpy.typing import NDArray
from scipy.special import softmax

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable)

# Shared numerical constants.
LOGIT_CLAMP = 30.0
BETA_FLOOR = 1e-6


class TabregError(Exception):
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class ConfigError(TabregError):
    pass


class PreconditionError(TabregError, ValueError):
    pass


class DatasetError(PreconditionError):
    pass


class ConvergenceError(TabregError):
    def __init__(
        self, message: str, iterations: int | None = None, residual: float | None = None
    ) -> None:
        if residual is not None:
            message = f"{message} (iterations={iterations}, residual={residual:.3e})"
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SolverDivergenceError(ConvergenceError):
    pass


EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NON_CONVERGENCE = 3


def exit_code_for(exc: BaseException) -> int:
    """Maps a lab exception onto the CLI exit code."""
    if isinstance(exc, ConvergenceError):
        return EXIT_NON_CONVERGENCE
    if isinstance(exc, (ConfigError, PreconditionError)):
        return EXIT_CONFIG_ERROR
    return EXIT_ASSERTION_FAILED


def tabreg_error_handler(func: F) -> F:
    """Decorator to log tracebacks and raise TabregError for foreign exceptions."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception as e:
            logger.debug("%s failed:\n%s", func.__name__, traceback.format_exc())
            if isinstance(e, TabregError):
                raise e
            else:
                raise TabregError(f"{type(e).__name__}: {e}") from e

    return wrapper  # type: ignore[return-value]


def log_info(message: str) -> None:
    print(click.style("INFO", fg="green") + ":\t  " + message)


def log_warning(message: str) -> None:
    print(click.style("WARNING", fg="yellow") + ":\t  " + message)


def log_error(message: str) -> None:
    print(click.style("ERROR", fg="red") + ":\t  " + message)


def greedy_actions(values: NDArray, atol: float = 0.0) -> NDArray[np.int64]:
    """
    Row-wise argmax with lowest-index tie-breaking.

    Parameters
    ----------
    values : NDArray
        Table of shape (num_states, num_actions). ``+inf`` entries are ignored.
    atol : float
        Entries within ``atol`` of the row maximum count as tied.

    Returns
    -------
    NDArray[np.int64]
        The lowest action index among the tied maximizers of each row.

    Example
    -------
    >>> greedy_actions(np.array([[1.0, 1.0 + 1e-9, 0.0]]), atol=1e-6)
    array([0])
    """
    finite = np.where(np.isfinite(values), values, -np.inf)
    best = finite.max(axis=1, keepdims=True)
    return np.argmax(finite >= best - atol, axis=1)


def row_softmax(logits: NDArray, temperature: float = 1.0) -> NDArray[np.float64]:
    return softmax(np.asarray(logits, dtype=np.float64) / temperature, axis=1)


def normalize_rows(weights: NDArray) -> NDArray[np.float64]:
    """Normalizes non-negative rows to sum to one; all-zero rows become uniform."""
    weights = np.asarray(weights, dtype=np.float64)
    totals = weights.sum(axis=1, keepdims=True)
    uniform = np.full_like(weights, 1.0 / weights.shape[1])
    return np.where(totals > 0, weights / np.where(totals > 0, totals, 1.0), uniform)


def spawn_generators(seed: int | Sequence[int], count: int) -> list[np.random.Generator]:
    """One independent PCG64 stream per child, derived from a single seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sup_norm(a: NDArray, b: NDArray, mask: NDArray | None = None) -> float:
    diff = np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
    if mask is not None:
        diff = diff[mask]
    return float(diff.max()) if diff.size else 0.0
