import hashlib
import json
import logging
import time
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import pandas as pd
import yaml
from pydantic import BaseModel, Field

from ..utils import log_info, log_warning

logger = logging.getLogger(__name__)


class Assertion(BaseModel):
    name: str
    expected: Any
    actual: Any
    tolerance: float | None = None
    passed: bool


class ReportSummary(BaseModel):
    """Contents of ``summary.json``."""

    command: str
    config_hash: str
    passed: bool
    report_hash: str
    assertions: list[Assertion] = Field(default_factory=list)
    metrics: dict[str, Any] = Field(default_factory=dict)
    runtimes: dict[str, float] = Field(default_factory=dict)
    tables: dict[str, str] = Field(default_factory=dict)
    figures: dict[str, str] = Field(default_factory=dict)


class ExperimentReport:
    """
    Collects one run's assertions, metrics and artifacts.

    Every CSV and SVG of a run goes through this object, which is the single
    writer of its run directory. Without a run directory nothing touches disk.
    """

    def __init__(self, command: str, config_hash: str, run_dir: str | Path | None = None):
        self.command = command
        self.config_hash = config_hash
        self.run_dir = Path(run_dir) if run_dir is not None else None
        self.assertions: list[Assertion] = []
        self.metrics: dict[str, Any] = {}
        self.runtimes: dict[str, float] = {}
        self.tables: dict[str, str] = {}
        self.figures: dict[str, str] = {}
        if self.run_dir is not None:
            self.run_dir.mkdir(parents=True, exist_ok=True)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def check(
        self,
        name: str,
        passed: bool,
        expected: Any,
        actual: Any,
        tolerance: float | None = None,
    ) -> bool:
        assertion = Assertion(
            name=name,
            expected=expected,
            actual=actual,
            tolerance=tolerance,
            passed=bool(passed),
        )
        self.assertions.append(assertion)
        if assertion.passed:
            logger.debug("%s passed: %s", name, actual)
        else:
            log_warning(f"{name}: expected {expected}, got {actual}")
        return assertion.passed

    def metric(self, name: str, value: Any) -> None:
        self.metrics[name] = value

    @contextmanager
    def timed(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.runtimes[name] = time.perf_counter() - start

    def table(self, name: str, frame: pd.DataFrame) -> Path | None:
        """Writes ``<name>.csv`` headed by a ``# config_hash=...`` comment line."""
        if self.run_dir is None:
            return None
        path = self.run_dir / f"{name}.csv"
        with path.open("w", newline="") as handle:
            handle.write(f"# config_hash={self.config_hash}\n")
            frame.to_csv(handle, index=False, float_format="%.10g", lineterminator="\n")
        self.tables[name] = path.name
        return path

    def config_snapshot(self, data: dict[str, Any]) -> Path | None:
        if self.run_dir is None:
            return None
        path = self.run_dir / "config.yaml"
        path.write_text(yaml.safe_dump(data, sort_keys=True))
        return path

    def figure(self, name: str, writer: Callable[[Path], None]) -> Path | None:
        if self.run_dir is None:
            return None
        path = self.run_dir / f"{name}.svg"
        writer(path)
        self.figures[name] = path.name
        return path

    def report_hash(self) -> str:
        """Digest of the assertions and metrics; runtimes and paths are left out."""
        payload = json.dumps(
            {
                "assertions": [a.model_dump(mode="json") for a in self.assertions],
                "metrics": self.metrics,
            },
            sort_keys=True,
            default=str,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def summary(self) -> ReportSummary:
        return ReportSummary(
            command=self.command,
            config_hash=self.config_hash,
            passed=self.passed,
            report_hash=self.report_hash(),
            assertions=self.assertions,
            metrics=self.metrics,
            runtimes=self.runtimes,
            tables=self.tables,
            figures=self.figures,
        )

    def write(self) -> Path | None:
        if self.run_dir is None:
            return None
        path = self.run_dir / "summary.json"
        path.write_text(self.summary().model_dump_json(indent=2) + "\n")
        passed = sum(a.passed for a in self.assertions)
        log_info(
            f"{self.command}: {passed}/{len(self.assertions)} assertions passed, "
            f"summary at {path}"
        )
        return path
