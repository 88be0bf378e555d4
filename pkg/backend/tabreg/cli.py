import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from .config import RunConfig, parse_config
from .experiments import (
    ExperimentReport,
    run_bench,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fig7,
    run_fig_cac,
    verify_theorems,
)
from .tabular import load_preset
from .utils import (
    EXIT_ASSERTION_FAILED,
    EXIT_OK,
    TabregError,
    exit_code_for,
    log_error,
    log_info,
    tabreg_error_handler,
)

logger = logging.getLogger(__name__)


def _unit_dir(config: RunConfig, preset: str | None, seed: int | None) -> Path:
    """Run directory of one (preset, seed) unit; nested only when a run has several."""
    run_dir = config.run_dir
    if len(config.presets) > 1 and preset is not None:
        run_dir = run_dir / Path(preset).stem
    if seed is not None and len(config.seed_list) > 1:
        run_dir = run_dir / f"seed-{seed}"
    return run_dir


def _run_unit(config: RunConfig, preset_name: str | None, seed: int | None) -> ExperimentReport:
    report = ExperimentReport(
        config.command, config.config_hash(), _unit_dir(config, preset_name, seed)
    )
    report.config_snapshot(config.model_dump(mode="json"))
    solver = config.solver_config()
    options = config.classifier_options()
    discount = config.discount
    command = config.command

    if command == "verify-theorems":
        verify_theorems(
            config.seed_list[0],
            report,
            counts=config.theorem_counts(),
            options=options,
            discount=discount,
        )
        return report

    preset = load_preset(preset_name)
    if command == "fig5":
        run_fig5(preset, config.seed_list, solver, report, config.fig5_lambdas, discount)
    elif command == "fig2":
        run_fig2(preset, seed, options, report, discount, config.updates)
    elif command == "fig3":
        run_fig3(preset, seed, solver, report, discount)
    elif command == "fig4":
        run_fig4(preset, seed, solver, report, config.num_mdps, discount)
    elif command == "fig7":
        run_fig7(preset, seed, options, report, config.fig7_penalties, discount, config.updates)
    elif command == "figcac":
        run_fig_cac(preset, seed, solver, options, report, discount, config.updates)
    elif command == "bench":
        run_bench(preset, seed, solver, options, report, config.bench_repeats, discount)
    return report


@tabreg_error_handler
def run_command(config: RunConfig) -> list[ExperimentReport]:
    """
    Runs every (preset, seed) unit of a command and writes one run directory each.

    Fig. 5 consumes the whole seed list in one unit and verify-theorems needs no
    preset; every other command runs once per preset and seed.
    """
    if config.command == "verify-theorems":
        units: list[tuple[str | None, int | None]] = [(None, None)]
    elif config.command == "fig5":
        units = [(preset, None) for preset in config.presets]
    else:
        units = [(preset, seed) for preset in config.presets for seed in config.seed_list]

    reports = []
    for preset, seed in units:
        log_info(f"Running {config.command} (preset={preset}, seed={seed})")
        report = _run_unit(config, preset, seed)
        report.write()
        reports.append(report)
    return reports


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point returning the exit code: 0 pass, 1 failed assertion, 2 config, 3 solver."""
    try:
        config = parse_config(argv)
    except TabregError as e:
        log_error(e.message)
        return exit_code_for(e)
    logging.basicConfig(
        level=logging.DEBUG if config.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        reports = run_command(config)
    except TabregError as e:
        log_error(e.message)
        return exit_code_for(e)
    if all(report.passed for report in reports):
        log_info(f"All assertions passed; artifacts in {config.run_dir}")
        return EXIT_OK
    failed = [a.name for report in reports for a in report.assertions if not a.passed]
    log_error(f"{len(failed)} assertion(s) failed: {', '.join(failed)}")
    return EXIT_ASSERTION_FAILED


def cli() -> None:
    sys.exit(main())
