import pytest

from tabreg.classifier import ClassifierOptions
from tabreg.experiments import ExperimentReport, TheoremCounts, verify_theorems
from tabreg.experiments.theorems import (
    lemma2_deviations,
    random_instance,
    support_violation_raises,
    theorem_b_deviation,
)
from tabreg.utils import make_generator

SMALL = TheoremCounts(lemma1=3, lemma2=3, theorem_b=2, theorem_c=2, theorem_d=2)


def _run(seed: int, presets=()) -> ExperimentReport:
    report = ExperimentReport("verify-theorems", "test")
    return verify_theorems(seed, report, SMALL, ClassifierOptions(), presets=presets)


def test_every_check_passes_on_small_counts():
    report = _run(0)
    failed = [a.name for a in report.assertions if not a.passed]
    assert failed == []
    assert report.metrics["lemma2_instances"] == 3
    assert set(report.metrics["theorem_b_per_lambda"]) == {"0", "0.25", "0.5", "0.75", "1"}
    assert set(report.runtimes) >= {"lemma1", "lemma2", "theorem_b", "theorem_c", "theorem_d"}


def test_same_seed_same_report_hash():
    assert _run(3).report_hash() == _run(3).report_hash()


def test_single_instance_deviations():
    instance = random_instance(make_generator(12), 6, 4)
    fixed_point, identity = lemma2_deviations(instance)
    assert fixed_point < 1e-6
    assert identity < 1e-6
    assert theorem_b_deviation(instance, 0.5) < 1e-6
    assert support_violation_raises(make_generator(0))


@pytest.mark.slow
def test_default_counts_with_presets():
    report = ExperimentReport("verify-theorems", "test")
    verify_theorems(0, report)
    assert report.passed
    assert report.metrics["lemma1_instances"] == 24
