from .figures import (
    FIG5_LAMBDAS,
    FIG7_PENALTIES,
    moves_toward,
    run_bench,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fig7,
    run_fig_cac,
)
from .metrics import (
    R2Report,
    SimilarityReport,
    StateSubset,
    action_prob_r2,
    argmax_similarity,
)
from .random_mdp import (
    RandomMdpSpec,
    generate_random_mdp,
    random_gridworld_spec,
    random_placement,
)
from .report import Assertion, ExperimentReport, ReportSummary
from .theorems import TheoremCounts, verify_theorems

__all__ = [
    "Assertion",
    "ExperimentReport",
    "FIG5_LAMBDAS",
    "FIG7_PENALTIES",
    "R2Report",
    "RandomMdpSpec",
    "ReportSummary",
    "SimilarityReport",
    "StateSubset",
    "TheoremCounts",
    "action_prob_r2",
    "argmax_similarity",
    "generate_random_mdp",
    "moves_toward",
    "random_gridworld_spec",
    "random_placement",
    "run_bench",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "run_fig5",
    "run_fig7",
    "run_fig_cac",
    "verify_theorems",
]
