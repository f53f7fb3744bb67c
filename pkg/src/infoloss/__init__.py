"""Information-loss bounds for classifiers on finite discrete models.

Exact information quantities, the conditional maximal coupling, every bound
formula, an information-bottleneck solver, brute-force numeric oracles, and
a seeded Monte Carlo lab measuring total-variation decay against the theory.
"""

from .backend import NUMBA_ENABLED
from .bounds import (
    BoundReport,
    KModel,
    bound_report,
    cor1_bound,
    fit_k_model,
    insight_delta_bound,
    invert_thm4_eps,
    old_bound,
    pinsker_delta_bound,
    thm1_bound,
    thm3_exponent,
    thm4_tail_bound,
    type2_bound,
)
from .coupling import (
    CouplingResult,
    OverlapTable,
    VerificationReport,
    build_coupling,
    coupled_z_extension,
    overlap,
    verify_coupling,
)
from .dists import (
    CondDist,
    FiniteDist,
    FullModel,
    InfoReport,
    JointXY,
    joint_from,
    load_model,
    model_from_dict,
    model_to_dict,
    random_cond,
    random_dist,
    random_model,
    save_model,
)
from .errors import (
    ConfigError,
    CounterexampleFound,
    CurveMismatch,
    DomainError,
    InfoLossError,
    InsufficientData,
    MaxIterExceeded,
    NegativeMass,
    NotNormalized,
    ShapeMismatch,
    SupportMismatch,
)
from .ib import IBSolution, Type2Point, ib_curve, ib_solve, type2_loss_measured
from .info import (
    binary_entropy,
    conditional_cross_entropy,
    conditional_total_variation,
    entropy,
    fano_error_lower_bound,
    kl_divergence,
    model_info,
    mutual_information,
    validate,
)
from .lab import (
    Learner,
    TailEstimate,
    TrialRecord,
    monte_carlo_tail,
    plugin_learner,
    run_trial,
    sample_dataset,
    softmax_gd_learner,
    stability_probe,
    training_zeta,
)
from .oracles import (
    OracleReport,
    gibbs_variational_oracle,
    jensen_sharpen_oracle,
    maximal_coupling_search,
    thm1_exhaustive,
    verify_all,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
