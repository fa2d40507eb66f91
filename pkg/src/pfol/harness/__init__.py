from .experiment import (  # noqa: F401
    CellRow,
    ExperimentResult,
    ExperimentSpec,
    SlopeFit,
    VerifyReport,
    compute_regret,
    fit_slope,
    run_experiment,
    verify_invariants,
)
