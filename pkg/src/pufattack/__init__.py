"""Arbiter PUF simulation and metaheuristic modeling attacks.

The package is organised in layers:

* :mod:`pufattack.puf` simulates (XOR) arbiter PUFs and draws CRP sets,
* :mod:`pufattack.attack` turns a learning set into an error-count fitness,
* :mod:`pufattack.optimizers` holds six budgeted black-box minimizers,
* :mod:`pufattack.harness` runs benchmark grids and aggregates results,
* :mod:`pufattack.cli` is the ``pufattack`` command.
"""
from .attack import (
    SUCCESS_ACCURACY,
    EvaluationReport,
    PufProblem,
    evaluate_test,
    fitness,
    fitness_batch,
    predict_response,
    predict_responses,
)
from .errors import ConfigError, ContractError, DisjointnessError, FormatError, VersionError
from .optimizers import ALGORITHMS, Budget, RunRecord, default_config, optimize
from .puf import (
    CrpSet,
    PufInstance,
    apuf_response,
    generate_crp_set,
    sample_puf_instance,
    transform_challenge,
    transform_challenges,
    xor_apuf_response,
)
from .stats import spearman

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "Budget",
    "ConfigError",
    "ContractError",
    "CrpSet",
    "DisjointnessError",
    "EvaluationReport",
    "FormatError",
    "PufInstance",
    "PufProblem",
    "RunRecord",
    "SUCCESS_ACCURACY",
    "VersionError",
    "apuf_response",
    "default_config",
    "evaluate_test",
    "fitness",
    "fitness_batch",
    "generate_crp_set",
    "optimize",
    "predict_response",
    "predict_responses",
    "sample_puf_instance",
    "spearman",
    "transform_challenge",
    "transform_challenges",
    "xor_apuf_response",
]
