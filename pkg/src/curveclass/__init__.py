"""Classification of discretely sampled noisy curves.

Smooths each observed curve onto a common grid by local linear kernel
regression, estimates per-population functional means, scales and
covariance eigenstructure, and classifies new curves with centroid,
scale-adjusted centroid or functional quadratic discriminant rules.
Bandwidths can come from a per-curve plug-in rule, from cross-validated
scale factors, or be skipped entirely.
"""

__version__ = "0.1.0"

from .classifiers import (
    KINDS,
    TrainedClassifier,
    TruePopulation,
    centroid_score,
    classify,
    decide,
    oracle_qda_score,
    qda_score,
    qda_terms,
    scaled_centroid_score,
    score,
)
from .errors import CurveClassError
from .estimators import CurveClassifier
from .numerics import (
    RNG_ALGORITHM_ID,
    FunctionOnGrid,
    Grid,
    RandomStream,
    inner_product,
    integrate,
)
from .population import PopulationEstimate, estimate_population
from .simulation import (
    ExperimentReport,
    GaussianScenario,
    GeneratedCurve,
    SimulationSpec,
    bandwidth_sweep,
    gaussian_scenario,
    generate_dataset,
    run_experiment,
)
from .smoothing import (
    EPANECHNIKOV,
    BandwidthPlan,
    Kernel,
    SampledCurve,
    local_linear_fit,
    no_smoothing_interpolant,
    plugin_bandwidth,
    smooth_with_plan,
)
from .theory import (
    TheoryConstants,
    TheoryInputs,
    builtin_scenario,
    classify_regime,
    compute_constants,
    expansion_predict,
)
from .tuning import TuningConfig, TuningResult, cv_error, select_tuning

__all__ = [
    "BandwidthPlan",
    "CurveClassError",
    "CurveClassifier",
    "EPANECHNIKOV",
    "ExperimentReport",
    "FunctionOnGrid",
    "GaussianScenario",
    "GeneratedCurve",
    "Grid",
    "KINDS",
    "Kernel",
    "PopulationEstimate",
    "RNG_ALGORITHM_ID",
    "RandomStream",
    "SampledCurve",
    "SimulationSpec",
    "TheoryConstants",
    "TheoryInputs",
    "TrainedClassifier",
    "TruePopulation",
    "TuningConfig",
    "TuningResult",
    "bandwidth_sweep",
    "builtin_scenario",
    "centroid_score",
    "classify",
    "classify_regime",
    "compute_constants",
    "cv_error",
    "decide",
    "estimate_population",
    "expansion_predict",
    "gaussian_scenario",
    "generate_dataset",
    "inner_product",
    "integrate",
    "local_linear_fit",
    "no_smoothing_interpolant",
    "oracle_qda_score",
    "plugin_bandwidth",
    "qda_score",
    "qda_terms",
    "run_experiment",
    "scaled_centroid_score",
    "score",
    "select_tuning",
    "smooth_with_plan",
]
