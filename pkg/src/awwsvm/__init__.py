"""Linear soft-margin SVM training with distance-adaptive sample weighting.

Per-sample weights are generated from each sample's distance to the current
hyperplane and refreshed between optimizer phases; wrong-side samples can be
eliminated as noise. Three stochastic solvers are provided (SGD, online BFGS,
online Nesterov-accelerated quasi-Newton) plus imbalance-aware metrics and a
Friedman/Nemenyi cross-method comparison.
"""

from .data import (Dataset, MinibatchSampler, ParseError, Sample, imbalance_ratio,
                   load_libsvm, minmax_scale, parse_libsvm, save_libsvm, split,
                   synth_two_gaussians, to_libsvm)
from .metrics import ConfusionMatrix, EvalReport, confusion, confusion_from_predictions, report
from .model import (DegenerateModelError, LinearModel, decide, decision_values,
                    load_model, margin, predict, raw_score, save_model, signed_distance)
from .objective import ObjectiveConfig, WeightMode, loss, subgradient
from .optimizers import (CURVATURE_FLOOR, QuasiNewtonState, ScheduleKind, StepSchedule,
                         bfgs_inverse_update, obfgs_step, onaq_step, sgd_step)
from .stats import (NEMENYI_Q_05, RankTable, chi2_sf, friedman, nemenyi_cd, nemenyi_q,
                    pairwise_significance, rank_rows)
from .trainer import (ExperimentResults, HistoryRecord, Optimizer, RESULTS_COLUMNS,
                      TrainConfig, TrainHistory, TrainingError, run_experiment, train)
from .weighting import (NoiseMode, WeightState, aw_raw, aw_value, detect_noise,
                        init_weights, update_weights)

__version__ = "0.1.0"
