"""Edge sign prediction in signed directed social networks.

Library layout:

* :mod:`edgesign.graph` — signed digraph container, ingestion, splits
* :mod:`edgesign.features` — trollness/trustworthiness, regularity measures
* :mod:`edgesign.reduction` — edge-to-node transforms and cutsize
* :mod:`edgesign.genmodel` — generative label model, priors, oracle rule
* :mod:`edgesign.batch` — batch predictors (blc, logreg, lprop, unreg)
* :mod:`edgesign.online` — sequential predictor and lower-bound adversary
* :mod:`edgesign.metrics` — confusion counts, MCC, accuracy
* :mod:`edgesign.harness` — sweeps, repetitions, reports
* :mod:`edgesign.cli` — command-line frontend
"""

from .graph import EdgeSplit, NodeStats, SignedDigraph, degree_stats, load_edge_list, sample_split
from .features import RegularityReport, TrollTrust, psi2, psi_g, regularity_report, troll_trust
from .reduction import GPrime, GSecond, cutsize, to_gprime, to_gsecond
from .genmodel import (BetaPrior, GenParams, TwoPointPrior, UniformPrior, bayes_predict,
                       eq1_rates, make_synthetic, sample_labels, sample_params)
from .batch import (BlcModel, LogRegModel, LpOptions, LpState, Prediction, UnregOptions,
                    blc_fit, blc_predict, blc_predict_split, logreg_fit,
                    logreg_predict_split, lp_predict, lp_run, ml_gradient,
                    tune_threshold, unreg_predict, unreg_solve)
from .online import (AdversarySequence, OnlineReport, OnlineState,
                     adversary_expected_mistakes, adversary_generate, mistake_bound,
                     online_init, online_predict, online_update, run_online)
from .metrics import ConfusionCounts, accuracy, confusion, mcc
from .harness import ExperimentReport, ExperimentSpec, SyntheticSpec, paired_t_test, run_experiment

__version__ = "0.1.0"
