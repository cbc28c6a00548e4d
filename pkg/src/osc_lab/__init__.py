"""Averaging functionals of step functions on [0, 1]: V_c, V and W,
BMO norms and A2 characteristics, decreasing rearrangement, and the
Bellman-function tools used to test rearrangement inequalities."""

from .errors import DomainError, EvaluationError, PreconditionError
from .steps import (UNIT, Interval, Segment, StepFunction, average_of, from_json, range_on,
                    restrict, to_json)
from .weights import (ConvexWeight, cosh_weight, custom, exp_weight, parse_weight, power,
                      regularized)
from .functionals import (DEFAULT_CONFIG, FunctionalResult, OptimizerConfig, SupremumResult,
                          big_v, big_w, grid_oracle_w, minimize_c, optimal_constant, v_c)
from .transforms import (LipschitzPL, compose_lipschitz, concatenate, phi_from_weight,
                         rearrange_decreasing, regularized_weight, truncate, weight_from_phi)
from .classes import (A2Report, NormReport, a2_char_classic, a2_char_inf, a2_report,
                      bmo_norm_classic, bmo_norm_inf, norm_report, verify_rearrangement)
from .bellman import (BellmanParams, SplitResult, concavity_check, corollary_check,
                      dichotomy_check, g_value, local_limit_check, simulate_induction,
                      split_search)
from .records import CampaignRecord

__version__ = "0.1.0"
