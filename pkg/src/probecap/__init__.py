"""Cost-capacity solvers for channels whose state is acquired by costly probing."""

__version__ = "0.1.0"

from .blahut import InfeasibleBudget, capacity_cost
from .continuous import (DirtyPaperParams, FadingParams, GaussianMixture, bound_curve,
                         dirty_paper_lower, fading_lower, mixture_differential_entropy)
from .curves import (SweepCurve, cutoff_point, parse_grid, sweep, time_sharing_baseline,
                     upper_concave_envelope)
from .model import (CostTable, InputConstraint, ProbingModel, StrategyPair, build_example1,
                    build_example2, build_example3, build_observe_or_not, build_two_sided,
                    example1_two_sided, joint_thm1, joint_thm2, joint_thm3, joint_thm4)
from .modelfile import ModelFileError, format_model, load_model, parse_model
from .montecarlo import CodecConfig, empirical_cmi, rate_split_codec, sample_joint
from .noncausal import evaluate_thm2, solve_thm2_lower
from .probability import (Alphabet, CondKernel, JointTable, ProbDist,
                          conditional_mutual_information, entropy, mutual_information)
from .results import SolveResult, SolverOptions
from .strategies import blahut_arimoto_constrained, solve_thm3, solve_thm4
from .thm1 import grid_oracle_thm1, solve_thm1
