"""Joint reconstruction of an image and its system matrix.

Minimizes a multi-penalty Tikhonov functional that combines a noisy
high-resolution operator model with exact low-resolution calibration data,
using alternating regularized Kaczmarz sweeps.
"""

from ._backend import BACKEND
from .errors import (ConfigError, ContractError, DegenerateHyperplaneError,
                     EmptySelectionError, FormatError, ParameterDomainError)
from .image import CSolveReport, c_sweep, solve_c
from .joint import JointHistory, JointSolveError, convergence_check, solve_joint
from .kaczmarz import (AugmentedRowState, project_hyperplane, project_nonneg,
                       regularized_row_update, soft_threshold, solve_regularized_lsq)
from .metrics import SsimOptions, data_residual, empirical_rate, l2_error, ssim_1d
from .model import (KaczmarzSchedule, ProblemInstance, ProjectionMap, RegParams,
                    ScalarField, map_paper_params, validate_instance)
from .operators import (FunctionalValue, apply_forward, apply_projection, eval_c_objective,
                        eval_joint, eval_s_objective)
from .system import SSolveState, s_sweep_by_c, s_sweep_by_calib, solve_s
from .testbed import (NoiseSpec, PhantomSpec, build_projection_map, build_true_operator,
                      generate_instance, make_phantom, perturb_gaussian)

__version__ = "0.1.0"
