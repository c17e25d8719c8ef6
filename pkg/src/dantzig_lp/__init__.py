"""Column and constraint generation solvers for Dantzig-selector-type problems."""
from ._kernels import BACKEND
from .basis_pursuit import BpOptions, BpSolution, bp_init_columns, full_bp, solve_bp
from .dantzig import (DantzigSolution, DSOptions, full_lp, solve_ds, solve_ds_path,
                      violation_scan_columns, violation_scan_constraints)
from .errors import (DantzigLPError, DegenerateColumn, DimensionMismatch, EmptyGrid,
                     InitInfeasible, InvalidAnchor, InvalidBound, NonFiniteInput,
                     NumericalFailure, PowerMethodDivergence)
from .fused_dantzig import (FusedOptions, build_fused_model, check_fused_constraints,
                            price_fused_columns, projected_data, solve_fused_regression,
                            solve_fused_signal)
from .fused_prox import fista_fused, fused_dp, power_method, prox_theta
from .generation import GenerationOptions, TraceRecord
from .lasso import LassoFit, active_sets, lasso_fit, lasso_path, soft_threshold
from .simplex import Basis, LpModel, LpSolution, Status, build_model, solve

__version__ = "0.1.0"
