"""Least energy solutions of fractional (p,q)-Laplacian problems on grids.

Numerical study of the sup-norm-coupled energy

    E_mu(u) = (1/p) [u]_{alpha,p}^p + (1/q) [u]_{beta,q}^q - (mu/p) ||u||_oo^p

on grid-discretized planar domains, together with the large-p asymptotics
(distance-cone limit profiles, eigenvalue limits, Holder extremality) and a
viscosity-equation residual check for the limit PDE.
"""

from .asymptotics import (
    LimitPrediction,
    SweepConfig,
    SweepTable,
    distance_bound_check,
    predict_limits,
    run_sweep,
)
from .domain import (
    Disk,
    GridDomain,
    GridFunction,
    LShape,
    MaskShape,
    Rectangle,
    build_domain,
    cone_function,
    distance_transform,
    load_mask,
)
from .energy import (
    EnergySpec,
    argmax_set,
    energy_eval,
    energy_grad,
    gateaux_supnorm_check,
    lr_norm,
    nehari_project,
    rayleigh_min,
)
from .seminorm import (
    FracParams,
    gagliardo,
    holder_seminorm,
    pairing,
    pointwise_Lsm,
    upper_lower_slope,
)
from .solver import (
    SolveResult,
    SolverOpts,
    solve_least_energy,
    stationarity_residual,
)
from .viscosity import (
    SlopeTable,
    ViscosityReport,
    limit_residual,
    slope_limit_check,
)

__version__ = "0.1.0"

__all__ = [
    "Disk",
    "Rectangle",
    "LShape",
    "MaskShape",
    "GridDomain",
    "GridFunction",
    "build_domain",
    "cone_function",
    "distance_transform",
    "load_mask",
    "FracParams",
    "gagliardo",
    "pairing",
    "pointwise_Lsm",
    "holder_seminorm",
    "upper_lower_slope",
    "EnergySpec",
    "energy_eval",
    "energy_grad",
    "lr_norm",
    "argmax_set",
    "gateaux_supnorm_check",
    "nehari_project",
    "rayleigh_min",
    "SolverOpts",
    "SolveResult",
    "solve_least_energy",
    "stationarity_residual",
    "SweepConfig",
    "LimitPrediction",
    "SweepTable",
    "predict_limits",
    "run_sweep",
    "distance_bound_check",
    "ViscosityReport",
    "SlopeTable",
    "limit_residual",
    "slope_limit_check",
    "__version__",
]
