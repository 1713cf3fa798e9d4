"""Numerics for the reduced two-state nonlinear quantum system.

Coupled (x, y) dynamics, their Liénard and Levinson-Smith second-order
forms, Jacobi elliptic functions, closed-form solution families, equilibrium
classification, and the last-multiplier first integral.
"""
from .dynamics import IntegratorConfig, SystemForm, integrate, rhs_coupled, rhs_levinson_x, rhs_lienard_y
from .elliptic import EllipticTriple, complete_K, jacobi_sncndn
from .equilibria import EquilibriumReport, classify, find_equilibria
from .errors import (
    ConvergenceError,
    DomainError,
    InadmissibleError,
    IntegrationError,
    NLQMError,
    SingularityError,
    TurningPointError,
)
from .params import ModelParams, PhaseState, Trajectory, ValidationReport, validate_params
from .solutions import (
    ResidualReport,
    SolutionFamily,
    eval_abel_solution,
    eval_sn_family,
    eval_soliton,
    verify_residual,
)
from .transforms import (
    FirstIntegral,
    abel_rhs,
    bernoulli_rhs,
    first_integral,
    level_surface_time,
    pdm_mass,
    pdm_potential,
)

__version__ = "0.1.0"
