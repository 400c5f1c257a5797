"""Verification laboratory for one-dimensional dynamic thin-film debonding.

A damped wave equation on a growing interval, coupled to a Griffith flow rule
for the debonding front, is solved exactly along characteristics; closed-form
quasistatic evolutions, energy diagnostics, and convergence experiments make
the quasistatic limit and its initial jump measurable.
"""

from .dynamic_solver import (
    OracleResult,
    SimResult,
    Tracer,
    fd_oracle_solve,
    solve_coupled,
    tracer_solve,
)
from .energy_diagnostics import (
    BalanceReport,
    DecayReport,
    EnergySeries,
    GriffithReport,
    IntpartsReport,
    balance_residual,
    boundary_work_identity_check,
    compute_energies,
    decay_envelope_check,
    griffith_residuals,
)
from .errors import DebondError, NumericalError, PreconditionError, ValidationError
from .experiments import (
    JumpReport,
    SweepEntry,
    SweepReport,
    continuity_modulus,
    epsilon_sweep,
    initial_jump,
    verify_suite,
    write_csv,
    write_json,
)
from .front_kinematics import Front
from .model import (
    ConditionReport,
    InitialData,
    LoadingProfile,
    Problem,
    SimParams,
    ToughnessModel,
    check_conditions,
    initial_right_limit,
)
from .quasistatic import (
    GlobalStabilityReport,
    QsGriffithReport,
    QuasistaticEvolution,
    detect_jumps,
    quasistatic_displacement,
    quasistatic_front,
    quasistatic_front_ode,
    verify_energy_balance_qs,
    verify_global_stability,
    verify_quasistatic_griffith,
)

__version__ = "1.0.0"

__all__ = [
    "BalanceReport",
    "ConditionReport",
    "DebondError",
    "DecayReport",
    "EnergySeries",
    "Front",
    "GlobalStabilityReport",
    "GriffithReport",
    "InitialData",
    "IntpartsReport",
    "JumpReport",
    "LoadingProfile",
    "NumericalError",
    "OracleResult",
    "PreconditionError",
    "Problem",
    "QsGriffithReport",
    "QuasistaticEvolution",
    "SimParams",
    "SimResult",
    "SweepEntry",
    "SweepReport",
    "ToughnessModel",
    "Tracer",
    "ValidationError",
    "balance_residual",
    "boundary_work_identity_check",
    "check_conditions",
    "compute_energies",
    "continuity_modulus",
    "decay_envelope_check",
    "detect_jumps",
    "epsilon_sweep",
    "fd_oracle_solve",
    "griffith_residuals",
    "initial_jump",
    "initial_right_limit",
    "quasistatic_displacement",
    "quasistatic_front",
    "quasistatic_front_ode",
    "solve_coupled",
    "tracer_solve",
    "verify_energy_balance_qs",
    "verify_global_stability",
    "verify_quasistatic_griffith",
    "verify_suite",
    "write_csv",
    "write_json",
    "__version__",
]
