"""
tfnp - exact solvers for total search problems and fixed points

Local search (Hopfield networks, congestion games), path following
(Lemke-Howson, Sperner, Scarf), stochastic games (Shapley, simple
stochastic, mean-payoff, parity) and least fixed points of monotone
polynomial systems, all over exact rationals with checkable certificates.
"""

from .circuits import (
    AlgebraicCircuit,
    CircuitBuilder,
    DomainSpec,
    circuit_eval,
    export_nash_circuit,
    format_circuit,
    is_linear_circuit,
    parse_circuit,
    validate_self_map,
)
from .config import DEFAULT_LIMITS, Limits
from .core import RationalMatrix, format_rational, parse_rational, rational_reconstruct, solve_linear_system
from .decide import SLPCircuit, posslp_decide, sqrt_sum_compare
from .errors import TfnpError
from .instances import emit_instance, parse_instance
from .lemke_howson import lemke_howson
from .lfp import (
    SCFG,
    BranchingProcess,
    MonotonePolySystem,
    bp_to_system,
    extinction_report,
    kleene_lfp,
    newton_lfp,
    scfg_to_system,
)
from .local_search import (
    CongestionGame,
    HopfieldNet,
    congestion_converge,
    hopfield_converge,
    hopfield_potential,
    hopfield_to_game,
    node_stability,
    pure_nash_check,
    rosenthal_potential,
)
from .lp import LinearProgram, lp_optimize, matrix_game_value
from .market import ExchangeEconomy, market_equilibrium_weak
from .mean_payoff import (
    MeanPayoffGame,
    ParityGame,
    brute_force_positional,
    mpg_decision,
    mpg_solve,
    parity_to_mpg,
    parity_winner,
)
from .normal_form import (
    MixedProfile,
    NormalFormGame,
    epsilon_nash_check,
    expected_payoff,
    gain,
    nash_map,
    support_enumeration_nash,
)
from .results import emit_result
from .runner import RunOptions, run
from .shapley import ShapleyGame, shapley_operator, shapley_solve
from .simplicial import SpernerInstance, brute_force_sperner, scarf_weak_fixpoint, sperner_solve
from .ssg import SimpleStochasticGame, certify_ssg, ssg_decision, ssg_operator, ssg_solve

__all__ = [
    # exact core
    "RationalMatrix",
    "parse_rational",
    "format_rational",
    "solve_linear_system",
    "rational_reconstruct",
    "LinearProgram",
    "lp_optimize",
    "matrix_game_value",
    "sqrt_sum_compare",
    "SLPCircuit",
    "posslp_decide",
    # games
    "NormalFormGame",
    "MixedProfile",
    "expected_payoff",
    "gain",
    "nash_map",
    "epsilon_nash_check",
    "support_enumeration_nash",
    "lemke_howson",
    # local search
    "HopfieldNet",
    "hopfield_potential",
    "node_stability",
    "hopfield_converge",
    "hopfield_to_game",
    "CongestionGame",
    "rosenthal_potential",
    "congestion_converge",
    "pure_nash_check",
    # circuits and fixed points
    "AlgebraicCircuit",
    "CircuitBuilder",
    "DomainSpec",
    "parse_circuit",
    "format_circuit",
    "circuit_eval",
    "export_nash_circuit",
    "validate_self_map",
    "is_linear_circuit",
    "SpernerInstance",
    "sperner_solve",
    "brute_force_sperner",
    "scarf_weak_fixpoint",
    "ExchangeEconomy",
    "market_equilibrium_weak",
    # stochastic games
    "ShapleyGame",
    "shapley_operator",
    "shapley_solve",
    "SimpleStochasticGame",
    "ssg_operator",
    "ssg_solve",
    "ssg_decision",
    "certify_ssg",
    "MeanPayoffGame",
    "ParityGame",
    "mpg_solve",
    "mpg_decision",
    "parity_to_mpg",
    "parity_winner",
    "brute_force_positional",
    # least fixed points
    "BranchingProcess",
    "SCFG",
    "MonotonePolySystem",
    "bp_to_system",
    "scfg_to_system",
    "kleene_lfp",
    "newton_lfp",
    "extinction_report",
    # documents and dispatch
    "parse_instance",
    "emit_instance",
    "emit_result",
    "RunOptions",
    "run",
    "Limits",
    "DEFAULT_LIMITS",
    "TfnpError",
]
