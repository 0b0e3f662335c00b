"""Asynchronous maximum dynamics on directed graphs.

Each round a uniformly random vertex takes the maximum value among its
out-neighbours.  The package simulates the process, analyses it exactly via
its chain of possible valuations, estimates convergence times by Monte Carlo
and computes the graph parameters the convergence bounds depend on.
"""
from .errors import (BudgetExceeded, CapExceeded, InvalidGraph, InvalidValuation,
                     MaxDynError, NonAbsorbingReachability, NotStronglyConnected,
                     NotUndirected)
from .graph import (DirectedGraph, SccDecomposition, boundary, dual, from_edge_list,
                    generate, is_strongly_connected, k_boundary_partition, scc)
from .valuation import (canonicalize, constant, enumerate_canonical, max_value,
                        order_equivalent)
from .dynamics import (RngStream, Trajectory, constructive_schedule, derive_seed,
                       is_absorbing, max_min_chain, random_step, simulate, step,
                       strong_cycle_set, strong_edge_set)
from .markov import (ChainModel, HittingTimeReport, absorbing_components, build_chain,
                     exact_convergence_time, period, verify_path_to_constant,
                     worst_case_convergence_time)
from .params import (ParamReport, bound_report, gamblers_ruin_closed, gamblers_ruin_solve,
                     harmonic, orbit, vertex_expansion_in, vertex_expansion_out)
from .estimator import (McReport, concentration_check, coupling_trial, empirical_worst_case,
                        mc_convergence, scaling_study)

__all__ = [
    "BudgetExceeded", "CapExceeded", "InvalidGraph", "InvalidValuation", "MaxDynError",
    "NonAbsorbingReachability", "NotStronglyConnected", "NotUndirected", "DirectedGraph",
    "SccDecomposition", "boundary", "dual", "from_edge_list", "generate",
    "is_strongly_connected", "k_boundary_partition", "scc", "canonicalize", "constant",
    "enumerate_canonical", "max_value", "order_equivalent", "RngStream", "Trajectory",
    "constructive_schedule", "derive_seed", "is_absorbing", "max_min_chain", "random_step",
    "simulate", "step", "strong_cycle_set", "strong_edge_set", "ChainModel",
    "HittingTimeReport", "absorbing_components", "build_chain", "exact_convergence_time",
    "period", "verify_path_to_constant", "worst_case_convergence_time", "ParamReport",
    "bound_report", "gamblers_ruin_closed", "gamblers_ruin_solve", "harmonic", "orbit",
    "vertex_expansion_in", "vertex_expansion_out", "McReport", "concentration_check",
    "coupling_trial", "empirical_worst_case", "mc_convergence", "scaling_study",
]

__version__ = "0.1.0"
