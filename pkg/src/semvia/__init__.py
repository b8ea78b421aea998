"""Sampling policies and timeliness metrics for a binary Markov source observed over an erasure channel.

Layers: closed forms (:mod:`semvia.analytic`), a brute-force chain solver
(:mod:`semvia.oracle`), a seeded Monte Carlo engine (:mod:`semvia.sim`) and
constrained sampling optimization (:mod:`semvia.optimizer`).
"""
from .analytic import AnalyticReport, analytic_report
from .errors import (
    DegenerateOptimum,
    DivergentSeries,
    DomainError,
    NoConvergence,
    NotIrreducible,
    TruncationTooSmall,
)
from .model import ChannelParams, SourceParams
from .optimizer import CostBudget, OptProblem, OptResult, q_star_equal, solve
from .policies import MRS, RS, ChangeAware, Policy, SemanticsAware
from .sim import MetricsSummary, SimConfig, run, run_many

__all__ = [
    "AnalyticReport", "analytic_report",
    "DegenerateOptimum", "DivergentSeries", "DomainError", "NoConvergence", "NotIrreducible", "TruncationTooSmall",
    "ChannelParams", "SourceParams",
    "CostBudget", "OptProblem", "OptResult", "q_star_equal", "solve",
    "MRS", "RS", "ChangeAware", "Policy", "SemanticsAware",
    "MetricsSummary", "SimConfig", "run", "run_many",
]
__version__ = "0.1.0"
