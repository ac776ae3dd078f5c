"""Relaxed Douglas-Rachford and Peaceman-Rachford splitting for pairs of
maximally monotone operators, including the inconsistent case."""

from .analysis import (
    DisplacementEstimate,
    NoConvergenceError,
    NormalSolution,
    cyclic_monotonicity_search,
    estimate_displacement,
    monotonicity_certificate,
    scaling_law_check,
    solve_shifted_fixed_point,
    translation_identity_check,
)
from .geometry import Ball, Box, Halfspace, Line, apply_matrix, project, rotation
from .operators import (
    ResolventOperator,
    SkewLinearSpec,
    inverse_resolvent,
    prox_box_indicator,
    prox_quadratic_on_line,
    reflected,
    resolvent_linear_halfspace,
    resolvent_rotation_ball,
    resolvent_shifted_ball_normal,
    resolvent_skew_linear,
)
from .scenarios import ScenarioReference, ScenarioSpec, build_scenario, preset_line_box, preset_two_balls
from .splitting import DivergenceError, IterationTrace, SplittingOperator, StopRule, evaluate_T, iterate

__version__ = "0.1.0"
