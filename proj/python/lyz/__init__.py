"""Log-concave functions, their LYZ ellipsoids and related functionals."""

import json

from ._lyz import (
    ConvexBody,
    ConvexFunction,
    DegenerateError,
    DomainError,
    NonDifferentiable,
    NotIntegrable,
    ParseError,
    compose,
    fenchel_young_gap,
    first_variation,
    inf_convolution,
    legendre_conjugate,
    lyz_body_ellipsoid,
    lyz_matrix,
    petty_chain,
    projection_support,
    run_criterion_json,
    scalar_right_mult,
    solve_slog,
    total_mass,
)


def run_criterion(criterion_id, seed=42):
    """Run one verification criterion and return its report as a dict."""
    return json.loads(run_criterion_json(criterion_id, seed))


__all__ = [
    "ConvexBody",
    "ConvexFunction",
    "DegenerateError",
    "DomainError",
    "NonDifferentiable",
    "NotIntegrable",
    "ParseError",
    "compose",
    "fenchel_young_gap",
    "first_variation",
    "inf_convolution",
    "legendre_conjugate",
    "lyz_body_ellipsoid",
    "lyz_matrix",
    "petty_chain",
    "projection_support",
    "run_criterion",
    "scalar_right_mult",
    "solve_slog",
    "total_mass",
]
