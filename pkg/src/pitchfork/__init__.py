"""Pitchfork bifurcation toolkit for planar vector fields.

Covers the normal form ``x' = y^2 - a y - x, y' = x^2 - a x - y``, the
genetic toggle switch and a one-dimensional reference pitchfork.
"""
__version__ = "0.1.0"

from .bifurcation import (
    Branch,
    PitchforkVerdict,
    assemble_branches,
    classify_pitchfork,
    detect_bifurcation,
    family,
    isocline_sample,
    param_grid,
    sweep,
    tangency_check,
)
from .equilibria import EquilibriumPoint, NewtonFailure, closed_form_equilibria, find_equilibria, newton_refine
from .fields import MODEL_IDS, Box, DomainError, Model, ModelError, jacobian_analytic, jacobian_fd, make_model
from .flow import converges_to, integrate, uniformity_probe
from .index import IndexReport, boundary_inward_check, ph_index_sum, verify_ph, winding_degree
from .stability import Classification, Spectrum, classify, complex_transition_threshold, spectrum
from .toggle import correspondence_residual, taylor_coefficients, taylor_field, unique_equilibrium_check
