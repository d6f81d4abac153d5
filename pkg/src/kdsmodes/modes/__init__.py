"""Reduced operator, quasinormal-mode solver, separated oracle and analyticity fits."""

from .analyticity import (DecayFit, GridFunction, analyticity_fit, bernstein_rho, certify_mode,
                          decay_fit, eigenfunction, runge_function, smooth_bump)
from .assembly import (ModeProblem, SpectralGrid, WaveOperatorSpec, angular_operator,
                       assemble_reduced_operator, conservative_pencil, densitized_dual,
                       misner_pencil)
from .oracle import SeparatedPencil, separated_oracle, separated_pencil
from .solve import QnmResult, Window, companion_eigs, mode_residual, polish, qnm_solve

__all__ = [
    "DecayFit", "GridFunction", "ModeProblem", "QnmResult", "SeparatedPencil", "SpectralGrid",
    "WaveOperatorSpec", "Window", "analyticity_fit", "angular_operator",
    "assemble_reduced_operator", "bernstein_rho", "certify_mode", "companion_eigs",
    "conservative_pencil", "decay_fit", "densitized_dual", "eigenfunction", "misner_pencil",
    "mode_residual", "polish", "qnm_solve", "runge_function", "separated_oracle",
    "separated_pencil", "smooth_bump",
]
