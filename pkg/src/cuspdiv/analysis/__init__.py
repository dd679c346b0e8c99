"""Discrete verification layer for the 2D cusp profile: graded meshes,
Stokes inf-sup and Korn eigenvalue studies, and the pressure counterexample."""

from .counterexample import counterexample_report, lr_exponent_threshold
from .korn import korn_constant, lifted_korn_transfer_check, DEFAULT_BALL
from .mesh import GradedMesh, build_graded_mesh
from .stokes import DiscreteSaddle, assemble_stokes, inf_sup_constant

__all__ = [
    "GradedMesh", "build_graded_mesh", "DiscreteSaddle", "assemble_stokes",
    "inf_sup_constant", "korn_constant", "lifted_korn_transfer_check",
    "DEFAULT_BALL", "counterexample_report", "lr_exponent_threshold",
]
