"""Tensor-train algebra, cross interpolation and the AMEn linear solver."""
from .core import (
    TTMatrix,
    TTTensor,
    apply_tt,
    full,
    truncation_rank,
    tt_add,
    tt_dot,
    tt_embed,
    tt_from_full,
    tt_matrix_from_kron,
    tt_mode_product,
    tt_norm,
    tt_random,
    tt_rank1,
    tt_round,
    tt_scale,
    tt_zeros,
)
from .cross import CrossConfig, CrossResult, grid_oracle, maxvol, tt_cross
from .amen import AmenConfig, AmenResult, amen_solve, tt_residual
from .io import load_tt, save_tt
