"""Independent numerical oracles: sampled grids and truncated Hermite bases."""

from .grid import (
    GridFunction,
    PhaseSymmetry,
    PhaseTranslation,
    WignerGrid,
    apply_elementary_grid,
    apply_factor_grid,
    apply_free_factor_grid,
    apply_word_grid,
    axis_points,
    dual_half_width,
    grid_fourier,
    variance_grid,
    weyl_kernel_matrix,
    wigner_grid,
)
from .hermite import (
    GroundEnergy,
    HermiteOperator,
    PartialMinReport,
    QuadraticSymbol,
    ground_energy,
    hermite_functions,
    position_momentum,
    slice_symbol,
    hcw_symbol,
    partial_min_check,
    weyl_quadratic_hermite,
)
