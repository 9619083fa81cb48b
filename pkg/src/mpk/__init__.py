"""Metaplectic operators, symplectic factorizations and the uncertainty constant mu."""

from .errors import MpkError
from .symplectic import (
    ABCFormData,
    FreeFormData,
    SymplecticMatrix,
    factor_abc,
    factor_free,
    factor_two_free,
    is_symplectic,
    make_lambda_plq,
    make_xi_abc,
    mu_of_symplectic,
    mu_report,
)
from .metaplectic import (
    Chirp,
    Dilation,
    FreeFactor,
    FreqChirp,
    MetaplecticWord,
    NormalizedFourier,
    canonical_phase,
    psi_word,
    word,
)

__version__ = "0.1.0"
