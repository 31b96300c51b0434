"""Minimal extrapolations of measures from finitely many Fourier coefficients."""

from .measures import (
    DiscreteMeasure,
    FrequencySet,
    SpectralData,
    TorusPoint,
    TrigPolynomial,
    fourier_transform,
    tv_norm,
)

__all__ = [
    "DiscreteMeasure",
    "FrequencySet",
    "SpectralData",
    "TorusPoint",
    "TrigPolynomial",
    "fourier_transform",
    "tv_norm",
]
__version__ = "0.1.0"
