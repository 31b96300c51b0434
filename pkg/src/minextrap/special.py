"""Closed-form measures behind the non-generic examples.

Discrete families with prescribed low-order coefficients, the projection
extrapolation that beats a pair of nearby Diracs, Fourier coefficients of the
middle-1/q Cantor measure, and surface measures on lines in T^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .measures import DiscreteMeasure, FrequencySet, SpectralData, TWO_PI_I, as_frequency, grid_points


def nu_family_1d(y: float, K: int) -> DiscreteMeasure:
    """``(2/K) sum_k delta_{y + k/K}``; coefficients vanish off multiples of K."""
    if K < 2:
        raise ValueError("K must be at least 2")
    k = np.arange(K)
    return DiscreteMeasure(y + k / K, np.full(K, 2.0 / K), d=1)


def nu_family_2d(y: float, K: int) -> DiscreteMeasure:
    """``(2/K) sum_k delta_{(y + k/K, 1 - y - k/K)}``, atoms on the line x1 + x2 = 1."""
    if K < 2:
        raise ValueError("K must be at least 2")
    t = y + np.arange(K) / K
    return DiscreteMeasure(np.stack([t, 1 - t], axis=1), np.full(K, 2.0 / K), d=2)


def projection_density(data: SpectralData):
    """The trigonometric polynomial ``sum_m data(m) e(m . x)`` as a callable."""
    from .measures import TrigPolynomial

    return TrigPolynomial(data.freqs, data.values)


def projection_extrapolation_norm(data: SpectralData, quadrature_points: int | None = None) -> float:
    """L1 norm of the density ``sum_m data(m) e(m . x)`` by the periodic trapezoid rule.

    The density times Lebesgue measure reproduces ``data`` on Lambda, so its
    norm bounds epsilon from above.
    """
    low = 8 * max(1, data.freqs.max_abs())
    n = quadrature_points or max(low, 4096 if data.d == 1 else 256)
    if n < low:
        raise ValueError(f"need at least {low} quadrature points per axis")
    f = projection_density(data)
    vals = f(grid_points(n, data.d))
    return float(np.mean(np.abs(vals)))


@dataclass(frozen=True)
class CantorParams:
    q: int
    K: int = 40

    def __post_init__(self):
        if self.q < 3:
            raise ValueError("q must be at least 3")
        if self.K < 1:
            raise ValueError("truncation K must be positive")


def cantor_fourier(params: CantorParams, m: int, with_bound: bool = False):
    """Truncated product ``(-1)^m prod_{k<=K} cos(pi m q^{-k} (1 - q))``.

    Angles are reduced modulo ``2 pi`` in exact rational arithmetic, so
    ``m = q^n`` gives bitwise-identical results for every ``n``.  With
    ``with_bound`` the pair ``(value, tail_bound)`` is returned where
    ``tail_bound = sum_{k>K} pi |m| (q-1) q^{-k}``.
    """
    q, K = params.q, params.K
    m = int(m)
    val = -1.0 if m % 2 else 1.0
    for k in range(1, K + 1):
        # angle / pi = m (1 - q) / q^k, reduced mod 2
        r = Fraction(m * (1 - q), q**k) % 2
        val *= math.cos(math.pi * float(r))
    if not with_bound:
        return val
    bound = math.pi * abs(m) * (q - 1) * q ** (-K) / (q - 1)
    return val, bound


def cantor_spectral_data(params: CantorParams, freqs: FrequencySet) -> SpectralData:
    return SpectralData(freqs, [cantor_fourier(params, m[0]) for m in freqs])


def surface_fourier_diagonal(m) -> float:
    """Coefficients of sqrt(2) times arc length on {x1 + x2 = 1}: ``2 [m1 == m2]``."""
    m1, m2 = as_frequency(m, 2)
    return 2.0 if m1 == m2 else 0.0


def surface_fourier_two_lines(m) -> float:
    """Coefficients of arc length on {x2 = 0} plus {x2 = 1/2}."""
    m1, m2 = as_frequency(m, 2)
    return float(m1 == 0) * (1 + (-1) ** m2)


def surface_data(fn, freqs: FrequencySet) -> SpectralData:
    return SpectralData(freqs, [fn(m) for m in freqs])


def nu_family_coefficient(y: float, K: int, m: int) -> complex:
    """Closed form of the 1-d family's coefficient: ``2 e(-m y)`` when K | m, else 0."""
    return 2 * np.exp(-TWO_PI_I * m * y) if m % K == 0 else 0j
