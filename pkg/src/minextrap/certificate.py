"""Dual certificates: trigonometric polynomials on Lambda with sup-norm <= 1.

A certificate ``phi`` with ``<phi, mu> = epsilon`` interpolates the phase of
every minimal extrapolation on its support, so all minimal extrapolations
live in the zero set of the deficit ``Phi = 1 - |phi|^2``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .measures import (
    DiscreteMeasure,
    FrequencySet,
    SpectralData,
    TorusPoint,
    TrigPolynomial,
    grid_points,
)

VALIDATION_GRID_1D = 4096
VALIDATION_GRID_2D = 256


class CertificateError(ValueError):
    """A dual vector could not be turned into a valid certificate."""


class DegenerateCertificate(CertificateError):
    """``|phi| == 1`` everywhere: the certificate carries no support information."""


@dataclass(frozen=True, eq=False)
class Certificate:
    poly: TrigPolynomial
    sup_norm_bound: float
    pairing_value: complex

    @property
    def coefficients(self) -> dict:
        return dict(zip(self.poly.freqs, self.poly.coefficients))


@dataclass(frozen=True, eq=False)
class DeficitPolynomial:
    poly: TrigPolynomial

    def __call__(self, x) -> np.ndarray:
        return np.real(self.poly(x))


def validation_grid(d: int) -> int:
    return VALIDATION_GRID_1D if d == 1 else VALIDATION_GRID_2D


def sup_norm(f: TrigPolynomial, refinement: int | None = None) -> float:
    """Maximum of ``|f|`` over the grid ``{k/refinement}^d``."""
    n = refinement or validation_grid(f.d)
    return float(np.max(np.abs(f(grid_points(n, f.d)))))


def spectral_pairing(f: TrigPolynomial, data: SpectralData) -> complex:
    """``<f, mu>`` computed from the data alone, ``sum_m c_m conj(mu_hat(m))``."""
    return complex(sum(c * np.conj(data[m]) for m, c in zip(f.freqs, f.coefficients)
                       if m in data.freqs))


def certificate_from_dual(dual_vector, freqs: FrequencySet, data: SpectralData,
                          epsilon: float, tol: float = 1e-3,
                          refinement: int | None = None) -> Certificate:
    """Normalize a solver dual vector into a certificate.

    The polynomial is rescaled so its measured sup-norm is at most one and
    rotated so that the pairing with the data is real and positive.  A
    certificate whose pairing falls below ``epsilon * (1 - tol)`` is rejected.
    """
    if epsilon <= 0 or data.sup_norm() == 0:
        raise CertificateError("zero data: every polynomial pairs to 0, nothing to certify")
    phi = TrigPolynomial(freqs, dual_vector)
    return _finalize(phi, data, epsilon, tol, refinement)


def _finalize(phi, data, epsilon, tol, refinement) -> Certificate:
    s = sup_norm(phi, refinement)
    if s == 0:
        raise CertificateError("zero dual vector")
    phi = phi.scale(1.0 / max(s, 1.0))
    pairing = spectral_pairing(phi, data)
    if abs(pairing) > 0:
        phi = phi.scale(abs(pairing) / pairing)
    pairing = spectral_pairing(phi, data)
    if pairing.real < epsilon * (1 - tol):
        raise CertificateError(
            f"pairing {pairing.real:.9g} below epsilon {epsilon:.9g} (tolerance {tol:g})")
    return Certificate(phi, min(s, 1.0), pairing)


def polish_certificate(freqs: FrequencySet, atoms: DiscreteMeasure, data: SpectralData,
                       epsilon: float, tol: float = 1e-3,
                       refinement: int | None = None) -> Certificate:
    """Certificate interpolating the phases of ``atoms`` with ``|phi|`` stationary there.

    Solves the real-linear system ``phi(x_k) = w_k/|w_k|`` and
    ``Re(conj(s_k) grad phi(x_k)) = 0`` in the least-norm sense.  A grid dual
    is only bounded at grid points; this removes that slack when the support
    is known.
    """
    if len(atoms) == 0:
        raise CertificateError("no atoms to interpolate")
    d = freqs.d
    E = np.exp(2j * np.pi * atoms.points @ freqs.elements.T)  # phi(x_k) = E @ c
    s = atoms.weights / np.abs(atoms.weights)
    rows, rhs = [], []
    # real-linear unknowns (Re c, Im c)
    for k in range(len(atoms)):
        row = E[k]
        rows.append(np.concatenate([row.real, -row.imag]))
        rhs.append(s[k].real)
        rows.append(np.concatenate([row.imag, row.real]))
        rhs.append(s[k].imag)
        for axis in range(d):
            g = 2j * np.pi * freqs.elements[:, axis] * row * np.conj(s[k])
            rows.append(np.concatenate([g.real, -g.imag]))
            rhs.append(0.0)
    sol, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(rhs), rcond=None)
    J = len(freqs)
    coef = sol[:J] + 1j * sol[J:]
    phi = TrigPolynomial(freqs, coef)
    if np.max(np.abs(phi(atoms.points) - s)) > 1e-6:
        raise CertificateError("phases of the atoms cannot be interpolated on Lambda")
    return _finalize(phi, data, epsilon, tol, refinement)


def deficit(phi: TrigPolynomial) -> DeficitPolynomial:
    """``Phi = 1 - |phi|^2`` by exact autocorrelation of the coefficients."""
    acc: dict[tuple, complex] = defaultdict(complex)
    el = phi.freqs.elements
    c = phi.coefficients
    for i in range(len(c)):
        for j in range(len(c)):
            acc[tuple(int(v) for v in el[i] - el[j])] -= c[i] * np.conj(c[j])
    zero = (0,) * phi.d
    acc[zero] += 1.0
    keys = sorted(acc)
    coef = {}
    for k in keys:
        neg = tuple(-v for v in k)
        # exact Hermitian symmetry: take the lexicographically larger key as master
        if k >= neg:
            coef[k] = acc[k]
            coef[neg] = np.conj(acc[k]) if k != neg else complex(acc[k].real)
    freqs = FrequencySet(keys, d=phi.d)
    return DeficitPolynomial(TrigPolynomial(freqs, [coef[k] for k in keys]))


def is_degenerate(phi: TrigPolynomial, tol: float = 1e-6) -> bool:
    """True iff ``phi`` is (within ``tol``) a unimodular multiple of one character."""
    mags = np.abs(phi.coefficients)
    near_one = np.abs(mags - 1.0) < tol
    return int(near_one.sum()) == 1 and bool(np.all(mags[~near_one] < tol))


def _laurent_values(coef: np.ndarray, D: int, x: np.ndarray, order: int = 0) -> np.ndarray:
    k = np.arange(-D, D + 1)
    w = (2j * np.pi * k) ** order
    return np.real(np.exp(2j * np.pi * np.outer(x, k)) @ (w * coef))


def support_from_certificate_1d(phi: TrigPolynomial, tol: float = 1e-6,
                                dedup_tol: float = 1e-7) -> list[TorusPoint]:
    """Points where ``|phi| = 1``, via the roots of the deficit on the unit circle."""
    if phi.d != 1:
        raise ValueError("one-dimensional certificates only")
    if is_degenerate(phi):
        raise DegenerateCertificate("|phi| == 1 on the whole torus")
    Phi = deficit(phi).poly
    D = Phi.freqs.max_abs()
    if D == 0:
        return []
    coef = np.array([Phi[(k,)] for k in range(-D, D + 1)])
    if np.max(np.abs(coef)) < 1e-14:
        raise DegenerateCertificate("deficit vanishes identically")
    # z^D * Phi(z) as an ordinary polynomial; numpy.roots wants the highest degree first
    roots = np.roots(coef[::-1])
    on_circle = roots[np.abs(np.abs(roots) - 1.0) < tol]
    xs = np.mod(np.angle(on_circle) / (2 * np.pi), 1.0)
    # one Newton step on Phi' = 0 restores the digits lost at double roots
    d1 = _laurent_values(coef, D, xs, 1)
    d2 = _laurent_values(coef, D, xs, 2)
    safe = np.abs(d2) > 1e-12
    xs = np.where(safe, xs - np.where(safe, d1 / np.where(safe, d2, 1.0), 0.0), xs)
    xs = np.mod(xs, 1.0)
    xs = np.sort(np.where(xs > 1.0 - 1e-12, 0.0, xs))
    out: list[float] = []
    for x in xs:
        if out and min(abs(x - out[-1]), 1 - abs(x - out[-1])) < dedup_tol:
            continue
        out.append(float(x))
    if len(out) > 1 and min(abs(out[0] - out[-1]), 1 - abs(out[0] - out[-1])) < dedup_tol:
        out.pop()
    bound = 2 * phi.freqs.max_abs()
    if len(out) > bound:
        vals = _laurent_values(coef, D, np.asarray(out))
        keep = np.sort(np.argsort(np.abs(vals))[:bound])
        out = [out[i] for i in keep]
    return [TorusPoint(x) for x in out]


def support_from_certificate_grid(phi: TrigPolynomial, d: int | None = None,
                                  refinement: int = 256, tol: float = 1e-6) -> list[TorusPoint]:
    """Grid points of ``{k/refinement}^d`` where ``|Phi| < tol``."""
    d = d or phi.d
    pts = grid_points(refinement, d)
    vals = deficit(phi)(pts)
    return [TorusPoint(p) for p in pts[np.abs(vals) < tol]]


def local_maxima_1d(values: np.ndarray) -> np.ndarray:
    """Indices of periodic local maxima of a sampled function."""
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    return np.flatnonzero((values >= left) & (values >= right))
