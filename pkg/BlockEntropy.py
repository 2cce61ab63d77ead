"""
Block entanglement entropy of ferromagnetic ground-state spectra, exact and asymptotic.

This module provides functions to:
- Compute the von Neumann (Shannon) entropy in bits of a log-domain Spectrum
- Evaluate the closed-form large-block asymptotics for finite and infinite chains
- Evaluate the equal-weight ensemble entropy log2(n + 1)
- Fit S = gamma log2 n + const to measure the logarithmic prefactor

Entropies are plain floats in bits.
"""

import logging
import math
import warnings
from typing import NamedTuple

import numpy as np

from LogCombinatorics import DomainError
from ReducedSpectrum import sector_spectrum

logger = logging.getLogger(__name__)

ENTROPY_NORMALIZATION_TOLERANCE = 1e-9
NPQ_WARNING_THRESHOLD = 10
LN2 = math.log(2.0)
TWO_PI_E = 2.0 * math.pi * math.e


class SpectrumNormalizationError(DomainError):
    """Raised when a spectrum handed to an entropy routine does not sum to one."""


class AsymptoticAccuracyWarning(UserWarning):
    """The inputs sit outside the regime where a closed form is accurate."""


class TrivialBlockWarning(UserWarning):
    """The block is empty or the whole chain, so its entropy is identically zero."""


class LogPrefactorFit(NamedTuple):
    gamma: float
    const: float


def shannon_entropy_bits(s):
    """
    Entropy -sum lambda_k log2 lambda_k of a spectrum, with 0 log 0 = 0.

    Args:
        s (Spectrum): normalized spectrum

    Returns:
        float: entropy in bits

    Raises:
        SpectrumNormalizationError: If the eigenvalues sum to 1 only within more
            than ENTROPY_NORMALIZATION_TOLERANCE
    """
    log_values = s.log_values[np.isfinite(s.log_values)]
    probabilities = np.exp(log_values)
    total = math.fsum(probabilities)
    if abs(total - 1.0) > ENTROPY_NORMALIZATION_TOLERANCE:
        raise SpectrumNormalizationError(f"spectrum sums to {total!r}, expected 1")
    return max(0.0, -math.fsum(probabilities * log_values) / LN2)


def sector_entropy(spec):
    """
    Exact entropy of a block of n sites in the sector with N up-spins.

    Args:
        spec (SectorSpec): sector coordinates

    Returns:
        float: entropy in bits; 0 for a trivial block or a fully polarized sector
    """
    if spec.trivial_block:
        warnings.warn(
            f"block of size {spec.n} in a chain of {spec.L} is pure, entropy is 0",
            TrivialBlockWarning,
            stacklevel=2,
        )
        return 0.0
    return shannon_entropy_bits(sector_spectrum(spec))


def _check_filling(p):
    if not 0.0 < p < 1.0:
        raise DomainError(f"filling must lie strictly between 0 and 1, got {p}")


def _warn_small_npq(n, p):
    npq = n * p * (1.0 - p)
    if npq < NPQ_WARNING_THRESHOLD:
        warnings.warn(
            f"n p q = {npq:.4g} is below {NPQ_WARNING_THRESHOLD}; asymptotic entropy is rough",
            AsymptoticAccuracyWarning,
            stacklevel=3,
        )


def asymptotic_entropy_finite(L, n, p):
    """
    Large-block entropy of a finite chain: 1/2 log2(2 pi e p q) + 1/2 log2(n (L - n) / L).

    Args:
        L (int): chain length
        n (int): block size, 1 <= n <= L - 1
        p (float): filling, 0 < p < 1

    Returns:
        float: asymptotic entropy in bits

    Raises:
        DomainError: If p or n is out of range

    Note:
        Emits AsymptoticAccuracyWarning when n p q < NPQ_WARNING_THRESHOLD.
    """
    p = float(p)
    _check_filling(p)
    if not 1 <= n <= L - 1:
        raise DomainError(f"block size {n} outside [1, {L - 1}]")
    _warn_small_npq(n, p)
    return 0.5 * math.log2(TWO_PI_E * p * (1.0 - p)) + 0.5 * math.log2(n * (L - n) / L)


def asymptotic_entropy_infinite(n, p):
    """
    Large-block entropy of an infinite chain: 1/2 log2(2 pi e p q) + 1/2 log2 n.

    Args:
        n (int): block size, n >= 1
        p (float): filling, 0 < p < 1

    Returns:
        float: asymptotic entropy in bits
    """
    p = float(p)
    _check_filling(p)
    if n < 1:
        raise DomainError(f"block size must be at least 1, got {n}")
    _warn_small_npq(n, p)
    return 0.5 * math.log2(TWO_PI_E * p * (1.0 - p)) + 0.5 * math.log2(n)


def magnetization_prefactor(y):
    """C(y) = 2 pi e (1/4 - y^2) for magnetization per site |y| < 1/2."""
    if not -0.5 < y < 0.5:
        raise DomainError(f"magnetization per site must lie in (-1/2, 1/2), got {y}")
    return TWO_PI_E * (0.25 - y * y)


def asymptotic_entropy_magnetization(L, n, y):
    """
    Finite-chain asymptotic entropy written in terms of magnetization per site.

    Args:
        L (int): chain length
        n (int): block size, 1 <= n <= L - 1
        y (float): magnetization per site p - 1/2

    Returns:
        float: 1/2 log2[n (L - n) / L * C(y)]
    """
    if not 1 <= n <= L - 1:
        raise DomainError(f"block size {n} outside [1, {L - 1}]")
    return 0.5 * math.log2(n * (L - n) / L * magnetization_prefactor(y))


def equal_weight_entropy(n):
    """Entropy log2(n + 1) of the equal-weight ensemble."""
    if n < 0:
        raise DomainError(f"block size must be nonnegative, got {n}")
    return math.log2(n + 1)


def fit_log_prefactor(points):
    """
    Least-squares fit of S = gamma log2 n + const.

    Args:
        points (list): (n, entropy_bits) pairs

    Returns:
        LogPrefactorFit: slope gamma and intercept const

    Raises:
        DomainError: If there are fewer than 3 points, an n below 2, or repeated n
    """
    points = list(points)
    if len(points) < 3:
        raise DomainError("fitting a log prefactor needs at least 3 points")
    sizes = np.array([n for n, _ in points], dtype=float)
    entropies = np.array([s for _, s in points], dtype=float)
    if np.any(sizes < 2):
        raise DomainError("block sizes must be at least 2 to fit a log prefactor")
    if np.unique(sizes).size != sizes.size:
        raise DomainError("block sizes must be distinct to fit a log prefactor")
    gamma, const = np.polyfit(np.log2(sizes), entropies, 1)
    logger.debug("log prefactor fit over %d points: gamma=%.6f const=%.6f", len(points), gamma, const)
    return LogPrefactorFit(float(gamma), float(const))
