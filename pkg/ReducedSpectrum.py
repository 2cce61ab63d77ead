"""
Eigenvalue spectra of block reduced density matrices in the ferromagnetic ground state.

This module provides:
- SectorSpec, the (L, N, n) coordinates of a fixed-magnetization sector
- WeightVector, ensemble weights over the L + 1 ground-state multiplet members
- Spectrum, an immutable log-domain eigenvalue list indexed by the block
  up-spin count k = 0..n
- Constructors for every ensemble: a single sector, a general mixture, the
  equal-weight mixture, and the infinite-chain limit

Spectra always carry the full index range k = 0..n with explicit zeros
(NEGATIVE_INFINITY in log form) outside the support, so spectra of different
ensembles can be compared entry by entry.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd

from LogCombinatorics import (
    NEGATIVE_INFINITY,
    DomainError,
    binomial_log_pmf,
    hypergeometric_log_pmf,
)

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-12
WEIGHTS_NORMALIZATION_TOLERANCE = 1e-6
# Upper bound on sector rows times block entries evaluated in one vectorized pass
MIXTURE_CHUNK_ELEMENTS = 1 << 20


class WeightVectorError(DomainError):
    """Raised for malformed ensemble weights."""


class Provenance(str, Enum):
    SECTOR = "sector"
    MIXED = "mixed"
    EQUAL_WEIGHT = "equal-weight"
    THERMODYNAMIC = "thermodynamic"
    ORACLE = "oracle"


@dataclass(frozen=True)
class SectorSpec:
    """
    Ground-state sector with N up-spins on a chain of L sites, observed through a block of n sites.
    """

    L: int
    N: int
    n: int

    def __post_init__(self):
        if self.L < 1:
            raise DomainError(f"chain length must be positive, got {self.L}")
        if not 0 <= self.N <= self.L:
            raise DomainError(f"up-spin count {self.N} outside [0, {self.L}]")
        if not 0 <= self.n <= self.L:
            raise DomainError(f"block size {self.n} outside [0, {self.L}]")
        if self.trivial_block:
            logger.debug("block of size %d in chain of %d is trivially pure", self.n, self.L)

    @property
    def p(self):
        """Filling N / L."""
        return self.N / self.L

    @property
    def q(self):
        return (self.L - self.N) / self.L

    @property
    def magnetization(self):
        """Magnetization per site y = p - 1/2."""
        return self.p - 0.5

    @property
    def trivial_block(self):
        return self.n == 0 or self.n == self.L

    @property
    def degenerate_filling(self):
        return self.N == 0 or self.N == self.L


@dataclass(frozen=True)
class WeightVector:
    """
    Nonnegative weights alpha_0..alpha_L over the ground-state multiplet, summing to one.
    """

    alphas: np.ndarray

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=float)
        if alphas.ndim != 1 or alphas.size < 1:
            raise WeightVectorError("weights must be a nonempty one-dimensional sequence")
        if np.any(~np.isfinite(alphas)) or np.any(alphas < 0):
            raise WeightVectorError("weights must be finite and nonnegative")
        total = float(alphas.sum())
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise WeightVectorError(f"weights sum to {total!r}, expected 1")
        alphas.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)

    @property
    def L(self):
        return self.alphas.size - 1

    @classmethod
    def from_values(cls, values):
        return cls(np.asarray(values, dtype=float))

    @classmethod
    def delta(cls, L, N):
        """Pure sector N (ensemble choice a)."""
        if not 0 <= N <= L:
            raise WeightVectorError(f"sector {N} outside [0, {L}]")
        alphas = np.zeros(L + 1)
        alphas[N] = 1.0
        return cls(alphas)

    @classmethod
    def uniform(cls, L):
        """Equal weights 1 / (L + 1) (ensemble choice b)."""
        return cls(np.full(L + 1, 1.0 / (L + 1)))

    @classmethod
    def dirichlet(cls, L, rng, concentration=1.0):
        """
        Random weights drawn from a symmetric Dirichlet distribution.

        Args:
            L (int): chain length
            rng (numpy.random.Generator): random source
            concentration (float, optional): Dirichlet parameter. Defaults to 1.0

        Returns:
            WeightVector: generic ensemble over all L + 1 sectors
        """
        raw = rng.dirichlet(np.full(L + 1, concentration))
        return cls(_renormalize(raw))

    def mix(self, other, c):
        """Affine combination c * self + (1 - c) * other."""
        if other.alphas.size != self.alphas.size:
            raise WeightVectorError("cannot mix weight vectors of different lengths")
        if not 0.0 <= c <= 1.0:
            raise WeightVectorError(f"mixing coefficient {c} outside [0, 1]")
        return WeightVector(_renormalize(c * self.alphas + (1.0 - c) * other.alphas))


def _renormalize(alphas):
    alphas = np.asarray(alphas, dtype=float) / math.fsum(alphas)
    alphas[np.argmax(alphas)] += 1.0 - math.fsum(alphas)
    return alphas


def ingest_weights(path, L):
    """
    Reads an ensemble weight file with one nonnegative real per line.

    Args:
        path (str): path to the weight file
        L (int): chain length; the file must hold L + 1 values

    Returns:
        WeightVector: loaded weights

    Raises:
        WeightVectorError: If the count is wrong, a value is negative, or the
            sum deviates from 1 by more than WEIGHTS_NORMALIZATION_TOLERANCE

    Note:
        Sums within tolerance of 1 are renormalized silently.
    """
    try:
        weights_df = pd.read_csv(
            path, header=None, names=["alpha"], dtype={"alpha": float}, comment="#"
        )
    except (ValueError, pd.errors.EmptyDataError) as exc:
        raise WeightVectorError(f"unreadable weight file {path}: {exc}") from exc
    alphas = weights_df["alpha"].to_numpy(dtype=float)
    if alphas.size != L + 1:
        raise WeightVectorError(
            f"weight file {path} holds {alphas.size} values, expected {L + 1}"
        )
    if np.any(np.isnan(alphas)) or np.any(alphas < 0):
        raise WeightVectorError(f"weight file {path} holds negative or missing values")
    total = math.fsum(alphas)
    if abs(total - 1.0) > WEIGHTS_NORMALIZATION_TOLERANCE:
        raise WeightVectorError(f"weights in {path} sum to {total!r}, expected 1")
    if total != 1.0:
        logger.info("renormalizing weights in %s (sum %.12g)", path, total)
        alphas = _renormalize(alphas)
    return WeightVector(alphas)


@dataclass(frozen=True)
class Spectrum:
    """
    Reduced-density-matrix eigenvalues in log form, entry k for k up-spins in the block.
    """

    log_values: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        values = np.array(self.log_values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "log_values", values)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    def __len__(self):
        return self.log_values.size

    @property
    def block_size(self):
        return self.log_values.size - 1

    def values(self):
        """Eigenvalues in linear scale."""
        return np.exp(self.log_values)

    def total(self):
        return math.fsum(self.values())

    def nonzero_count(self):
        return int(np.count_nonzero(np.isfinite(self.log_values)))

    def sorted_descending(self, pad_to=None):
        """
        Eigenvalues sorted from largest to smallest, optionally zero-padded.

        Args:
            pad_to (int, optional): target length; must not be smaller than the
                spectrum length

        Returns:
            numpy.ndarray: sorted eigenvalues
        """
        values = np.sort(self.values())[::-1]
        if pad_to is None or pad_to == values.size:
            return values
        if pad_to < values.size:
            if np.any(values[pad_to:] != 0.0):
                raise DomainError("cannot truncate nonzero eigenvalues")
            return values[:pad_to]
        return np.concatenate([values, np.zeros(pad_to - values.size)])


def sector_spectrum(spec):
    """
    Exact block spectrum of the symmetric ground state with N up-spins.

    Args:
        spec (SectorSpec): sector coordinates

    Returns:
        Spectrum: entry k = binom(n, k) binom(L - n, N - k) / binom(L, N) for k = 0..n

    Note:
        Evaluation always happens at N <= L/2 and n <= L/2, using
        lambda_k(N) = lambda_{n-k}(L - N) and lambda_k(n) = lambda_{N-k}(L - n),
        so sectors related by either reflection carry identical eigenvalues.
    """
    L = spec.L
    up, block, index = spec.N, spec.n, np.arange(spec.n + 1)
    if 2 * up > L:
        up, index = L - up, block - index
    if 2 * block > L:
        block, index = L - block, up - index
    log_values = hypergeometric_log_pmf(L, up, block, index)
    return Spectrum(log_values, Provenance.SECTOR)


def _log_sum_exp_rows(rows):
    """Column-wise log-sum-exp with max shift; all -inf columns stay -inf."""
    peak = np.max(rows, axis=0)
    finite_peak = np.where(np.isfinite(peak), peak, 0.0)
    with np.errstate(divide="ignore"):
        summed = np.log(np.sum(np.exp(rows - finite_peak), axis=0))
    return np.where(np.isfinite(peak), finite_peak + summed, NEGATIVE_INFINITY)


def mixed_spectrum(L, n, w):
    """
    Block spectrum of a diagonal mixture of ground-state sectors.

    Every sector's reduced matrix is diagonal in the same basis of symmetric
    block states, so eigenvalue k of the mixture is sum_N alpha_N lambda_k(L, n, N).

    Args:
        L (int): chain length
        n (int): block size
        w (WeightVector): ensemble weights, length L + 1

    Returns:
        Spectrum: mixed spectrum, provenance mixed

    Raises:
        WeightVectorError: If the weight vector length is not L + 1
    """
    if w.alphas.size != L + 1:
        raise WeightVectorError(f"weight vector has {w.alphas.size} entries, expected {L + 1}")
    if not 0 <= n <= L:
        raise DomainError(f"block size {n} outside [0, {L}]")
    sectors = np.flatnonzero(w.alphas > 0)
    k = np.arange(n + 1)
    rows_per_chunk = max(1, MIXTURE_CHUNK_ELEMENTS // (n + 1))
    accumulated = np.full(n + 1, NEGATIVE_INFINITY)
    for start in range(0, sectors.size, rows_per_chunk):
        chunk = sectors[start: start + rows_per_chunk]
        rows = hypergeometric_log_pmf(L, chunk[:, None], n, k[None, :])
        rows = rows + np.log(w.alphas[chunk])[:, None]
        partial = _log_sum_exp_rows(rows)
        if start == 0:
            accumulated = partial
        else:
            accumulated = np.logaddexp(accumulated, partial)
    return Spectrum(accumulated, Provenance.MIXED)


def equal_weight_spectrum(n):
    """
    Closed-form spectrum of the equal-weight ensemble: n + 1 eigenvalues 1 / (n + 1).

    Args:
        n (int): block size, n >= 0

    Returns:
        Spectrum: flat spectrum, provenance equal-weight
    """
    if n < 0:
        raise DomainError(f"block size must be nonnegative, got {n}")
    return Spectrum(np.full(n + 1, -math.log(n + 1)), Provenance.EQUAL_WEIGHT)


def thermodynamic_spectrum(n, p):
    """
    Block spectrum of an infinite chain at filling p: the binomial distribution.

    Args:
        n (int): block size, n >= 1
        p (float): filling, 0 < p < 1

    Returns:
        Spectrum: entry k = binom(n, k) p^k (1 - p)^(n - k), provenance thermodynamic
    """
    log_values = binomial_log_pmf(n, p, np.arange(n + 1))
    return Spectrum(log_values, Provenance.THERMODYNAMIC)


def gaussian_eigenvalues(spec):
    """
    Normal approximation to the sector eigenvalues, valid for n p q >> 1.

    lambda_k ~ (1 / n) (2 pi alpha)^(-1/2) exp(-(k / n - p)^2 / (2 alpha)),
    alpha = p q (L - n) / (n L).

    Args:
        spec (SectorSpec): sector with 1 <= n <= L - 1 and 0 < N < L

    Returns:
        numpy.ndarray: approximate eigenvalues for k = 0..n (not exactly normalized)
    """
    if spec.trivial_block or spec.degenerate_filling:
        raise DomainError("normal approximation needs 1 <= n <= L - 1 and 0 < N < L")
    L, n = spec.L, spec.n
    alpha = spec.p * spec.q * (L - n) / (n * L)
    x = np.arange(n + 1) / n
    return np.exp(-((x - spec.p) ** 2) / (2.0 * alpha)) / (n * math.sqrt(2.0 * math.pi * alpha))
