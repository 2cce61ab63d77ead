"""
Timing harness for the large-chain sector spectrum and entropy path.
"""

import logging
import math
import time
from dataclasses import dataclass, field

import BlockEntropy as be
import ReducedSpectrum as rs

logger = logging.getLogger(__name__)

DEFAULT_BENCH_REPEAT = 5


@dataclass
class BenchResult:
    L: int
    N: int
    n: int
    timings: list = field(default_factory=list)
    entropy: float = math.nan
    normalization_error: float = math.nan

    @property
    def best(self):
        return min(self.timings)

    @property
    def mean(self):
        return sum(self.timings) / len(self.timings)


def time_sector_entropy(L, N, n, repeat=DEFAULT_BENCH_REPEAT):
    """
    Times sector_spectrum followed by shannon_entropy_bits.

    Args:
        L (int): chain length
        N (int): up-spin count
        n (int): block size
        repeat (int, optional): number of timed runs. Defaults to DEFAULT_BENCH_REPEAT

    Returns:
        BenchResult: wall time of every run plus the entropy and the
            normalization error of the last spectrum
    """
    if repeat < 1:
        raise ValueError(f"repeat must be at least 1, got {repeat}")
    spec = rs.SectorSpec(L, N, n)
    result = BenchResult(L, N, n)
    for run in range(repeat):
        start = time.perf_counter()
        spectrum = rs.sector_spectrum(spec)
        entropy = be.shannon_entropy_bits(spectrum)
        elapsed = time.perf_counter() - start
        result.timings.append(elapsed)
        logger.debug("bench run %d/%d: %.6f s", run + 1, repeat, elapsed)
    result.entropy = entropy
    result.normalization_error = abs(spectrum.total() - 1.0)
    return result
