"""
Parameter sweeps comparing exact and asymptotic block entropies, with CSV emission.

This module provides functions to:
- Sweep block sizes of a finite chain at fixed filling (exact sector entropy
  against the finite-chain closed form)
- Sweep block sizes of an infinite chain (binomial spectrum entropy against
  the infinite-chain closed form)
- Regenerate the standard curve families in one call
- Write and read the scan CSV format

CSV layout: header L,n,p,N,S_exact,S_asymptotic,abs_error,npq_eff; decimals
at 12 significant digits with '.' separator; "inf" in the L column for
infinite chains; empty N for infinite chains; LF line endings.
"""

import logging
import math
import multiprocessing
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Union

import pandas as pd

from BlockEntropy import (
    AsymptoticAccuracyWarning,
    asymptotic_entropy_finite,
    asymptotic_entropy_infinite,
    shannon_entropy_bits,
)
from LogCombinatorics import DomainError
from ReducedSpectrum import SectorSpec, sector_spectrum, thermodynamic_spectrum

logger = logging.getLogger(__name__)

CSV_SIGNIFICANT_DIGITS = 12
CSV_FLOAT_FORMAT = f"%.{CSV_SIGNIFICANT_DIGITS}g"
INFINITE_LENGTH = "inf"
SCAN_CHUNK_SIZE = 50

SCAN_DF_TYPE_DICT = {
    "L": object,
    "n": "int64",
    "p": float,
    "N": "Int64",
    "S_exact": float,
    "S_asymptotic": float,
    "abs_error": float,
    "npq_eff": float,
}
SCAN_COLUMNS = list(SCAN_DF_TYPE_DICT)

PRESET_FINITE_LENGTHS = (20, 50, 100, 150, 200)
PRESET_FINITE_FILLINGS = (Fraction(1, 10), Fraction(1, 2))
PRESET_INFINITE_FILLINGS = (Fraction(1, 100), Fraction(1, 10), Fraction(1, 2))
PRESET_INFINITE_MAX_BLOCK = 1000


@dataclass(frozen=True)
class ScanRow:
    """One exact-versus-asymptotic comparison point."""

    L: Union[int, str]
    n: int
    p: float
    N: Optional[int]
    S_exact: float
    S_asymptotic: float
    abs_error: float
    npq_eff: float

    @classmethod
    def from_values(cls, L, n, p, N, S_exact, S_asymptotic, npq_eff):
        return cls(L, n, p, N, S_exact, S_asymptotic, abs(S_exact - S_asymptotic), npq_eff)

    def recomputed_error(self):
        return abs(self.S_exact - self.S_asymptotic)


def snap_filling(L, p):
    """
    Snaps a filling to the nearest sector N = round(p L), halves rounding up.

    Args:
        L (int): chain length
        p (Fraction, float or str): requested filling, e.g. Fraction(1, 10) or "1/10"

    Returns:
        tuple: (N, p_eff) with p_eff = N / L

    Raises:
        DomainError: If p is outside (0, 1) or snaps to a fully polarized sector
    """
    exact = Fraction(p)
    if not 0 < exact < 1:
        raise DomainError(f"filling must lie strictly between 0 and 1, got {p}")
    N = math.floor(exact * L + Fraction(1, 2))
    if N <= 0 or N >= L:
        raise DomainError(f"filling {exact} snaps to N={N} on L={L}, a fully polarized sector")
    return N, N / L


def _block_sizes(n_range, step, upper):
    n_from, n_to = n_range
    if step < 1:
        raise DomainError(f"step must be a positive integer, got {step}")
    if n_from > n_to:
        raise DomainError(f"empty block range {n_from}..{n_to}")
    if n_from < 1 or n_to > upper:
        raise DomainError(f"block range {n_from}..{n_to} outside [1, {upper}]")
    return list(range(n_from, n_to + 1, step))


def _finite_row(L, N, n):
    p = N / L
    q = (L - N) / L
    exact = shannon_entropy_bits(sector_spectrum(SectorSpec(L, N, n)))
    asymptotic = asymptotic_entropy_finite(L, n, p)
    return ScanRow.from_values(L, n, p, N, exact, asymptotic, n * p * q * (L - n) / L)


def _infinite_row(p, n):
    exact = shannon_entropy_bits(thermodynamic_spectrum(n, p))
    asymptotic = asymptotic_entropy_infinite(n, p)
    return ScanRow.from_values(INFINITE_LENGTH, n, p, None, exact, asymptotic, n * p * (1.0 - p))


def scan_chunk(args):
    """
    Perform the row computation per chunk of block sizes
    """
    kind, params, sizes = args
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AsymptoticAccuracyWarning)
        if kind == "finite":
            L, N = params
            rows = [_finite_row(L, N, n) for n in sizes]
        else:
            (p,) = params
            rows = [_infinite_row(p, n) for n in sizes]
    flagged = sum(1 for w in caught if issubclass(w.category, AsymptoticAccuracyWarning))
    return rows, flagged


def _run_scan(kind, params, sizes, workers):
    chunks = [
        (kind, params, sizes[i: i + SCAN_CHUNK_SIZE])
        for i in range(0, len(sizes), SCAN_CHUNK_SIZE)
    ]
    if workers > 1 and len(chunks) > 1:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(scan_chunk, chunks)
    else:
        results = [scan_chunk(chunk) for chunk in chunks]
    rows = [row for chunk_rows, _ in results for row in chunk_rows]
    flagged = sum(count for _, count in results)
    if flagged:
        logger.info(
            "%d of %d %s rows have n p q below the asymptotic validity threshold",
            flagged,
            len(rows),
            kind,
        )
    return rows


def scan_finite(L, p, n_range, step=1, workers=1):
    """
    Exact and asymptotic entropies along block sizes of a finite chain.

    Args:
        L (int): chain length
        p (Fraction, float or str): filling, snapped to N = round(p L)
        n_range (tuple): inclusive (n_from, n_to), within [1, L - 1]
        step (int, optional): block size increment. Defaults to 1
        workers (int, optional): processes for the row map. Defaults to 1

    Returns:
        list: ScanRow per block size, with p the snapped filling N / L

    Raises:
        DomainError: If the range is empty or out of bounds, or p is degenerate
    """
    N, p_eff = snap_filling(L, p)
    sizes = _block_sizes(n_range, step, L - 1)
    logger.debug("finite scan L=%d N=%d (p=%.6g) over %d block sizes", L, N, p_eff, len(sizes))
    return _run_scan("finite", (L, N), sizes, workers)


def scan_infinite(p, n_range, step=1, workers=1):
    """
    Exact and asymptotic entropies along block sizes of an infinite chain.

    Args:
        p (Fraction, float or str): filling, 0 < p < 1
        n_range (tuple): inclusive (n_from, n_to), n_from >= 1
        step (int, optional): block size increment. Defaults to 1
        workers (int, optional): processes for the row map. Defaults to 1

    Returns:
        list: ScanRow per block size with L = "inf" and N absent
    """
    exact = Fraction(p)
    if not 0 < exact < 1:
        raise DomainError(f"filling must lie strictly between 0 and 1, got {p}")
    sizes = _block_sizes(n_range, step, math.inf)
    return _run_scan("infinite", (float(exact),), sizes, workers)


def preset_finite_rows(workers=1):
    """Finite-chain curves: L in PRESET_FINITE_LENGTHS, p in PRESET_FINITE_FILLINGS, n = 1..L-1."""
    rows = []
    for p in PRESET_FINITE_FILLINGS:
        for L in PRESET_FINITE_LENGTHS:
            rows.extend(scan_finite(L, p, (1, L - 1), workers=workers))
    return rows


def preset_infinite_rows(workers=1):
    """Infinite-chain curves: p in PRESET_INFINITE_FILLINGS, n = 1..PRESET_INFINITE_MAX_BLOCK."""
    rows = []
    for p in PRESET_INFINITE_FILLINGS:
        rows.extend(scan_infinite(p, (1, PRESET_INFINITE_MAX_BLOCK), workers=workers))
    return rows


def rows_to_frame(rows):
    """
    Converts scan rows into a typed DataFrame.

    Args:
        rows (list): ScanRow objects

    Returns:
        pandas.DataFrame: columns SCAN_COLUMNS with SCAN_DF_TYPE_DICT dtypes
    """
    frame = pd.DataFrame([asdict(row) for row in rows], columns=SCAN_COLUMNS)
    return frame.astype(SCAN_DF_TYPE_DICT)


def emit_csv(rows, destination):
    """
    Writes scan rows as CSV.

    Args:
        rows (list): ScanRow objects
        destination (str or file-like): output path or text stream

    Returns:
        int: number of data rows written
    """
    frame = rows_to_frame(rows)
    # abs_error is recomputed from the printed entropies so it survives a re-read
    for col in ("S_exact", "S_asymptotic"):
        frame[col] = frame[col].map(lambda v: float(CSV_FLOAT_FORMAT % v))
    frame["abs_error"] = (frame["S_exact"] - frame["S_asymptotic"]).abs()
    frame.to_csv(
        destination,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        na_rep="",
        lineterminator="\n",
    )
    return len(frame)


def ingest_scan_csv(source):
    """
    Reads a scan CSV produced by emit_csv back into rows.

    Args:
        source (str or file-like): input path or text stream

    Returns:
        list: ScanRow objects in file order
    """
    frame = pd.read_csv(
        source,
        dtype={"L": str, "n": "int64", "N": "Int64"},
        keep_default_na=False,
        na_values={"N": [""]},
        float_precision="round_trip",
    )
    rows = []
    for record in frame.itertuples(index=False):
        rows.append(
            ScanRow(
                L=INFINITE_LENGTH if record.L == INFINITE_LENGTH else int(record.L),
                n=int(record.n),
                p=float(record.p),
                N=None if pd.isna(record.N) else int(record.N),
                S_exact=float(record.S_exact),
                S_asymptotic=float(record.S_asymptotic),
                abs_error=float(record.abs_error),
                npq_eff=float(record.npq_eff),
            )
        )
    return rows
