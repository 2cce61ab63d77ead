"""
Log-domain binomial coefficients and classical probability mass functions.

This module provides functions to:
- Evaluate ln(total choose chosen) exactly for small totals and through a
  Stirling-series log-gamma above that
- Evaluate the hypergeometric pmf that gives the block eigenvalues of a
  symmetric (Dicke) ground state
- Evaluate the binomial pmf that those eigenvalues reduce to for an
  infinite chain

Every pmf is evaluated with the saddle-point decomposition (Stirling
remainder plus a deviance term), so log values keep ~1e-14 absolute accuracy
even for chains of 10^6 sites. All pmfs broadcast over numpy arrays.

log_gamma and log_factorial are public utilities for callers that need a
single factorial or gamma value. The pmfs and log_binomial do not go through
them: they combine the Stirling remainders directly so the leading t ln t
terms cancel analytically rather than in floating point.

Binomials follow one convention throughout: binom(total, chosen). The
physics notation C_N^L with the subscript as the chosen count maps onto
binom(L, N).
"""

import math

import numpy as np

EXACT_BINOMIAL_MAX_TOTAL = 60
STIRLING_TABLE_MAX = 15
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
NEGATIVE_INFINITY = -math.inf

# Stirling series coefficients B_2k / (2k (2k-1))
_S0 = 1.0 / 12.0
_S1 = 1.0 / 360.0
_S2 = 1.0 / 1260.0
_S3 = 1.0 / 1680.0
_S4 = 1.0 / 1188.0

_DEVIANCE_SERIES_MAX_TERMS = 60


class DomainError(ValueError):
    """Raised when a numeric argument lies outside the domain of an operation."""


def _stirling_series(x):
    """ln Gamma(x + 1) - [(x + 1/2) ln x - x + ln sqrt(2 pi)] for x > 15."""
    nn = x * x
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / x


def _build_stirling_table():
    table = [0.0]
    for m in range(1, STIRLING_TABLE_MAX + 1):
        exact = math.log(math.factorial(m))
        table.append(exact - (m + 0.5) * math.log(m) + m - LOG_SQRT_2PI)
    return np.array(table)


_STIRLING_TABLE = _build_stirling_table()


def _stirling_error(m):
    """
    Stirling remainder of ln m! for integer-valued m >= 0.

    Args:
        m (numpy.ndarray): nonnegative integer-valued array

    Returns:
        numpy.ndarray: ln m! - [(m + 1/2) ln m - m + ln sqrt(2 pi)], with 0 at m = 0
    """
    m = np.asarray(m, dtype=float)
    small = m <= STIRLING_TABLE_MAX
    safe_large = np.where(small, STIRLING_TABLE_MAX + 1.0, m)
    table_index = np.where(small, m, 0).astype(np.int64)
    return np.where(small, _STIRLING_TABLE[table_index], _stirling_series(safe_large))


def log_gamma(x):
    """
    Natural log of the gamma function for positive real arguments.

    Arguments below 16 are shifted upward with the recurrence
    Gamma(x) = Gamma(x + m) / (x (x + 1) ... (x + m - 1)) before the
    Stirling series is applied.

    Args:
        x (float or numpy.ndarray): positive argument(s)

    Returns:
        float or numpy.ndarray: ln Gamma(x), absolute error below 1e-12 for x >= 1

    Raises:
        DomainError: If any argument is not strictly positive
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma requires strictly positive arguments")
    shift = np.maximum(0, np.ceil(STIRLING_TABLE_MAX + 1 - arr)).astype(np.int64)
    shifted = arr + shift
    log_product = np.zeros_like(arr)
    for step in range(int(shift.max(initial=0))):
        active = step < shift
        log_product = log_product + np.where(active, np.log(arr + step), 0.0)
    # ln Gamma(y) = ln Gamma(y + 1) - ln y with the remainder taken at y
    result = (
        (shifted - 0.5) * np.log(shifted)
        - shifted
        + LOG_SQRT_2PI
        + _stirling_series(shifted)
        - log_product
    )
    if np.ndim(x) == 0:
        return float(result)
    return result


def log_factorial(m):
    """
    ln m! for nonnegative integer m (scalar or array).

    Args:
        m (int or numpy.ndarray): nonnegative integer(s)

    Returns:
        float or numpy.ndarray: ln m!

    Raises:
        DomainError: If any argument is negative
    """
    arr = np.asarray(m, dtype=float)
    if np.any(arr < 0):
        raise DomainError("log_factorial requires nonnegative arguments")
    safe = np.where(arr > 0, arr, 1.0)
    main = (safe + 0.5) * np.log(safe) - safe + LOG_SQRT_2PI
    result = np.where(arr > 0, main + _stirling_error(arr), 0.0)
    if np.ndim(m) == 0:
        return float(result)
    return result


def _log_binomial_exact(total, chosen):
    return math.log(math.comb(total, chosen))


def _log_binomial_stirling(total, chosen):
    if chosen == 0 or chosen == total:
        return 0.0
    rest = total - chosen
    # c ln(t/c) + (t-c) ln(t/(t-c)) avoids cancelling t ln t against its parts
    main = chosen * math.log(total / chosen) + rest * math.log(total / rest)
    correction = float(
        _stirling_error(total) - _stirling_error(chosen) - _stirling_error(rest)
    )
    return main + correction + 0.5 * math.log(total / (2.0 * math.pi * chosen * rest))


def log_binomial(total, chosen):
    """
    Natural log of the binomial coefficient binom(total, chosen).

    Args:
        total (int): number of items, total >= 0
        chosen (int): number of selected items, any integer

    Returns:
        float: ln binom(total, chosen); NEGATIVE_INFINITY when chosen < 0
            or chosen > total

    Raises:
        DomainError: If total is negative

    Note:
        Totals up to EXACT_BINOMIAL_MAX_TOTAL use exact integer arithmetic,
        larger totals the Stirling (log-gamma) path.
    """
    total = int(total)
    chosen = int(chosen)
    if total < 0:
        raise DomainError(f"binomial total must be nonnegative, got {total}")
    if chosen < 0 or chosen > total:
        return NEGATIVE_INFINITY
    if total <= EXACT_BINOMIAL_MAX_TOTAL:
        return _log_binomial_exact(total, chosen)
    return _log_binomial_stirling(total, chosen)


def _deviance(x, mean):
    """
    x ln(x / mean) + mean - x for x > 0, mean > 0, accurate when x is close to mean.
    """
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    x, mean = np.broadcast_arrays(x, mean)
    near = np.abs(x - mean) < 0.1 * (x + mean)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = x * np.log(x / mean) + mean - x
    if not np.any(near):
        return direct
    xs = x[near]
    ms = mean[near]
    v = (xs - ms) / (xs + ms)
    s = (xs - ms) * v
    ej = 2.0 * xs * v
    v2 = v * v
    for j in range(1, _DEVIANCE_SERIES_MAX_TERMS):
        ej = ej * v2
        s_next = s + ej / (2 * j + 1)
        if np.array_equal(s_next, s):
            break
        s = s_next
    out = direct.copy()
    out[near] = s
    return out


def _log_binomial_density(x, m, p, q):
    """
    ln[binom(m, x) p^x q^(m-x)] for integer-valued 0 <= x <= m and 0 < p < 1, q = 1 - p.

    Args:
        x (numpy.ndarray): successes
        m (numpy.ndarray): trials
        p (float): success probability
        q (float): failure probability, passed separately so callers can
            supply an exactly computed complement

    Returns:
        numpy.ndarray: log density, same broadcast shape as x and m
    """
    x, m = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(m, dtype=float))
    out = np.zeros(x.shape)
    interior = (x > 0) & (x < m)
    at_zero = (x == 0) & (m > 0)
    at_full = (x == m) & (m > 0)

    if np.any(at_zero):
        mz = m[at_zero]
        if p < 0.1:
            out[at_zero] = -_deviance(mz, mz * q) - mz * p
        else:
            out[at_zero] = mz * math.log(q)
    if np.any(at_full):
        mf = m[at_full]
        if q < 0.1:
            out[at_full] = -_deviance(mf, mf * p) - mf * q
        else:
            out[at_full] = mf * math.log(p)
    if np.any(interior):
        xi = x[interior]
        mi = m[interior]
        rest = mi - xi
        lc = (
            _stirling_error(mi)
            - _stirling_error(xi)
            - _stirling_error(rest)
            - _deviance(xi, mi * p)
            - _deviance(rest, mi * q)
        )
        lf = 2.0 * LOG_SQRT_2PI + np.log(xi) + np.log1p(-xi / mi)
        out[interior] = lc - 0.5 * lf
    return out


def _finalize(result, *args):
    if all(np.ndim(a) == 0 for a in args):
        return float(result)
    return result


def hypergeometric_log_pmf(L, N, n, k):
    """
    Log eigenvalue of the block reduced density matrix in the sector with N up-spins.

    Evaluates ln[binom(n, k) binom(L - n, N - k) / binom(L, N)], the
    probability of k up-spins in a block of n sites when N up-spins are
    spread uniformly over L sites.

    Args:
        L (int): chain length
        N (int or numpy.ndarray): total up-spins, 0 <= N <= L
        n (int): block size, 0 <= n <= L
        k (int or numpy.ndarray): up-spins in the block

    Returns:
        float or numpy.ndarray: log probability; NEGATIVE_INFINITY outside the
            support [max(0, n + N - L), min(n, N)]

    Raises:
        DomainError: If L = 0 with n > 0, or N or n fall outside [0, L]
    """
    L = int(L)
    n = int(n)
    if L < 0:
        raise DomainError(f"chain length must be nonnegative, got {L}")
    if L == 0 and n > 0:
        raise DomainError("a block cannot be taken from an empty chain")
    if n < 0 or n > L:
        raise DomainError(f"block size {n} outside [0, {L}]")
    N_arr = np.asarray(N)
    if np.any(N_arr < 0) or np.any(N_arr > L):
        raise DomainError(f"up-spin count outside [0, {L}]")

    N_arr, k_arr = np.broadcast_arrays(N_arr.astype(float), np.asarray(k, dtype=float))
    lo = np.maximum(0.0, n + N_arr - L)
    hi = np.minimum(float(n), N_arr)
    inside = (k_arr >= lo) & (k_arr <= hi)
    out = np.full(k_arr.shape, NEGATIVE_INFINITY)

    if n == 0 or n == L:
        # The block is empty or the whole chain: the count is forced.
        out[inside] = 0.0
        return _finalize(out, N, k)

    p = n / L
    q = (L - n) / L
    kk = k_arr[inside]
    NN = N_arr[inside]
    out[inside] = (
        _log_binomial_density(kk, NN, p, q)
        + _log_binomial_density(n - kk, L - NN, p, q)
        - _log_binomial_density(float(n), float(L), p, q)
    )
    return _finalize(out, N, k)


def binomial_log_pmf(n, p, k):
    """
    Log of the binomial pmf binom(n, k) p^k (1 - p)^(n - k).

    Args:
        n (int): number of trials (block size), n >= 1
        p (float): success probability (filling), 0 < p < 1
        k (int or numpy.ndarray): success count(s)

    Returns:
        float or numpy.ndarray: log probability; NEGATIVE_INFINITY outside [0, n]

    Raises:
        DomainError: If p is not strictly between 0 and 1, or n < 1
    """
    n = int(n)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"filling must lie strictly between 0 and 1, got {p}")
    if n < 1:
        raise DomainError(f"block size must be at least 1, got {n}")
    k_arr = np.asarray(k, dtype=float)
    inside = (k_arr >= 0) & (k_arr <= n)
    out = np.full(k_arr.shape, NEGATIVE_INFINITY)
    out[inside] = _log_binomial_density(k_arr[inside], float(n), p, 1.0 - p)
    return _finalize(out, k)
