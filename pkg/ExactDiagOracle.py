"""
Brute-force exact-diagonalization oracle for the ferromagnetic ground-state entropies.

This module provides functions to:
- Build the symmetric (Dicke) ground state of N up-spins as a dense 2^L vector
- Apply the periodic XXX Hamiltonian term by term and report the residual
- Form reduced density matrices by literal partial trace over arbitrary site masks
- Diagonalize real symmetric matrices with cyclic Jacobi rotations
- Apply the staggered spin flip relating the Delta = -1 antiferromagnet to the ferromagnet
- Sweep all of the above against the analytic spectra and report per family

Nothing here touches the log-domain combinatorics: normalizations come from
counting basis states, eigenvalues from Jacobi. Arithmetic is real throughout;
every state and density matrix involved is real symmetric.

A StateVector is a float numpy array of length 2^L indexed by configuration
bitmask (bit i set means spin up at site i). A DensityMatrix is a float
2^n x 2^n numpy array whose row index packs the block sites in ascending
order into bits 0..n-1.
"""

import logging
import math
import multiprocessing
from dataclasses import dataclass

import numpy as np

from BlockEntropy import shannon_entropy_bits
from LogCombinatorics import DomainError
from ReducedSpectrum import (
    SectorSpec,
    WeightVector,
    WeightVectorError,
    mixed_spectrum,
    sector_spectrum,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_L = 14
JACOBI_TOLERANCE = 1e-13
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOLERANCE = 1e-12
RANK_THRESHOLD = 1e-10
ENTROPY_EIGENVALUE_FLOOR = 1e-15
EIGENVALUE_TOLERANCE = 1e-10
ENTROPY_TOLERANCE = 1e-9
ZERO_ENERGY_TOLERANCE = 1e-12
FLIP_ENTROPY_TOLERANCE = 1e-12
MIXED_MAX_L = 10
MIXED_WEIGHTS_PER_LENGTH = 5
DEFAULT_VERIFY_MAX_L = 12
DEFAULT_SEED = 20040


class OracleError(RuntimeError):
    """Raised when the brute-force path fails internally (e.g. Jacobi does not converge)."""


def _chain_length(state):
    size = np.asarray(state).size
    L = size.bit_length() - 1
    if size < 1 or 1 << L != size:
        raise DomainError(f"state length {size} is not a power of two")
    return L


def _popcounts(L):
    configs = np.arange(1 << L)
    counts = np.zeros(1 << L, dtype=np.int64)
    for site in range(L):
        counts += (configs >> site) & 1
    return counts


def build_ground_state(L, N):
    """
    Normalized equal superposition of all configurations with N up-spins.

    Args:
        L (int): chain length, at most ORACLE_MAX_L
        N (int): up-spin count, 0 <= N <= L

    Returns:
        numpy.ndarray: StateVector of length 2^L

    Raises:
        DomainError: If L exceeds ORACLE_MAX_L or N is out of range
    """
    if L > ORACLE_MAX_L:
        raise DomainError(f"oracle states are limited to L <= {ORACLE_MAX_L}, got {L}")
    if L < 0 or not 0 <= N <= L:
        raise DomainError(f"invalid sector L={L}, N={N}")
    support = _popcounts(L) == N
    amplitude = 1.0 / math.sqrt(int(np.count_nonzero(support)))
    return np.where(support, amplitude, 0.0)


def verify_zero_energy(state, L, coupling=1.0):
    """
    Max-norm of H |state> for the periodic ferromagnet H = -J sum_i (sigma_i . sigma_i+1 - I).

    Args:
        state (numpy.ndarray): StateVector
        L (int): chain length
        coupling (float, optional): exchange constant J > 0. Defaults to 1.0

    Returns:
        float: largest absolute component of H |state>

    Note:
        On a bond, sigma . sigma - I = 2 (P_swap - I), which vanishes on equal
        spins and exchanges opposite ones.
    """
    state = np.asarray(state, dtype=float)
    if _chain_length(state) != L:
        raise DomainError(f"state length {state.size} does not match L={L}")
    configs = np.arange(1 << L)
    h_state = np.zeros_like(state)
    for i in range(L):
        j = (i + 1) % L
        if i == j:
            continue
        differ = ((configs >> i) & 1) != ((configs >> j) & 1)
        swapped = configs ^ ((1 << i) | (1 << j))
        h_state += np.where(differ, 2.0 * (state[swapped] - state), 0.0)
    return float(np.max(np.abs(-coupling * h_state), initial=0.0))


def _normalize_sites(block_sites, L):
    if isinstance(block_sites, (int, np.integer)):
        sites = [i for i in range(L) if (int(block_sites) >> i) & 1]
        if int(block_sites) >> L:
            raise DomainError(f"block mask {block_sites} has bits beyond site {L - 1}")
    else:
        sites = sorted({int(s) for s in block_sites})
    if any(s < 0 or s >= L for s in sites):
        raise DomainError(f"block sites {sites} outside [0, {L - 1}]")
    if not sites or len(sites) == L:
        raise DomainError("block must be a nonempty proper subset of the chain")
    return sites


def _block_factor(state, L, sites):
    """Reshape a state into a (2^n, 2^(L-n)) matrix with block bits as the row index."""
    environment = [i for i in range(L) if i not in sites]
    # numpy axis a holds the bit of site L - 1 - a
    axes = [L - 1 - s for s in reversed(sites)] + [L - 1 - e for e in reversed(environment)]
    tensor = np.asarray(state, dtype=float).reshape((2,) * L)
    return tensor.transpose(axes).reshape(1 << len(sites), 1 << len(environment))


def reduce(state, block_sites):
    """
    Reduced density matrix of a block by literal partial trace.

    Args:
        state (numpy.ndarray): StateVector of length 2^L
        block_sites (iterable or int): site indices, or a bitmask of sites

    Returns:
        numpy.ndarray: DensityMatrix entries[a][b] = sum_e psi(a + e) psi(b + e)

    Raises:
        DomainError: If the block is empty, covers the whole chain, or names
            sites outside the chain
    """
    L = _chain_length(state)
    sites = _normalize_sites(block_sites, L)
    factor = _block_factor(state, L, sites)
    rho = factor @ factor.T
    return 0.5 * (rho + rho.T)


def mixed_density(L, w, block_sites):
    """
    Reduced density matrix of the diagonal ensemble sum_N alpha_N |Psi(L, N)><Psi(L, N)|.

    Args:
        L (int): chain length
        w (WeightVector): ensemble weights of length L + 1
        block_sites (iterable or int): site indices or bitmask

    Returns:
        numpy.ndarray: DensityMatrix
    """
    if w.alphas.size != L + 1:
        raise WeightVectorError(f"weight vector has {w.alphas.size} entries, expected {L + 1}")
    rho = None
    for N, alpha in enumerate(w.alphas):
        if alpha == 0.0:
            continue
        term = alpha * reduce(build_ground_state(L, N), block_sites)
        rho = term if rho is None else rho + term
    return rho


def eigenvalues_symmetric(m):
    """
    All eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Args:
        m (numpy.ndarray): square symmetric matrix

    Returns:
        numpy.ndarray: eigenvalues sorted in descending order

    Raises:
        DomainError: If the matrix is not square or not symmetric
        OracleError: If off-diagonal mass stays above JACOBI_TOLERANCE after
            JACOBI_MAX_SWEEPS sweeps
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOLERANCE:
        raise DomainError("matrix is not symmetric")
    size = a.shape[0]
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off < JACOBI_TOLERANCE:
            logger.debug("Jacobi converged on %dx%d after %d sweeps", size, size, sweep)
            return np.sort(np.diag(a))[::-1]
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                new_p = c * col_p - s * col_q
                new_q = s * col_p + c * col_q
                a[:, p] = new_p
                a[:, q] = new_q
                a[p, :] = new_p
                a[q, :] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
    raise OracleError(f"Jacobi did not converge on a {size}x{size} matrix")


def block_eigenvalues(components, block_sites, L):
    """
    Nonzero-preserving block spectrum of sum_j w_j |psi_j><psi_j| via the smaller Gram matrix.

    With B = [sqrt(w_1) M_1 | sqrt(w_2) M_2 | ...], where M_j is state j
    reshaped to block x environment, the reduced matrix is B B^T and shares
    its nonzero eigenvalues with B^T B. The narrower of the two is diagonalized.

    Args:
        components (list): (weight, StateVector) pairs
        block_sites (iterable or int): site indices or bitmask
        L (int): chain length

    Returns:
        numpy.ndarray: eigenvalues in descending order
    """
    sites = _normalize_sites(block_sites, L)
    factors = [
        math.sqrt(weight) * _block_factor(state, L, sites)
        for weight, state in components
        if weight > 0.0
    ]
    stacked = np.hstack(factors)
    if stacked.shape[0] <= stacked.shape[1]:
        gram = stacked @ stacked.T
    else:
        gram = stacked.T @ stacked
    return eigenvalues_symmetric(0.5 * (gram + gram.T))


def oracle_entropy_bits(eigenvalues):
    """Entropy in bits of a list of eigenvalues, ignoring those below ENTROPY_EIGENVALUE_FLOOR."""
    values = np.asarray(eigenvalues, dtype=float)
    positive = values[values > ENTROPY_EIGENVALUE_FLOOR]
    return float(max(0.0, -np.sum(positive * np.log2(positive))))


def staggered_flip(state, L):
    """
    Flip every second spin (odd sites) of a state.

    Args:
        state (numpy.ndarray): StateVector of length 2^L
        L (int): even chain length

    Returns:
        numpy.ndarray: permuted StateVector, amplitude of c taken from c XOR 0b...1010

    Raises:
        DomainError: If L is odd
    """
    if L % 2:
        raise DomainError(f"staggered flip needs an even chain length, got {L}")
    if _chain_length(state) != L:
        raise DomainError(f"state length {np.asarray(state).size} does not match L={L}")
    mask = sum(1 << i for i in range(1, L, 2))
    return np.asarray(state, dtype=float)[np.arange(1 << L) ^ mask]


@dataclass
class FamilyResult:
    """Outcome of one invariant family of the verification sweep."""

    name: str
    cases: int = 0
    failures: int = 0
    max_deviation: float = 0.0

    @property
    def passed(self):
        return self.failures == 0

    def record(self, deviation, tolerance):
        self.cases += 1
        self.max_deviation = max(self.max_deviation, float(deviation))
        if not deviation <= tolerance:
            self.failures += 1
            return False
        return True

    def merge(self, other):
        self.cases += other.cases
        self.failures += other.failures
        self.max_deviation = max(self.max_deviation, other.max_deviation)


FAMILY_NAMES = (
    "theorem-equivalence",
    "entropy-equivalence",
    "rank-bound",
    "block-independence",
    "mixed-equivalence",
    "equal-weight",
    "zero-energy",
    "staggered-flip",
)


def _is_periodic_run(sites, L):
    members = set(sites)
    starts = sum(1 for s in members if (s - 1) % L not in members)
    return starts <= 1


def _random_block(rng, L, n):
    """Random block of n sites, non-contiguous (periodically) whenever 2 <= n <= L - 2."""
    sites = sorted(int(s) for s in rng.choice(L, size=n, replace=False))
    if 2 <= n <= L - 2:
        while _is_periodic_run(sites, L):
            sites = sorted(int(s) for s in rng.choice(L, size=n, replace=False))
    return sites


def _padded_deviation(oracle_values, analytic_values):
    size = max(oracle_values.size, analytic_values.size)
    lhs = np.concatenate([oracle_values, np.zeros(size - oracle_values.size)])
    rhs = np.concatenate([analytic_values, np.zeros(size - analytic_values.size)])
    return float(np.max(np.abs(lhs - rhs)))


def _rank(eigenvalues):
    return int(np.count_nonzero(eigenvalues > RANK_THRESHOLD))


def verify_length(L, seed=DEFAULT_SEED):
    """
    Runs every invariant family at one chain length.

    Args:
        L (int): chain length, 1 <= L <= ORACLE_MAX_L
        seed (int, optional): base seed for random blocks and weights

    Returns:
        dict: family name -> FamilyResult for this length
    """
    rng = np.random.default_rng([seed, L])
    results = {name: FamilyResult(name) for name in FAMILY_NAMES}
    states = [build_ground_state(L, N) for N in range(L + 1)]

    for N, state in enumerate(states):
        if not results["zero-energy"].record(verify_zero_energy(state, L), ZERO_ENERGY_TOLERANCE):
            logger.info("nonzero energy residual at L=%d N=%d", L, N)

    for N, state in enumerate(states):
        for n in range(1, L):
            analytic = sector_spectrum(SectorSpec(L, N, n))
            analytic_sorted = analytic.sorted_descending()
            analytic_entropy = shannon_entropy_bits(analytic)
            contiguous = block_eigenvalues([(1.0, state)], list(range(n)), L)
            shuffled = block_eigenvalues([(1.0, state)], _random_block(rng, L, n), L)
            for label, oracle in (("contiguous", contiguous), ("random", shuffled)):
                deviation = _padded_deviation(oracle, analytic_sorted)
                if not results["theorem-equivalence"].record(deviation, EIGENVALUE_TOLERANCE):
                    logger.info(
                        "spectrum mismatch L=%d N=%d n=%d (%s block): %.3g", L, N, n, label, deviation
                    )
                results["entropy-equivalence"].record(
                    abs(oracle_entropy_bits(oracle) - analytic_entropy), ENTROPY_TOLERANCE
                )
                results["rank-bound"].record(max(0, _rank(oracle) - (n + 1)), 0)
            results["block-independence"].record(
                _padded_deviation(contiguous, shuffled), EIGENVALUE_TOLERANCE
            )

    if L <= MIXED_MAX_L:
        for _ in range(MIXED_WEIGHTS_PER_LENGTH):
            w = WeightVector.dirichlet(L, rng)
            components = list(zip(w.alphas, states))
            for n in range(1, L):
                oracle = block_eigenvalues(components, list(range(n)), L)
                analytic = mixed_spectrum(L, n, w).sorted_descending()
                if not results["mixed-equivalence"].record(
                    _padded_deviation(oracle, analytic), EIGENVALUE_TOLERANCE
                ):
                    logger.info("mixed spectrum mismatch at L=%d n=%d", L, n)
                results["rank-bound"].record(max(0, _rank(oracle) - (n + 1)), 0)
        uniform = WeightVector.uniform(L)
        components = list(zip(uniform.alphas, states))
        for n in range(1, L):
            oracle = block_eigenvalues(components, list(range(n)), L)
            expected = np.full(n + 1, 1.0 / (n + 1))
            results["equal-weight"].record(_padded_deviation(oracle, expected), EIGENVALUE_TOLERANCE)

    if L % 2 == 0:
        for N, state in enumerate(states):
            flipped = staggered_flip(state, L)
            twice = staggered_flip(flipped, L)
            results["staggered-flip"].record(float(np.max(np.abs(twice - state))), 0.0)
            for n in range(1, L):
                block = _random_block(rng, L, n)
                before = oracle_entropy_bits(block_eigenvalues([(1.0, state)], block, L))
                after = oracle_entropy_bits(block_eigenvalues([(1.0, flipped)], block, L))
                results["staggered-flip"].record(abs(before - after), FLIP_ENTROPY_TOLERANCE)

    return results


def verify_length_chunk(args):
    """
    Perform verify_length per chunk of chain lengths
    """
    lengths, seed = args
    return [verify_length(L, seed) for L in lengths]


def run_verification_suite(max_L=DEFAULT_VERIFY_MAX_L, workers=1, seed=DEFAULT_SEED):
    """
    Sweeps all chain lengths 1..max_L and aggregates each invariant family.

    Args:
        max_L (int, optional): largest chain length, at most ORACLE_MAX_L.
            Defaults to DEFAULT_VERIFY_MAX_L
        workers (int, optional): processes to fan the sweep over. Defaults to 1
        seed (int, optional): base random seed. Defaults to DEFAULT_SEED

    Returns:
        list: FamilyResult per family, in FAMILY_NAMES order

    Note:
        Results do not depend on workers: every length seeds its own generator.
    """
    if not 1 <= max_L <= ORACLE_MAX_L:
        raise DomainError(f"max_L must lie in [1, {ORACLE_MAX_L}], got {max_L}")
    # Largest lengths first so the expensive chunks start early
    lengths = list(range(max_L, 0, -1))
    if workers > 1:
        chunks = [(lengths[i::workers], seed) for i in range(workers)]
        with multiprocessing.Pool(workers) as pool:
            per_chunk = pool.map(verify_length_chunk, chunks)
        per_length = [result for chunk in per_chunk for result in chunk]
    else:
        per_length = verify_length_chunk((lengths, seed))

    totals = {name: FamilyResult(name) for name in FAMILY_NAMES}
    for result in per_length:
        for name, family in result.items():
            totals[name].merge(family)
    for family in totals.values():
        logger.info(
            "%s: %d cases, %d failures, max deviation %.3g",
            family.name,
            family.cases,
            family.failures,
            family.max_deviation,
        )
    return [totals[name] for name in FAMILY_NAMES]
