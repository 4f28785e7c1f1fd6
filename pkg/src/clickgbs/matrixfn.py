"""Matrix functions governing photo-detection statistics of Gaussian states.

The Hafnian (photon-number resolving), the Torontonian (threshold), and the
Kensingtonian family (click counting: ideal, displaced, noisy) are all
alternating sums whose terms are inverse square-root determinants of shifted
principal submatrices.  Every term funnels through
:func:`weighted_vacuum_overlap`; signed terms cancel catastrophically as the
click number grows, so sums are accumulated exactly with ``math.fsum``.

All functions are pure and deterministic for a fixed input.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import matcore
from .errors import (
    DimensionMismatch,
    NotSwapSymmetric,
    OutOfRange,
    PatternOutOfRange,
    TooLarge,
)

HAFNIAN_MAX_MODES = 8       # enumeration is (2n-1)!! terms
HAF_TOR_MAX_MODES = 4
MULTINOMIAL_EXACT_MAX = 20  # exact integer arithmetic below, log-gamma above
MULTINOMIAL_MAX = 64


class _Instrumentation:
    """Crude per-process counter of determinant evaluations (benchmarking aid)."""

    def __init__(self):
        self.determinant_evals = 0

    def reset(self):
        self.determinant_evals = 0


instrumentation = _Instrumentation()


def hafnian(a) -> float:
    """Sum over perfect matchings of a symmetric matrix of even dimension.

    Brute-force enumeration; refuses matrices beyond 2 x 8 modes.
    """
    a = matcore.as_symmetric(a)
    n = a.shape[0] // 2
    if n > HAFNIAN_MAX_MODES:
        raise TooLarge(f"hafnian enumeration capped at dimension {2 * HAFNIAN_MAX_MODES}")

    def match(idx: tuple[int, ...]) -> float:
        if not idx:
            return 1.0
        first = idx[0]
        total = 0.0
        for pos in range(1, len(idx)):
            rest = idx[1:pos] + idx[pos + 1:]
            total += a[first, idx[pos]] * match(rest)
        return total

    return match(tuple(range(2 * n)))


def _mode_subsets(num_modes: int):
    for size in range(num_modes + 1):
        yield from itertools.combinations(range(1, num_modes + 1), size)


def torontonian(a) -> float:
    """Alternating subset sum ``sum_Z (-1)^|Z| det(I - A_(Z))^{-1/2}``.

    ``A_(Z)`` deletes the interleaved rows/columns of every mode in ``Z``;
    the empty matrix contributes determinant 1.  Requires ``I - A`` positive
    definite (all principal submatrices then are as well).
    """
    a = matcore.as_symmetric(a)
    num_modes = a.shape[0] // 2
    terms = []
    for z in _mode_subsets(num_modes):
        sub = matcore.delete_modes(a, z)
        shifted = np.eye(sub.shape[0]) - sub
        logdet = matcore.cholesky_logdet(shifted)
        instrumentation.determinant_evals += 1
        terms.append((-1.0) ** len(z) * math.exp(-0.5 * logdet))
    return math.fsum(terms)


@dataclass(frozen=True)
class LambdaVector:
    """Per-mode effective inefficiencies and scalar term weights.

    One of these describes a single term of a (noisy) Kensingtonian sum:
    ``lambdas[i]`` is the inefficiency of the vacuum overlap on mode ``i``
    and ``weights[i]`` the mode's dark-count attenuation factor.
    """

    lambdas: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.lambdas) != len(self.weights):
            raise DimensionMismatch("lambdas and weights must have equal length")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambdas):
            raise OutOfRange("every lambda must lie in [0, 1]")
        if any(w <= 0.0 for w in self.weights):
            raise OutOfRange("weights must be positive")


def weighted_vacuum_overlap(sigma_inv, lambdas, v=None) -> float:
    """Gaussian overlap integral behind every Kensingtonian term.

    With ``Z = {i : lambda_i == 1}`` (handled exactly as delta functions,
    never as a numerical limit) and ``D`` the diagonal direct sum of
    ``lambda_i / (1 - lambda_i) I_2`` over the kept modes, returns

    ``prod_{i not in Z} 1/(1 - lambda_i)
    * exp(v_(Z)^T [sigma_inv_(Z) + D]^{-1} v_(Z))
    / sqrt(det(sigma_inv_(Z) + D))``.

    ``v`` defaults to zero, making the exponential factor 1; deleting every
    mode leaves exactly 1.  Accepts a :class:`LambdaVector` or a plain
    sequence of lambdas; the weights of a ``LambdaVector`` do not enter the
    integral and are the caller's to apply.
    """
    if isinstance(lambdas, LambdaVector):
        lambdas = lambdas.lambdas
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    if np.any(lam < 0.0) or np.any(lam > 1.0):
        raise OutOfRange("every lambda must lie in [0, 1]")
    sigma_inv = np.asarray(sigma_inv, dtype=float)
    num_modes = lam.shape[0]
    if sigma_inv.shape != (2 * num_modes, 2 * num_modes):
        raise DimensionMismatch(
            f"sigma_inv must be {2 * num_modes} x {2 * num_modes} for {num_modes} modes"
        )
    deleted = tuple(i + 1 for i in range(num_modes) if lam[i] == 1.0)
    kept = lam < 1.0
    sub = matcore.delete_modes(sigma_inv, deleted)
    lam_kept = lam[kept]
    shifted = sub + np.diag(np.repeat(lam_kept / (1.0 - lam_kept), 2))
    logdet = matcore.cholesky_logdet(shifted)
    instrumentation.determinant_evals += 1
    value = float(np.prod(1.0 / (1.0 - lam_kept))) * math.exp(-0.5 * logdet)
    if v is not None and shifted.shape[0] > 0:
        v_kept = matcore.delete_vector_modes(v, deleted, num_modes)
        low = np.linalg.cholesky(shifted)
        y = solve_triangular(low, v_kept, lower=True)
        value *= math.exp(float(y @ y))
    return value


def _multinomial(total: int, parts: tuple[int, int, int]) -> float:
    """Trinomial coefficient total! / (a! b! c!), with a + b + c == total."""
    if total > MULTINOMIAL_MAX:
        raise TooLarge(f"multinomial coefficients capped at N = {MULTINOMIAL_MAX}")
    if total <= MULTINOMIAL_EXACT_MAX:
        num = math.factorial(total)
        for p in parts:
            num //= math.factorial(p)
        return float(num)
    acc = math.lgamma(total + 1)
    for p in parts:
        acc -= math.lgamma(p + 1)
    return math.exp(acc)


def check_pattern(k, num_modes: int, n_detectors: int) -> tuple[int, ...]:
    """Validate a click pattern against the mode count and detector range."""
    pattern = tuple(int(x) for x in k)
    if len(pattern) != num_modes:
        raise PatternOutOfRange(
            f"pattern has {len(pattern)} entries, state has {num_modes} modes"
        )
    for x in pattern:
        if x < 0 or x > n_detectors:
            raise PatternOutOfRange(f"pattern entry {x} exceeds N = {n_detectors}")
    return pattern


def _ken_sum(a, k, n_detectors, alpha, eta, nu) -> float:
    """Shared engine for the Kensingtonian family.

    Enumerates the multi-index d in mixed-radix order, maps each term to a
    weighted vacuum overlap with per-mode inefficiency
    ``lambda_i = eta (N - d_i) / N`` and dark-count weight
    ``exp(-nu (N - d_i))``, and reduces with compensated summation.
    """
    a = matcore.as_symmetric(a)
    num_modes = a.shape[0] // 2
    n = int(n_detectors)
    if n < 1:
        raise OutOfRange(f"need at least one threshold detector, got {n}")
    pattern = check_pattern(k, num_modes, n)
    sigma_inv = np.eye(2 * num_modes) - a
    matcore.cholesky_factor(sigma_inv)  # fail fast if I - A is not SPD
    v = None
    if alpha is not None:
        alpha = np.asarray(alpha, dtype=float).reshape(-1)
        if alpha.shape[0] != 2 * num_modes:
            raise DimensionMismatch("alpha must have two entries per mode")
        v = sigma_inv @ alpha

    terms = []
    for d in itertools.product(*[range(x + 1) for x in pattern]):
        coeff = 1.0
        lambdas = []
        weights = []
        for ki, di in zip(pattern, d):
            coeff *= _multinomial(n, (n - ki, ki - di, di))
            if (ki - di) % 2:
                coeff = -coeff
            # exact delta-function branch: lambda == 1 iff eta == 1 and d_i == 0
            lambdas.append(1.0 if (di == 0 and eta == 1.0) else eta * (n - di) / n)
            weights.append(math.exp(-nu * (n - di)) if nu != 0.0 else 1.0)
        lam = LambdaVector(tuple(lambdas), tuple(weights))
        coeff *= math.prod(lam.weights)
        terms.append(coeff * weighted_vacuum_overlap(sigma_inv, lam, v))
    return math.fsum(terms)


def kensingtonian(a, k, n_detectors: int) -> float:
    """Kensingtonian of a 2M x 2M matrix for click pattern ``k``.

    ``sum_{0 <= d <= k} prod_i [multinomial(N; N-k_i, k_i-d_i, d_i)
    (-1)^{k_i - d_i}] prod_{j not in Z} [N / d_j]
    / sqrt(det((I - A)_(Z) + D_Z))``
    with ``Z = {i : d_i = 0}``.  For a detection kernel ``A`` of a zero-mean
    state, the click probability is this value divided by ``sqrt(det Sigma)``.
    """
    return _ken_sum(a, k, n_detectors, alpha=None, eta=1.0, nu=0.0)


def loop_kensingtonian(a, alpha, k, n_detectors: int) -> float:
    """Displaced-state variant: each term gains the exponential factor
    ``exp(((I-A) alpha)_(Z)^T [(I-A)_(Z) + D_Z]^{-1} ((I-A) alpha)_(Z))``.

    The full probability is ``p(0) * lken`` with
    ``p(0) = exp(-alpha^T Sigma^{-1} alpha) / sqrt(det Sigma)``.
    """
    return _ken_sum(a, k, n_detectors, alpha=alpha, eta=1.0, nu=0.0)


def kensingtonian_noisy(a, alpha, k, n_detectors: int, eta: float, nu: float) -> float:
    """Click detectors built from threshold detectors of efficiency ``eta``
    and dark-count rate ``nu`` (response substitution n -> eta n + N nu).

    Reduces exactly to :func:`loop_kensingtonian` at ``eta=1, nu=0``.
    """
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"eta must be in [0, 1], got {eta}")
    if nu < 0.0:
        raise OutOfRange(f"nu must be >= 0, got {nu}")
    return _ken_sum(a, k, n_detectors, alpha=alpha, eta=eta, nu=nu)


def _half_swap_conjugate(a: np.ndarray) -> np.ndarray:
    n = a.shape[0] // 2
    perm = list(range(n, 2 * n)) + list(range(n))
    return a[np.ix_(perm, perm)]


def haf_tor_coefficient(a, n: int) -> float:
    """Degree-n Taylor coefficient of ``Tor[eta A]`` around ``eta = 0``.

    Evaluates the Torontonian over truncated-series scalars with
    block-ordered deletion, so the coefficient can be compared against the
    Hafnian of ``X A`` (``X`` the half-swap).  ``A`` must satisfy
    ``X A X = A``; otherwise ``X A`` is not symmetric and the identity has
    no meaning.
    """
    a = matcore.as_symmetric(a)
    if a.shape[0] != 2 * n:
        raise DimensionMismatch(f"matrix must be {2 * n} x {2 * n} for n = {n}")
    if n > HAF_TOR_MAX_MODES:
        raise TooLarge(f"series Torontonian capped at n = {HAF_TOR_MAX_MODES}")
    defect = np.max(np.abs(_half_swap_conjugate(a) - a)) if n else 0.0
    if defect > 1e-9:
        raise NotSwapSymmetric(f"X A X differs from A by {defect:.3e}")

    acc = np.zeros(n + 1)
    for z in _mode_subsets(n):
        sub = matcore.delete_blocks(a, z)
        m = sub.shape[0]
        series_matrix = [
            [
                matcore.TruncatedSeries.linear(1.0 if i == j else 0.0, -sub[i, j], n)
                for j in range(m)
            ]
            for i in range(m)
        ]
        term = matcore.series_det_invsqrt(series_matrix, n)
        acc += (-1.0) ** len(z) * np.asarray(term.coeffs)
    return float(acc[n])


def half_swap(n: int) -> np.ndarray:
    """The block swap matrix [[0, I_n], [I_n, 0]]."""
    x = np.zeros((2 * n, 2 * n))
    x[:n, n:] = np.eye(n)
    x[n:, :n] = np.eye(n)
    return x
