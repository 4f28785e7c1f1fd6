"""Single-detector click-counting theory.

A click-counting detector splits the signal evenly over ``N`` threshold
detectors and reports how many fired.  This module gives the detector's
POVM coefficients in the Fock basis, closed-form single-mode outcome laws
for thermal and coherent probes (with efficiency and dark counts), and the
convergence gap to true photon-number resolution as ``N`` grows.  These
serve as independent oracles for the multimode engines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NegativeMeanPhotons, OutOfRange, TailTooHeavy

STIRLING_MAX = 64          # exact integer recurrence below, rejected above
PNR_TAIL_MAX = 1e-10       # heaviest truncation click_from_pnr accepts
CONVERGENCE_TAIL = 1e-13   # truncation target for the click-vs-PNR gap


@dataclass(frozen=True)
class DetectorModel:
    """Click-counting detector: ``n_detectors`` threshold detectors, each of
    efficiency ``eta`` and dark-count rate ``nu``."""

    n_detectors: int
    eta: float = 1.0
    nu: float = 0.0

    def __post_init__(self):
        if self.n_detectors < 1:
            raise OutOfRange(f"need at least one threshold detector, got {self.n_detectors}")
        if not 0.0 <= self.eta <= 1.0:
            raise OutOfRange(f"eta must be in [0, 1], got {self.eta}")
        if self.nu < 0.0:
            raise OutOfRange(f"nu must be >= 0, got {self.nu}")

    @property
    def ideal(self) -> bool:
        return self.eta == 1.0 and self.nu == 0.0


_stirling_cache: dict[int, list[int]] = {0: [1]}


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind, exact up to n = 64."""
    if not 0 <= k <= n <= STIRLING_MAX:
        raise OutOfRange(f"stirling2 requires 0 <= k <= n <= {STIRLING_MAX}")
    for row in range(max(_stirling_cache) + 1, n + 1):
        prev = _stirling_cache[row - 1]
        cur = [0] * (row + 1)
        for j in range(1, row + 1):
            cur[j] = j * (prev[j] if j < row else 0) + prev[j - 1]
        _stirling_cache[row] = cur
    return _stirling_cache[n][k]


def click_coeff(n_detectors: int, k: int, n: int) -> float:
    """Coefficient of ``|n><n|`` in the k-click POVM element.

    ``c_k(n) = binom(N, k) N^{-n} d^n/dx^n (e^x - 1)^k |_{x=0}``; the
    derivative equals ``k! S2(n, k)`` and is computed by exact
    inclusion-exclusion so arbitrary ``n`` stays exact.  Zero for ``n < k``.
    """
    if not 0 <= k <= n_detectors:
        raise OutOfRange(f"need 0 <= k <= N, got k={k}, N={n_detectors}")
    if n < 0:
        raise OutOfRange(f"need n >= 0, got {n}")
    if n < k:
        return 0.0
    deriv = sum((-1) ** (k - j) * math.comb(k, j) * j ** n for j in range(k + 1))
    return float(Fraction(math.comb(n_detectors, k) * deriv, n_detectors ** n))


@dataclass(frozen=True)
class PnrDistribution:
    """Photon-number law truncated at a cutoff, with its residual tail mass."""

    probs: np.ndarray
    tail: float

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise OutOfRange("probs must be a non-empty vector")
        if np.any(probs < 0.0) or self.tail < -1e-12:
            raise OutOfRange("probabilities and tail mass must be non-negative")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def cutoff(self) -> int:
        return self.probs.size - 1


def thermal_pnr(nbar: float, cutoff: int) -> PnrDistribution:
    """Geometric photon-number law ``nbar^n / (1 + nbar)^{n+1}`` up to cutoff."""
    if nbar < 0:
        raise NegativeMeanPhotons(f"nbar must be >= 0, got {nbar}")
    if cutoff < 0:
        raise OutOfRange("cutoff must be >= 0")
    n = np.arange(cutoff + 1)
    probs = nbar ** n / (1.0 + nbar) ** (n + 1)
    return PnrDistribution(probs, 1.0 - math.fsum(probs))


def click_from_pnr(pnr: PnrDistribution, n_detectors: int) -> np.ndarray:
    """Push a photon-number law through the click POVM: p(k) = sum_n c_k(n) p(n)."""
    if pnr.tail >= PNR_TAIL_MAX:
        raise TailTooHeavy(
            f"PNR tail mass {pnr.tail:.3e} exceeds {PNR_TAIL_MAX:.0e}; raise the cutoff"
        )
    out = np.empty(n_detectors + 1)
    for k in range(n_detectors + 1):
        out[k] = math.fsum(
            click_coeff(n_detectors, k, n) * pnr.probs[n]
            for n in range(k, pnr.cutoff + 1)
        )
    return out


def thermal_click_closed(nbar: float, model: DetectorModel, k: int) -> float:
    """Exact k-click probability for a thermal probe.

    From ``<:exp(-lam n):> = 1 / (1 + lam nbar)`` term by term:
    ``p(k) = binom(N, k) sum_l binom(k, l) (-1)^l exp(-nu (N-k+l))
    / (1 + eta nbar (N-k+l)/N)``.
    """
    if nbar < 0:
        raise NegativeMeanPhotons(f"nbar must be >= 0, got {nbar}")
    n, eta, nu = model.n_detectors, model.eta, model.nu
    if not 0 <= k <= n:
        raise OutOfRange(f"need 0 <= k <= N, got k={k}")
    terms = [
        math.comb(k, ell)
        * (-1.0) ** ell
        * math.exp(-nu * (n - k + ell))
        / (1.0 + eta * nbar * (n - k + ell) / n)
        for ell in range(k + 1)
    ]
    return math.comb(n, k) * math.fsum(terms)


def coherent_click_closed(intensity: float, model: DetectorModel, k: int) -> float:
    """Exact k-click probability for a coherent probe of ``|gamma|^2 = intensity``.

    Each threshold detector misses independently with probability
    ``q = exp(-(eta intensity / N + nu))``, so the click count is binomial.
    """
    if intensity < 0:
        raise OutOfRange(f"intensity must be >= 0, got {intensity}")
    n, eta, nu = model.n_detectors, model.eta, model.nu
    if not 0 <= k <= n:
        raise OutOfRange(f"need 0 <= k <= N, got k={k}")
    q = math.exp(-(eta * intensity / n + nu))
    return math.comb(n, k) * q ** (n - k) * (1.0 - q) ** k


def _thermal_cutoff(nbar: float, n_detectors: int, tail_target: float) -> int:
    if nbar == 0.0:
        return n_detectors + 1
    ratio = nbar / (1.0 + nbar)
    needed = math.ceil(math.log(tail_target) / math.log(ratio))
    return max(n_detectors + 1, needed)


def povm_convergence_gap(nbar: float, n_detectors: int) -> float:
    """Total variational distance between click and PNR statistics of a
    thermal probe.

    Distributions live on different supports; they are compared index-wise
    with the click probability zero beyond ``N`` and the analytic geometric
    tail beyond the cutoff included.
    """
    cutoff = _thermal_cutoff(nbar, n_detectors, CONVERGENCE_TAIL)
    pnr = thermal_pnr(nbar, cutoff)
    click = click_from_pnr(pnr, n_detectors)
    head = math.fsum(
        abs(click[j] - pnr.probs[j]) for j in range(n_detectors + 1)
    )
    excess = math.fsum(pnr.probs[n_detectors + 1:]) + max(pnr.tail, 0.0)
    return 0.5 * (head + excess)
