"""Multimode click statistics: probabilities, distributions, identities, samplers.

The click probability of a pattern ``k`` is ``Ken[O] / sqrt(det Sigma)``
with ``O`` the detection kernel of the state, generalized to displaced
states by the loop Kensingtonian and to lossy/dark detectors by the noisy
variant.  Alongside the direct engines, this module carries the
independent routes used to cross-validate them: the threshold-detector
Torontonian law, the multiplexed expansion oracle, a classical-state Monte
Carlo estimator, and single-mode closed forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import detection, gaussian, matcore, matrixfn
from .detection import DetectorModel
from .errors import (
    IdentityViolation,
    NotClassical,
    OutOfRange,
    PatternOutOfRange,
    ProbabilityOutOfRange,
    TooLarge,
    ZeroConditional,
)

DISTRIBUTION_CAP = 200_000     # max number of enumerated patterns
EXPANSION_CAP = 1_000_000      # max number of compatible binary patterns
NEGATIVE_HARD_LIMIT = -1e-9    # beyond cancellation noise; treated as a bug
UPPER_SLACK = 1.0 + 1e-9


class _Diagnostics:
    """Counts probabilities clamped from small negative cancellation noise."""

    def __init__(self):
        self.clamped_negatives = 0

    def reset(self):
        self.clamped_negatives = 0


diagnostics = _Diagnostics()


def _clamp_probability(p: float) -> float:
    if p < NEGATIVE_HARD_LIMIT or p > UPPER_SLACK:
        raise ProbabilityOutOfRange(f"probability {p!r} outside [0, 1] beyond tolerance")
    if p < 0.0:
        diagnostics.clamped_negatives += 1
        return 0.0
    return p + 0.0  # normalizes -0.0


@dataclass(frozen=True)
class ProbRecord:
    """Click probability together with the pieces that produced it."""

    probability: float
    ken_value: float
    prefactor: float
    sqrt_det_sigma: float
    term_count: int
    engine: str


class _StateContext:
    """Per-state cache of the kernel, determinant and displacement prefactor."""

    def __init__(self, state: gaussian.GaussianState, model: DetectorModel):
        self.state = state
        self.model = model
        sigma = gaussian.husimi_sigma(state)
        sigma_inv = matcore.spd_inverse(sigma)
        self.kernel = np.eye(2 * state.modes) - sigma_inv
        self.sqrt_det_sigma = math.exp(0.5 * matcore.cholesky_logdet(sigma))
        self.prefactor = math.exp(-float(state.mean @ sigma_inv @ state.mean))
        if not model.ideal:
            self.engine = "noisy"
        elif state.displaced:
            self.engine = "loop"
        else:
            self.engine = "plain"

    def raw_value(self, pattern) -> float:
        m = self.model
        if self.engine == "noisy":
            return matrixfn.kensingtonian_noisy(
                self.kernel, self.state.mean, pattern, m.n_detectors, m.eta, m.nu
            )
        if self.engine == "loop":
            return matrixfn.loop_kensingtonian(
                self.kernel, self.state.mean, pattern, m.n_detectors
            )
        return matrixfn.kensingtonian(self.kernel, pattern, m.n_detectors)

    def record(self, pattern) -> ProbRecord:
        pattern = matrixfn.check_pattern(pattern, self.state.modes, self.model.n_detectors)
        value = self.raw_value(pattern)
        pref = self.prefactor if self.engine != "plain" else 1.0
        prob = _clamp_probability(pref * value / self.sqrt_det_sigma)
        return ProbRecord(
            probability=prob,
            ken_value=value,
            prefactor=pref,
            sqrt_det_sigma=self.sqrt_det_sigma,
            term_count=term_count(pattern),
            engine=self.engine,
        )


def click_prob_record(state, k, model: DetectorModel) -> ProbRecord:
    """Full record of a single click-pattern probability evaluation."""
    return _StateContext(state, model).record(k)


def click_prob(state, k, model: DetectorModel) -> float:
    """Probability of click pattern ``k`` under the given detector model."""
    return click_prob_record(state, k, model).probability


def threshold_prob(state, binary_k) -> float:
    """Threshold-detector outcome probability, ``Tor[O_(K)] / sqrt(det Sigma)``
    with ``K`` the non-click modes.

    Zero-mean states go through the Torontonian (a route independent of the
    Kensingtonian engine); displaced states fall back to the N = 1 click law.
    """
    pattern = matrixfn.check_pattern(binary_k, state.modes, 1)
    if state.displaced:
        return click_prob(state, pattern, DetectorModel(1))
    kernel = gaussian.kernel_O(state)
    silent = tuple(i + 1 for i, x in enumerate(pattern) if x == 0)
    value = matrixfn.torontonian(matcore.delete_modes(kernel, silent))
    sqrt_det = math.exp(0.5 * matcore.cholesky_logdet(gaussian.husimi_sigma(state)))
    return _clamp_probability(value / sqrt_det)


@dataclass(frozen=True)
class Distribution:
    """Complete click distribution over ``{0..N}^M`` in lexicographic order."""

    modes: int
    n_detectors: int
    probs: dict[tuple[int, ...], float]

    def total(self) -> float:
        return math.fsum(self.probs.values())

    @property
    def normalization_residual(self) -> float:
        return 1.0 - self.total()

    def tvd(self, other: "Distribution") -> float:
        keys = set(self.probs) | set(other.probs)
        return 0.5 * math.fsum(
            abs(self.probs.get(k, 0.0) - other.probs.get(k, 0.0)) for k in keys
        )

    def to_csv(self) -> str:
        """Delimited form: header ``k_1,...,k_M,probability``, lexicographic
        rows, 17 significant digits."""
        lines = [",".join(f"k_{i + 1}" for i in range(self.modes)) + ",probability"]
        for pattern in sorted(self.probs):
            prob = self.probs[pattern]
            lines.append(",".join(str(x) for x in pattern) + f",{prob:.17g}")
        return "\n".join(lines) + "\n"


def full_distribution(state, model: DetectorModel) -> Distribution:
    """Enumerate every pattern in ``{0..N}^M`` through the click engine."""
    m, n = state.modes, model.n_detectors
    if (n + 1) ** m > DISTRIBUTION_CAP:
        raise TooLarge(
            f"(N+1)^M = {(n + 1) ** m} patterns exceeds the cap of {DISTRIBUTION_CAP}"
        )
    ctx = _StateContext(state, model)
    probs = {}
    for pattern in itertools.product(range(n + 1), repeat=m):
        probs[pattern] = ctx.record(pattern).probability
    return Distribution(modes=m, n_detectors=n, probs=probs)


# -- hardness-proof identities ------------------------------------------------

def is_collision(pattern) -> bool:
    return any(x > 1 for x in pattern)


def _threshold_distribution(state, model: DetectorModel) -> dict[tuple[int, ...], float]:
    """Threshold law matched to the click detector.

    Ideal detectors use the independent Torontonian route; noisy ones use a
    single threshold detector with the same efficiency and the summed dark
    count ``N nu`` (the OR of N noisy threshold detectors).
    """
    m = state.modes
    if model.ideal:
        return {
            b: threshold_prob(state, b) for b in itertools.product((0, 1), repeat=m)
        }
    merged = DetectorModel(1, model.eta, model.n_detectors * model.nu)
    return {
        b: click_prob(state, b, merged) for b in itertools.product((0, 1), repeat=m)
    }


@dataclass(frozen=True)
class CollisionReport:
    """Numerical audit of the collision identities behind the hardness proof."""

    epsilon: float
    tvd_to_threshold: float
    compat_residuals: dict[tuple[int, ...], float]
    marginal_residuals: tuple[float, ...]

    @property
    def max_compat_residual(self) -> float:
        return max(self.compat_residuals.values(), default=0.0)

    @property
    def max_marginal_residual(self) -> float:
        return max(self.marginal_residuals, default=0.0)


def collision_analysis(state, model: DetectorModel) -> CollisionReport:
    """Check that click and threshold statistics differ exactly by collisions.

    Reports the collision probability ``epsilon``, the TVD between the click
    distribution and the threshold one (these must coincide; violation
    raises), the per-pattern residual of the compatibility decomposition
    ``p_thresh(k) = p(k) + sum of compatible collision probabilities``, and
    the per-mode residual between threshold click marginals and the
    probability of at least one click.
    """
    dist = full_distribution(state, model)
    thresh = _threshold_distribution(state, model)

    epsilon = math.fsum(p for k, p in dist.probs.items() if is_collision(k))
    tvd = 0.5 * math.fsum(
        abs(p - thresh.get(k, 0.0)) for k, p in dist.probs.items()
    )

    compat = {}
    for b, pt in thresh.items():
        support = tuple(x > 0 for x in b)
        collision_mass = math.fsum(
            p
            for k, p in dist.probs.items()
            if is_collision(k) and tuple(x > 0 for x in k) == support
        )
        compat[b] = abs(pt - dist.probs.get(b, 0.0) - collision_mass)

    marginals = []
    for i in range(1, state.modes + 1):
        at_least_one = math.fsum(p for k, p in dist.probs.items() if k[i - 1] >= 1)
        single = gaussian.reduce(state, (i,))
        if model.ideal:
            one_click = threshold_prob(single, (1,))
        else:
            merged = DetectorModel(1, model.eta, model.n_detectors * model.nu)
            one_click = click_prob(single, (1,), merged)
        marginals.append(abs(at_least_one - one_click))

    if abs(tvd - epsilon) > 1e-9:
        raise IdentityViolation(
            f"TVD to threshold statistics is {tvd!r} but collision mass is {epsilon!r}"
        )
    return CollisionReport(
        epsilon=epsilon,
        tvd_to_threshold=tvd,
        compat_residuals=compat,
        marginal_residuals=tuple(marginals),
    )


# -- independent oracles -------------------------------------------------------

def expansion_oracle_prob(state, k, n_detectors: int) -> float:
    """Click probability via the MN-mode threshold expansion.

    Splits each mode over ``N`` vacuum ports and sums the threshold
    probabilities of every binary outcome with exactly ``k_i`` clicks inside
    block ``i``.  Completely bypasses the Kensingtonian.
    """
    pattern = matrixfn.check_pattern(k, state.modes, n_detectors)
    combos = math.prod(math.comb(n_detectors, x) for x in pattern)
    if combos > EXPANSION_CAP:
        raise TooLarge(f"{combos} compatible binary patterns exceeds {EXPANSION_CAP}")
    expanded = gaussian.multiplex_expand(state, n_detectors)

    sigma = gaussian.husimi_sigma(expanded)
    sigma_inv = matcore.spd_inverse(sigma)
    kernel = np.eye(2 * expanded.modes) - sigma_inv
    sqrt_det = math.exp(0.5 * matcore.cholesky_logdet(sigma))
    prefactor = math.exp(-float(expanded.mean @ sigma_inv @ expanded.mean))

    block_choices = [
        list(itertools.combinations(range(n_detectors), x)) for x in pattern
    ]
    terms = []
    for choice in itertools.product(*block_choices):
        binary = [0] * (state.modes * n_detectors)
        for block, hits in enumerate(choice):
            for port in hits:
                binary[block * n_detectors + port] = 1
        if expanded.displaced:
            value = prefactor * matrixfn.loop_kensingtonian(
                kernel, expanded.mean, binary, 1
            )
        else:
            silent = tuple(i + 1 for i, x in enumerate(binary) if x == 0)
            value = matrixfn.torontonian(matcore.delete_modes(kernel, silent))
        terms.append(value / sqrt_det)
    return _clamp_probability(math.fsum(terms))


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    samples: int


def mc_classical_oracle(
    state, k, model: DetectorModel, samples: int, seed: int
) -> MonteCarloEstimate:
    """Monte-Carlo click probability for states with a classical P-function.

    Draws coherent amplitudes from the Gaussian P-function (requires
    ``sigma - I >= 0``) and averages the per-mode coherent click law.
    """
    pattern = matrixfn.check_pattern(k, state.modes, model.n_detectors)
    excess = state.cov - np.eye(2 * state.modes)
    eigvals, eigvecs = np.linalg.eigh(excess)
    if eigvals.min() < -1e-9:
        raise NotClassical(
            f"sigma - I has eigenvalue {eigvals.min():.3e}; P-function not a density"
        )
    transform = eigvecs @ np.diag(np.sqrt(np.clip(eigvals, 0.0, None) / 4.0))
    rng = np.random.default_rng(seed)
    betas = state.mean + rng.standard_normal((samples, 2 * state.modes)) @ transform.T
    values = np.ones(samples)
    for i, target in enumerate(pattern):
        intensities = betas[:, 2 * i] ** 2 + betas[:, 2 * i + 1] ** 2
        values *= [
            detection.coherent_click_closed(x, model, target) for x in intensities
        ]
    value = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MonteCarloEstimate(value=value, stderr=stderr, samples=samples)


# -- term counting ---------------------------------------------------------------

def term_count(k) -> int:
    """Number of determinant contributions of the click engine, prod(k_i + 1)."""
    return math.prod(int(x) + 1 for x in k)


def mean_term_bounds(state, model: DetectorModel, n: int) -> tuple[float, float, float]:
    """(lower bound, conditional mean, upper bound) of the term count at a
    fixed total click number ``n``.

    The mean conditions the state's own click distribution on total clicks
    ``n``; the bounds are ``(1 - eps) 2^n + eps (n+1)`` and
    ``(1 - eps) 2^n + eps e^n`` with ``eps`` the conditional collision mass.
    """
    dist = full_distribution(state, model)
    selected = {k: p for k, p in dist.probs.items() if sum(k) == n}
    mass = math.fsum(selected.values())
    if mass <= 1e-15:
        raise OutOfRange(f"no probability mass at total clicks {n}")
    mean = math.fsum(p * term_count(k) for k, p in selected.items()) / mass
    eps = math.fsum(p for k, p in selected.items() if is_collision(k)) / mass
    lower = (1.0 - eps) * 2.0 ** n + eps * (n + 1)
    upper = (1.0 - eps) * 2.0 ** n + eps * math.exp(n)
    return lower, mean, upper


def tvd_curve(nbar_grid, n_detectors: int) -> list[tuple[float, float]]:
    """Click-vs-PNR total variational distance over a thermal probe sweep."""
    return [
        (float(nbar), detection.povm_convergence_gap(float(nbar), n_detectors))
        for nbar in nbar_grid
    ]


# -- samplers --------------------------------------------------------------------

def sample_exact(state, model: DetectorModel, count: int, seed: int):
    """Inverse-CDF sampling from the fully enumerated distribution."""
    dist = full_distribution(state, model)
    patterns = sorted(dist.probs)
    weights = np.array([dist.probs[p] for p in patterns])
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    draws = np.searchsorted(cdf, rng.random(count), side="right")
    return [patterns[i] for i in draws]


def sample_chain(state, model: DetectorModel, count: int, seed: int):
    """Mode-by-mode chain-rule sampling.

    Conditional laws come from click probabilities of the reduced states,
    ``p(k_j | k_1..k_{j-1}) = p_{1..j}(...) / p_{1..j-1}(...)``; each
    distinct prefix is evaluated once and cached.  A prefix whose
    probability underflows falls back to renormalized enumeration.
    """
    m, n = state.modes, model.n_detectors
    reduced = [gaussian.reduce(state, tuple(range(1, j + 1))) for j in range(1, m + 1)]
    joint_cache: dict[tuple[int, ...], np.ndarray] = {}
    cdf_cache: dict[tuple[int, ...], np.ndarray] = {}

    def joint(prefix):
        if prefix not in joint_cache:
            depth = len(prefix)
            ctx = _StateContext(reduced[depth], model)
            joint_cache[prefix] = np.array(
                [ctx.record(prefix + (v,)).probability for v in range(n + 1)]
            )
        return joint_cache[prefix]

    def conditional_cdf(prefix):
        if prefix not in cdf_cache:
            vec = joint(prefix)
            total = float(np.sum(vec))
            denom = 1.0 if not prefix else float(joint(prefix[:-1])[prefix[-1]])
            if denom <= 0.0:
                denom = total  # renormalized enumeration fallback
            if denom <= 0.0 or total <= 0.0:
                raise ZeroConditional(
                    f"prefix {prefix} has no resolvable probability mass"
                )
            cdf = np.cumsum(vec / denom)
            cdf /= cdf[-1]
            cdf_cache[prefix] = cdf
        return cdf_cache[prefix]

    rng = np.random.default_rng(seed)
    uniforms = rng.random((count, m))
    out = []
    for row in range(count):
        prefix: tuple[int, ...] = ()
        for j in range(m):
            cdf = conditional_cdf(prefix)
            v = int(np.searchsorted(cdf, uniforms[row, j], side="right"))
            prefix = prefix + (min(v, n),)
        out.append(prefix)
    return out
