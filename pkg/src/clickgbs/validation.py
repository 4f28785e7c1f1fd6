"""Cross-validation suites behind the ``validate`` CLI command.

Each check exercises an exact identity on seeded desk-scale instances and
reports its worst residual against a fixed tolerance.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from . import gaussian, matcore, matrixfn, probstat
from .detection import DetectorModel

DEFAULT_SEED = 7


def make_instance(
    seed: int,
    modes: int,
    *,
    displaced: bool = False,
    loss: float | None = None,
    max_squeeze: float = 1.0,
) -> gaussian.GaussianState:
    """Seeded physical state: squeezed inputs through a Haar interferometer,
    optionally displaced (|gamma| <= 1 per mode) and sent through loss."""
    rng = np.random.default_rng(seed)
    parts = [gaussian.squeezed(rng.uniform(0.3, max_squeeze)) for _ in range(modes)]
    state = functools.reduce(gaussian.tensor, parts)
    if modes > 1:
        state = gaussian.apply_unitary(state, gaussian.haar_unitary(modes, seed + 10_000))
    if displaced:
        offsets = rng.uniform(-0.7, 0.7, size=2 * modes)
        state = gaussian.GaussianState(state.cov, state.mean + offsets)
    if loss is not None:
        state = gaussian.loss_channel(state, loss)
    return state


def _entry(check: str, residual: float, tolerance: float, note: str | None = None) -> dict:
    entry = {
        "check": check,
        "max_residual": residual,
        "tolerance": tolerance,
        "pass": bool(residual < tolerance),
    }
    if note:
        entry["note"] = note
    return entry


def _check_ken_tor(seed: int) -> dict:
    worst = 0.0
    for i in range(12):
        modes = 1 + i % 3
        state = make_instance(seed + i, modes, loss=0.8 if i % 2 else None)
        kernel = gaussian.kernel_O(state)
        for pattern in itertools.product((0, 1), repeat=modes):
            ken = matrixfn.kensingtonian(kernel, pattern, 1)
            silent = tuple(j + 1 for j, x in enumerate(pattern) if x == 0)
            tor = matrixfn.torontonian(matcore.delete_modes(kernel, silent))
            worst = max(worst, abs(ken - tor) / max(abs(tor), 1e-30))
    return _entry("ken_equals_tor_at_N1", worst, 1e-10)


def _collision_checks(seed: int, extra_state=None) -> list[dict]:
    instances = [
        (make_instance(seed + 1, 2), DetectorModel(3)),
        (make_instance(seed + 2, 2, displaced=True), DetectorModel(2)),
        (make_instance(seed + 3, 3, loss=0.7), DetectorModel(2)),
    ]
    if extra_state is not None:
        instances.append((extra_state, DetectorModel(2)))
    worst_tvd = worst_compat = worst_marginal = 0.0
    for state, model in instances:
        report = probstat.collision_analysis(state, model)
        worst_tvd = max(worst_tvd, abs(report.tvd_to_threshold - report.epsilon))
        worst_compat = max(worst_compat, report.max_compat_residual)
        worst_marginal = max(worst_marginal, report.max_marginal_residual)
    return [
        _entry("tvd_equals_collision_mass", worst_tvd, 1e-9),
        _entry("collision_compatibility", worst_compat, 1e-9),
        _entry("threshold_click_marginals", worst_marginal, 1e-9),
    ]


def _check_expansion(seed: int) -> dict:
    cases = [
        (make_instance(seed + 4, 1), 3),
        (make_instance(seed + 5, 2), 2),
        (make_instance(seed + 6, 2, displaced=True), 2),
    ]
    worst = 0.0
    for state, n in cases:
        model = DetectorModel(n)
        for pattern in itertools.product(range(n + 1), repeat=state.modes):
            direct = probstat.click_prob(state, pattern, model)
            oracle = probstat.expansion_oracle_prob(state, pattern, n)
            worst = max(
                worst, abs(direct - oracle) / max(abs(direct), abs(oracle), 1e-30)
            )
    return _entry("expansion_oracle_equivalence", worst, 1e-8)


def _check_term_bounds(seed: int) -> dict:
    worst = 0.0
    for i in range(3):
        state = make_instance(seed + 7 + i, 3)
        model = DetectorModel(2)
        for n in (1, 2, 3):
            lower, mean, upper = probstat.mean_term_bounds(state, model, n)
            worst = max(worst, lower - mean, mean - upper, 0.0)
    return _entry(
        "term_count_bounds",
        worst,
        1e-9,
        note="mean conditions the state's own click distribution on total clicks",
    )


def _check_series_coefficient(seed: int) -> dict:
    rng = np.random.default_rng(seed + 20)
    worst = 0.0
    for n in (1, 2, 3):
        raw = rng.uniform(-1.0, 1.0, size=(2 * n, 2 * n))
        sym = (raw + raw.T) / 2.0
        x = matrixfn.half_swap(n)
        swap_sym = (sym + x @ sym @ x) / 2.0
        radius = max(abs(np.linalg.eigvalsh(swap_sym)))
        a = swap_sym * (0.4 / radius)
        coeff = matrixfn.haf_tor_coefficient(a, n)
        brute = matrixfn.hafnian(x @ a)
        worst = max(worst, abs(coeff - brute))
    return _entry("series_taylor_coefficient", worst, 1e-9)


def run_validation(seed: int = DEFAULT_SEED, extra_state=None) -> list[dict]:
    """Run every identity suite; returns one report entry per check."""
    report = [_check_ken_tor(seed)]
    report.extend(_collision_checks(seed, extra_state))
    report.append(_check_expansion(seed))
    report.append(_check_term_bounds(seed))
    report.append(_check_series_coefficient(seed))
    return report
