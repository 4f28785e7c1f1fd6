"""Gaussian boson sampling with click-counting detectors.

Exact outcome probabilities, full distributions and samplers for Gaussian
states measured by multiplexed threshold detectors, built on the
Kensingtonian matrix function and cross-validated against the Torontonian,
Hafnian and closed-form single-mode laws.
"""

from .detection import (
    DetectorModel,
    PnrDistribution,
    click_coeff,
    click_from_pnr,
    coherent_click_closed,
    povm_convergence_gap,
    stirling2,
    thermal_click_closed,
    thermal_pnr,
)
from .errors import ClickGBSError
from .gaussian import (
    GaussianState,
    apply_unitary,
    coherent,
    haar_unitary,
    husimi_sigma,
    kernel_O,
    load_state,
    loss_channel,
    multiplex_expand,
    reduce,
    s_pqd_eval,
    save_state,
    squeezed,
    tensor,
    thermal,
    vacuum,
)
from .matrixfn import (
    haf_tor_coefficient,
    hafnian,
    kensingtonian,
    kensingtonian_noisy,
    loop_kensingtonian,
    torontonian,
    weighted_vacuum_overlap,
)
from .probstat import (
    CollisionReport,
    Distribution,
    click_prob,
    collision_analysis,
    expansion_oracle_prob,
    full_distribution,
    mc_classical_oracle,
    mean_term_bounds,
    sample_chain,
    sample_exact,
    term_count,
    threshold_prob,
    tvd_curve,
)

__version__ = "0.1.0"

__all__ = [
    "ClickGBSError",
    "CollisionReport",
    "DetectorModel",
    "Distribution",
    "GaussianState",
    "PnrDistribution",
    "apply_unitary",
    "click_coeff",
    "click_from_pnr",
    "click_prob",
    "coherent",
    "coherent_click_closed",
    "collision_analysis",
    "expansion_oracle_prob",
    "full_distribution",
    "haar_unitary",
    "haf_tor_coefficient",
    "hafnian",
    "husimi_sigma",
    "kensingtonian",
    "kensingtonian_noisy",
    "kernel_O",
    "load_state",
    "loop_kensingtonian",
    "loss_channel",
    "mc_classical_oracle",
    "mean_term_bounds",
    "multiplex_expand",
    "povm_convergence_gap",
    "reduce",
    "s_pqd_eval",
    "sample_chain",
    "sample_exact",
    "save_state",
    "squeezed",
    "stirling2",
    "tensor",
    "term_count",
    "thermal",
    "thermal_click_closed",
    "thermal_pnr",
    "threshold_prob",
    "torontonian",
    "tvd_curve",
    "vacuum",
    "weighted_vacuum_overlap",
]
