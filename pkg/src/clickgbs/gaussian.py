"""Gaussian states: preparations, symplectic transformations, phase space.

Conventions
-----------
Quadratures are interleaved, ``r = (q1, p1, ..., qM, pM)``, and scaled so a
coherent state ``|gamma>`` has covariance ``I_2`` and mean
``(Re gamma, Im gamma)``.  A thermal state with occupation ``nbar`` has
covariance ``(2 nbar + 1) I_2``; squeezed vacuum is ``diag(e^{-2r}, e^{2r})``.
Physical covariances satisfy ``sigma + i Omega >= 0`` with the interleaved
symplectic form ``Omega``.

States are immutable values; every operation returns a new state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from . import matcore
from .errors import (
    DimensionMismatch,
    InvalidMatrix,
    InvalidOrdering,
    InvalidState,
    NegativeMeanPhotons,
    OutOfRange,
)

# Accumulated floating-point error through symplectic products.
PHYSICALITY_TOL = 1e-9
# The only quadrature ordering this package reads or writes.
ORDERING_LABEL = "q1,p1,...,qM,pM"


def symplectic_form(num_modes: int) -> np.ndarray:
    """Interleaved symplectic form, a direct sum of [[0, 1], [-1, 0]] blocks."""
    omega = np.zeros((2 * num_modes, 2 * num_modes))
    for i in range(num_modes):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


@dataclass(frozen=True)
class GaussianState:
    """M-mode Gaussian state: real covariance matrix and real mean vector.

    Attributes:
        cov: 2M x 2M quadrature covariance, interleaved ordering.
        mean: length-2M displacement vector.
    """

    cov: np.ndarray
    mean: np.ndarray

    def __post_init__(self):
        cov = matcore.as_symmetric(self.cov)
        mean = np.array(self.mean, dtype=float).reshape(-1)
        if mean.shape[0] != cov.shape[0]:
            raise DimensionMismatch(
                f"mean has length {mean.shape[0]}, covariance is {cov.shape[0]}-dimensional"
            )
        if cov.shape[0] == 0:
            raise InvalidState("a state needs at least one mode")
        num_modes = cov.shape[0] // 2
        eigs = np.linalg.eigvalsh(cov + 1j * symplectic_form(num_modes))
        if eigs.min() < -PHYSICALITY_TOL:
            raise InvalidState(
                f"covariance violates sigma + i Omega >= 0 (min eigenvalue {eigs.min():.3e})"
            )
        cov.setflags(write=False)
        mean.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    @property
    def displaced(self) -> bool:
        return bool(np.any(self.mean != 0.0))


# -- preparations ---------------------------------------------------------------

def vacuum(num_modes: int = 1) -> GaussianState:
    """M-mode vacuum: identity covariance, zero mean."""
    if num_modes < 1:
        raise OutOfRange("need at least one mode")
    return GaussianState(np.eye(2 * num_modes), np.zeros(2 * num_modes))


def thermal(nbar: float) -> GaussianState:
    """Single-mode thermal state with mean occupation ``nbar``."""
    if nbar < 0:
        raise NegativeMeanPhotons(f"nbar must be >= 0, got {nbar}")
    return GaussianState((2.0 * nbar + 1.0) * np.eye(2), np.zeros(2))


def squeezed(r: float) -> GaussianState:
    """Single-mode squeezed vacuum, covariance diag(e^{-2r}, e^{2r})."""
    return GaussianState(np.diag([np.exp(-2.0 * r), np.exp(2.0 * r)]), np.zeros(2))


def coherent(gamma: complex) -> GaussianState:
    """Single-mode coherent state ``|gamma>``."""
    gamma = complex(gamma)
    return GaussianState(np.eye(2), np.array([gamma.real, gamma.imag]))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state: direct sum of covariances, concatenated means."""
    return GaussianState(block_diag(a.cov, b.cov), np.concatenate([a.mean, b.mean]))


# -- unitaries -------------------------------------------------------------------

def check_unitary(u) -> np.ndarray:
    """Validate an M x M complex matrix as unitary within 1e-9."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {u.shape}")
    defect = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if defect > 1e-9:
        raise InvalidMatrix(f"matrix is not unitary (defect {defect:.3e})")
    return u


def real_embedding(u: np.ndarray) -> np.ndarray:
    """Orthogonal symplectic matrix acting on interleaved quadratures.

    Each complex entry ``U_jk`` becomes the 2 x 2 rotation-scaling block
    [[Re, -Im], [Im, Re]] at mode block (j, k).
    """
    m = u.shape[0]
    s = np.zeros((2 * m, 2 * m))
    s[0::2, 0::2] = u.real
    s[0::2, 1::2] = -u.imag
    s[1::2, 0::2] = u.imag
    s[1::2, 1::2] = u.real
    return s


def apply_unitary(state: GaussianState, u) -> GaussianState:
    """Pass the state through a linear optical network described by ``u``."""
    u = check_unitary(u)
    if u.shape[0] != state.modes:
        raise DimensionMismatch(
            f"unitary acts on {u.shape[0]} modes, state has {state.modes}"
        )
    s = real_embedding(u)
    return GaussianState(s @ state.cov @ s.T, s @ state.mean)


def haar_unitary(num_modes: int, seed: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix.

    The R diagonal's phases are folded into Q so the distribution is exactly
    Haar; deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((num_modes, num_modes))
    z = (z + 1j * rng.standard_normal((num_modes, num_modes))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


# -- channels and reductions -------------------------------------------------

def loss_channel(state: GaussianState, eta: float) -> GaussianState:
    """Pure loss of transmissivity ``eta`` applied to every mode."""
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"eta must be in [0, 1], got {eta}")
    dim = 2 * state.modes
    cov = eta * state.cov + (1.0 - eta) * np.eye(dim)
    return GaussianState(cov, np.sqrt(eta) * state.mean)


def reduce(state: GaussianState, keep) -> GaussianState:
    """Partial trace keeping the listed modes (1-based, strictly increasing)."""
    kept = matcore.check_modes(keep, state.modes)
    idx = []
    for a in kept:
        idx.extend((2 * a - 2, 2 * a - 1))
    return GaussianState(state.cov[np.ix_(idx, idx)], state.mean[idx])


def fourier_unitary(num_ports: int) -> np.ndarray:
    """Discrete Fourier interferometer, entries ``omega^{jk} / sqrt(N)``."""
    j, k = np.meshgrid(np.arange(num_ports), np.arange(num_ports), indexing="ij")
    return np.exp(2j * np.pi * j * k / num_ports) / np.sqrt(num_ports)


def multiplex_expand(state: GaussianState, num_splits: int) -> GaussianState:
    """Model each click-counting detector as a balanced N-port splitter.

    Every original mode enters port 0 of its own N-port Fourier
    interferometer with vacuum on the remaining ports; input mode ``i``
    occupies output modes ``(i-1)N + 1 ... iN`` of the MN-mode result.
    """
    if num_splits < 1:
        raise OutOfRange(f"need num_splits >= 1, got {num_splits}")
    if num_splits == 1:
        return state
    m, n = state.modes, num_splits
    dim = 2 * m * n
    cov = np.eye(dim)
    mean = np.zeros(dim)
    # original quadrature a sits at port 0 of block a//2
    idx = [2 * n * (a // 2) + (a % 2) for a in range(2 * m)]
    cov[np.ix_(idx, idx)] = state.cov
    mean[idx] = state.mean
    splitter = block_diag(*[fourier_unitary(n)] * m)
    return apply_unitary(GaussianState(cov, mean), splitter)


# -- phase space ------------------------------------------------------------

def husimi_sigma(state: GaussianState) -> np.ndarray:
    """Covariance of the state's Q-function, ``(sigma + I) / 2``."""
    return (state.cov + np.eye(2 * state.modes)) / 2.0


def kernel_O(state: GaussianState) -> np.ndarray:
    """Detection kernel ``I - Sigma^{-1}``; symmetric with eigenvalues < 1."""
    sigma = husimi_sigma(state)
    return np.eye(2 * state.modes) - matcore.spd_inverse(sigma)


def s_pqd_eval(state: GaussianState, s, beta) -> float:
    """Point value of the s-ordered quasi-probability distribution.

    ``W(beta) = 2^M / (pi^M sqrt(det(sigma - s~)))
    * exp(-2 (beta - mean)^T (sigma - s~)^{-1} (beta - mean))``
    with ``s~`` the per-mode diagonal embedding of the ordering vector.
    Well defined only while ``sigma - s~`` is positive definite.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.shape[0] != state.modes:
        raise DimensionMismatch("ordering vector must have one entry per mode")
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.shape[0] != 2 * state.modes:
        raise DimensionMismatch("beta must have two entries per mode")
    mat = state.cov - np.diag(np.repeat(s, 2))
    try:
        low = matcore.cholesky_factor(mat)
    except Exception as exc:
        raise InvalidOrdering(f"sigma - s~ is not positive definite: {exc}") from exc
    logdet = 2.0 * float(np.sum(np.log(np.diagonal(low))))
    delta = beta - state.mean
    y = np.linalg.solve(low, delta)
    m = state.modes
    return float(
        2.0 ** m / np.pi ** m * np.exp(-0.5 * logdet) * np.exp(-2.0 * (y @ y))
    )


# -- serialization ---------------------------------------------------------------

def state_to_dict(state: GaussianState) -> dict:
    return {
        "modes": state.modes,
        "cov": [float(x) for x in state.cov.reshape(-1)],
        "mean": [float(x) for x in state.mean],
        "ordering": ORDERING_LABEL,
    }


def state_from_dict(data: dict) -> GaussianState:
    """Parse the on-disk JSON schema, rejecting anything malformed."""
    if not isinstance(data, dict):
        raise InvalidState("state document must be a JSON object")
    missing = {"modes", "cov", "mean", "ordering"} - set(data)
    if missing:
        raise InvalidState(f"state document missing keys: {sorted(missing)}")
    if data["ordering"] != ORDERING_LABEL:
        raise InvalidState(
            f"unsupported quadrature ordering {data['ordering']!r}; "
            f"expected {ORDERING_LABEL!r}"
        )
    modes = data["modes"]
    if not isinstance(modes, int) or modes < 1:
        raise InvalidState(f"modes must be a positive integer, got {modes!r}")
    cov = np.asarray(data["cov"], dtype=float)
    if cov.size != 4 * modes * modes:
        raise InvalidState(
            f"cov must have {4 * modes * modes} entries for {modes} modes, got {cov.size}"
        )
    mean = np.asarray(data["mean"], dtype=float)
    if mean.size != 2 * modes:
        raise InvalidState(
            f"mean must have {2 * modes} entries for {modes} modes, got {mean.size}"
        )
    try:
        return GaussianState(cov.reshape(2 * modes, 2 * modes), mean)
    except InvalidMatrix as exc:
        raise InvalidState(str(exc)) from exc


def load_state(path) -> GaussianState:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidState(f"not valid JSON: {exc}") from exc
    return state_from_dict(data)


def save_state(state: GaussianState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state), fh, indent=2)
        fh.write("\n")
