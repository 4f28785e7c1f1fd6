"""Dense symmetric linear algebra on small matrices.

Everything here works on plain ``numpy`` arrays in row-major double
precision; problem sizes are desk scale (a handful of modes), so no sparse
or blocked formats.  Mode indices are 1-based in all public interfaces,
with one mode owning two adjacent quadrature rows/columns (interleaved
ordering q1, p1, ..., qM, pM).

Also provides :class:`TruncatedSeries`, a degree-limited polynomial scalar
used to extract exact Taylor coefficients of matrix functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    IndexOutOfRange,
    InvalidMatrix,
    NotPositiveDefinite,
    SingularConstantTerm,
)

# Asymmetry beyond this is rejected outright; below it we symmetrize.
ASYMMETRY_TOL = 1e-9
# A Cholesky pivot (squared diagonal entry) at or below this is degenerate.
PIVOT_TOL = 1e-14


def as_symmetric(a, *, even_dim: bool = True) -> np.ndarray:
    """Validate and symmetrize a real square matrix.

    Symmetry is enforced by averaging the matrix with its transpose;
    asymmetry beyond ``ASYMMETRY_TOL`` is rejected since downstream
    Cholesky factorizations assume exact symmetry.

    Args:
        a: array-like, square, real.
        even_dim: require an even dimension (two quadratures per mode).

    Returns:
        A fresh, exactly symmetric ``float64`` array.
    """
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {m.shape}")
    if even_dim and m.shape[0] % 2 != 0:
        raise InvalidMatrix(f"dimension must be even, got {m.shape[0]}")
    if m.size and np.max(np.abs(m - m.T)) > ASYMMETRY_TOL:
        raise InvalidMatrix("matrix is asymmetric beyond 1e-9")
    return (m + m.T) / 2.0


def check_modes(modes, num_modes: int) -> tuple[int, ...]:
    """Validate a strictly increasing sequence of 1-based mode indices."""
    z = tuple(int(i) for i in modes)
    for prev, cur in zip(z, z[1:]):
        if cur <= prev:
            raise IndexOutOfRange(f"mode set must be strictly increasing, got {z}")
    if z and (z[0] < 1 or z[-1] > num_modes):
        raise IndexOutOfRange(f"mode indices {z} outside [1, {num_modes}]")
    return z


def cholesky_factor(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with an explicit pivot-degeneracy check."""
    if a.shape[0] == 0:
        return np.zeros((0, 0))
    try:
        low = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    if np.min(np.diagonal(low)) ** 2 <= PIVOT_TOL:
        raise NotPositiveDefinite("Cholesky pivot at or below 1e-14")
    return low


def cholesky_logdet(a: np.ndarray) -> float:
    """log det of a symmetric positive definite matrix.

    The empty (0 x 0) matrix has determinant 1 by convention, hence
    log-determinant 0.
    """
    low = cholesky_factor(np.asarray(a, dtype=float))
    if low.shape[0] == 0:
        return 0.0
    return 2.0 * float(np.sum(np.log(np.diagonal(low))))


def spd_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix, symmetrized."""
    a = np.asarray(a, dtype=float)
    low = cholesky_factor(a)
    if low.shape[0] == 0:
        return np.zeros((0, 0))
    inv_low = solve_triangular(low, np.eye(a.shape[0]), lower=True)
    inv = inv_low.T @ inv_low
    return (inv + inv.T) / 2.0


def _mode_rows(modes: tuple[int, ...]) -> list[int]:
    """0-based row indices for interleaved deletion: mode a -> rows 2a-2, 2a-1."""
    rows = []
    for a in modes:
        rows.extend((2 * a - 2, 2 * a - 1))
    return rows


def delete_modes(a: np.ndarray, modes) -> np.ndarray:
    """Remove the two quadrature rows/columns of each listed mode.

    Interleaved convention: deleting mode ``a`` removes rows/columns
    ``2a-1`` and ``2a`` (1-based).  Deleting every mode yields the empty
    matrix, whose determinant is 1 by convention.
    """
    a = np.asarray(a, dtype=float)
    z = check_modes(modes, a.shape[0] // 2)
    if not z:
        return a.copy()
    rows = _mode_rows(z)
    return np.delete(np.delete(a, rows, axis=0), rows, axis=1)


def delete_vector_modes(v: np.ndarray, modes, num_modes: int) -> np.ndarray:
    """Remove the two quadrature entries of each listed mode from a vector."""
    v = np.asarray(v, dtype=float)
    z = check_modes(modes, num_modes)
    if not z:
        return v.copy()
    return np.delete(v, _mode_rows(z))


def delete_blocks(a: np.ndarray, modes) -> np.ndarray:
    """Block-ordered deletion: mode ``a`` of a 2n x 2n matrix removes rows/columns
    ``a`` and ``n + a`` (1-based).

    Only used where the half-swap (xx|pp) convention applies.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0] // 2
    z = check_modes(modes, n)
    if not z:
        return a.copy()
    rows = []
    for i in z:
        rows.extend((i - 1, n + i - 1))
    return np.delete(np.delete(a, rows, axis=0), rows, axis=1)


# ---------------------------------------------------------------------------
# Truncated power series ("jets")
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedSeries:
    """Polynomial in a formal variable, truncated at a fixed order.

    ``coeffs[j]`` is the coefficient of the j-th power; coefficients past
    ``order`` are discarded by every operation.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise InvalidMatrix("series needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value: float, order: int) -> "TruncatedSeries":
        return cls((float(value),) + (0.0,) * order)

    @classmethod
    def linear(cls, c0: float, c1: float, order: int) -> "TruncatedSeries":
        if order == 0:
            return cls((float(c0),))
        return cls((float(c0), float(c1)) + (0.0,) * (order - 1))

    def _wrap(self, arr) -> "TruncatedSeries":
        return TruncatedSeries(tuple(float(x) for x in arr))

    def resized(self, order: int) -> "TruncatedSeries":
        """Same series truncated (or zero-padded) to the given order."""
        c = list(self.coeffs[: order + 1])
        c += [0.0] * (order + 1 - len(c))
        return self._wrap(c)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self._wrap(np.add(self.coeffs, other.coeffs))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self._wrap(np.subtract(self.coeffs, other.coeffs))

    def __neg__(self) -> "TruncatedSeries":
        return self._wrap(np.negative(self.coeffs))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self.order
        full = np.convolve(self.coeffs, other.coeffs)
        return self._wrap(full[: n + 1])

    def __truediv__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self * other.reciprocal()

    def scaled(self, factor: float) -> "TruncatedSeries":
        return self._wrap(np.multiply(self.coeffs, factor))

    def reciprocal(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        a = self.coeffs
        if a[0] == 0.0:
            raise SingularConstantTerm("cannot invert a series with zero constant term")
        n = self.order
        b = np.zeros(n + 1)
        b[0] = 1.0 / a[0]
        for k in range(1, n + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc += a[j] * b[k - j]
            b[k] = -acc / a[0]
        return self._wrap(b)

    def rsqrt(self) -> "TruncatedSeries":
        """Series of ``self ** (-1/2)``; requires a positive constant term.

        Factor out the constant term and expand (1 + u)^(-1/2) with binomial
        coefficients; u has no constant term, so the expansion terminates at
        the truncation order.
        """
        a0 = self.coeffs[0]
        if a0 <= 0.0:
            raise SingularConstantTerm("rsqrt needs a positive constant term")
        n = self.order
        u = self._wrap(np.divide(self.coeffs, a0))
        u = u - TruncatedSeries.constant(1.0, n)
        result = TruncatedSeries.constant(1.0, n)
        term = TruncatedSeries.constant(1.0, n)
        binom = 1.0
        for j in range(1, n + 1):
            binom *= (-0.5 - (j - 1)) / j
            term = term * u
            result = result + term.scaled(binom)
        return result.scaled(a0 ** -0.5)


def series_det_invsqrt(s: list[list[TruncatedSeries]], order: int) -> TruncatedSeries:
    """``det(S)^(-1/2)`` of a matrix of truncated series, to the given order.

    Determinant via fraction-free (Bareiss) elimination over the series
    ring: each pivot is a leading principal minor, so the divisions stay
    exact as long as the constant-term matrix is positive definite.
    """
    n = len(s)
    if n == 0:
        return TruncatedSeries.constant(1.0, order)
    const = np.array([[entry.coeffs[0] for entry in row] for row in s])
    try:
        cholesky_factor(as_symmetric(const, even_dim=False))
    except (NotPositiveDefinite, InvalidMatrix) as exc:
        raise SingularConstantTerm(
            "order-zero part of the series matrix is not positive definite"
        ) from exc

    work = [[entry.resized(order) for entry in row] for row in s]
    prev = TruncatedSeries.constant(1.0, order)
    for k in range(n - 1):
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = work[k][k] * work[i][j] - work[i][k] * work[k][j]
                work[i][j] = num / prev
        prev = work[k][k]
    return work[n - 1][n - 1].rsqrt()
