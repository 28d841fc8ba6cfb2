"""Discrete Fourier transform and circulant linear systems.

Convention: a circulant matrix M is defined by its first row c, every row
being a right cyclic shift of the one above, so M[s, q] = c[(q - s) mod N].
Its eigenvalues are gamma_r = sum_m c_m exp(-2 pi i r m / N), with
eigenvectors v_r[q] = exp(-2 pi i r q / N).

The DFT is the plain O(N^2) matrix product; the dimensions involved are
small and odd, so no radix restrictions or FFT dependency are wanted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem

SINGULAR_RTOL = 1e-12


def _kernel(n: int, sign: int) -> np.ndarray:
    idx = np.arange(n)
    # reduce r*m mod N before scaling so large products keep full phase accuracy
    return np.exp(sign * 2j * np.pi * (np.outer(idx, idx) % n) / n)


def dft(x, sign: int = -1) -> np.ndarray:
    """y_r = sum_m x_m exp(sign * 2 pi i r m / N), unnormalized."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    x = np.asarray(x, dtype=complex)
    return _kernel(len(x), sign) @ x


def idft(y, sign: int = -1) -> np.ndarray:
    """Inverse of ``dft(., sign)``: the opposite-sign transform divided by N."""
    y = np.asarray(y, dtype=complex)
    return dft(y, -sign) / len(y)


def circulant_matrix(first_row) -> np.ndarray:
    c = np.asarray(first_row)
    n = len(c)
    idx = np.arange(n)
    return c[(idx[None, :] - idx[:, None]) % n]


def circulant_multiply(first_row, x) -> np.ndarray:
    """Dense product M x, with M built from ``first_row`` by right shifts."""
    return circulant_matrix(first_row) @ np.asarray(x, dtype=complex)


@dataclass(frozen=True, eq=False)
class CirculantSystem:
    first_row: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.first_row)

    def matrix(self) -> np.ndarray:
        return circulant_matrix(self.first_row)

    def singular_index(self) -> int | None:
        """First r with |gamma_r| <= 1e-12 * max |gamma|, or None."""
        mag = np.abs(self.eigenvalues)
        bad = np.flatnonzero(mag <= SINGULAR_RTOL * mag.max())
        return int(bad[0]) if bad.size else None

    def condition_number(self) -> float:
        mag = np.abs(self.eigenvalues)
        lo = mag.min()
        return float(mag.max() / lo) if lo > 0 else float("inf")


def build_system(first_row) -> CirculantSystem:
    row = np.array(first_row, copy=True)
    if row.ndim != 1 or row.size < 1:
        raise ValueError("first_row must be a non-empty vector")
    gamma = dft(row, -1)
    row.setflags(write=False)
    gamma.setflags(write=False)
    return CirculantSystem(row, gamma)


def _require_nonsingular(system: CirculantSystem) -> None:
    r = system.singular_index()
    if r is not None:
        raise SingularSystem(r)


def solve(system: CirculantSystem, rhs) -> np.ndarray:
    """Solve M x = rhs by diagonal division in the Fourier basis."""
    _require_nonsingular(system)
    b = np.asarray(rhs, dtype=complex)
    # coordinates of b along v_r are dft(b, +1) / N
    return idft(dft(b, +1) / system.eigenvalues, +1)


def inverse_first_row(system: CirculantSystem) -> np.ndarray:
    """First row d of M^{-1}: d_l = (1/N) sum_r conj(g_r)/|g_r|^2 exp(2 pi i l r / N)."""
    _require_nonsingular(system)
    g = system.eigenvalues
    return dft(g.conj() / np.abs(g) ** 2, +1) / system.dim
