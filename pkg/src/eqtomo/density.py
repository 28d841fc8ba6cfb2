"""Density matrices, seeded random states, and distance measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDensityMatrix, ZeroTrace, ZeroVector

STRUCT_TOL = 1e-10
PSD_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite N x N matrix."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex, copy=True)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise InvalidDensityMatrix(f"expected a square matrix, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvalidDensityMatrix("entries must be finite")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > STRUCT_TOL:
            raise InvalidDensityMatrix(f"not Hermitian (defect {herm:.3g})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > STRUCT_TOL:
            raise InvalidDensityMatrix(f"trace is {tr.real:.12g}, expected 1")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < -PSD_TOL:
            raise InvalidDensityMatrix(f"not positive semidefinite (min eigenvalue {lo:.3g})")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Ginibre-ensemble state: G G^dag / tr(G G^dag) with G of shape (dim, rank)."""
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must satisfy 1 <= rank <= dim, got rank={rank}, dim={dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.trace(rho).real)


def pure_density(vector) -> DensityMatrix:
    v = np.asarray(vector, dtype=complex).ravel()
    norm2 = float(np.vdot(v, v).real)
    if norm2 == 0.0:
        raise ZeroVector("cannot build a pure state from the zero vector")
    return DensityMatrix(np.outer(v, v.conj()) / norm2)


def _check_dims(a, b) -> None:
    da, db = np.shape(a)[0], np.shape(b)[0]
    if da != db:
        raise DimensionMismatch(f"dimension mismatch: {da} vs {db}")


# eigenvalues below this fraction of the largest are eigensolver noise; their
# square roots (~1e-8) would otherwise leak into the fidelity
_SQRT_CUTOFF = 1e-13


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(m)
    w = np.where(w > _SQRT_CUTOFF * max(w.max(), 0.0), w, 0.0)
    return (u * np.sqrt(w)) @ u.conj().T


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clipped to [0, 1].

    Evaluated as the squared nuclear norm of sqrt(a) sqrt(b), which is the same
    quantity and symmetric in a and b by construction.
    """
    _check_dims(a, b)
    sv = np.linalg.svd(_psd_sqrt(a.entries) @ _psd_sqrt(b.entries), compute_uv=False)
    f = float(np.sum(sv) ** 2)
    return min(max(f, 0.0), 1.0)


def trace_distance(a, b) -> float:
    """Half the trace norm of a - b.

    Also accepts raw square arrays, e.g. an unprojected reconstruction.
    """
    _check_dims(a, b)
    d = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    w = np.linalg.eigvalsh(0.5 * (d + d.conj().T))
    return 0.5 * float(np.sum(np.abs(w)))


def nearest_physical(raw) -> DensityMatrix:
    """Hermitize, clip negative eigenvalues, renormalize the trace.

    This is a plain projection used to repair noisy linear-inversion output;
    it is not a maximum-likelihood estimate.
    """
    m = np.asarray(raw, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDensityMatrix(f"expected a square matrix, got shape {m.shape}")
    h = 0.5 * (m + m.conj().T)
    w, u = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0.0:
        raise ZeroTrace("all eigenvalues are non-positive after Hermitization")
    rho = (u * (w / total)) @ u.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T))
