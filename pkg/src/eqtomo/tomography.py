"""Linear-inversion reconstruction of a density matrix from equidistant-POVM data.

Fourier transforming each row of the probability table over j decouples the
N^2 linear equations into one N x N circulant system per diagonal of rho:

    Pt[s, k] = sum_q sqrt(lambda_{q+k-s} lambda_{q-s}) rho[q+k, q]      (indices mod N)

Only k = 0 .. (N-1)/2 are solved; the remaining diagonals follow from
Hermiticity.  For even N the imaginary parts on the |p - q| = N/2 diagonal
never enter the probabilities, so the map is not injective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import circulant
from .circulant import CirculantSystem
from .density import DensityMatrix, nearest_physical
from .equidistant import EquidistantConfig, spectrum
from .errors import (
    DegenerateConfiguration,
    DimensionMismatch,
    EvenDimension,
    OddDimension,
    SingularSystem,
)
from .measurement import ProbabilityTable, born_probabilities, expansion_probabilities
from .equidistant import build_state_set

DEGENERATE_ALPHA = 1e-6
PROJECTION_METHOD = "eigenvalue-clipping (not maximum likelihood)"


@dataclass(frozen=True, eq=False)
class FourierTable:
    """values[s, k] = sum_j exp(2 pi i k j / N) P_j^s."""

    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def slice(self, k: int) -> np.ndarray:
        return self.values[:, k]


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    config: EquidistantConfig
    rho_raw: np.ndarray
    rho_physical: Optional[DensityMatrix]
    condition_numbers: tuple
    residual: float
    projection: Optional[str] = field(default=None)

    @property
    def dim(self) -> int:
        return self.config.dim

    def best_estimate(self) -> DensityMatrix:
        return self.rho_physical if self.rho_physical is not None else nearest_physical(self.rho_raw)


def fourier_transform_probabilities(table: ProbabilityTable) -> FourierTable:
    values = np.stack([circulant.dft(row, +1) for row in table.values])
    values.setflags(write=False)
    return FourierTable(values)


def diagonal_system(config: EquidistantConfig, k: int) -> CirculantSystem:
    """Circulant system linking diagonal k of rho to the k-th Fourier slice."""
    n = config.dim
    if not 0 <= k <= (n - 1) // 2:
        raise ValueError(f"k must lie in [0, {(n - 1) // 2}], got {k}")
    lam = spectrum(config).lambdas
    m = np.arange(n)
    return circulant.build_system(np.sqrt(lam[(m + k) % n] * lam[m]))


def _check_inputs(table: ProbabilityTable, config: EquidistantConfig) -> None:
    if table.dim != config.dim:
        raise DimensionMismatch(f"table has dim {table.dim}, config has dim {config.dim}")
    if config.dim % 2 == 0:
        raise EvenDimension(config.dim)
    if config.alpha_mod < DEGENERATE_ALPHA:
        raise DegenerateConfiguration(
            f"|alpha| = {config.alpha_mod:g} < {DEGENERATE_ALPHA:g}: the states are "
            "(nearly) orthogonal and the shifted sets collapse onto one basis"
        )


def _hermitian_fill(n: int, diagonals: dict) -> np.ndarray:
    rho = np.zeros((n, n), dtype=complex)
    q = np.arange(n)
    for k, x in diagonals.items():
        rho[(q + k) % n, q] = x
        if k:
            rho[q, (q + k) % n] = np.conj(x)
    return rho


def reconstruct(
    table: ProbabilityTable, config: EquidistantConfig, project: bool = True
) -> ReconstructionReport:
    _check_inputs(table, config)
    n = config.dim
    fourier = fourier_transform_probabilities(table)
    diagonals = {}
    conds = []
    for k in range((n + 1) // 2):
        system = diagonal_system(config, k)
        try:
            x = circulant.solve(system, fourier.slice(k))
        except SingularSystem as exc:
            raise exc.with_diagonal(k) from None
        # main-diagonal system and data are real
        diagonals[k] = x.real if k == 0 else x
        conds.append(system.condition_number())
    rho_raw = _hermitian_fill(n, diagonals)
    predicted = expansion_probabilities(rho_raw, spectrum(config).lambdas)
    residual = float(np.max(np.abs(predicted - table.values)))
    rho_raw.setflags(write=False)
    rho_physical = nearest_physical(rho_raw) if project else None
    return ReconstructionReport(
        config=config,
        rho_raw=rho_raw,
        rho_physical=rho_physical,
        condition_numbers=tuple(conds),
        residual=residual,
        projection=PROJECTION_METHOD if project else None,
    )


def closed_form_reconstruct(table: ProbabilityTable, config: EquidistantConfig) -> np.ndarray:
    """Explicit triple-sum inversion, independent of the circulant solver.

    rho[k+q, q] = (1/N) sum_{r,l,j} exp(2 pi i ((l - q) r + k j) / N) P_j^l / gamma_r^(k)
    """
    _check_inputs(table, config)
    n = config.dim
    lam = spectrum(config).lambdas
    idx = np.arange(n)
    p = table.values
    phase = lambda e: np.exp(2j * np.pi * (e % n) / n)
    diagonals = {}
    for k in range((n + 1) // 2):
        row = np.sqrt(lam[(idx + k) % n] * lam)
        gamma = np.array([np.sum(row * phase(-idx * r)) for r in idx])
        mag = np.abs(gamma)
        bad = np.flatnonzero(mag <= circulant.SINGULAR_RTOL * mag.max())
        if bad.size:
            raise SingularSystem(int(bad[0]), k)
        inv = gamma.conj() / mag**2
        # e[q, r, l, j] = exp(2 pi i ((l - q) r + k j) / N)
        q, r, l, j = np.ix_(idx, idx, idx, idx)
        e = phase((l - q) * r + k * j)
        x = np.einsum("r,qrlj,lj->q", inv, e, p) / n
        diagonals[k] = x.real if k == 0 else x
    return _hermitian_fill(n, diagonals)


@dataclass(frozen=True, eq=False)
class EvenDimDefect:
    """Two states that an even-dimensional scheme cannot tell apart."""

    config: EquidistantConfig
    rho_plus: DensityMatrix
    rho_minus: DensityMatrix
    table_plus: ProbabilityTable
    table_minus: ProbabilityTable

    @property
    def max_difference(self) -> float:
        return float(np.max(np.abs(self.table_plus.values - self.table_minus.values)))

    @property
    def state_difference(self) -> float:
        return float(np.max(np.abs(self.rho_plus.entries - self.rho_minus.entries)))


def even_dim_defect(
    dim: int, alpha_mod: float = 0.3, theta: float = 0.0, epsilon: Optional[float] = None
) -> EvenDimDefect:
    """Perturb Im(rho[N/2, 0]) of I/N by +-epsilon and return both tables."""
    if dim % 2:
        raise OddDimension(f"dim={dim} is odd; the even-dimension defect needs even dim")
    config = EquidistantConfig(dim, alpha_mod, theta)
    eps = 0.5 / dim if epsilon is None else float(epsilon)
    half = dim // 2
    delta = np.zeros((dim, dim), dtype=complex)
    delta[half, 0] = 1j * eps
    delta[0, half] = -1j * eps
    base = np.eye(dim) / dim
    plus = DensityMatrix(base + delta)
    minus = DensityMatrix(base - delta)
    states = build_state_set(config)
    return EvenDimDefect(
        config, plus, minus, born_probabilities(plus, states), born_probabilities(minus, states)
    )
