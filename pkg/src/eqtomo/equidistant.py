"""Equidistant state sets, their Gram spectra, and the shifted-basis POVM.

A set of ``N`` equidistant states has pairwise inner products
``<a_j|a_j'> = |alpha| exp(i theta)`` for ``j > j'``.  In the canonical basis

    |a_j> = N^{-1/2} sum_k sqrt(lambda_k) conj(omega_k^j) |k>

and the ``N`` shifted copies ``X^s |a_j>`` (``X|k> = |k+1 mod N>``) together
resolve ``N`` times the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfiguration, SpectrumNegative

DEFAULT_TOL = 1e-10
# sin(...) below this magnitude is treated as a removable 0/0 point
SINGULAR_EPS = 1e-9
# negative eigenvalues this small are rounding noise at the dependence boundary
CLIP_EPS = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def max_inner_product_modulus(theta: float, dim: int) -> float:
    """Largest |alpha| for which ``dim`` states with phase ``theta`` exist.

    At theta = pi numerator and denominator both vanish and the continuous
    limit ``1 / (dim - 1)`` is returned.
    """
    if dim < 2:
        raise InvalidConfiguration(f"dim must be >= 2, got {dim}")
    inner = (math.pi - theta) / dim
    num = math.sin(inner)
    den = math.sin(theta + inner)
    if abs(den) < SINGULAR_EPS and abs(num) < SINGULAR_EPS:
        # L'Hopital in theta
        return (-math.cos(inner) / dim) / ((1.0 - 1.0 / dim) * math.cos(theta + inner))
    return num / den


@dataclass(frozen=True)
class EquidistantConfig:
    """Free parameters of the scheme: dimension, |alpha| and theta."""

    dim: int
    alpha_mod: float
    theta: float
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim:
            raise InvalidConfiguration(f"dim must be an integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "alpha_mod", float(self.alpha_mod))
        object.__setattr__(self, "theta", float(self.theta))
        if self.dim < 2:
            raise InvalidConfiguration(f"dim must be >= 2, got {self.dim}")
        if not (math.isfinite(self.alpha_mod) and self.alpha_mod >= 0.0):
            raise InvalidConfiguration(f"alpha_mod must be finite and >= 0, got {self.alpha_mod}")
        if not (0.0 <= self.theta < 2.0 * math.pi):
            raise InvalidConfiguration(f"theta must lie in [0, 2pi), got {self.theta}")
        # raises SpectrumNegative when |alpha| is beyond the bound
        spectrum(self)

    @property
    def alpha(self) -> complex:
        return self.alpha_mod * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def bound(self) -> float:
        return max_inner_product_modulus(self.theta, self.dim)


@dataclass(frozen=True)
class Spectrum:
    lambdas: np.ndarray
    phases: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.lambdas)


def _spectrum_ratio(theta: float, dim: int) -> np.ndarray:
    k = np.arange(dim)
    arg = (k * np.pi - theta) / dim
    den = np.sin(arg)
    num = np.sin(theta + arg)
    singular = np.abs(den) < SINGULAR_EPS
    safe = np.where(singular, 1.0, den)
    return np.where(singular, -(dim - 1) * np.cos(theta), num / safe)


def spectrum(config: EquidistantConfig) -> Spectrum:
    """Gram-matrix eigenvalues lambda_k and phases omega_k for ``config``."""
    n = config.dim
    lambdas = 1.0 - config.alpha_mod * _spectrum_ratio(config.theta, n)
    bad = np.flatnonzero(lambdas < -CLIP_EPS)
    if bad.size:
        raise SpectrumNegative(int(bad[0]), float(lambdas[bad[0]]))
    lambdas = np.clip(lambdas, 0.0, None)
    k = np.arange(n)
    phases = np.exp(2j / n * (config.theta - k * np.pi))
    return Spectrum(_frozen(lambdas), _frozen(phases))


@dataclass(frozen=True)
class StateSet:
    """All N^2 states; ``states[s, j]`` is the vector X^s |a_j>."""

    config: EquidistantConfig
    states: np.ndarray

    @property
    def dim(self) -> int:
        return self.config.dim

    def basis(self, s: int) -> np.ndarray:
        return self.states[s]

    def flat(self) -> np.ndarray:
        """(N^2, N) array ordered by (s, j)."""
        n = self.dim
        return self.states.reshape(n * n, n)

    def projectors(self) -> np.ndarray:
        v = self.states
        return np.einsum("sja,sjb->sjab", v, v.conj())


def canonical_states(config: EquidistantConfig) -> np.ndarray:
    """The unshifted set as an (N, N) array, row j = |a_j>."""
    spec = spectrum(config)
    n = config.dim
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    # conj(omega_k^j), evaluated from the exponent to avoid powering roundoff
    coeff = np.exp(-2j * j / n * (config.theta - k * np.pi))
    return np.sqrt(spec.lambdas)[None, :] * coeff / math.sqrt(n)


def build_state_set(config: EquidistantConfig) -> StateSet:
    base = canonical_states(config)
    n = config.dim
    states = np.empty((n, n, n), dtype=complex)
    for s in range(n):
        # component k moves to k + s
        states[s] = np.roll(base, s, axis=1)
    return StateSet(config, _frozen(states))


def gram_matrix(vectors: np.ndarray) -> np.ndarray:
    """G[i, j] = <v_i|v_j> for the rows of ``vectors``."""
    return vectors.conj() @ vectors.T


def povm_completeness_defect(state_set: StateSet) -> float:
    v = state_set.flat()
    total = v.T @ v.conj()
    return float(np.max(np.abs(total - state_set.dim * np.eye(state_set.dim))))


def sic_check(state_set: StateSet, tol: float = DEFAULT_TOL) -> bool:
    """True iff every pair of distinct states has overlap-squared 1/(N+1)."""
    n = state_set.dim
    overlaps = np.abs(gram_matrix(state_set.flat())) ** 2
    off = ~np.eye(n * n, dtype=bool)
    return bool(np.all(np.abs(overlaps[off] - 1.0 / (n + 1)) <= tol))
