"""Born-rule probabilities for the equidistant POVM and finite-shot sampling.

The N^2 projectors are sampled as a single measurement with elements
Pi_j^s / N.  Probabilities are nevertheless stored in the unnormalized
convention P_j^s = Tr(rho Pi_j^s), whose total is N.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .density import DensityMatrix
from .equidistant import EquidistantConfig, StateSet, spectrum
from .errors import DimensionMismatch, InvalidDensityMatrix, InvariantViolation

TOL = 1e-10
_CHUNK = 1 << 20

EXACT = "exact"
ESTIMATED = "estimated"


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """values[s, j] = P_j^s, either exact or estimated from ``shots`` counts."""

    values: np.ndarray
    source: str = EXACT
    shots: Optional[int] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InvariantViolation(f"probability table must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvariantViolation("probability table contains non-finite values")
        if self.source not in (EXACT, ESTIMATED):
            raise InvariantViolation(f"unknown source tag {self.source!r}")
        n = v.shape[0]
        # an estimate N * count / shots can reach N when every shot lands in one cell
        upper = 1.0 if self.source == EXACT else float(n)
        if v.min() < -TOL or v.max() > upper + TOL:
            raise InvariantViolation(
                f"probabilities must lie in [0, {upper:g}], "
                f"found range [{v.min():.6g}, {v.max():.6g}]"
            )
        if self.source == EXACT and abs(v.sum() - n) > TOL:
            raise InvariantViolation(f"exact probabilities sum to {v.sum():.12g}, expected {n}")
        if self.shots is not None and int(self.shots) < 1:
            raise InvariantViolation("shots must be >= 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class CountTable:
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        c = np.array(self.counts, copy=True)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise InvariantViolation(f"count table must be square, got shape {c.shape}")
        if not np.all(np.equal(np.mod(c, 1), 0)) or c.min() < 0:
            raise InvariantViolation("counts must be non-negative integers")
        c = c.astype(np.int64)
        if int(c.sum()) != int(self.shots):
            raise InvariantViolation(f"counts sum to {int(c.sum())}, expected shots={self.shots}")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "shots", int(self.shots))

    @property
    def dim(self) -> int:
        return self.counts.shape[0]


def born_probabilities(rho: DensityMatrix, state_set: StateSet) -> ProbabilityTable:
    """P_j^s = <a_j^s| rho |a_j^s> for every state of the set."""
    if rho.dim != state_set.dim:
        raise DimensionMismatch(f"rho has dim {rho.dim}, state set has dim {state_set.dim}")
    v = state_set.states
    p = np.einsum("sja,ab,sjb->sj", v.conj(), rho.entries, v)
    residue = np.max(np.abs(p.imag))
    if residue > TOL:
        raise InvalidDensityMatrix(f"<a|rho|a> has imaginary part {residue:.3g}")
    return ProbabilityTable(p.real, EXACT)


def expansion_probabilities(rho: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
    """Evaluate the canonical-basis expansion of P_j^s for any square array.

    P_j^s = (1/N) sum_{p,q} exp(2 pi i (p - q) j / N)
                        sqrt(lambda_{p-s} lambda_{q-s}) rho[q, p]

    Returned complex so callers can inspect the imaginary residue.
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    idx = np.arange(n)
    root = np.sqrt(np.asarray(lambdas, dtype=float))
    # w[s, p] = sqrt(lambda_{p - s})
    w = root[(idx[None, :] - idx[:, None]) % n]
    kernel = np.exp(2j * np.pi * np.outer(idx, idx) / n)  # [j, p] -> e^{2 pi i p j / N}
    # sum_{p,q} e^{i p j} e^{-i q j} w[s,p] w[s,q] rho[q,p]
    a = kernel[None, :, :] * w[:, None, :]  # [s, j, p]
    return np.einsum("sjp,qp,sjq->sj", a, rho, a.conj()) / n


def born_probabilities_via_expansion(rho: DensityMatrix, config: EquidistantConfig) -> ProbabilityTable:
    if rho.dim != config.dim:
        raise DimensionMismatch(f"rho has dim {rho.dim}, config has dim {config.dim}")
    p = expansion_probabilities(rho.entries, spectrum(config).lambdas)
    residue = np.max(np.abs(p.imag))
    if residue > TOL:
        raise InvalidDensityMatrix(f"expansion has imaginary part {residue:.3g}")
    return ProbabilityTable(p.real, EXACT)


def sample_counts(table: ProbabilityTable, shots: int, seed: int) -> CountTable:
    """One multinomial draw of ``shots`` outcomes over the N^2 POVM elements.

    Outcomes are drawn by inverse-CDF lookup of PCG64 uniforms, so a given
    (table, shots, seed) always yields the same counts.
    """
    if table.source != EXACT:
        raise ValueError("sampling requires an exact probability table")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = table.dim
    probs = np.clip(table.values.ravel() / n, 0.0, None)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    counts = np.zeros(n * n, dtype=np.int64)
    remaining = shots
    while remaining:
        m = min(remaining, _CHUNK)
        idx = np.searchsorted(cdf, rng.random(m), side="right")
        counts += np.bincount(np.minimum(idx, n * n - 1), minlength=n * n)
        remaining -= m
    return CountTable(counts.reshape(n, n), shots)


def estimate_probabilities(counts: CountTable) -> ProbabilityTable:
    values = counts.dim * counts.counts / counts.shots
    return ProbabilityTable(values, ESTIMATED, counts.shots)
