"""Reduced densities, base-3 von Neumann entropy and Schmidt data.

The entanglement measure of a bipartite pure state is the average of the
two reduced von Neumann entropies, taken to base 3 so a maximally mixed
qutrit reduction scores 1, with the whole measure defined as 0 whenever
either reduction is pure (partially separable branch).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state_model import PureState

#: entropy branch cutoff: reductions with entropy at or below this are
#: treated as pure and the measure is 0
ZERO_ENTROPY_TOL = 1e-12

#: eigenvalues below this are treated as exact zeros in entropies
EIG_CLAMP = 1e-15

#: default cutoff (relative to the largest singular value) for Schmidt rank
RANK_TOL = 1e-10

_LN3 = np.log(3.0)


@dataclass(frozen=True)
class DensityMatrix:
    """3x3 Hermitian, unit-trace, positive-semidefinite matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (3, 3):
            raise ValueError(f"density matrix must be 3x3, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > 1e-12:
            raise ValueError(f"trace must be 1, got {np.trace(mat).real!r}")
        evals = np.linalg.eigvalsh(mat)
        if evals[0] < -1e-12:
            raise ValueError(f"negative eigenvalue {evals[0]!r}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Ascending real eigenvalues."""
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class SchmidtData:
    """Singular value decomposition M = U diag(sigma) V^dagger."""

    sigma: np.ndarray
    left_u: np.ndarray
    right_v: np.ndarray
    rank: int

    @property
    def sigma_sq(self) -> np.ndarray:
        return self.sigma ** 2

    def reconstruct(self) -> np.ndarray:
        return self.left_u @ np.diag(self.sigma) @ self.right_v.conj().T


def reduced_density(state: PureState, party: str) -> DensityMatrix:
    """Trace out the other particle; ``party`` is ``"A"`` (rows) or ``"B"``."""
    mat = state.coeff
    if party == "A":
        rho = mat @ mat.conj().T
    elif party == "B":
        rho = mat.T @ mat.conj()
    else:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def entropy_of_eigenvalues(evals: np.ndarray, base: float = 3.0) -> float:
    """Shannon entropy of a spectrum with the 0*log0 := 0 convention."""
    if base <= 1.0:
        raise ValueError(f"entropy base must exceed 1, got {base}")
    lam = np.asarray(evals, dtype=float)
    lam = lam[lam > EIG_CLAMP]
    if lam.size == 0:
        return 0.0
    return float(-np.sum(lam * np.log(lam)) / np.log(base))


def von_neumann_entropy(rho: DensityMatrix | np.ndarray, base: float = 3.0) -> float:
    """-Tr[rho log_base rho] with eigenvalues below 1e-15 treated as 0."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    return entropy_of_eigenvalues(rho.eigenvalues, base=base)


def eta(state: PureState) -> float:
    """Average reduced entropy (base 3); 0 when either reduction is pure."""
    s_a = von_neumann_entropy(reduced_density(state, "A"))
    s_b = von_neumann_entropy(reduced_density(state, "B"))
    if s_a <= ZERO_ENTROPY_TOL or s_b <= ZERO_ENTROPY_TOL:
        return 0.0
    return 0.5 * (s_a + s_b)


def schmidt(state: PureState, tol: float = RANK_TOL) -> SchmidtData:
    """Schmidt decomposition with deterministic column phases.

    Singular values come out descending; each left column is rotated so its
    first entry of magnitude above 1e-9 is real positive (the matching right
    column absorbs the phase, keeping the reconstruction exact).
    """
    u, s, vh = np.linalg.svd(state.coeff)
    v = vh.conj().T
    for j in range(3):
        col = u[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-9)
        if idx.size:
            phase = col[idx[0]] / abs(col[idx[0]])
            u[:, j] = col / phase
            v[:, j] = v[:, j] / phase
    rank = int(np.sum(s > tol * s[0]))
    u.setflags(write=False)
    v.setflags(write=False)
    s.setflags(write=False)
    return SchmidtData(sigma=s, left_u=u, right_v=v, rank=rank)
