"""Spectral thermodynamics: Gibbs states, entropies, relative entropies.

Energies are in units with k_B = hbar = 1 and entropies in nats.
States are (populations, eigenbasis) pairs; ``basis=None`` marks the
computational basis so large diagonal chains never materialize a dense
eigenvector matrix.  An infinite relative entropy (state mass outside
the reference support) is reported as ``math.inf``, never an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonians import CompositeHamiltonian, DiagonalHamiltonian, check_hermitian

SUPPORT_TOL = 1e-14
LEAKED_MASS_TOL = 1e-12
POPULATION_SUM_TOL = 1e-12
BASIS_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class DensityState:
    """Mixed state as populations over an orthonormal basis.

    ``basis`` columns are the eigenvectors; ``None`` means the
    computational basis (the identity), used for diagonal chains.
    """

    populations: np.ndarray
    basis: np.ndarray | None = None
    provenance: dict | None = None

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=np.float64)
        if np.any(p < -POPULATION_SUM_TOL):
            raise ValueError("negative population beyond tolerance")
        if abs(float(np.sum(p)) - 1.0) > POPULATION_SUM_TOL * max(1, len(p)):
            raise ValueError("populations do not sum to one")
        object.__setattr__(self, "populations", np.clip(p, 0.0, None))
        if self.basis is not None:
            b = np.asarray(self.basis, dtype=complex)
            gram = b.conj().T @ b
            if np.max(np.abs(gram - np.eye(b.shape[1]))) > BASIS_UNITARY_TOL:
                raise ValueError("basis columns are not orthonormal")
            object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return len(self.populations)

    def matrix(self) -> np.ndarray:
        if self.basis is None:
            return np.diag(self.populations).astype(complex)
        return (self.basis * self.populations) @ self.basis.conj().T

    def energy(self, hamiltonian) -> float:
        """Mean energy ``Tr(rho H)``."""
        if isinstance(hamiltonian, DiagonalHamiltonian) and self.basis is None:
            return float(np.dot(self.populations, hamiltonian.energies))
        h = _as_matrix(hamiltonian)
        if self.basis is None:
            return float(np.real(np.dot(self.populations, np.diag(h))))
        return float(np.real(np.einsum("ij,j,kj,ki->", self.basis, self.populations,
                                       self.basis.conj(), h)))


def _as_matrix(hamiltonian) -> np.ndarray:
    if isinstance(hamiltonian, CompositeHamiltonian):
        return hamiltonian.matrix
    if isinstance(hamiltonian, DiagonalHamiltonian):
        return hamiltonian.to_dense()
    return check_hermitian(hamiltonian)


def _as_state(state) -> DensityState:
    if isinstance(state, DensityState):
        return state
    rho = np.asarray(state, dtype=complex)
    check_hermitian(rho)
    vals, vecs = np.linalg.eigh(rho)
    return DensityState(populations=vals[::-1], basis=vecs[:, ::-1])


def eigendecompose(hamiltonian) -> Spectrum:
    """Ascending eigendecomposition of a Hermitian operator."""
    if isinstance(hamiltonian, DiagonalHamiltonian):
        order = np.argsort(hamiltonian.energies, kind="stable")
        vectors = np.eye(len(order), dtype=complex)[:, order]
        return Spectrum(values=hamiltonian.energies[order].copy(), vectors=vectors)
    h = _as_matrix(hamiltonian)
    values, vectors = np.linalg.eigh(h)
    return Spectrum(values=values, vectors=vectors)


def _level_table(hamiltonian) -> np.ndarray:
    if isinstance(hamiltonian, DiagonalHamiltonian):
        return hamiltonian.energies
    return np.linalg.eigvalsh(_as_matrix(hamiltonian))


def _check_beta(beta: float, allow_zero: bool = False) -> float:
    beta = float(beta)
    floor_ok = beta >= 0 if allow_zero else beta > 0
    if not (np.isfinite(beta) and floor_ok):
        raise ValueError("inverse temperature must be nonnegative and finite"
                         if allow_zero else
                         "inverse temperature must be positive and finite")
    return beta


def log_partition(hamiltonian, beta: float) -> float:
    """log-sum-exp stable ``log Tr exp(-beta H)``."""
    beta = _check_beta(beta, allow_zero=True)
    energies = _level_table(hamiltonian)
    emin = float(np.min(energies))
    return float(np.log(np.sum(np.exp(-beta * (energies - emin)))) - beta * emin)


def free_energy(hamiltonian, beta: float) -> float:
    return -log_partition(hamiltonian, beta) / _check_beta(beta)


def gibbs(hamiltonian, beta: float) -> DensityState:
    """Thermal state ``exp(-beta H)/Z`` via shifted exponentials."""
    beta = _check_beta(beta, allow_zero=True)
    if isinstance(hamiltonian, DiagonalHamiltonian):
        shifted = hamiltonian.energies - np.min(hamiltonian.energies)
        weights = np.exp(-beta * shifted)
        return DensityState(populations=weights / np.sum(weights), basis=None,
                            provenance={"beta": beta})
    spec = eigendecompose(hamiltonian)
    shifted = spec.values - spec.values[0]
    weights = np.exp(-beta * shifted)
    return DensityState(populations=weights / np.sum(weights), basis=spec.vectors,
                        provenance={"beta": beta})


def von_neumann_entropy(state) -> float:
    """``-sum p log p`` in nats; populations at or below support cutoff drop out."""
    if isinstance(state, DensityState):
        p = state.populations
    else:
        p = _as_state(state).populations
    live = p > SUPPORT_TOL
    return max(float(-np.sum(p[live] * np.log(p[live]))), 0.0)


def relative_entropy(rho, sigma) -> float:
    """``D(rho || sigma)`` in nats, ``math.inf`` outside the reference support."""
    r, s = _as_state(rho), _as_state(sigma)
    if r.dim != s.dim:
        raise ValueError("states act on different spaces")
    p, q = r.populations, s.populations
    if r.basis is None and s.basis is None:
        mass_on = p
    else:
        rb = r.basis if r.basis is not None else np.eye(r.dim, dtype=complex)
        sb = s.basis if s.basis is not None else np.eye(s.dim, dtype=complex)
        overlap = np.abs(sb.conj().T @ rb) ** 2
        mass_on = overlap @ p
    dead = q <= SUPPORT_TOL
    if np.any(mass_on[dead] > LEAKED_MASS_TOL):
        return math.inf
    live_p = p > SUPPORT_TOL
    entropy_part = float(np.sum(p[live_p] * np.log(p[live_p])))
    live_q = ~dead
    cross_part = float(np.dot(mass_on[live_q], np.log(q[live_q])))
    return max(entropy_part - cross_part, 0.0)


def relative_entropy_down(rho, sigma) -> float:
    """Minimum of ``D(U rho U+ || sigma)`` over all unitaries.

    Achieved by pairing both spectra sorted non-increasingly, i.e. the
    largest population with the reference's largest population.
    """
    r, s = _as_state(rho), _as_state(sigma)
    if r.dim != s.dim:
        raise ValueError("states act on different spaces")
    p = np.sort(r.populations)[::-1]
    q = np.sort(s.populations)[::-1]
    dead = q <= SUPPORT_TOL
    if np.any(p[dead] > SUPPORT_TOL):
        return math.inf
    live = p > SUPPORT_TOL
    return max(float(np.sum(p[live] * (np.log(p[live]) - np.log(q[live])))), 0.0)


def min_relative_entropy(rho, sigma, unitary="identity") -> float:
    """Dissipation term of the efficiency bound for a control class.

    ``unitary`` is ``"full"`` (arbitrary unitaries allowed, sorted-spectra
    pairing), ``"commuting"`` or ``"identity"`` (no nontrivial rotation
    available), or an explicit unitary matrix to apply to ``rho``.
    """
    if isinstance(unitary, str):
        if unitary == "full":
            return relative_entropy_down(rho, sigma)
        if unitary in ("commuting", "identity"):
            return relative_entropy(rho, sigma)
        raise ValueError(f"unknown unitary class {unitary!r}")
    u = np.asarray(unitary, dtype=complex)
    if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > BASIS_UNITARY_TOL:
        raise ValueError("explicit rotation is not unitary")
    r = _as_state(rho)
    rb = r.basis if r.basis is not None else np.eye(r.dim, dtype=complex)
    rotated = DensityState(populations=r.populations, basis=u @ rb)
    return relative_entropy(rotated, sigma)


def trace_distance(rho, sigma) -> float:
    r, s = _as_state(rho), _as_state(sigma)
    if r.basis is None and s.basis is None:
        return 0.5 * float(np.sum(np.abs(r.populations - s.populations)))
    diff = r.matrix() - s.matrix()
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
