"""Dynamical Lie algebra closure and reachable unitary classes."""

import numpy as np
import pytest

from spinengine.control import (COMMUTING, FULL, INTERMEDIATE, GeneratorSet,
                                classify_unitary_class, heisenberg_chain_drift,
                                ising_chain_drift, lie_algebra_dimension,
                                site_controls)
from spinengine.hamiltonians import (SIGMA_X, SIGMA_Y, SIGMA_Z,
                                     embed_site_operator)


def random_two_local_drift(rng, n_sites=3):
    dim = 2 ** n_sites
    drift = np.zeros((dim, dim), dtype=complex)
    bonds = [(k, (k + 1) % n_sites) for k in range(n_sites)]
    for (i, k) in bonds:
        for a in (SIGMA_X, SIGMA_Y, SIGMA_Z):
            for b in (SIGMA_X, SIGMA_Y, SIGMA_Z):
                drift += rng.normal() * (embed_site_operator(a, i, n_sites)
                                         @ embed_site_operator(b, k, n_sites))
    return drift


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim))
                        + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


# --------------------------------------------------------------------------
# closure dimension


def test_single_spin_controls_close_su2():
    gens = GeneratorSet(None, (SIGMA_X, SIGMA_Z))
    assert lie_algebra_dimension(gens) == (3, True)
    assert classify_unitary_class(gens).kind == FULL


def test_abelian_diagonal_family():
    zz = np.kron(SIGMA_Z, SIGMA_Z)
    z0 = embed_site_operator(SIGMA_Z, 0, 2)
    z1 = embed_site_operator(SIGMA_Z, 1, 2)
    gens = GeneratorSet(zz, (z0, z1))
    result = lie_algebra_dimension(gens)
    assert result.dimension == 3
    assert classify_unitary_class(gens).kind == COMMUTING


def test_heisenberg_single_site_control_is_full():
    gens = GeneratorSet(heisenberg_chain_drift(2),
                        tuple(site_controls(2, 0, ("x", "z"))))
    result = classify_unitary_class(gens)
    assert result.kind == FULL
    assert result.dimension == 15
    assert result.stabilized


def test_ising_drift_with_z_controls_commutes():
    gens = GeneratorSet(ising_chain_drift(2),
                        tuple(site_controls(2, 0, ("z",))
                              + site_controls(2, 1, ("z",))))
    result = classify_unitary_class(gens)
    assert result.kind == COMMUTING
    assert result.dimension == 3


def test_drift_only_is_intermediate():
    gens = GeneratorSet(heisenberg_chain_drift(2))
    result = classify_unitary_class(gens)
    assert result.kind == INTERMEDIATE
    assert result.dimension == 1


def test_generic_two_local_three_chain_is_full():
    rng = np.random.default_rng(60)
    gens = GeneratorSet(random_two_local_drift(rng),
                        tuple(site_controls(3, 0, ("x", "z"))))
    result = classify_unitary_class(gens)
    assert result.kind == FULL
    assert result.dimension == 63


def test_symmetric_ring_control_stays_intermediate():
    # the isotropic 3-ring with controls on one site keeps the swap
    # symmetry of the other two sites, which caps the closure
    gens = GeneratorSet(heisenberg_chain_drift(3),
                        tuple(site_controls(3, 0, ("x", "z"))))
    result = classify_unitary_class(gens)
    assert result.kind == INTERMEDIATE
    assert 3 < result.dimension < 63


# --------------------------------------------------------------------------
# invariances


def test_dimension_invariant_under_basis_change():
    rng = np.random.default_rng(61)
    drift = heisenberg_chain_drift(2)
    controls = tuple(site_controls(2, 0, ("x", "z")))
    base = lie_algebra_dimension(GeneratorSet(drift, controls)).dimension
    u = random_unitary(rng, 4)
    rotated = GeneratorSet(u @ drift @ u.conj().T,
                           tuple(u @ c @ u.conj().T for c in controls))
    assert lie_algebra_dimension(rotated).dimension == base


def test_dimension_invariant_under_recombination():
    z0 = embed_site_operator(SIGMA_Z, 0, 2)
    z1 = embed_site_operator(SIGMA_Z, 1, 2)
    direct = lie_algebra_dimension(GeneratorSet(None, (z0, z1)))
    mixed = lie_algebra_dimension(GeneratorSet(None, (z0 + z1, 2.0 * z0 - z1)))
    assert direct.dimension == mixed.dimension


def test_more_controls_never_shrink_the_closure():
    drift = ising_chain_drift(2)
    small = GeneratorSet(drift, tuple(site_controls(2, 0, ("z",))))
    large = GeneratorSet(drift, tuple(site_controls(2, 0, ("z", "x"))))
    dim_small = lie_algebra_dimension(small).dimension
    dim_large = lie_algebra_dimension(large).dimension
    assert dim_large >= dim_small
    assert dim_large <= 15


def test_depth_cap_reports_unstabilized_rank():
    gens = GeneratorSet(None, (SIGMA_X, SIGMA_Z))
    result = lie_algebra_dimension(gens, max_depth=0)
    assert result == (2, False)
    assert not classify_unitary_class(gens, max_depth=0).stabilized


# --------------------------------------------------------------------------
# validation


def test_generator_set_validation():
    with pytest.raises(ValueError):
        GeneratorSet(None, ())
    with pytest.raises(ValueError):
        GeneratorSet(SIGMA_Z, (np.eye(4),))
    with pytest.raises(ValueError):
        GeneratorSet(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        GeneratorSet(np.eye(128))


def test_site_controls_validation():
    with pytest.raises(ValueError):
        site_controls(2, 0, ("w",))
    xs = site_controls(3, 1, ("x",))
    assert xs[0].shape == (8, 8)
