import numpy as np
import pytest

from evennet.filters import EVEN, FULL, PolyFilter, ppr_init
from evennet.graph import (
    LabelAssignment,
    build_graph,
    edge_homophily,
    normalized_laplacian_dense,
    unnormalized_laplacian_dense,
)
from evennet.spectral import (
    ConvergenceError,
    dirichlet_energy,
    eigendecompose,
    homophily_energy_residual,
    label_spectrum,
    ring_basis,
    ring_srl_gap,
    srl,
    srl_alignment_form,
)
from evennet.synth import random_regular_graph
from conftest import random_gnp, random_labels


def _ring(n):
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def test_eigendecompose_two_by_two():
    dec = eigendecompose(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert np.allclose(dec.eigenvalues, [0.0, 2.0], atol=1e-12)


def test_eigendecompose_ring6():
    dec = eigendecompose(normalized_laplacian_dense(_ring(6)))
    assert np.allclose(dec.eigenvalues, [0.0, 0.5, 0.5, 1.5, 1.5, 2.0], atol=1e-10)


def test_eigendecompose_reconstruction(rng):
    for _ in range(25):
        n = int(rng.integers(2, 41))
        m = rng.standard_normal((n, n))
        m = (m + m.T) / 2
        dec = eigendecompose(m)
        recon = dec.basis @ np.diag(dec.eigenvalues) @ dec.basis.T
        assert np.abs(recon - m).max() <= 1e-8
        assert np.abs(dec.basis.T @ dec.basis - np.eye(n)).max() <= 1e-9
        assert abs(dec.eigenvalues.sum() - np.trace(m)) <= 1e-9


def test_eigendecompose_matches_lapack_oracle(rng):
    m = rng.standard_normal((20, 20))
    m = (m + m.T) / 2
    ours = eigendecompose(m)
    reference = np.linalg.eigvalsh(m)
    assert np.abs(ours.eigenvalues - reference).max() <= 1e-9


def test_eigendecompose_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        eigendecompose(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_eigendecompose_deterministic(rng):
    m = rng.standard_normal((15, 15))
    m = (m + m.T) / 2
    a = eigendecompose(m)
    b = eigendecompose(m)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.basis, b.basis)


def test_label_spectrum_norm_preservation(rng):
    for _ in range(20):
        n = int(rng.integers(3, 40))
        g = random_gnp(rng, n, 0.4)
        dec = eigendecompose(normalized_laplacian_dense(g))
        dy = rng.choice([-1.0, 1.0], size=n)
        alpha = label_spectrum(dec, dy)
        assert abs(np.sum(alpha**2) - n) <= 1e-8


def test_label_spectrum_all_ones(rng):
    g = random_gnp(rng, 12, 0.5)
    dec = eigendecompose(normalized_laplacian_dense(g))
    alpha = label_spectrum(dec, np.ones(12))
    assert abs(np.sum(alpha**2) - 12) <= 1e-8


def test_label_spectrum_alternating_on_ring_basis():
    n = 10
    dec = ring_basis(n)
    dy = np.array([(-1.0) ** i for i in range(n)])
    alpha = label_spectrum(dec, dy)
    assert abs(alpha[-1] - np.sqrt(n)) <= 1e-12
    assert np.abs(alpha[:-1]).max() <= 1e-12


def test_label_spectrum_length_mismatch():
    dec = ring_basis(6)
    with pytest.raises(ValueError, match="length"):
        label_spectrum(dec, np.ones(5))


def test_srl_perfect_alignment(rng):
    n = 16
    lam = np.sort(rng.uniform(0, 2, n))
    alpha = rng.choice([-1.0, 1.0], n)
    f = PolyFilter(FULL, [1.0])  # constant filter, g == 1
    beta = 3.0 * alpha  # filtered spectrum proportional to alpha, c > 0
    assert srl(alpha, beta, f, lam) <= 1e-12


def test_srl_anti_alignment(rng):
    n = 16
    lam = np.sort(rng.uniform(0, 2, n))
    alpha = rng.choice([-1.0, 1.0], n)
    f = PolyFilter(FULL, [1.0])
    assert abs(srl(alpha, -2.0 * alpha, f, lam) - 4.0) <= 1e-12


def test_srl_two_closed_forms_agree(rng):
    for _ in range(50):
        n = int(rng.integers(3, 40))
        lam = np.sort(rng.uniform(0, 2, n))
        alpha = rng.choice([-1.0, 1.0], n)
        beta = rng.standard_normal(n)
        f = PolyFilter(FULL if rng.random() < 0.5 else EVEN, rng.standard_normal(4))
        assert abs(srl(alpha, beta, f, lam)
                   - srl_alignment_form(alpha, beta, f, lam)) <= 1e-10


def test_srl_annihilation_error():
    f = PolyFilter(FULL, [0.0])
    with pytest.raises(ValueError, match="annihilates"):
        srl(np.ones(4), np.ones(4), f, np.linspace(0, 2, 4))


def test_homophily_identity_regular(rng):
    for i, k in enumerate((3, 4, 6)):
        g = random_regular_graph(30, k, seed=100 + i)
        labels = random_labels(rng, 30, 2)
        assert homophily_energy_residual(g, labels, normalized=True) <= 1e-9


def test_homophily_identity_all_same_labels():
    g = random_regular_graph(20, 3, seed=5)
    labels = LabelAssignment.from_classes(np.zeros(20, dtype=int), 2)
    assert homophily_energy_residual(g, labels, normalized=True) <= 1e-9


def test_homophily_identity_arbitrary_graph(rng):
    for _ in range(10):
        n = int(rng.integers(6, 40))
        g = random_gnp(rng, n, 0.35)
        if g.num_edges == 0:
            continue
        labels = random_labels(rng, n, 2)
        assert homophily_energy_residual(g, labels, normalized=False) <= 1e-9


def test_homophily_identity_rejects_irregular():
    g = build_graph([(0, 1), (1, 2)], 3)
    labels = LabelAssignment.from_classes([0, 1, 0], 2)
    with pytest.raises(ValueError, match="regular"):
        homophily_energy_residual(g, labels, normalized=True)


def test_dirichlet_energy_examples():
    g = build_graph([(0, 1), (1, 2)], 3)
    assert dirichlet_energy(g, np.ones(3)) == 0.0
    single = build_graph([(0, 1)], 2)
    assert dirichlet_energy(single, np.array([1.0, -1.0])) == 4.0


def test_dirichlet_energy_exact_identity(rng):
    for _ in range(30):
        n = 40
        g = random_gnp(rng, n, 0.2)
        if g.num_edges == 0:
            continue
        labels = random_labels(rng, n, 2)
        dy = labels.label_difference()
        m = g.num_edges
        intra = round(edge_homophily(g, labels) * m)
        assert dirichlet_energy(g, dy) == 4 * (m - intra)


def test_dirichlet_matches_quadratic_form(rng):
    g = random_gnp(rng, 25, 0.3)
    dy = rng.choice([-1.0, 1.0], 25)
    lap = unnormalized_laplacian_dense(g)
    assert abs(dirichlet_energy(g, dy) - dy @ lap @ dy) <= 1e-9


def test_ring_basis_small():
    dec = ring_basis(4)
    assert np.allclose(dec.eigenvalues, [0.0, 1.0, 1.0, 2.0], atol=1e-12)
    assert np.abs(dec.basis.T @ dec.basis - np.eye(4)).max() <= 1e-10


def test_ring_basis_matches_laplacian(rng):
    for n in (4, 8, 12):
        dec = ring_basis(n)
        lap = normalized_laplacian_dense(_ring(n))
        recon = dec.basis @ np.diag(dec.eigenvalues) @ dec.basis.T
        assert np.abs(recon - lap).max() <= 1e-10


def test_ring_basis_constant_vector():
    dec = ring_basis(8)
    alpha = label_spectrum(dec, np.ones(8))
    assert abs(alpha[0] - np.sqrt(8)) <= 1e-12
    assert np.abs(alpha[1:]).max() <= 1e-12


def test_ring_basis_rejects_odd():
    with pytest.raises(ValueError, match="even"):
        ring_basis(7)


def test_ring_srl_gap_even_is_exactly_zero(rng):
    for _ in range(20):
        f = PolyFilter(EVEN, rng.standard_normal(int(rng.integers(1, 6))))
        assert ring_srl_gap(f, 16) == 0.0


def test_ring_srl_gap_matches_brute_force(rng):
    for n in (8, 16, 32):
        dec = ring_basis(n)
        dy_het = np.array([(-1.0) ** i for i in range(n)])
        dy_hom = np.ones(n)
        a_het = label_spectrum(dec, dy_het)
        a_hom = label_spectrum(dec, dy_hom)
        beta = 2.0 * np.ones(n)
        for _ in range(10):
            f = PolyFilter(FULL, rng.standard_normal(5))
            brute = srl(a_het, beta, f, dec.eigenvalues) - srl(a_hom, beta, f, dec.eigenvalues)
            assert abs(ring_srl_gap(f, n, beta_const=2.0) - brute) <= 1e-9


def test_ring_srl_gap_low_pass_positive():
    # a low-pass filter fits the uniform ring better than the alternating one
    f = ppr_init(0.1, 10, FULL)
    assert ring_srl_gap(f, 12) > 0.0


def test_jacobi_convergence_error_carries_residual():
    err = ConvergenceError(1e-3, 100)
    assert err.residual == 1e-3
    assert "1.000e-03" in str(err)


def test_eigendecompose_cap():
    with pytest.raises(ValueError, match="cap"):
        eigendecompose(np.eye(4), cap=3)


def test_ring_srl_gap_rejects_nonpositive_constant():
    with pytest.raises(ValueError, match="positive"):
        ring_srl_gap(PolyFilter(FULL, [1.0]), 8, beta_const=0.0)
