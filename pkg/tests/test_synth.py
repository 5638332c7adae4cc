import numpy as np
import pytest

from evennet.graph import edge_homophily
from evennet.synth import (
    CsbmParams,
    expected_csbm_homophily,
    generate_csbm,
    phi_to_lambda_mu,
    random_regular_graph,
    ring_graph,
    two_state_walk_probability,
)


def test_phi_inversion_reference_points():
    # published operating points at n=3000, f=2000 (rounded to two decimals)
    lam, mu = phi_to_lambda_mu(0.75, 3000, 2000)
    assert abs(lam - 1.90) <= 0.01
    assert abs(mu - 0.37) <= 0.01
    lam, mu = phi_to_lambda_mu(0.50, 3000, 2000)
    assert abs(lam - 1.46) <= 0.01
    assert abs(mu - 0.69) <= 0.01
    lam, mu = phi_to_lambda_mu(-0.75, 3000, 2000)
    assert abs(lam + 1.90) <= 0.01
    assert abs(mu - 0.37) <= 0.01


def test_phi_round_trip(rng):
    m = 3.0 * np.sqrt(3.0) / 2.0
    for _ in range(50):
        phi = float(rng.uniform(-0.95, 0.95))
        n, f = int(rng.integers(100, 3000)), int(rng.integers(100, 3000))
        lam, mu = phi_to_lambda_mu(phi, n, f)
        back = np.arctan(lam / (m * mu) * np.sqrt(n / f)) * 2.0 / np.pi
        assert abs(back - phi) <= 1e-9


def test_phi_rejects_out_of_range():
    with pytest.raises(ValueError, match="phi"):
        phi_to_lambda_mu(1.0, 100, 100)


def test_csbm_params_validation():
    with pytest.raises(ValueError, match="even"):
        CsbmParams(n=601, f=100, d=5.0, phi=0.75)
    # tiny signal budget makes the parameters uninformative
    with pytest.raises(ValueError, match="uninformative"):
        CsbmParams(n=600, f=400, d=5.0, phi=0.75, epsilon=0.5)


def test_csbm_homophily_reference_value():
    # large draw reproduces the published homophily level 0.92 at phi=0.75
    p = CsbmParams(n=3000, f=200, d=5.0, phi=0.75)
    g, _, labels = generate_csbm(p, 0)
    assert abs(edge_homophily(g, labels) - 0.92) <= 0.02
    assert abs(expected_csbm_homophily(p) - 0.9249) <= 1e-3


def test_csbm_heterophilic_homophily():
    p = CsbmParams(n=3000, f=200, d=5.0, phi=-0.75)
    g, _, labels = generate_csbm(p, 1)
    assert abs(edge_homophily(g, labels) - 0.08) <= 0.02


def test_csbm_structureless_case():
    # lambda = 0 needs f/n large enough to stay informative through mu
    p = CsbmParams(n=600, f=1200, d=5.0, phi=0.0)
    assert p.lam == 0.0
    g, _, labels = generate_csbm(p, 3)
    assert abs(edge_homophily(g, labels) - 0.5) <= 0.03
    assert abs(2.0 * g.num_edges / g.num_nodes - p.d) <= 0.1 * p.d


def test_csbm_balanced_classes():
    p = CsbmParams(n=400, f=50, d=5.0, phi=0.5)
    _, _, labels = generate_csbm(p, 5)
    assert labels.class_sizes.tolist() == [200, 200]


def test_csbm_deterministic():
    p = CsbmParams(n=200, f=30, d=4.0, phi=0.5)
    g1, x1, l1 = generate_csbm(p, 11)
    g2, x2, l2 = generate_csbm(p, 11)
    assert np.array_equal(g1.indices, g2.indices)
    assert np.array_equal(x1, x2)
    assert np.array_equal(l1.classes, l2.classes)


def test_csbm_shared_direction_transfers():
    from dataclasses import replace
    base = CsbmParams(n=600, f=30, d=4.0, phi=0.5, direction_seed=99)
    _, x1, l1 = generate_csbm(base, 1)
    _, x2, l2 = generate_csbm(base, 2)
    # class-mean difference vectors align when the direction is shared
    d1 = x1[l1.classes == 0].mean(0) - x1[l1.classes == 1].mean(0)
    d2 = x2[l2.classes == 0].mean(0) - x2[l2.classes == 1].mean(0)
    cos_shared = d1 @ d2 / (np.linalg.norm(d1) * np.linalg.norm(d2))
    assert cos_shared > 0.5
    _, x3, l3 = generate_csbm(replace(base, direction_seed=98), 2)
    d3 = x3[l3.classes == 0].mean(0) - x3[l3.classes == 1].mean(0)
    cos_unshared = d1 @ d3 / (np.linalg.norm(d1) * np.linalg.norm(d3))
    assert cos_shared > cos_unshared + 0.3


def test_ring_graph_labelings():
    g, labels = ring_graph(6, "alternating")
    assert edge_homophily(g, labels) == 0.0
    assert np.all(g.degrees == 2)
    g, labels = ring_graph(6, "same")
    assert edge_homophily(g, labels) == 1.0
    g, labels = ring_graph(10, "blocked")
    assert abs(edge_homophily(g, labels) - (1 - 2 / 10)) <= 1e-12
    with pytest.raises(ValueError, match="even"):
        ring_graph(7)


def test_random_regular_degrees():
    for n, k in ((10, 3), (20, 4), (24, 6)):
        g = random_regular_graph(n, k, seed=0)
        assert np.all(g.degrees == k)


def test_random_regular_k4_complete():
    g = random_regular_graph(4, 3, seed=0)
    assert g.num_edges == 6  # unique 3-regular graph on 4 nodes: K4


def test_random_regular_deterministic():
    a = random_regular_graph(100, 4, seed=42)
    b = random_regular_graph(100, 4, seed=42)
    assert np.array_equal(a.indices, b.indices)


def test_random_regular_rejects_infeasible():
    with pytest.raises(ValueError, match="even"):
        random_regular_graph(5, 3, seed=0)
    with pytest.raises(ValueError, match="0 < k < n"):
        random_regular_graph(4, 4, seed=0)


def test_two_state_probability_integral():
    # polynomial integration: int_0^1 p_3 dh = 1/2
    from numpy.polynomial.legendre import leggauss
    x, w = leggauss(32)
    h = (x + 1) / 2
    integral = float(np.sum(w / 2 * [two_state_walk_probability(hi, 3) for hi in h]))
    assert abs(integral - 0.5) <= 1e-12


def test_csbm_feature_signal_strength():
    p = CsbmParams(n=600, f=60, d=5.0, phi=0.5)
    seed = 17
    g, x, labels = generate_csbm(p, seed)
    rng = np.random.default_rng(seed)
    rng.permutation(p.n)
    u = rng.normal(0.0, 1.0 / np.sqrt(p.f), size=p.f)
    unit = u / np.linalg.norm(u)
    gap = x[labels.classes == 0] @ unit - 0.0
    gap = gap.mean() - (x[labels.classes == 1] @ unit).mean()
    expected = 2.0 * np.sqrt(p.mu / p.n) * np.linalg.norm(u)
    sigma = 2.0 / np.sqrt(p.n * p.f)
    assert abs(gap - expected) <= 3.0 * sigma


def test_csbm_rejects_invalid_edge_probability():
    # tiny n makes d + |lambda| sqrt(d) exceed n
    with pytest.raises(ValueError, match="probabilities"):
        CsbmParams(n=4, f=4, d=3.9, phi=0.9)
