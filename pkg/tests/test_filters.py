import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evennet.filters import (
    EVEN,
    FULL,
    PolyFilter,
    apply,
    apply_dense_operator,
    eval_function,
    even_odd_decompose,
    ppr_init,
)
from evennet.graph import build_graph, normalized_laplacian_dense
from evennet.spectral import eigendecompose
from conftest import random_gnp


def test_eval_even_at_center():
    f = PolyFilter(EVEN, [1.0, 1.0])
    assert eval_function(f, 1.0) == 1.0


def test_eval_even_symmetry_identity(rng):
    f = PolyFilter(EVEN, rng.standard_normal(5))
    assert abs(eval_function(f, 0.3) - eval_function(f, 1.7)) <= 1e-12


def test_eval_full_ppr_at_zero():
    f = ppr_init(0.1, 10, FULL)
    # geometric series: sum alpha (1-alpha)^k + (1-alpha)^K telescopes to 1
    assert abs(eval_function(f, 0.0) - 1.0) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8),
       st.floats(0.0, 2.0))
def test_even_filter_symmetric_about_one(coeffs, lam):
    f = PolyFilter(EVEN, np.array(coeffs))
    assert abs(eval_function(f, lam) - eval_function(f, 2.0 - lam)) <= 1e-9 * max(
        1.0, abs(eval_function(f, lam)))
    assert eval_function(f, 0.0) == eval_function(f, 2.0)


def test_apply_identity_filter(rng):
    g = random_gnp(rng, 12, 0.4)
    h = rng.standard_normal((12, 3))
    f = PolyFilter(EVEN, [1.0, 0.0, 0.0])
    assert np.array_equal(apply(f, g, h), h)


def test_apply_matches_spectral_oracle(rng):
    g = random_gnp(rng, 12, 0.45)
    h = rng.standard_normal((12, 2))
    dec = eigendecompose(normalized_laplacian_dense(g))
    for parity in (FULL, EVEN):
        f = PolyFilter(parity, rng.standard_normal(4))
        spectral = dec.basis @ np.diag(eval_function(f, dec.eigenvalues)) @ dec.basis.T @ h
        assert np.abs(apply(f, g, h) - spectral).max() <= 1e-9


def test_apply_even_squared_on_isolated_edge():
    g = build_graph([(0, 1)], 2)
    f = PolyFilter(EVEN, [0.0, 1.0])
    out = apply(f, g, np.array([1.0, 0.0]))
    assert np.allclose(out, [1.0, 0.0])  # P^2 = I on an isolated edge


def test_apply_linearity(rng):
    g = random_gnp(rng, 20, 0.3)
    f = PolyFilter(FULL, rng.standard_normal(5))
    h1, h2 = rng.standard_normal((2, 20, 2))
    a, b = 1.7, -0.4
    lhs = apply(f, g, a * h1 + b * h2)
    rhs = a * apply(f, g, h1) + b * apply(f, g, h2)
    assert np.abs(lhs - rhs).max() <= 1e-10


def test_apply_dense_operator_agrees(rng):
    g = random_gnp(rng, 10, 0.5)
    s = g.inv_sqrt_degrees()
    p = s[:, None] * g.adjacency().toarray() * s[None, :]
    h = rng.standard_normal((10, 2))
    f = PolyFilter(EVEN, rng.standard_normal(3))
    assert np.abs(apply(f, g, h) - apply_dense_operator(f, p, h)).max() <= 1e-12


def test_ppr_alpha_one_is_identity():
    for parity in (FULL, EVEN):
        f = ppr_init(1.0, 10, parity)
        assert f.coefficients[0] == 1.0
        assert np.all(f.coefficients[1:] == 0.0)


def test_ppr_full_profile():
    f = ppr_init(0.1, 10, FULL)
    assert abs(f.coefficients[0] - 0.1) <= 1e-15
    assert abs(f.coefficients[1] - 0.09) <= 1e-15
    assert len(f.coefficients) == 11


def test_ppr_full_sums_to_one(rng):
    for _ in range(20):
        alpha = float(rng.uniform(0.01, 1.0))
        order = int(rng.integers(1, 12))
        f = ppr_init(alpha, order, FULL)
        assert abs(f.coefficients.sum() - 1.0) <= 1e-12


def test_ppr_even_sums_to_one():
    f = ppr_init(0.1, 10, EVEN)
    assert len(f.coefficients) == 6
    assert abs(f.coefficients.sum() - 1.0) <= 1e-12


def test_ppr_rejects_bad_alpha():
    with pytest.raises(ValueError, match="alpha"):
        ppr_init(0.0, 5)
    with pytest.raises(ValueError, match="alpha"):
        ppr_init(1.5, 5)


def test_even_odd_decompose_pure_even():
    f = PolyFilter(FULL, [0.5, 0.0, -0.3, 0.0])
    even, odd = even_odd_decompose(f)
    grid = np.linspace(0, 2, 41)
    assert np.abs(odd(grid)).max() <= 1e-12
    assert np.abs(eval_function(even, grid) - eval_function(f, grid)).max() <= 1e-12


def test_even_odd_decompose_pure_odd():
    f = PolyFilter(FULL, [0.0, 1.0])  # g(lambda) = 1 - lambda
    even, odd = even_odd_decompose(f)
    assert np.abs(eval_function(even, np.linspace(0, 2, 21))).max() <= 1e-12
    assert odd(0.0) == 1.0
    assert odd(2.0) == -1.0


def test_even_odd_decompose_halving_identity(rng):
    f = PolyFilter(FULL, rng.standard_normal(7))
    even, odd = even_odd_decompose(f)
    grid = np.linspace(0, 2, 101)
    target = (eval_function(f, grid) + eval_function(f, 2.0 - grid)) / 2.0
    assert np.abs(eval_function(even, grid) - target).max() <= 1e-12
    recon = eval_function(even, grid) + odd(grid)
    assert np.abs(recon - eval_function(f, grid)).max() <= 1e-12


def test_filter_json_round_trip():
    f = PolyFilter(EVEN, [0.25, -1.5, 3.0])
    blob = json.dumps(f.to_json_dict())
    g = PolyFilter.from_json_dict(json.loads(blob))
    assert g.parity == f.parity
    assert np.array_equal(g.coefficients, f.coefficients)


def test_even_odd_decompose_rejects_even_input():
    with pytest.raises(ValueError, match="full"):
        even_odd_decompose(PolyFilter(EVEN, [1.0, 0.5]))


def test_eval_function_scalar_and_vector_agree(rng):
    f = PolyFilter(FULL, rng.standard_normal(5))
    grid = np.linspace(0, 2, 7)
    vector = eval_function(f, grid)
    for lam, expected in zip(grid, vector):
        assert eval_function(f, float(lam)) == expected


def test_poly_filter_validation():
    with pytest.raises(ValueError, match="parity"):
        PolyFilter("odd", [1.0])
    with pytest.raises(ValueError, match="coefficients"):
        PolyFilter(FULL, [])
    assert PolyFilter(EVEN, [1.0, 2.0, 3.0]).max_power == 4
    assert PolyFilter(FULL, [1.0, 2.0, 3.0]).max_power == 2
